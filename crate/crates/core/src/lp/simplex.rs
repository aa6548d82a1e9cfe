//! Two-phase dense tableau simplex with Bland's rule.
//!
//! Phase one minimizes the sum of artificial variables; phase two optimizes
//! the real objective with artificial columns barred from entering. Bland's
//! rule (lowest-index entering column, lowest-index leaving variable on ratio
//! ties) keeps degenerate problems from cycling.

use super::{LinearProgramSpec, LpSolution, LpStatus, Objective, RowSense};

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    /// Entries smaller than this are treated as zero when pricing and pivoting.
    pub pivot_tolerance: f64,
    /// Largest accepted violation of any constraint at the returned point.
    pub feasibility_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            pivot_tolerance: 1e-11,
            feasibility_tolerance: 1e-9,
            max_iterations: 100_000,
        }
    }
}

pub fn solve_lp(spec: &LinearProgramSpec) -> LpSolution {
    solve_lp_with(spec, SimplexOptions::default())
}

pub fn solve_lp_with(spec: &LinearProgramSpec, opts: SimplexOptions) -> LpSolution {
    let n = spec.num_variables();
    let failure = |status, iterations| LpSolution {
        status,
        values: vec![0.0; n],
        objective: f64::NAN,
        iterations,
    };
    if spec.validate().is_err() {
        return failure(LpStatus::NumericalFailure, 0);
    }

    let mut tab = Tableau::standard_form(spec, opts.pivot_tolerance);

    // phase one
    let mut phase_one_cost = vec![0.0; tab.cols];
    phase_one_cost[tab.artificial_start..].fill(1.0);
    tab.set_cost(&phase_one_cost);
    match tab.run(tab.cols, opts.max_iterations) {
        Outcome::Optimal => {}
        // phase one is bounded below by zero
        Outcome::Unbounded | Outcome::IterationLimit => {
            return failure(LpStatus::NumericalFailure, tab.iterations)
        }
    }
    let infeasibility = -tab.cost[tab.cols];
    let scale = spec
        .constraints
        .iter()
        .map(|r| r.rhs.abs())
        .fold(1.0, f64::max);
    if infeasibility > opts.feasibility_tolerance * scale {
        return failure(LpStatus::Infeasible, tab.iterations);
    }
    tab.expel_artificials();

    // phase two
    let sign = match spec.objective_sense {
        Objective::Minimize => 1.0,
        Objective::Maximize => -1.0,
    };
    let mut cost = vec![0.0; tab.cols];
    for (c, &obj) in spec.objective.iter().enumerate() {
        cost[c] = sign * obj;
    }
    tab.set_cost(&cost);
    let status = match tab.run(tab.artificial_start, opts.max_iterations) {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
        Outcome::IterationLimit => LpStatus::NumericalFailure,
    };
    if status != LpStatus::Optimal {
        return failure(status, tab.iterations);
    }

    let mut values = vec![0.0; n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            values[b] = tab.rows[r][tab.cols];
        }
    }
    for v in values.iter_mut() {
        if *v < 0.0 && *v > -opts.feasibility_tolerance {
            *v = 0.0;
        }
    }
    if spec.max_violation(&values) > opts.feasibility_tolerance {
        return failure(LpStatus::NumericalFailure, tab.iterations);
    }
    LpSolution {
        status,
        objective: spec.objective_value(&values),
        values,
        iterations: tab.iterations,
    }
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Tableau {
    /// Each row holds `cols` coefficients followed by the right-hand side.
    rows: Vec<Vec<f64>>,
    /// Reduced costs followed by minus the current objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
    artificial_start: usize,
    eps: f64,
    iterations: usize,
}

impl Tableau {
    fn standard_form(spec: &LinearProgramSpec, eps: f64) -> Self {
        let n = spec.num_variables();
        // normalize to non-negative right-hand sides
        let rows: Vec<(Vec<f64>, RowSense, f64)> = spec
            .constraints
            .iter()
            .map(|row| {
                if row.rhs < 0.0 {
                    let flipped = match row.sense {
                        RowSense::Le => RowSense::Ge,
                        RowSense::Ge => RowSense::Le,
                        RowSense::Eq => RowSense::Eq,
                    };
                    (row.coeffs.iter().map(|a| -a).collect(), flipped, -row.rhs)
                } else {
                    (row.coeffs.clone(), row.sense, row.rhs)
                }
            })
            .collect();
        let slack_count = rows.iter().filter(|(_, s, _)| *s != RowSense::Eq).count();
        let artificial_count = rows.iter().filter(|(_, s, _)| *s != RowSense::Le).count();
        let artificial_start = n + slack_count;
        let cols = artificial_start + artificial_count;

        let mut table = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let (mut slack, mut artificial) = (n, artificial_start);
        for (coeffs, sense, rhs) in rows {
            let mut line = vec![0.0; cols + 1];
            line[..n].copy_from_slice(&coeffs);
            line[cols] = rhs;
            match sense {
                RowSense::Le => {
                    line[slack] = 1.0;
                    basis.push(slack);
                    slack += 1;
                }
                RowSense::Ge => {
                    line[slack] = -1.0;
                    slack += 1;
                    line[artificial] = 1.0;
                    basis.push(artificial);
                    artificial += 1;
                }
                RowSense::Eq => {
                    line[artificial] = 1.0;
                    basis.push(artificial);
                    artificial += 1;
                }
            }
            table.push(line);
        }
        Tableau {
            rows: table,
            cost: vec![0.0; cols + 1],
            basis,
            cols,
            artificial_start,
            eps,
            iterations: 0,
        }
    }

    /// Installs `cost` as the objective and prices out the current basis.
    fn set_cost(&mut self, cost: &[f64]) {
        self.cost.iter_mut().for_each(|c| *c = 0.0);
        self.cost[..self.cols].copy_from_slice(cost);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (c, a) in self.cost.iter_mut().zip(&self.rows[r]) {
                    *c -= cb * a;
                }
            }
        }
    }

    /// Minimizes over columns `< allowed` until no reduced cost is negative.
    fn run(&mut self, allowed: usize, max_iterations: usize) -> Outcome {
        loop {
            let Some(enter) = (0..allowed).find(|&c| self.cost[c] < -self.eps) else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = row[enter];
                if a > self.eps {
                    let ratio = row[self.cols] / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((best, best_ratio)) => {
                            let tie = (ratio - best_ratio).abs() <= self.eps * best_ratio.abs().max(1.0);
                            if (tie && self.basis[r] < self.basis[best]) || (!tie && ratio < best_ratio) {
                                Some((r, ratio))
                            } else {
                                Some((best, best_ratio))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Outcome::Unbounded;
            };
            if self.iterations >= max_iterations {
                return Outcome::IterationLimit;
            }
            self.pivot(row, enter);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        self.iterations += 1;
        let pivot = self.rows[row][col];
        for a in self.rows[row].iter_mut() {
            *a /= pivot;
        }
        self.rows[row][col] = 1.0;
        let pivot_row = self.rows[row].clone();
        for (r, line) in self.rows.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let factor = line[col];
            if factor != 0.0 {
                for (a, p) in line.iter_mut().zip(&pivot_row) {
                    *a -= factor * p;
                }
                line[col] = 0.0;
            }
        }
        let factor = self.cost[col];
        if factor != 0.0 {
            for (a, p) in self.cost.iter_mut().zip(&pivot_row) {
                *a -= factor * p;
            }
            self.cost[col] = 0.0;
        }
        // clamp round-off in the right-hand side
        for line in self.rows.iter_mut() {
            let rhs = &mut line[self.cols];
            if *rhs < 0.0 && *rhs > -self.eps {
                *rhs = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Pivots basic artificial variables (all at zero after a feasible phase
    /// one) out of the basis; rows with no structural entry are redundant and
    /// dropped.
    fn expel_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.artificial_start {
                let col = (0..self.artificial_start)
                    .filter(|&c| self.rows[r][c].abs() > self.eps)
                    .max_by(|&a, &b| self.rows[r][a].abs().total_cmp(&self.rows[r][b].abs()));
                match col {
                    Some(c) => self.pivot(r, c),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }
}
