use std::fmt::Write;

use super::{LinearProgramSpec, Objective, RowSense};

fn write_expr(out: &mut String, names: &[String], coeffs: &[f64]) {
    let mut first = true;
    for (name, &c) in names.iter().zip(coeffs) {
        if c == 0.0 {
            continue;
        }
        let sign = if c < 0.0 { "-" } else { "+" };
        if first {
            if c < 0.0 {
                out.push_str(" -");
            }
        } else {
            let _ = write!(out, " {sign}");
        }
        let magnitude = c.abs();
        if magnitude == 1.0 {
            let _ = write!(out, " {name}");
        } else {
            let _ = write!(out, " {magnitude} {name}");
        }
        first = false;
    }
    if first {
        let _ = write!(out, " 0 {}", names.first().map(String::as_str).unwrap_or("x"));
    }
}

/// Renders the LP in CPLEX LP text format. All variables carry the implicit
/// lower bound of zero, which is also spelled out in the `Bounds` section.
pub fn to_lp_format(spec: &LinearProgramSpec) -> String {
    let mut out = String::new();
    out.push_str(match spec.objective_sense {
        Objective::Maximize => "Maximize\n",
        Objective::Minimize => "Minimize\n",
    });
    out.push_str(" obj:");
    write_expr(&mut out, &spec.variables, &spec.objective);
    out.push_str("\nSubject To\n");
    for row in &spec.constraints {
        let _ = write!(out, " {}:", row.name);
        write_expr(&mut out, &spec.variables, &row.coeffs);
        let op = match row.sense {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for name in &spec.variables {
        let _ = writeln!(out, " {name} >= 0");
    }
    out.push_str("End\n");
    out
}
