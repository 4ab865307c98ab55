//! The lower-bound table and the closed form of each of its rows.
//!
//! Run with `cargo run --example graph_table`.

use plq_epssub::{build_lower_table, ClosedForm, PlqFunction, RowKind};

fn main() -> plq_epssub::Result<()> {
    let inf = f64::INFINITY;
    // x^2 up to 1, then slope 3 until 2, then 0.5 x^2 + x
    let f = PlqFunction::new(&[
        [1.0, 1.0, 0.0, 0.0],
        [2.0, 0.0, 3.0, -2.0],
        [inf, 0.5, 1.0, 0.0],
    ])?;
    let table = build_lower_table(&f, 0.5)?;
    print!("{}", table.to_csv());

    println!();
    let mut prev = f64::NEG_INFINITY;
    for (k, row) in table.rows().iter().enumerate() {
        let kind = match row.t {
            RowKind::Smooth => "tangent inside a quadratic piece",
            RowKind::Kink => "tangent at a breakpoint",
            RowKind::Constant => "constant",
        };
        let form = match table.classify_piece(k)? {
            ClosedForm::Constant(v) => format!("{v}"),
            ClosedForm::Rational { a, b, c, pole } => {
                format!("({a} x^2 + {b} x + {c}) / (x - {pole})")
            }
            ClosedForm::SqrtQuadratic {
                alpha,
                beta,
                sign,
                qa,
                qb,
                qc,
            } => format!(
                "{alpha} x + {beta} {} sqrt({qa} x^2 + {qb} x + {qc})",
                if sign < 0.0 { "-" } else { "+" }
            ),
            ClosedForm::OutsideDomain => "outside the domain".to_string(),
        };
        println!("({prev}, {}]  {kind}: {form}", row.x);
        prev = row.x;
    }
    Ok(())
}
