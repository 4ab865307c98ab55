//! Pointwise queries on a function read from the PLQ text format.
//!
//! Run with `cargo run --example pointwise_query`.

use plq_epssub::{eps_subdifferential, parse_plq, support_line};

const SOURCE: &str = "\
# x^2 on [0, inf), +inf to the left
0    0 0 inf
inf  1 0 0
";

fn main() -> plq_epssub::Result<()> {
    let f = parse_plq(SOURCE)?;
    println!("domain: [{}, {}]", f.domain().lo, f.domain().hi);

    for (x, eps) in [(-1.0, 1.0), (0.0, 1.0), (0.5, 1.0), (2.0, 0.01), (2.0, 1.0)] {
        let interval = eps_subdifferential(&f, x, eps)?;
        print!(
            "f({x}) = {:<5} eps = {eps:<5} ∂_ε f = {interval}",
            f.eval(x)
        );
        if let Ok(line) = support_line(&f, x, eps) {
            print!("   support line s -> {} s {:+}", line.slope, line.intercept);
        }
        println!();
    }
    Ok(())
}
