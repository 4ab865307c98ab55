//! The ε-subdifferential of `|x|` computed three ways.
//!
//! Run with `cargo run --example absolute_value`.

use plq_epssub::{build_graph, eps_sub_reference, eps_subdifferential, PlqFunction};

fn main() -> plq_epssub::Result<()> {
    let abs = PlqFunction::new(&[[0.0, 0.0, -1.0, 0.0], [f64::INFINITY, 0.0, 1.0, 0.0]])?;
    let eps = 0.5;

    let graph = build_graph(&abs, eps)?;
    println!("lower-bound table for |x|, eps = {eps}:");
    print!("{}", graph.lower.to_csv());

    println!(
        "\n{:>6}  {:>16}  {:>16}  {:>16}",
        "x", "logarithmic", "graph", "reference"
    );
    for x in [-2.0, -0.5, 0.0, 0.25, 0.5, 1.0, 2.0] {
        println!(
            "{:>6}  {:>16}  {:>16}  {:>16}",
            x,
            eps_subdifferential(&abs, x, eps)?.to_string(),
            graph.eval(x).to_string(),
            eps_sub_reference(&abs, x, eps)?.to_string(),
        );
    }
    Ok(())
}
