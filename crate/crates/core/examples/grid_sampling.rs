//! Samples the graph of the ε-subdifferential on a grid and writes plot-ready CSV.
//!
//! Run with `cargo run --example grid_sampling -- [OUT]`; prints to stdout when no
//! path is given.

use plq_epssub::{build_graph, generate_convex_plq};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = generate_convex_plq(9, 5);
    let eps = 0.25;
    let graph = build_graph(&f, eps)?;

    let m = 201;
    let xs: Vec<f64> = (0..m)
        .map(|k| -6.0 + 12.0 * k as f64 / (m - 1) as f64)
        .collect();
    let bands = graph.eval_grid(&xs)?;

    let mut csv = String::from("x,lower,upper,f\n");
    for (x, band) in xs.iter().zip(&bands) {
        csv.push_str(&format!("{x},{},{},{}\n", band.lo(), band.hi(), f.eval(*x)));
    }
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
