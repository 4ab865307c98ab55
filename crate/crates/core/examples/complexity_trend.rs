//! Per-query cost of the logarithmic search against the linear reference, and the
//! linear cost of the graph sweep, as `n` grows tenfold.
//!
//! Run with `cargo run --release --example complexity_trend`.

use plq_epssub::bench::{format_report, run_bench};

fn main() {
    let rows = run_bench(&[1_000, 4_000, 10_000, 40_000], 101, 1, 1.0);
    print!("{}", format_report(&rows));
}
