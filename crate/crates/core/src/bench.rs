//! Wall-clock comparison of the logarithmic query against the linear reference.

use std::fmt::Write as _;
use std::hint::black_box;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::generate::generate_convex_plq;
use crate::graph::build_lower_table_instrumented;
use crate::oracle::eps_sub_reference;
use crate::plq::PlqFunction;
use crate::point::eps_subdifferential;

/// Shortest span a single timing sample is stretched to by repetition.
const MIN_SAMPLE: Duration = Duration::from_micros(50);

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub queries: usize,
    /// Median time of one `eps_subdifferential` call.
    pub fast: Option<Duration>,
    /// Median time of one `eps_sub_reference` call.
    pub reference: Option<Duration>,
    pub build: Duration,
    pub build_ops: usize,
}

/// Runs `op` enough times to span [`MIN_SAMPLE`] and returns the time per call.
pub fn time_per_call<T>(mut op: impl FnMut() -> T) -> Duration {
    let mut reps: u32 = 1;
    loop {
        let start = Instant::now();
        for _ in 0..reps {
            black_box(op());
        }
        let elapsed = start.elapsed();
        if elapsed >= MIN_SAMPLE || reps >= 1 << 20 {
            return elapsed / reps;
        }
        let grow = (MIN_SAMPLE.as_nanos() / elapsed.as_nanos().max(1)) as u32 + 1;
        reps = reps.saturating_mul(grow.clamp(2, 64));
    }
}

pub fn median(mut samples: Vec<Duration>) -> Option<Duration> {
    if samples.is_empty() {
        return None;
    }
    samples.sort_unstable();
    let m = samples.len() / 2;
    Some(if samples.len() % 2 == 1 {
        samples[m]
    } else {
        (samples[m - 1] + samples[m]) / 2
    })
}

/// `count` query points spread uniformly over the breakpoint span of `f`.
pub fn query_points(f: &PlqFunction, count: usize, rng: &mut impl Rng) -> Vec<f64> {
    let finite: Vec<f64> = f
        .pieces()
        .iter()
        .map(|p| p.x)
        .filter(|x| x.is_finite())
        .collect();
    let (lo, hi) = match (finite.first(), finite.last()) {
        (Some(&lo), Some(&hi)) if lo < hi => (lo, hi),
        (Some(&x), _) => (x - 1.0, x + 1.0),
        _ => (-1.0, 1.0),
    };
    (0..count).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Median per-query times of both algorithms on the same points.
pub fn time_queries(
    f: &PlqFunction,
    points: &[f64],
    eps: f64,
) -> (Option<Duration>, Option<Duration>) {
    let fast = points
        .iter()
        .map(|&x| time_per_call(|| eps_subdifferential(f, x, eps)))
        .collect();
    let reference = points
        .iter()
        .map(|&x| time_per_call(|| eps_sub_reference(f, x, eps)))
        .collect();
    (median(fast), median(reference))
}

/// Build time (median of `reps` runs) and operation count of the graph sweep.
pub fn time_build(f: &PlqFunction, eps: f64, reps: usize) -> (Duration, usize) {
    let shared = Arc::new(f.clone());
    let mut ops = 0;
    let samples = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            let (table, stats) =
                build_lower_table_instrumented(shared.clone(), eps).expect("eps is positive");
            let elapsed = start.elapsed();
            black_box(table);
            ops = stats.total();
            elapsed
        })
        .collect();
    (median(samples).unwrap_or_default(), ops)
}

pub fn run_bench(sizes: &[usize], queries: usize, seed: u64, eps: f64) -> Vec<BenchRow> {
    sizes
        .iter()
        .map(|&n| {
            let f = generate_convex_plq(n.max(1), seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
            let points = query_points(&f, queries, &mut rng);
            let (fast, reference) = time_queries(&f, &points, eps);
            let (build, build_ops) = time_build(&f, eps, 5);
            BenchRow {
                n,
                queries,
                fast,
                reference,
                build,
                build_ops,
            }
        })
        .collect()
}

fn fmt_duration(d: Option<Duration>) -> String {
    match d {
        Some(d) => format!("{:.3}", d.as_secs_f64() * 1e6),
        None => "-".to_string(),
    }
}

fn fmt_ratio(a: Option<Duration>, b: Option<Duration>) -> String {
    match (a, b) {
        (Some(a), Some(b)) if a.as_nanos() > 0 => {
            format!("{:.2}", b.as_secs_f64() / a.as_secs_f64())
        }
        _ => "-".to_string(),
    }
}

/// Plain-text table of the rows, with growth factors relative to the first row.
pub fn format_report(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>8} {:>8} {:>12} {:>14} {:>12} {:>10} {:>10} {:>10} {:>10}",
        "n",
        "queries",
        "fast_us",
        "reference_us",
        "build_us",
        "build_ops",
        "fast_x",
        "ref_x",
        "ops_x"
    );
    let first = rows.first();
    for r in rows {
        let ops_x = first
            .filter(|f| f.build_ops > 0)
            .map(|f| format!("{:.2}", r.build_ops as f64 / f.build_ops as f64))
            .unwrap_or_else(|| "-".to_string());
        let _ = writeln!(
            out,
            "{:>8} {:>8} {:>12} {:>14} {:>12} {:>10} {:>10} {:>10} {:>10}",
            r.n,
            r.queries,
            fmt_duration(r.fast),
            fmt_duration(r.reference),
            fmt_duration(Some(r.build)),
            r.build_ops,
            fmt_ratio(first.and_then(|f| f.fast), r.fast),
            fmt_ratio(first.and_then(|f| f.reference), r.reference),
            ops_x,
        );
    }
    out
}
