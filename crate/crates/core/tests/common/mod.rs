#![allow(dead_code)]

use plq_epssub::{random_convex_plq, rel_close, Interval, PlqFunction, RandomShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EPSILONS: [f64; 4] = [1e-3, 0.1, 1.0, 10.0];
pub const INF: f64 = f64::INFINITY;

/// Random functions with at most 50 pieces, deterministic per seed.
pub fn corpus(count: usize, seed: u64) -> Vec<PlqFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = RandomShape::default();
    (0..count)
        .map(|_| random_convex_plq(&mut rng, &shape))
        .collect()
}

/// Query points for `f`: mostly uniform over the domain (clipped to a window around
/// the breakpoints), plus breakpoints, domain ends and a point outside the domain.
pub fn query_points(f: &PlqFunction, count: usize, rng: &mut impl Rng) -> Vec<f64> {
    let dom = f.domain();
    let finite: Vec<f64> = f
        .pieces()
        .iter()
        .map(|p| p.x)
        .filter(|x| x.is_finite())
        .collect();
    let (span_lo, span_hi) = match (finite.first(), finite.last()) {
        (Some(&lo), Some(&hi)) => (lo - 3.0, hi + 3.0),
        _ => (-5.0, 5.0),
    };
    let lo = dom.lo.max(span_lo);
    let hi = dom.hi.min(span_hi);
    let mut xs = Vec::with_capacity(count);
    while xs.len() < count {
        let pick = rng.gen_range(0..10);
        let x = match pick {
            0 if !finite.is_empty() => finite[rng.gen_range(0..finite.len())],
            1 if dom.lo.is_finite() => dom.lo,
            2 if dom.hi.is_finite() => dom.hi,
            3 if dom.lo.is_finite() && rng.gen_bool(0.5) => dom.lo - 0.5,
            _ if lo < hi => rng.gen_range(lo..=hi),
            _ => lo,
        };
        xs.push(x);
    }
    xs
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Endpoint-wise relative agreement; infinite endpoints must match exactly.
pub fn intervals_close(a: Interval, b: Interval, tol: f64) -> bool {
    if a.is_empty() || b.is_empty() {
        return a.is_empty() && b.is_empty();
    }
    rel_close(a.lo(), b.lo(), tol) && rel_close(a.hi(), b.hi(), tol)
}
