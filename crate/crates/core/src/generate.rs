//! Random convex PLQ functions for tests and benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::plq::{Piece, PlqFunction};
use crate::tolerance::Tolerance;

const INF: f64 = f64::INFINITY;

/// A convex PLQ function on all of R with `pieces` rows that alternate between
/// quadratic (even rows) and linear (odd rows). Deterministic per seed.
///
/// Curvatures are drawn from `[0.1, 2]` and breakpoint gaps from `[0.5, 1.5]`.
/// Slopes increase across breakpoints by either nothing or a jump in `[0.1, 0.5]`.
pub fn generate_convex_plq(pieces: usize, seed: u64) -> PlqFunction {
    assert!(pieces >= 1, "need at least one piece");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if pieces == 1 {
        let a = rng.gen_range(0.1..=2.0);
        let b = rng.gen_range(-1.0..=1.0);
        let c = rng.gen_range(-1.0..=1.0);
        return PlqFunction::new(&[[INF, a, b, c]]).expect("single quadratic is valid");
    }

    let gaps: Vec<f64> = (0..pieces - 2).map(|_| rng.gen_range(0.5..=1.5)).collect();
    let mut x = -0.5 * gaps.iter().sum::<f64>();
    let mut breaks = Vec::with_capacity(pieces - 1);
    breaks.push(x);
    for g in &gaps {
        x += g;
        breaks.push(x);
    }

    let mut rows: Vec<Piece> = Vec::with_capacity(pieces);
    let t0 = breaks[0];
    let a0 = rng.gen_range(0.1..=2.0);
    rows.push(Piece::new(t0, a0, -2.0 * a0 * t0, a0 * t0 * t0));
    for k in 1..pieces {
        let t = breaks[k - 1];
        let prev = rows[k - 1];
        let y = prev.value(t);
        let jump = if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.1..=0.5)
        };
        let slope = prev.slope(t) + jump;
        let right = breaks.get(k).copied().unwrap_or(INF);
        let a = if k % 2 == 0 {
            rng.gen_range(0.1..=2.0)
        } else {
            0.0
        };
        rows.push(anchored(right, a, slope, y, t));
    }
    center_slopes(&mut rows);
    PlqFunction::from_pieces(rows, Tolerance::default()).expect("generated function is valid")
}

/// Piece with curvature `a`, slope `slope` and value `y` at the anchor `q`.
fn anchored(right: f64, a: f64, slope: f64, y: f64, q: f64) -> Piece {
    let b = slope - 2.0 * a * q;
    let c = y - (a * q + b) * q;
    Piece::new(right, a, b, c)
}

/// Subtracts the mid-range slope so the minimizer sits inside the breakpoint span.
fn center_slopes(rows: &mut [Piece]) {
    let finite: Vec<&Piece> = rows.iter().filter(|p| !p.is_infinite()).collect();
    let (Some(first), Some(last)) = (finite.first(), finite.last()) else {
        return;
    };
    let lo_x = rows.iter().map(|p| p.x).find(|x| x.is_finite());
    let hi_x = rows.iter().map(|p| p.x).rfind(|x| x.is_finite());
    let (Some(lo_x), Some(hi_x)) = (lo_x, hi_x) else {
        return;
    };
    let kappa = 0.5 * (first.slope(lo_x) + last.slope(hi_x));
    for p in rows.iter_mut().filter(|p| !p.is_infinite()) {
        p.b -= kappa;
    }
}

/// Shape knobs for [`random_convex_plq`].
#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub max_pieces: usize,
    /// Probability that a piece is quadratic.
    pub quadratic_prob: f64,
    /// Probability of a slope jump at each interior breakpoint.
    pub kink_prob: f64,
    pub left_bounded_prob: f64,
    pub right_bounded_prob: f64,
    /// Probability of a degenerate one-row function (needle, line, parabola).
    pub degenerate_prob: f64,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            max_pieces: 50,
            quadratic_prob: 0.5,
            kink_prob: 0.5,
            left_bounded_prob: 0.25,
            right_bounded_prob: 0.25,
            degenerate_prob: 0.06,
        }
    }
}

/// A random convex PLQ function mixing bounded and unbounded domains, linear and
/// quadratic pieces, and smooth or kinked breakpoints.
pub fn random_convex_plq<R: Rng + ?Sized>(rng: &mut R, shape: &RandomShape) -> PlqFunction {
    let tol = Tolerance::default();
    if rng.gen_bool(shape.degenerate_prob) {
        let row = match rng.gen_range(0..3) {
            0 => [rng.gen_range(-3.0..3.0), 0.0, 0.0, rng.gen_range(-2.0..2.0)],
            1 => [INF, 0.0, rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)],
            _ => [
                INF,
                rng.gen_range(0.05..2.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-2.0..2.0),
            ],
        };
        return PlqFunction::with_tolerance(&[row], tol).expect("one-row function is valid");
    }

    let m = rng.gen_range(1..=shape.max_pieces.max(1));
    let lb = rng.gen_bool(shape.left_bounded_prob);
    let rb = rng.gen_bool(shape.right_bounded_prob);
    let nbreaks = m - 1 + lb as usize + rb as usize;

    let gaps: Vec<f64> = (0..nbreaks).map(|_| rng.gen_range(0.2..=1.2)).collect();
    let mut x = -0.5 * gaps.iter().sum::<f64>() + rng.gen_range(-1.0..=1.0);
    let breaks: Vec<f64> = gaps
        .iter()
        .map(|g| {
            let t = x;
            x += g;
            t
        })
        .collect();

    let left_end = |j: usize| -> f64 {
        if lb {
            breaks[j]
        } else if j == 0 {
            f64::NEG_INFINITY
        } else {
            breaks[j - 1]
        }
    };
    let right_end = |j: usize| -> f64 {
        let k = if lb { j + 1 } else { j };
        breaks.get(k).copied().unwrap_or(INF)
    };

    let mut finite = Vec::with_capacity(m);
    for j in 0..m {
        let a = if rng.gen_bool(shape.quadratic_prob) {
            rng.gen_range(0.05..=1.0)
        } else {
            0.0
        };
        let (l, r) = (left_end(j), right_end(j));
        let piece = if j == 0 {
            let q = if l.is_finite() {
                l
            } else if r.is_finite() {
                r
            } else {
                0.0
            };
            anchored(
                r,
                a,
                rng.gen_range(-2.0..=2.0),
                rng.gen_range(-1.0..=1.0),
                q,
            )
        } else {
            let prev: &Piece = &finite[j - 1];
            let jump = if rng.gen_bool(shape.kink_prob) {
                rng.gen_range(0.05..=1.5)
            } else {
                0.0
            };
            anchored(r, a, prev.slope(l) + jump, prev.value(l), l)
        };
        finite.push(piece);
    }
    center_slopes(&mut finite);
    let shift = rng.gen_range(-1.0..=1.0);
    for p in finite.iter_mut() {
        p.b += shift;
    }

    let mut rows = Vec::with_capacity(m + 2);
    if lb {
        rows.push(Piece::new(breaks[0], 0.0, 0.0, INF));
    }
    rows.extend(finite);
    if rb {
        rows.push(Piece::new(INF, 0.0, 0.0, INF));
    }
    PlqFunction::from_pieces(rows, tol).expect("generated function is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_piece_is_quadratic() {
        for seed in 0..5 {
            let f = generate_convex_plq(1, seed);
            assert_eq!(f.pieces().len(), 1);
            assert!(f.pieces()[0].is_quadratic());
            assert_eq!(f.pieces()[0].x, INF);
        }
    }

    #[test]
    fn large_function_validates() {
        let f = generate_convex_plq(40_000, 7);
        assert_eq!(f.pieces().len(), 40_000);
        assert!(PlqFunction::new(&f.to_rows()).is_ok());
        assert_eq!(f.domain().lo, f64::NEG_INFINITY);
        assert_eq!(f.domain().hi, INF);
    }

    #[test]
    fn deterministic_and_alternating() {
        let f = generate_convex_plq(31, 3);
        assert_eq!(f, generate_convex_plq(31, 3));
        assert_ne!(f, generate_convex_plq(31, 4));
        for (k, p) in f.pieces().iter().enumerate() {
            assert_eq!(p.is_quadratic(), k % 2 == 0, "row {k}");
        }
    }

    #[test]
    fn random_shapes_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shape = RandomShape::default();
        let mut bounded = 0;
        for _ in 0..2000 {
            let f = random_convex_plq(&mut rng, &shape);
            assert!(PlqFunction::new(&f.to_rows()).is_ok());
            if f.domain().left_bounded() && !f.is_needle() {
                bounded += 1;
            }
        }
        assert!(bounded > 100);
    }
}
