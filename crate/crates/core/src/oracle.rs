//! Independent reference routines: explicit conjugate construction, the linear-time
//! level-set computation of `∂_ε f(x̄)`, and a direct membership test from the
//! definition. Nothing here touches the search code in `point` or `graph`, so the
//! fast paths can be checked against it.

use crate::error::{Error, Result};
use crate::plq::{Interval, Piece, PlqFunction};
use crate::tolerance::Tolerance;

const INF: f64 = f64::INFINITY;

/// Relative factor of the membership decision in [`is_eps_subgradient`].
pub const MEMBERSHIP_TOLERANCE: Tolerance = Tolerance::new(1e-12, 1e-12);

fn conjugate_of_quadratic(right: f64, p: &Piece) -> Piece {
    // (s - b)^2 / (4a) - c
    Piece::new(
        right,
        0.25 / p.a,
        -p.b / (2.0 * p.a) + 0.0,
        p.b * p.b / (4.0 * p.a) - p.c,
    )
}

/// The Legendre-Fenchel conjugate `f*(s) = sup_x { s x - f(x) }`, built in one pass.
///
/// Quadratic pieces map to quadratic pieces, kinks map to affine pieces whose slope is
/// the kink abscissa, linear pieces collapse to conjugate breakpoints, and bounded
/// domain ends map to unbounded affine pieces.
pub fn conjugate(f: &PlqFunction) -> PlqFunction {
    let tol = *f.tol();
    let rows = f.pieces();
    if f.is_needle() {
        let p = rows[0];
        return PlqFunction::from_pieces_unchecked(vec![Piece::new(INF, 0.0, p.x, -p.c)], tol);
    }
    let n = rows.len() - 1;
    if n == 0 {
        let p = rows[0];
        let row = if p.is_quadratic() {
            conjugate_of_quadratic(INF, &p)
        } else {
            Piece::new(p.b, 0.0, 0.0, -p.c)
        };
        return PlqFunction::from_pieces_unchecked(vec![row], tol);
    }

    let mut out: Vec<Piece> = Vec::with_capacity(2 * rows.len());
    let mut push = |row: Piece| {
        if out.last().is_none_or(|last| row.x > last.x) {
            out.push(row);
        }
    };

    let first = rows[0];
    if first.is_infinite() {
        let x0 = first.x;
        push(Piece::new(rows[1].slope(x0), 0.0, x0, -rows[1].value(x0)));
    } else if first.is_quadratic() {
        push(conjugate_of_quadratic(first.slope(first.x), &first));
    } else {
        push(Piece::new(first.b, 0.0, 0.0, INF));
    }

    for k in 0..n {
        let (left, right) = (rows[k], rows[k + 1]);
        let xk = left.x;
        if !left.is_infinite() {
            let yk = left.value(xk);
            if right.is_infinite() {
                push(Piece::new(INF, 0.0, xk, -yk));
                break;
            }
            let (sk, rk) = (left.slope(xk), right.slope(xk));
            if rk > sk {
                push(Piece::new(rk, 0.0, xk, -yk));
            }
        }
        if k + 1 == n {
            if right.is_quadratic() {
                push(conjugate_of_quadratic(INF, &right));
            } else {
                push(Piece::new(INF, 0.0, 0.0, INF));
            }
        } else if right.is_quadratic() {
            push(conjugate_of_quadratic(right.slope(right.x), &right));
        }
    }

    // A line split by redundant breakpoints: the conjugate is a needle.
    if out.len() == 2 && out[0].is_infinite() && out[1].is_infinite() {
        let p = rows
            .iter()
            .find(|p| !p.is_infinite())
            .expect("proper function");
        out = vec![Piece::new(out[0].x, 0.0, 0.0, -p.c)];
    }
    PlqFunction::from_pieces_unchecked(out, tol)
}

/// `{s : ψ(s) <= 0} ∩ [lo, hi]` for `ψ(s) = α s² + β s + γ`, `α >= 0`.
fn quadratic_sublevel(alpha: f64, beta: f64, gamma: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let (a, b) = if alpha > 0.0 {
        let disc = beta * beta - 4.0 * alpha * gamma;
        if disc < 0.0 {
            return None;
        }
        let q = -0.5 * (beta + beta.signum() * disc.sqrt());
        let (r1, r2) = if q == 0.0 {
            (0.0, 0.0)
        } else {
            let (u, v) = (q / alpha, gamma / q);
            (u.min(v), u.max(v))
        };
        (r1.max(lo), r2.min(hi))
    } else if beta == 0.0 {
        if gamma <= 0.0 {
            (lo, hi)
        } else {
            return None;
        }
    } else if beta > 0.0 {
        (lo, (-gamma / beta).min(hi))
    } else {
        ((-gamma / beta).max(lo), hi)
    };
    (a <= b).then_some((a, b))
}

/// `∂_ε f(x̄)` as the level set `{s : f*(s) <= ε - f(x̄) + s x̄}`, scanning every piece
/// of the explicitly built conjugate. Linear time.
pub fn eps_sub_reference(f: &PlqFunction, xbar: f64, eps: f64) -> Result<Interval> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::NonPositiveEpsilon { eps });
    }
    let fbar = f.eval(xbar);
    if !(fbar < INF) {
        return Ok(Interval::EMPTY);
    }
    let g = conjugate(f);
    let rows = g.pieces();
    if g.is_needle() {
        let p = rows[0];
        return Ok(if p.c + fbar - p.x * xbar <= eps {
            Interval::point(p.x)
        } else {
            Interval::EMPTY
        });
    }
    let mut acc: Option<(f64, f64)> = None;
    let mut lo = f64::NEG_INFINITY;
    for p in rows {
        let hi = p.x;
        if !p.is_infinite() {
            let part = quadratic_sublevel(p.a, p.b - xbar, p.c - eps + fbar, lo, hi);
            if let Some((a, b)) = part {
                acc = Some(match acc {
                    None => (a, b),
                    Some((x, y)) => (x.min(a), y.max(b)),
                });
            }
        }
        lo = hi;
    }
    Ok(match acc {
        Some((a, b)) => Interval::new(a, b),
        None => Interval::EMPTY,
    })
}

/// `min_y { f(y) - s y } = -f*(s)`, minimizing piece by piece in closed form.
fn min_tilted(f: &PlqFunction, s: f64) -> f64 {
    let rows = f.pieces();
    if f.is_needle() {
        return rows[0].c - s * rows[0].x;
    }
    let mut best = INF;
    let mut lo = f64::NEG_INFINITY;
    for p in rows {
        let hi = p.x;
        if !p.is_infinite() {
            let beta = p.b - s;
            let v = if p.is_quadratic() {
                let y = (-beta / (2.0 * p.a)).clamp(lo, hi);
                (p.a * y + beta) * y + p.c
            } else if beta > 0.0 {
                if lo.is_finite() {
                    beta * lo + p.c
                } else {
                    f64::NEG_INFINITY
                }
            } else if beta < 0.0 {
                if hi.is_finite() {
                    beta * hi + p.c
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                p.c
            };
            best = best.min(v);
        }
        lo = hi;
    }
    best
}

/// Decides `f(y) >= f(x̄) + s (y - x̄) - ε` for all `y` directly from the definition.
pub fn is_eps_subgradient(f: &PlqFunction, xbar: f64, eps: f64, s: f64) -> Result<bool> {
    if !(eps >= 0.0) {
        return Err(Error::NonPositiveEpsilon { eps });
    }
    let fbar = f.eval(xbar);
    if !(fbar < INF) {
        return Err(Error::OutOfDomain { x: xbar });
    }
    if !s.is_finite() {
        return Ok(false);
    }
    let m = min_tilted(f, s);
    if m == f64::NEG_INFINITY {
        return Ok(false);
    }
    let rhs = fbar - s * xbar - eps;
    let scale = fbar.abs() + (s * xbar).abs() + m.abs();
    Ok(m >= rhs - MEMBERSHIP_TOLERANCE.slack(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_convex_plq, RandomShape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(rows: &[[f64; 4]]) -> PlqFunction {
        PlqFunction::new(rows).unwrap()
    }

    fn abs() -> PlqFunction {
        f(&[[0.0, 0.0, -1.0, 0.0], [INF, 0.0, 1.0, 0.0]])
    }

    fn square() -> PlqFunction {
        f(&[[INF, 1.0, 0.0, 0.0]])
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate(&square()).to_rows(), vec![[INF, 0.25, 0.0, 0.0]]);
        assert_eq!(
            conjugate(&abs()).to_rows(),
            vec![
                [-1.0, 0.0, 0.0, INF],
                [1.0, 0.0, 0.0, 0.0],
                [INF, 0.0, 0.0, INF]
            ]
        );
        let needle = f(&[[2.0, 0.0, 0.0, 3.0]]);
        assert_eq!(conjugate(&needle).to_rows(), vec![[INF, 0.0, 2.0, -3.0]]);
        let line = f(&[[INF, 0.0, 2.0, 3.0]]);
        assert_eq!(conjugate(&line).to_rows(), vec![[2.0, 0.0, 0.0, -3.0]]);
    }

    #[test]
    fn conjugate_of_split_line_is_needle() {
        let g = f(&[[0.0, 0.0, 1.0, 0.0], [INF, 0.0, 1.0, 0.0]]);
        assert_eq!(conjugate(&g).to_rows(), vec![[1.0, 0.0, 0.0, 0.0]]);
    }

    #[test]
    fn conjugate_of_box_indicator() {
        let g = f(&[
            [0.0, 0.0, 0.0, INF],
            [1.0, 0.0, 0.0, 0.0],
            [INF, 0.0, 0.0, INF],
        ]);
        let h = conjugate(&g);
        assert_eq!(
            h.to_rows(),
            vec![[0.0, 0.0, 0.0, 0.0], [INF, 0.0, 1.0, 0.0]]
        );
    }

    #[test]
    fn conjugate_validates_and_biconjugates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shape = RandomShape::default();
        for _ in 0..300 {
            let g = random_convex_plq(&mut rng, &shape);
            let h = conjugate(&g);
            PlqFunction::new(&h.to_rows()).expect("conjugate validates");
            let gg = conjugate(&h);
            for k in 0..100 {
                let x = -30.0 + 0.6 * k as f64 + 0.01;
                let (a, b) = (g.eval(x), gg.eval(x));
                assert!(
                    crate::tolerance::rel_close(a, b, 1e-8),
                    "f**({x}) = {b} vs f = {a}"
                );
            }
        }
    }

    #[test]
    fn reference_examples() {
        assert_eq!(
            eps_sub_reference(&abs(), 0.5, 0.5).unwrap(),
            Interval::new(0.0, 1.0)
        );
        assert_eq!(
            eps_sub_reference(&square(), 0.0, 1.0).unwrap(),
            Interval::new(-2.0, 2.0)
        );
        let line = f(&[[INF, 0.0, 3.0, 0.0]]);
        assert_eq!(
            eps_sub_reference(&line, 7.0, 0.2).unwrap(),
            Interval::point(3.0)
        );
        let restricted = f(&[[0.0, 0.0, 0.0, INF], [INF, 1.0, 0.0, 0.0]]);
        assert_eq!(
            eps_sub_reference(&restricted, 0.0, 1.0).unwrap(),
            Interval::new(f64::NEG_INFINITY, 2.0)
        );
        assert!(eps_sub_reference(&restricted, -1.0, 1.0)
            .unwrap()
            .is_empty());
        assert_eq!(
            eps_sub_reference(&abs(), 0.0, 0.0),
            Err(Error::NonPositiveEpsilon { eps: 0.0 })
        );
        let needle = f(&[[1.0, 0.0, 0.0, 0.0]]);
        assert_eq!(
            eps_sub_reference(&needle, 1.0, 0.5).unwrap(),
            Interval::REALS
        );
    }

    #[test]
    fn membership_examples() {
        assert!(is_eps_subgradient(&abs(), 0.5, 0.5, 0.0).unwrap());
        assert!(!is_eps_subgradient(&abs(), 0.5, 0.5, -0.01).unwrap());
        assert!(is_eps_subgradient(&square(), 0.0, 1.0, 2.0).unwrap());
        assert!(!is_eps_subgradient(&square(), 0.0, 1.0, 2.01).unwrap());
        assert!(is_eps_subgradient(&abs(), 5.0, 0.5, 1.0).unwrap());
        assert!(!is_eps_subgradient(&abs(), 5.0, 0.5, 1.0 + 1e-9).unwrap());
        assert!(!is_eps_subgradient(&abs(), -5.0, 0.5, -1.0 - 1e-9).unwrap());
        assert_eq!(
            is_eps_subgradient(&abs(), 0.5, -1.0, 0.0),
            Err(Error::NonPositiveEpsilon { eps: -1.0 })
        );
        let restricted = f(&[[0.0, 0.0, 0.0, INF], [INF, 1.0, 0.0, 0.0]]);
        assert_eq!(
            is_eps_subgradient(&restricted, -1.0, 1.0, 0.0),
            Err(Error::OutOfDomain { x: -1.0 })
        );
        assert!(is_eps_subgradient(&restricted, 0.0, 1.0, -1e6).unwrap());
    }

    #[test]
    fn subgradients_are_eps_subgradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let shape = RandomShape::default();
        for _ in 0..200 {
            let g = random_convex_plq(&mut rng, &shape);
            let d = g.domain();
            for t in [0.1, 0.5, 0.9] {
                let x = match (d.lo.is_finite(), d.hi.is_finite()) {
                    (true, true) => d.lo + t * (d.hi - d.lo),
                    (true, false) => d.lo + 10.0 * t,
                    (false, true) => d.hi - 10.0 * t,
                    (false, false) => 20.0 * t - 10.0,
                };
                let sub = g.subdifferential(x);
                for s in [sub.lo(), sub.hi()].into_iter().filter(|s| s.is_finite()) {
                    assert!(is_eps_subgradient(&g, x, 0.0, s).unwrap());
                    assert!(is_eps_subgradient(&g, x, 0.01, s).unwrap());
                }
            }
        }
    }
}
