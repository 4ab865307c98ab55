//! Pointwise ε-subdifferential in logarithmic time.
//!
//! `∂_ε f(x̄)` is the level set `{s : f*(s) <= l(s)}` of the conjugate under the
//! support line `l(s) = ε - f(x̄) + s x̄`. The conjugate is never built: by the
//! graph parametrization, a breakpoint `x_k` with a slope `σ ∈ ∂f(x_k)` gives the
//! conjugate point `(σ, σ x_k - f(x_k))`. Binary search locates `x̄`, a dichotomic
//! search over breakpoints brackets each end of the level set, and a constant-time
//! solve on the bracket finishes.
//!
//! Only the lower end is computed directly. The upper end is the negated lower end
//! for `h(x) = f(-x)` at `-x̄`, read through [`Mirror`] without copying.

use crate::error::{Error, Result};
use crate::plq::{Interval, Mirror, Pieces, PlqFunction};

/// `s -> intercept + slope * s`, with `slope = x̄` and `intercept = ε - f(x̄)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportLine {
    pub slope: f64,
    pub intercept: f64,
}

impl SupportLine {
    pub fn at(&self, s: f64) -> f64 {
        self.intercept + self.slope * s
    }

    /// `f(x̄) - ε`, the height of the point the primal lines pass through.
    fn level(&self) -> f64 {
        -self.intercept
    }
}

/// A point `(s, f*(s))` on the conjugate together with the primal point `x` it comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatePoint {
    pub s: f64,
    pub ystar: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveEpsilon { eps })
    }
}

pub fn support_line(f: &PlqFunction, xbar: f64, eps: f64) -> Result<SupportLine> {
    check_eps(eps)?;
    let fbar = f.eval(xbar);
    if !fbar.is_finite() {
        return Err(Error::OutOfDomain { x: xbar });
    }
    Ok(SupportLine {
        slope: xbar,
        intercept: eps - fbar,
    })
}

/// Conjugate point at breakpoint `i`. The slope is `2 a_i x_i + b_i`, except on a
/// `+inf` first row where the right derivative at the domain end is used instead.
pub fn conjugate_point(f: &PlqFunction, i: usize) -> Result<ConjugatePoint> {
    let len = f.pieces().len();
    if i >= len {
        return Err(Error::IndexOutOfRange { index: i, len });
    }
    let x = f.pieces()[i].x;
    if !x.is_finite() {
        return Err(Error::InfiniteBreakpoint { row: i });
    }
    if f.is_needle() {
        return Ok(ConjugatePoint {
            s: 0.0,
            ystar: -f.pieces()[0].c,
            x,
        });
    }
    let s = knot_slope(f, i);
    Ok(ConjugatePoint {
        s,
        ystar: s * x - knot_value(f, i),
        x,
    })
}

/// `∂_ε f(x̄)`; empty when `x̄` is outside the domain.
pub fn eps_subdifferential(f: &PlqFunction, xbar: f64, eps: f64) -> Result<Interval> {
    check_eps(eps)?;
    let fbar = f.eval(xbar);
    if !(fbar < f64::INFINITY) {
        return Ok(Interval::EMPTY);
    }
    if f.is_needle() {
        return Ok(Interval::REALS);
    }
    let level = fbar - eps;
    let lo = lower_end(f, xbar, level);
    let hi = -lower_end(&Mirror(f), -xbar, level);
    Ok(Interval::new(lo, hi))
}

/// Solves for one end of the level set on the bracket between breakpoints `l` and
/// `u = l + 1`, the search having established that the crossing lies there.
///
/// For `Side::Right`, `l` and `u` index the reflection `x -> f(-x)`, whose
/// breakpoints are `-x_{n-1}, ..., -x_0`. Returns the bracket's left end when the
/// conjugate is already strictly below the line there.
pub fn intersection(
    f: &PlqFunction,
    l: usize,
    u: usize,
    line: &SupportLine,
    side: Side,
) -> Result<f64> {
    match side {
        Side::Left => bracket_checked(f, l, u, line.slope, line.level()),
        Side::Right => bracket_checked(&Mirror(f), l, u, -line.slope, line.level()).map(|s| -s),
    }
}

fn bracket_checked<P: Pieces>(p: &P, l: usize, u: usize, xbar: f64, level: f64) -> Result<f64> {
    let len = p.count();
    if u != l + 1 || u >= len || p.is_needle() {
        return Err(Error::IndexOutOfRange { index: u, len });
    }
    if !p.domain().contains(xbar) || !(p.piece(l).x < xbar) {
        return Err(Error::OutOfDomain { x: xbar });
    }
    let i = p.locate(xbar);
    if u > i {
        return Err(Error::IndexOutOfRange {
            index: u,
            len: i + 1,
        });
    }
    let lo_slope = p.piece(i).slope(xbar);
    let upper = if u == i { lo_slope } else { knot_slope(p, u) };
    if knot_gap(p, u.min(i), xbar, level, upper) > 0.0 && u < i {
        return Err(Error::NoCrossing);
    }
    Ok(bracket(p, l, xbar, level, lo_slope, i))
}

/// Slope of the conjugate knot at breakpoint `k`: the left derivative there, or the
/// right derivative if the left side is outside the domain.
#[inline]
fn knot_slope<P: Pieces>(p: &P, k: usize) -> f64 {
    let piece = p.piece(k);
    let x = piece.x;
    if piece.is_infinite() {
        p.piece(k + 1).slope(x)
    } else {
        piece.slope(x)
    }
}

#[inline]
fn knot_value<P: Pieces>(p: &P, k: usize) -> f64 {
    let piece = p.piece(k);
    if piece.is_infinite() {
        p.piece(k + 1).value(piece.x)
    } else {
        piece.value(piece.x)
    }
}

/// `f*(σ) - l(σ)` at the conjugate point of breakpoint `k` with slope `σ`, written in
/// primal terms: how far `(x̄, f(x̄) - ε)` sits above the line through `(x_k, f(x_k))`
/// with slope `σ`.
#[inline]
fn knot_gap<P: Pieces>(p: &P, k: usize, xbar: f64, level: f64, sigma: f64) -> f64 {
    let xk = p.piece(k).x;
    level - knot_value(p, k) - sigma * (xbar - xk)
}

/// Slope of the line through `(x̄, level)` tangent to quadratic piece `k`, taking the
/// tangency left of `x̄`.
#[inline]
fn tangent_slope<P: Pieces>(p: &P, k: usize, xbar: f64, level: f64) -> (f64, f64) {
    let q = p.piece(k);
    let d = ((q.value(xbar) - level) / q.a).max(0.0);
    let xt = xbar - d.sqrt();
    (xt, q.slope(xt))
}

/// `inf ∂_ε f(x̄)` for `x̄` in the domain of a non-needle function, with `level = f(x̄) - ε`.
fn lower_end<P: Pieces>(p: &P, xbar: f64, level: f64) -> f64 {
    if xbar == p.domain().lo {
        return f64::NEG_INFINITY;
    }
    let i = p.locate(xbar);
    let lo_slope = p.piece(i).slope(xbar);
    if i == 0 {
        return first_segment(p, xbar, level, lo_slope);
    }
    let s0 = knot_slope(p, 0);
    if knot_gap(p, 0, xbar, level, s0) <= 0.0 {
        return first_segment(p, xbar, level, s0);
    }
    // invariant: gap(l) > 0 and the crossing is left of knot u (or of ∂f(x̄) when u == i)
    let (mut l, mut u) = (0, i);
    while u - l > 1 {
        let m = (l + u) / 2;
        if knot_gap(p, m, xbar, level, knot_slope(p, m)) > 0.0 {
            l = m;
        } else {
            u = m;
        }
    }
    bracket(p, l, xbar, level, lo_slope, i)
}

/// The crossing on the conjugate segment left of the first knot, whose slope is `upper`.
fn first_segment<P: Pieces>(p: &P, xbar: f64, level: f64, upper: f64) -> f64 {
    let first = p.piece(0);
    let s = if first.is_infinite() {
        // conjugate is affine with slope x_0 all the way to -inf
        let x0 = first.x;
        (level - knot_value(p, 0)) / (xbar - x0)
    } else if first.is_quadratic() {
        tangent_slope(p, 0, xbar, level).1
    } else {
        // conjugate is +inf left of b_0
        first.b
    };
    s.min(upper)
}

/// Crossing between knot `l` and the next knot (or `∂f(x̄)` when `l + 1 == i`).
///
/// On `[σ_l, r_l]` (the subdifferential at `x_l`) the conjugate is affine with slope
/// `x_l`; on `[r_l, σ_{l+1}]` it is the conjugate of piece `l + 1`.
fn bracket<P: Pieces>(p: &P, l: usize, xbar: f64, level: f64, lo_slope: f64, i: usize) -> f64 {
    let u = l + 1;
    let sigma_l = knot_slope(p, l);
    if knot_gap(p, l, xbar, level, sigma_l) <= 0.0 {
        return sigma_l;
    }
    let xl = p.piece(l).x;
    let next = p.piece(u);
    let r_l = next.slope(xl);
    let upper = if u == i { lo_slope } else { knot_slope(p, u) };
    if knot_gap(p, l, xbar, level, r_l) <= 0.0 {
        let s = (level - knot_value(p, l)) / (xbar - xl);
        return s.clamp(sigma_l, r_l);
    }
    if !next.is_quadratic() {
        return r_l;
    }
    let (_, s) = tangent_slope(p, u, xbar, level);
    s.clamp(r_l, upper.max(r_l))
}
