//! Convex piecewise linear-quadratic (PLQ) functions of one variable.
//!
//! A function is stored as rows `(x_i, a_i, b_i, c_i)`, `i = 0..=n`. Row `i` describes
//! the piece `a_i x^2 + b_i x + c_i` on `(x_{i-1}, x_i]` (with `x_{-1} = -inf`), and the
//! last breakpoint is always `+inf`. A constant of `+inf` is only allowed on the first or
//! last row and marks the function as `+inf` there, i.e. a bounded domain. A single row
//! with a finite breakpoint is a needle: `c` at that point and `+inf` elsewhere.

use std::fmt;

use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

const INF: f64 = f64::INFINITY;

/// One row of a PLQ matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    /// Right end of the piece.
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Piece {
    pub const fn new(x: f64, a: f64, b: f64, c: f64) -> Self {
        Piece { x, a, b, c }
    }

    /// The piece is `+inf` everywhere (bounded-domain marker).
    #[inline]
    pub fn is_infinite(&self) -> bool {
        self.c == INF
    }

    #[inline]
    pub fn is_quadratic(&self) -> bool {
        self.a > 0.0
    }

    /// Value of the piece's formula, extended to all of R.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        if self.is_infinite() {
            return INF;
        }
        if x.is_infinite() {
            return if self.a > 0.0 {
                INF
            } else if self.b == 0.0 {
                self.c
            } else {
                self.b * x
            };
        }
        (self.a * x + self.b) * x + self.c
    }

    /// Derivative of the piece's formula.
    #[inline]
    pub fn slope(&self, x: f64) -> f64 {
        2.0 * self.a * x + self.b
    }

    fn as_array(&self) -> [f64; 4] {
        [self.x, self.a, self.b, self.c]
    }
}

/// Closed interval of extended reals, possibly empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
    empty: bool,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: INF,
        hi: f64::NEG_INFINITY,
        empty: true,
    };

    pub const REALS: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: INF,
        empty: false,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is inverted");
        Interval {
            lo: lo + 0.0,
            hi: hi + 0.0,
            empty: false,
        }
    }

    pub fn point(s: f64) -> Self {
        Interval::new(s, s)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn contains(&self, s: f64) -> bool {
        !self.empty && self.lo <= s && s <= self.hi
    }

    /// `other ⊆ self`, endpoint-wise within `tol`.
    pub fn contains_interval(&self, other: &Interval, tol: f64) -> bool {
        if other.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        let lo_ok = self.lo == f64::NEG_INFINITY || self.lo <= other.lo + tol;
        let hi_ok = self.hi == INF || other.hi <= self.hi + tol;
        lo_ok && hi_ok
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            write!(f, "empty")
        } else {
            write!(
                f,
                "[{}, {}]",
                crate::text::fmt_num(self.lo),
                crate::text::fmt_num(self.hi)
            )
        }
    }
}

/// Closure of the set where the function is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn left_bounded(&self) -> bool {
        self.lo.is_finite()
    }

    pub fn right_bounded(&self) -> bool {
        self.hi.is_finite()
    }
}

/// Read access to an ordered list of pieces. Lets the search routines run on a
/// function and on its reflection `x -> f(-x)` without materializing the latter.
pub(crate) trait Pieces {
    fn count(&self) -> usize;
    fn piece(&self, i: usize) -> Piece;

    fn is_needle(&self) -> bool {
        self.count() == 1 && self.piece(0).x.is_finite()
    }

    fn domain(&self) -> Domain {
        let first = self.piece(0);
        if self.is_needle() {
            return Domain {
                lo: first.x,
                hi: first.x,
            };
        }
        let n = self.count() - 1;
        let last = self.piece(n);
        Domain {
            lo: if first.is_infinite() {
                first.x
            } else {
                f64::NEG_INFINITY
            },
            hi: if last.is_infinite() {
                self.piece(n - 1).x
            } else {
                INF
            },
        }
    }

    /// Smallest `i` with `x <= x_i`.
    fn locate(&self, x: f64) -> usize {
        let (mut lo, mut hi) = (0, self.count() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if x <= self.piece(mid).x {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    /// Piece whose formula gives the value at `x`, for `x` in the domain of a
    /// non-needle function. Differs from `locate` only at a finite left domain end.
    fn active(&self, x: f64) -> usize {
        let i = self.locate(x);
        if self.piece(i).is_infinite() && i + 1 < self.count() {
            i + 1
        } else {
            i
        }
    }

    fn value_at(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if self.is_needle() {
            let p = self.piece(0);
            return if x == p.x { p.c } else { INF };
        }
        if !self.domain().contains(x) {
            return INF;
        }
        self.piece(self.active(x)).value(x)
    }

    /// Left derivative at `x` in the domain; `-inf` at a finite left domain end.
    fn left_slope(&self, x: f64) -> f64 {
        if self.is_needle() || x == self.domain().lo {
            return f64::NEG_INFINITY;
        }
        self.piece(self.locate(x)).slope(x)
    }

    /// Right derivative at `x` in the domain; `+inf` at a finite right domain end.
    fn right_slope(&self, x: f64) -> f64 {
        if self.is_needle() || x == self.domain().hi {
            return INF;
        }
        // smallest j with x < x_j
        let (mut lo, mut hi) = (0, self.count() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if x < self.piece(mid).x {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        self.piece(lo).slope(x)
    }
}

/// A validated convex, lower semicontinuous PLQ function.
#[derive(Debug, Clone, PartialEq)]
pub struct PlqFunction {
    rows: Vec<Piece>,
    tol: Tolerance,
}

impl Pieces for PlqFunction {
    #[inline]
    fn count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    fn piece(&self, i: usize) -> Piece {
        self.rows[i]
    }
}

/// The reflection `x -> f(-x)` of a function, read through index arithmetic.
pub(crate) struct Mirror<'a>(pub &'a PlqFunction);

impl Pieces for Mirror<'_> {
    #[inline]
    fn count(&self) -> usize {
        self.0.rows.len()
    }

    #[inline]
    fn piece(&self, k: usize) -> Piece {
        mirrored_piece(&self.0.rows, k)
    }
}

#[inline]
fn mirrored_piece(rows: &[Piece], k: usize) -> Piece {
    let n = rows.len() - 1;
    let src = rows[n - k];
    let x = if k < n {
        -rows[n - 1 - k].x
    } else if n == 0 && src.x.is_finite() {
        -src.x
    } else {
        INF
    };
    Piece::new(x + 0.0, src.a, -src.b + 0.0, src.c)
}

impl PlqFunction {
    /// Validates raw `[x, a, b, c]` rows with the default tolerance policy.
    pub fn new(rows: &[[f64; 4]]) -> Result<Self> {
        Self::with_tolerance(rows, Tolerance::default())
    }

    pub fn with_tolerance(rows: &[[f64; 4]], tol: Tolerance) -> Result<Self> {
        let pieces = rows
            .iter()
            .map(|r| Piece::new(r[0], r[1], r[2], r[3]))
            .collect();
        Self::from_pieces(pieces, tol)
    }

    pub fn from_pieces(rows: Vec<Piece>, tol: Tolerance) -> Result<Self> {
        validate_rows(&rows, &tol)?;
        Ok(PlqFunction { rows, tol })
    }

    /// Skips validation. Callers construct rows that are valid by design.
    pub(crate) fn from_pieces_unchecked(rows: Vec<Piece>, tol: Tolerance) -> Self {
        debug_assert!(!rows.is_empty());
        PlqFunction { rows, tol }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.rows
    }

    pub fn to_rows(&self) -> Vec<[f64; 4]> {
        self.rows.iter().map(Piece::as_array).collect()
    }

    /// Number of breakpoints `n` (the matrix has `n + 1` rows).
    pub fn n(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn tol(&self) -> &Tolerance {
        &self.tol
    }

    pub fn is_needle(&self) -> bool {
        Pieces::is_needle(self)
    }

    pub fn domain(&self) -> Domain {
        Pieces::domain(self)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.value_at(x)
    }

    /// Smallest `i` with `x <= x_i`; a breakpoint belongs to the piece on its left.
    pub fn piece_index(&self, x: f64) -> Result<usize> {
        if x.is_nan() || !self.domain().contains(x) {
            return Err(Error::OutOfDomain { x });
        }
        Ok(self.locate(x))
    }

    /// The convex subdifferential `∂f(x)`.
    pub fn subdifferential(&self, x: f64) -> Interval {
        if x.is_nan() || !self.domain().contains(x) {
            return Interval::EMPTY;
        }
        if self.is_needle() {
            return Interval::REALS;
        }
        let left = self.left_slope(x);
        // smooth breakpoints may round the right slope just below the left one
        Interval::new(left, self.right_slope(x).max(left))
    }

    /// `h(x) = f(-x)`. Involutive bit for bit.
    pub fn reflect(&self) -> PlqFunction {
        let rows = (0..self.rows.len())
            .map(|k| mirrored_piece(&self.rows, k))
            .collect();
        PlqFunction {
            rows,
            tol: self.tol,
        }
    }

    /// `s_i = 2 a_i x_i + b_i`, the derivative of piece `i` at its right end.
    pub fn breakpoint_slope(&self, i: usize) -> Result<f64> {
        let p = self.rows.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.rows.len(),
        })?;
        if !p.x.is_finite() {
            return Err(Error::InfiniteBreakpoint { row: i });
        }
        Ok(p.slope(p.x))
    }
}

fn validate_rows(rows: &[Piece], tol: &Tolerance) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = rows.len() - 1;
    for (i, p) in rows.iter().enumerate() {
        if p.x.is_nan() || p.c.is_nan() || !p.a.is_finite() || !p.b.is_finite() {
            return Err(Error::NonFinite { row: i });
        }
        if p.x == f64::NEG_INFINITY || p.c == f64::NEG_INFINITY {
            return Err(Error::BadInfinityConvention { row: i });
        }
        if p.is_infinite() && (p.a != 0.0 || p.b != 0.0 || (i != 0 && i != n)) {
            return Err(Error::BadInfinityConvention { row: i });
        }
        if p.a < 0.0 {
            return Err(Error::NonConvexPiece { row: i });
        }
    }

    if n == 0 {
        let p = rows[0];
        if p.is_infinite() || (p.x.is_finite() && (p.a != 0.0 || p.b != 0.0)) {
            return Err(Error::BadInfinityConvention { row: 0 });
        }
        return Ok(());
    }

    if rows[n].x != INF {
        return Err(Error::BadInfinityConvention { row: n });
    }
    for i in 0..n {
        if !rows[i].x.is_finite() {
            return Err(Error::BadInfinityConvention { row: i });
        }
        if i > 0 && rows[i].x <= rows[i - 1].x {
            return Err(Error::NotSorted { row: i });
        }
    }
    if n == 1 && rows[0].is_infinite() && rows[1].is_infinite() {
        return Err(Error::BadInfinityConvention { row: 1 });
    }

    for i in 0..n {
        let (l, r) = (rows[i], rows[i + 1]);
        if l.is_infinite() || r.is_infinite() {
            continue;
        }
        let x = l.x;
        let scale = [l.a * x * x, l.b * x, l.c, r.a * x * x, r.b * x, r.c]
            .iter()
            .fold(0f64, |m, v| m.max(v.abs()));
        if (l.value(x) - r.value(x)).abs() > tol.slack(scale) {
            return Err(Error::Discontinuous { row: i });
        }
        let (sl, sr) = (l.slope(x), r.slope(x));
        let scale = [2.0 * l.a * x, l.b, 2.0 * r.a * x, r.b]
            .iter()
            .fold(0f64, |m, v| m.max(v.abs()));
        if sl - sr > tol.slack(scale) {
            return Err(Error::SlopeDecreasing { row: i });
        }
    }
    Ok(())
}
