//! The whole graph of `∂_ε f` in linear time.
//!
//! The lower bound `ḡ(x̄) = inf ∂_ε f(x̄)` is the slope of the line through
//! `(x̄, f(x̄) - ε)` that touches the graph of `f` at some `x̃ < x̄`. As `x̄` moves right
//! the touching point `x̃` moves right too, so a single sweep that advances a tangent
//! pointer (`it`) and a piece pointer (`ib`) produces every breakpoint of `ḡ`.
//!
//! `ḡ` is not PLQ, so the table only records which formula applies on each interval:
//!
//! * [`RowKind::Smooth`]: `x̃` is interior to quadratic piece `it`,
//! * [`RowKind::Kink`]: `x̃` is the breakpoint `x_it`,
//! * [`RowKind::Constant`]: `ḡ` equals `v` (a linear first piece reaching to `-inf`).
//!
//! The upper bound comes from the same table built for `h(x) = f(-x)`, since
//! `sup ∂_ε f(x) = -inf ∂_ε h(-x)`.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::plq::{Interval, Piece, PlqFunction};
use crate::text::{fmt_num, parse_num};

const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Smooth = 1,
    Kink = 2,
    Constant = 3,
}

impl RowKind {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(t: u8) -> Option<RowKind> {
        match t {
            1 => Some(RowKind::Smooth),
            2 => Some(RowKind::Kink),
            3 => Some(RowKind::Constant),
            _ => None,
        }
    }
}

/// One row `[x, t, it, ib, v]`: the formula for `ḡ` on `(previous x, x]`.
///
/// Indices are 0-based here and 1-based in CSV. `None` marks an irrelevant field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundRow {
    pub x: f64,
    pub t: RowKind,
    /// Tangent piece (`Smooth`) or tangent breakpoint (`Kink`).
    pub it: Option<usize>,
    /// Piece containing `x̄`.
    pub ib: Option<usize>,
    pub v: Option<f64>,
}

impl LowerBoundRow {
    fn new(x: f64, t: RowKind, it: Option<usize>, ib: Option<usize>, v: Option<f64>) -> Self {
        LowerBoundRow { x, t, it, ib, v }
    }
}

/// Work done by one sweep: loop iterations plus tangency solves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepStats {
    pub iterations: usize,
    pub solves: usize,
}

impl SweepStats {
    pub fn total(&self) -> usize {
        self.iterations + self.solves
    }
}

/// Lazy representation of `ḡ = inf ∂_ε f` for one function and one `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundTable {
    rows: Vec<LowerBoundRow>,
    f: Arc<PlqFunction>,
    eps: f64,
}

/// `gph ∂_ε f` as a lower table for `f` and a lower table for `x -> f(-x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsSubGraph {
    pub lower: LowerBoundTable,
    pub upper_source: LowerBoundTable,
    pub eps: f64,
}

/// Known abscissa of a tangency problem: the tangent line touches piece `it` at
/// `xt` and meets `f - ε` on piece `ib`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentSolveInput {
    pub xt: f64,
    pub it: usize,
    pub ib: usize,
}

/// Closed form of `ḡ` on one table row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Constant(f64),
    /// `(a x² + b x + c) / (x - pole)`.
    Rational {
        a: f64,
        b: f64,
        c: f64,
        pole: f64,
    },
    /// `alpha x + beta + sign * sqrt(qa x² + qb x + qc)`.
    SqrtQuadratic {
        alpha: f64,
        beta: f64,
        sign: f64,
        qa: f64,
        qb: f64,
        qc: f64,
    },
    /// Row covering points left or right of the domain.
    OutsideDomain,
}

impl ClosedForm {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ClosedForm::Constant(v) => v,
            ClosedForm::Rational { a, b, c, pole } => ((a * x + b) * x + c) / (x - pole),
            ClosedForm::SqrtQuadratic {
                alpha,
                beta,
                sign,
                qa,
                qb,
                qc,
            } => alpha * x + beta + sign * ((qa * x + qb) * x + qc).max(0.0).sqrt(),
            ClosedForm::OutsideDomain => f64::NAN,
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveEpsilon { eps })
    }
}

/// `(A, B, C)` with `f(xt + u) - ε - L(xt + u) = A u² + B u + C` on piece `ib`, where
/// `L` is the tangent to piece `it` at `xt`.
#[inline]
fn tangency_quadratic(rows: &[Piece], xt: f64, it: usize, ib: usize, eps: f64) -> (f64, f64, f64) {
    let (pt, pb) = (rows[it], rows[ib]);
    (
        pb.a,
        pb.slope(xt) - pt.slope(xt),
        pb.value(xt) - pt.value(xt) - eps,
    )
}

/// Largest root `u` of `A u² + B u + C`, where the quadratic turns nonnegative.
fn exit_root(a: f64, b: f64, c: f64, f: &PlqFunction) -> Result<f64> {
    let tol = f.tol();
    if a > 0.0 {
        let mut disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            if -disc <= tol.slack(b * b + (4.0 * a * c).abs()) {
                disc = 0.0;
            } else {
                return Err(Error::NoRoot);
            }
        }
        let sq = disc.sqrt();
        Ok(if b <= 0.0 {
            (-b + sq) / (2.0 * a)
        } else if b + sq > 0.0 {
            -2.0 * c / (b + sq)
        } else {
            0.0
        })
    } else if b > tol.slack(c) {
        Ok(-c / b)
    } else {
        Err(Error::NoRoot)
    }
}

fn piece_bounds(rows: &[Piece], i: usize) -> (f64, f64) {
    let lo = if i == 0 {
        f64::NEG_INFINITY
    } else {
        rows[i - 1].x
    };
    (lo, rows[i].x)
}

fn clamp_to_piece(f: &PlqFunction, root: f64, piece: usize) -> Result<f64> {
    let (lo, hi) = piece_bounds(f.pieces(), piece);
    let tol = f.tol();
    if tol.lt(root, lo) || tol.lt(hi, root) {
        return Err(Error::RootOutsidePiece { root, piece });
    }
    Ok(root.clamp(lo, hi))
}

fn check_index(f: &PlqFunction, i: usize) -> Result<()> {
    let len = f.pieces().len();
    if i < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: i, len })
    }
}

/// `x̄ > x̃` where the tangent to piece `it` at `x̃` meets `f - ε` on piece `ib`.
pub fn compute_xb(f: &PlqFunction, input: &TangentSolveInput, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    check_index(f, input.it)?;
    check_index(f, input.ib)?;
    let (a, b, c) = tangency_quadratic(f.pieces(), input.xt, input.it, input.ib, eps);
    let u = exit_root(a, b, c, f)?;
    clamp_to_piece(f, input.xt + u, input.ib)
}

#[inline]
fn tangent_abscissa(tangent: &Piece, bar: &Piece, xbar: f64, eps: f64) -> f64 {
    let d = (tangent.value(xbar) - bar.value(xbar) + eps) / tangent.a;
    xbar - d.max(0.0).sqrt()
}

/// `x̃ < x̄` on quadratic piece `it` whose tangent passes through `(x̄, f(x̄) - ε)`,
/// `x̄` lying on piece `ib`.
pub fn compute_xt(f: &PlqFunction, xbar: f64, ib: usize, it: usize, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    check_index(f, it)?;
    check_index(f, ib)?;
    let rows = f.pieces();
    let (pt, pb) = (rows[it], rows[ib]);
    if !pt.is_quadratic() {
        return Err(Error::LinearTangentPiece { piece: it });
    }
    let num = pt.value(xbar) - pb.value(xbar) + eps;
    if num < -f.tol().slack(pt.value(xbar).abs() + eps) {
        return Err(Error::NoRoot);
    }
    clamp_to_piece(f, tangent_abscissa(&pt, &pb, xbar, eps), it)
}

/// Tangent line used to find where a sweep segment ends.
#[derive(Debug, Clone, Copy)]
struct EndLine {
    xt: f64,
    it: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    t: RowKind,
    it: Option<usize>,
    v: Option<f64>,
    end: Option<EndLine>,
}

/// Tangent segments in order of increasing tangent slope.
fn segments(rows: &[Piece]) -> Vec<Segment> {
    let n = rows.len() - 1;
    let mut segs = Vec::with_capacity(2 * rows.len());
    let first = rows[0];
    if first.is_infinite() {
        segs.push(Segment {
            t: RowKind::Kink,
            it: Some(0),
            v: None,
            end: Some(EndLine { xt: first.x, it: 1 }),
        });
    } else {
        let (t, it, v) = if first.is_quadratic() {
            (RowKind::Smooth, Some(0), None)
        } else {
            (RowKind::Constant, None, Some(first.b))
        };
        segs.push(Segment {
            t,
            it,
            v,
            end: Some(EndLine { xt: first.x, it: 0 }),
        });
    }
    for k in 0..n {
        let (left, right) = (rows[k], rows[k + 1]);
        let xk = left.x;
        if !left.is_infinite() {
            if right.is_infinite() {
                segs.push(Segment {
                    t: RowKind::Kink,
                    it: Some(k),
                    v: None,
                    end: None,
                });
                break;
            }
            if right.slope(xk) > left.slope(xk) {
                segs.push(Segment {
                    t: RowKind::Kink,
                    it: Some(k),
                    v: None,
                    end: Some(EndLine { xt: xk, it: k + 1 }),
                });
            }
        }
        if right.is_quadratic() {
            segs.push(Segment {
                t: RowKind::Smooth,
                it: Some(k + 1),
                v: None,
                end: (k + 1 < n).then_some(EndLine {
                    xt: right.x,
                    it: k + 1,
                }),
            });
        }
    }
    segs
}

struct Sweep<'a> {
    f: &'a PlqFunction,
    rows: &'a [Piece],
    eps: f64,
    out: Vec<LowerBoundRow>,
    ib: usize,
    stats: SweepStats,
}

impl Sweep<'_> {
    fn push(&mut self, row: LowerBoundRow) {
        if let Some(last) = self.out.last_mut() {
            if row.x <= last.x || (row.x.is_finite() && self.f.tol().le(row.x, last.x)) {
                return;
            }
            if last.t == RowKind::Constant
                && row.t == RowKind::Constant
                && last.v.is_some()
                && last.v == row.v
            {
                last.x = row.x;
                return;
            }
        }
        self.out.push(row);
    }

    /// Emits the rows of one segment. Returns `false` once the table is complete.
    fn run(&mut self, seg: &Segment) -> bool {
        let n = self.rows.len() - 1;
        loop {
            self.stats.iterations += 1;
            let ib = self.ib;
            let piece = self.rows[ib];
            if piece.is_infinite() {
                self.push(LowerBoundRow::new(
                    INF,
                    RowKind::Constant,
                    None,
                    Some(ib),
                    None,
                ));
                return false;
            }
            let row_ib = (seg.t != RowKind::Constant).then_some(ib);
            let row = |x| LowerBoundRow::new(x, seg.t, seg.it, row_ib, seg.v);
            let Some(line) = seg.end else {
                self.push(row(piece.x));
                if ib == n {
                    return false;
                }
                self.ib += 1;
                continue;
            };
            let (a, b, c) = tangency_quadratic(self.rows, line.xt, line.it, ib, self.eps);
            if piece.x.is_finite() {
                let u = piece.x - line.xt;
                if (a * u + b) * u + c < 0.0 {
                    self.push(row(piece.x));
                    self.ib += 1;
                    continue;
                }
            }
            self.stats.solves += 1;
            match exit_root(a, b, c, self.f) {
                Ok(u) => {
                    let (lo, hi) = piece_bounds(self.rows, ib);
                    self.push(row((line.xt + u).clamp(lo, hi)));
                    return true;
                }
                Err(_) if ib == n => {
                    // parallel to the last linear piece: valid to +inf
                    self.push(row(INF));
                    return false;
                }
                Err(_) => {
                    self.push(row(piece.x));
                    return true;
                }
            }
        }
    }
}

/// Builds the lower-bound table of `∂_ε f` in `O(n)`.
pub fn build_lower_table(f: &PlqFunction, eps: f64) -> Result<LowerBoundTable> {
    build_lower_table_shared(Arc::new(f.clone()), eps)
}

pub fn build_lower_table_shared(f: Arc<PlqFunction>, eps: f64) -> Result<LowerBoundTable> {
    build_lower_table_instrumented(f, eps).map(|(t, _)| t)
}

/// Same as [`build_lower_table_shared`], also reporting the work done by the sweep.
pub fn build_lower_table_instrumented(
    f: Arc<PlqFunction>,
    eps: f64,
) -> Result<(LowerBoundTable, SweepStats)> {
    check_eps(eps)?;
    let rows = f.pieces();
    if rows.len() == 1 {
        let p = rows[0];
        let row = if f.is_needle() {
            LowerBoundRow::new(INF, RowKind::Constant, None, None, Some(f64::NEG_INFINITY))
        } else if p.is_quadratic() {
            LowerBoundRow::new(INF, RowKind::Smooth, Some(0), Some(0), None)
        } else {
            LowerBoundRow::new(INF, RowKind::Constant, None, None, Some(p.b))
        };
        let table = LowerBoundTable {
            rows: vec![row],
            f: f.clone(),
            eps,
        };
        return Ok((table, SweepStats::default()));
    }

    let mut sweep = Sweep {
        f: &f,
        rows,
        eps,
        out: Vec::with_capacity(2 * rows.len()),
        ib: 0,
        stats: SweepStats::default(),
    };
    if rows[0].is_infinite() {
        // x̄ < x_0 is outside the domain, x̄ = x_0 gives -inf
        sweep.push(LowerBoundRow::new(
            rows[0].x,
            RowKind::Constant,
            None,
            Some(0),
            None,
        ));
        sweep.ib = 1;
    }
    for seg in segments(rows) {
        if !sweep.run(&seg) {
            break;
        }
    }
    if let Some(last) = sweep.out.last_mut() {
        // a numerically near-parallel final line can stop short of +inf
        last.x = INF;
    }
    let (out, stats) = (sweep.out, sweep.stats);
    Ok((
        LowerBoundTable {
            rows: out,
            f: f.clone(),
            eps,
        },
        stats,
    ))
}

impl LowerBoundTable {
    pub fn rows(&self) -> &[LowerBoundRow] {
        &self.rows
    }

    pub fn function(&self) -> &PlqFunction {
        &self.f
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn row_value(&self, row: &LowerBoundRow, xbar: f64) -> f64 {
        let rows = self.f.pieces();
        match row.t {
            RowKind::Constant => row
                .v
                .expect("constant row outside the domain was evaluated"),
            RowKind::Kink => {
                let k = row.it.expect("kink row without tangent breakpoint");
                let ib = row.ib.expect("kink row without piece index");
                let xt = rows[k].x;
                let yt = if rows[k].is_infinite() {
                    rows[k + 1].value(xt)
                } else {
                    rows[k].value(xt)
                };
                (rows[ib].value(xbar) - self.eps - yt) / (xbar - xt)
            }
            RowKind::Smooth => {
                let it = row.it.expect("smooth row without tangent piece");
                let ib = row.ib.expect("smooth row without piece index");
                let (pt, pb) = (rows[it], rows[ib]);
                let d = pt.a * (pt.value(xbar) - pb.value(xbar) + self.eps);
                pt.slope(xbar) - 2.0 * d.max(0.0).sqrt()
            }
        }
    }

    /// `ḡ(x̄)`, or `None` when `x̄` is outside the domain.
    pub fn eval_lower(&self, xbar: f64) -> Option<f64> {
        let dom = self.f.domain();
        if xbar.is_nan() || !dom.contains(xbar) {
            return None;
        }
        if xbar == dom.lo {
            return Some(f64::NEG_INFINITY);
        }
        let k = self.rows.partition_point(|r| r.x < xbar);
        Some(self.row_value(&self.rows[k], xbar) + 0.0)
    }

    /// `ḡ` on a sorted grid. Merges the grid with the table in one pass when that
    /// beats a binary search per point.
    pub fn eval_lower_grid(&self, xs: &[f64]) -> Result<Vec<Option<f64>>> {
        for (i, w) in xs.windows(2).enumerate() {
            if !(w[0] <= w[1]) {
                return Err(Error::UnsortedInput { position: i + 1 });
            }
        }
        if xs.iter().any(|x| x.is_nan()) {
            return Err(Error::UnsortedInput { position: 0 });
        }
        let m = xs.len();
        let log_n = (usize::BITS - self.rows.len().leading_zeros()) as usize;
        if m * log_n <= m + self.rows.len() {
            return Ok(xs.iter().map(|&x| self.eval_lower(x)).collect());
        }
        let dom = self.f.domain();
        let mut k = 0;
        let mut out = Vec::with_capacity(m);
        for &x in xs {
            if !dom.contains(x) {
                out.push(None);
                continue;
            }
            if x == dom.lo {
                out.push(Some(f64::NEG_INFINITY));
                continue;
            }
            while self.rows[k].x < x {
                k += 1;
            }
            out.push(Some(self.row_value(&self.rows[k], x) + 0.0));
        }
        Ok(out)
    }

    /// Explicit formula of `ḡ` on row `k`.
    pub fn classify_piece(&self, k: usize) -> Result<ClosedForm> {
        let row = *self.rows.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            len: self.rows.len(),
        })?;
        let rows = self.f.pieces();
        Ok(match row.t {
            RowKind::Constant => match row.v {
                Some(v) => ClosedForm::Constant(v),
                None => ClosedForm::OutsideDomain,
            },
            RowKind::Kink => {
                let xt = rows[row.it.unwrap()].x;
                let yt = self.f.eval(xt);
                let pb = rows[row.ib.unwrap()];
                ClosedForm::Rational {
                    a: pb.a,
                    b: pb.b,
                    c: pb.c - self.eps - yt,
                    pole: xt,
                }
            }
            RowKind::Smooth => {
                let (pt, pb) = (rows[row.it.unwrap()], rows[row.ib.unwrap()]);
                let scale = 4.0 * pt.a;
                let with_sign = |sign: f64| ClosedForm::SqrtQuadratic {
                    alpha: 2.0 * pt.a,
                    beta: pt.b,
                    sign,
                    qa: scale * (pt.a - pb.a),
                    qb: scale * (pt.b - pb.b),
                    qc: scale * (pt.c - pb.c + self.eps),
                };
                let (plus, minus) = (with_sign(1.0), with_sign(-1.0));
                let probe = self.probe_point(k);
                match self.eval_lower(probe) {
                    Some(target)
                        if (plus.eval(probe) - target).abs()
                            < (minus.eval(probe) - target).abs() =>
                    {
                        plus
                    }
                    _ => minus,
                }
            }
        })
    }

    /// A point strictly inside row `k`'s interval.
    fn probe_point(&self, k: usize) -> f64 {
        let hi = self.rows[k].x;
        let lo = if k == 0 {
            f64::NEG_INFINITY
        } else {
            self.rows[k - 1].x
        };
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 1.0,
            (false, true) => hi - 1.0,
            (false, false) => 0.0,
        }
    }

    /// CSV with header `x,t,it,ib,v`; indices 1-based, irrelevant fields `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,t,it,ib,v\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}", csv_fields(r));
        }
        out
    }

    /// Reads rows written by [`LowerBoundTable::to_csv`] and attaches them to `f`.
    pub fn from_csv(f: Arc<PlqFunction>, eps: f64, text: &str) -> Result<LowerBoundTable> {
        check_eps(eps)?;
        let mut rows = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if k == 0 || line.is_empty() {
                continue;
            }
            rows.push(parse_csv_row(line, k + 1)?);
        }
        Ok(LowerBoundTable { rows, f, eps })
    }
}

pub(crate) fn csv_fields(r: &LowerBoundRow) -> String {
    let idx = |i: Option<usize>| i.map_or("nan".to_string(), |i| (i + 1).to_string());
    format!(
        "{},{},{},{},{}",
        fmt_num(r.x),
        r.t.code(),
        idx(r.it),
        idx(r.ib),
        r.v.map_or("nan".to_string(), fmt_num)
    )
}

pub(crate) fn parse_csv_row(line: &str, line_no: usize) -> Result<LowerBoundRow> {
    let err = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 5 {
        return Err(err(format!("expected 5 fields, found {}", fields.len())));
    }
    let num = |s: &str| parse_num(s).ok_or_else(|| err(format!("invalid number `{s}`")));
    let idx = |s: &str| -> Result<Option<usize>> {
        if s.eq_ignore_ascii_case("nan") {
            return Ok(None);
        }
        match s.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(Some(i - 1)),
            _ => Err(err(format!("invalid index `{s}`"))),
        }
    };
    let x = num(fields[0])?;
    let t = fields[1]
        .parse::<u8>()
        .ok()
        .and_then(RowKind::from_code)
        .ok_or_else(|| err(format!("invalid type `{}`", fields[1])))?;
    let v = num(fields[4])?;
    Ok(LowerBoundRow {
        x,
        t,
        it: idx(fields[2])?,
        ib: idx(fields[3])?,
        v: (!v.is_nan()).then_some(v),
    })
}

pub fn build_graph(f: &PlqFunction, eps: f64) -> Result<EpsSubGraph> {
    let lower = build_lower_table(f, eps)?;
    let upper_source = build_lower_table_shared(Arc::new(f.reflect()), eps)?;
    Ok(EpsSubGraph {
        lower,
        upper_source,
        eps,
    })
}

impl EpsSubGraph {
    /// `∂_ε f(x̄)` in logarithmic time.
    pub fn eval(&self, xbar: f64) -> Interval {
        let Some(lo) = self.lower.eval_lower(xbar) else {
            return Interval::EMPTY;
        };
        let hi = match self.upper_source.eval_lower(-xbar) {
            Some(v) => -v,
            None => return Interval::EMPTY,
        };
        Interval::new(lo, hi.max(lo))
    }

    /// `∂_ε f` over a sorted grid.
    pub fn eval_grid(&self, xs: &[f64]) -> Result<Vec<Interval>> {
        let lower = self.lower.eval_lower_grid(xs)?;
        let mirrored: Vec<f64> = xs.iter().rev().map(|x| -x).collect();
        let mut upper = self.upper_source.eval_lower_grid(&mirrored)?;
        upper.reverse();
        Ok(lower
            .into_iter()
            .zip(upper)
            .map(|(lo, hi)| match (lo, hi) {
                (Some(lo), Some(hi)) => Interval::new(lo, (-hi).max(lo)),
                _ => Interval::EMPTY,
            })
            .collect())
    }
}

impl EpsSubGraph {
    /// CSV with header `side,x,t,it,ib,v`, `side` being `lower` or `upper`; the
    /// `upper` rows are the lower-bound table of `x -> f(-x)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("side,x,t,it,ib,v\n");
        for (side, table) in [("lower", &self.lower), ("upper", &self.upper_source)] {
            for r in table.rows() {
                let _ = writeln!(out, "{side},{}", csv_fields(r));
            }
        }
        out
    }

    /// Reads the output of [`EpsSubGraph::to_csv`] for the function `f`.
    pub fn from_csv(f: &PlqFunction, eps: f64, text: &str) -> Result<EpsSubGraph> {
        check_eps(eps)?;
        let (mut lower, mut upper) = (Vec::new(), Vec::new());
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if k == 0 || line.is_empty() {
                continue;
            }
            let (side, rest) = line.split_once(',').unwrap_or((line, ""));
            let row = parse_csv_row(rest, k + 1)?;
            match side.trim() {
                "lower" => lower.push(row),
                "upper" => upper.push(row),
                other => {
                    return Err(Error::Parse {
                        line: k + 1,
                        message: format!("unknown side `{other}`"),
                    })
                }
            }
        }
        Ok(EpsSubGraph {
            lower: LowerBoundTable {
                rows: lower,
                f: Arc::new(f.clone()),
                eps,
            },
            upper_source: LowerBoundTable {
                rows: upper,
                f: Arc::new(f.reflect()),
                eps,
            },
            eps,
        })
    }
}

pub fn eval_graph(g: &EpsSubGraph, xbar: f64) -> Interval {
    g.eval(xbar)
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn absolute_value_table() {
        let t = build_lower_table(&abs(), 0.5).unwrap();
        assert_eq!(
            t.rows(),
            &[
                LowerBoundRow::new(0.25, RowKind::Constant, None, None, Some(-1.0)),
                LowerBoundRow::new(INF, RowKind::Kink, Some(0), Some(1), None),
            ]
        );
        assert_eq!(
            t.to_csv(),
            "x,t,it,ib,v\n0.25,3,nan,nan,-1\ninf,2,1,2,nan\n"
        );
    }

    #[test]
    fn special_case_tables() {
        let needle = f(&[[0.0, 0.0, 0.0, 0.0]]);
        let t = build_lower_table(&needle, 1.0).unwrap();
        assert_eq!(
            t.rows(),
            &[LowerBoundRow::new(
                INF,
                RowKind::Constant,
                None,
                None,
                Some(f64::NEG_INFINITY)
            )]
        );
        let t = build_lower_table(&square(), 1.0).unwrap();
        assert_eq!(
            t.rows(),
            &[LowerBoundRow::new(
                INF,
                RowKind::Smooth,
                Some(0),
                Some(0),
                None
            )]
        );
        for x in [-3.0, 0.0, 0.5, 4.0] {
            assert!((t.eval_lower(x).unwrap() - (2.0 * x - 2.0)).abs() < 1e-14);
        }
        let line = f(&[[INF, 0.0, 3.0, 1.0]]);
        let t = build_lower_table(&line, 1.0).unwrap();
        assert_eq!(t.eval_lower(-100.0), Some(3.0));
        assert_eq!(
            build_lower_table(&abs(), 0.0),
            Err(Error::NonPositiveEpsilon { eps: 0.0 })
        );
    }

    #[test]
    fn compute_xb_examples() {
        let input = TangentSolveInput {
            xt: 0.0,
            it: 0,
            ib: 0,
        };
        assert_eq!(compute_xb(&square(), &input, 1.0).unwrap(), 1.0);
        let input = TangentSolveInput {
            xt: 0.0,
            it: 0,
            ib: 1,
        };
        assert_eq!(compute_xb(&abs(), &input, 0.5).unwrap(), 0.25);
        let parallel = f(&[[0.0, 0.0, 1.0, 0.0], [INF, 0.0, 1.0, 0.0]]);
        let input = TangentSolveInput {
            xt: 0.0,
            it: 0,
            ib: 1,
        };
        assert_eq!(compute_xb(&parallel, &input, 0.5), Err(Error::NoRoot));
        // crossing lies in piece 1, not piece 0
        let input = TangentSolveInput {
            xt: -1.0,
            it: 0,
            ib: 0,
        };
        assert!(matches!(
            compute_xb(&abs(), &input, 0.5),
            Err(Error::NoRoot) | Err(Error::RootOutsidePiece { .. })
        ));
    }

    #[test]
    fn compute_xt_examples() {
        assert_eq!(compute_xt(&square(), 1.0, 0, 0, 1.0).unwrap(), 0.0);
        assert_eq!(compute_xt(&square(), 0.0, 0, 0, 1.0).unwrap(), -1.0);
        let split = f(&[[-1.0, 1.0, 0.0, 0.0], [INF, 1.0, 0.0, 0.0]]);
        assert_eq!(compute_xt(&split, 0.0, 1, 0, 1.0).unwrap(), -1.0);
        assert!(matches!(
            compute_xt(&split, -0.5, 0, 1, 1.0),
            Err(Error::RootOutsidePiece { .. })
        ));
        assert_eq!(
            compute_xt(&abs(), 1.0, 1, 0, 0.5),
            Err(Error::LinearTangentPiece { piece: 0 })
        );
    }

    #[test]
    fn eval_lower_examples() {
        let t = build_lower_table(&abs(), 0.5).unwrap();
        assert_eq!(t.eval_lower(0.1), Some(-1.0));
        assert_eq!(t.eval_lower(0.5), Some(0.0));
        let t = build_lower_table(&square(), 1.0).unwrap();
        assert_eq!(t.eval_lower(3.0), Some(4.0));
    }

    #[test]
    fn eval_lower_bounded_domain() {
        let restricted = f(&[[0.0, 0.0, 0.0, INF], [INF, 1.0, 0.0, 0.0]]);
        let t = build_lower_table(&restricted, 1.0).unwrap();
        assert_eq!(t.eval_lower(-0.5), None);
        assert_eq!(t.eval_lower(0.0), Some(f64::NEG_INFINITY));
        // line through (0, 0) and (0.5, 0.25 - 1)
        assert_eq!(t.eval_lower(0.5), Some(-1.5));
    }

    #[test]
    fn grid_examples() {
        let t = build_lower_table(&abs(), 0.5).unwrap();
        let got = t.eval_lower_grid(&[0.1, 0.2, 0.5, 2.0]).unwrap();
        assert_eq!(got, vec![Some(-1.0), Some(-1.0), Some(0.0), Some(0.75)]);
        assert_eq!(t.eval_lower_grid(&[]).unwrap(), vec![]);
        assert_eq!(
            t.eval_lower_grid(&[1.0, 0.0]),
            Err(Error::UnsortedInput { position: 1 })
        );
        let xs: Vec<f64> = (0..200).map(|k| -5.0 + 0.05 * k as f64).collect();
        let merged = t.eval_lower_grid(&xs).unwrap();
        let pointwise: Vec<_> = xs.iter().map(|&x| t.eval_lower(x)).collect();
        assert_eq!(merged, pointwise);
    }

    #[test]
    fn graph_examples() {
        let g = build_graph(&abs(), 0.5).unwrap();
        assert_eq!(g.upper_source.rows(), g.lower.rows());
        assert_eq!(g.eval(0.5), Interval::new(0.0, 1.0));
        assert_eq!(g.eval(0.0), Interval::new(-1.0, 1.0));
        assert_eq!(g.eval(-0.5), Interval::new(-1.0, 0.0));
        let g = build_graph(&square(), 1.0).unwrap();
        assert_eq!(g.eval(0.0), Interval::new(-2.0, 2.0));
        let needle = f(&[[2.0, 0.0, 0.0, 1.0]]);
        let g = build_graph(&needle, 0.3).unwrap();
        assert_eq!(g.eval(2.0), Interval::REALS);
        assert!(g.eval(2.5).is_empty());
    }

    #[test]
    fn classify_examples() {
        let t = build_lower_table(&abs(), 0.5).unwrap();
        assert_eq!(t.classify_piece(0).unwrap(), ClosedForm::Constant(-1.0));
        let form = t.classify_piece(1).unwrap();
        assert_eq!(
            form,
            ClosedForm::Rational {
                a: 0.0,
                b: 1.0,
                c: -0.5,
                pole: 0.0
            }
        );
        for x in [0.3, 1.0, 7.0] {
            assert!((form.eval(x) - (1.0 - 0.5 / x)).abs() < 1e-15);
        }
        let t = build_lower_table(&square(), 1.0).unwrap();
        let form = t.classify_piece(0).unwrap();
        for k in 0..100 {
            let x = -10.0 + 0.2 * k as f64;
            assert!((form.eval(x) - (2.0 * x - 2.0)).abs() < 1e-12);
        }
        assert!(t.classify_piece(3).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let g = f(&[
            [-1.0, 0.0, 0.0, INF],
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0],
            [INF, 0.5, 0.0, 0.5],
        ]);
        let t = build_lower_table(&g, 0.25).unwrap();
        let back = LowerBoundTable::from_csv(Arc::new(g.clone()), 0.25, &t.to_csv()).unwrap();
        assert_eq!(back, t);
        let graph = build_graph(&g, 0.25).unwrap();
        assert_eq!(
            EpsSubGraph::from_csv(&g, 0.25, &graph.to_csv()).unwrap(),
            graph
        );
    }
}
