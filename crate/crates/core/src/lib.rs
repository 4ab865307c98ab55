//! ε-subdifferentials of convex univariate piecewise linear-quadratic (PLQ) functions.
//!
//! * [`eps_subdifferential`] answers one query `∂_ε f(x̄)` in `O(log n)`.
//! * [`build_graph`] computes the whole graph of `∂_ε f` in `O(n)`; each later
//!   query then costs `O(log n)`, or amortized `O(1)` on a sorted grid.
//! * [`oracle`] holds an independent conjugate-based reference used for checking.
//!
//! ```
//! use plq_epssub::{eps_subdifferential, build_graph, Interval, PlqFunction};
//!
//! let abs = PlqFunction::new(&[[0.0, 0.0, -1.0, 0.0], [f64::INFINITY, 0.0, 1.0, 0.0]]).unwrap();
//! assert_eq!(eps_subdifferential(&abs, 2.0, 0.5).unwrap(), Interval::new(0.75, 1.0));
//! let g = build_graph(&abs, 0.5).unwrap();
//! assert_eq!(g.eval(0.5), Interval::new(0.0, 1.0));
//! ```

// `!(a < b)` is used on purpose so that NaN takes the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod error;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod plq;
pub mod point;
pub mod text;
pub mod tolerance;

pub use error::{Error, Result};
pub use generate::{generate_convex_plq, random_convex_plq, RandomShape};
pub use graph::{
    build_graph, build_lower_table, build_lower_table_instrumented, build_lower_table_shared,
    compute_xb, compute_xt, eval_graph, ClosedForm, EpsSubGraph, LowerBoundRow, LowerBoundTable,
    RowKind, SweepStats, TangentSolveInput,
};
pub use oracle::{conjugate, eps_sub_reference, is_eps_subgradient};
pub use plq::{Domain, Interval, Piece, PlqFunction};
pub use point::{
    conjugate_point, eps_subdifferential, intersection, support_line, ConjugatePoint, Side,
    SupportLine,
};
pub use text::{parse_plq, to_plq_text};
pub use tolerance::{rel_close, Tolerance};
