//! Sound expression bounding by combining equality saturation over e-graphs
//! with interval abstract interpretation.
//!
//! Every e-class carries a binary64 interval enclosing the values of every
//! expression it represents. Rewrites refine those intervals (the meet over a
//! class narrows as new equivalent forms join it), and refined intervals
//! unlock conditional rewrites whose side conditions are checked abstractly.
//! The two mechanisms feed each other until the iteration budget runs out.
//!
//! The pieces:
//!
//! - [`expr`]: the expression AST, s-expression parsing/printing, and a
//!   double-double concrete evaluator used as the testing oracle.
//! - [`interval`]: the abstract domain — outwardly rounded intervals.
//! - [`egraph`]: hash-consed e-nodes, union-find, congruence rebuilding.
//! - [`analysis`]: the interval e-class analysis and worklist propagation.
//! - [`rules`]: patterns, e-matching, conditions, and the default ruleset.
//! - [`saturate`]: the driver loop, budgets and run reports.

pub mod analysis;
pub mod dd;
pub mod egraph;
pub mod error;
pub mod expr;
pub mod interval;
pub mod literal;
pub mod rules;
pub mod saturate;
pub mod sexpr;

pub use egraph::{EClassId, EGraph, ENode};
pub use error::{Error, ParseError, Result};
pub use expr::{concrete_eval, format_expr, parse_expr, Environment, Expr, InputBox, OpKind};
pub use interval::{iv_apply, Interval};
pub use rules::{
    apply_rule, default_ruleset, ematch, eval_condition, parse_pattern, parse_ruleset, Condition,
    Pattern, Rewrite, Substitution,
};
pub use saturate::{detect_cycle, naive_bound, run, run_full, Config, RunReport, WidthFlag};
