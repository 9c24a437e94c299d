//! The saturation driver: iterate match → apply → rebuild → propagate under
//! budgets, compute naive and optimized bounds, and report metrics.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::egraph::{EClassId, EGraph};
use crate::error::{Error, Result};
use crate::expr::{Expr, InputBox};
use crate::interval::{iv_apply, Interval};
use crate::rules::{apply_rule_with_budget, default_ruleset, Rewrite};

#[derive(Clone, Debug)]
pub struct Config {
    /// Rounds of rule application. Within a round the rules run in ruleset
    /// order, with rebuild and propagation after every rule, so later rules
    /// see earlier rules' results.
    pub iterations: u32,
    /// Stop once the e-graph holds this many nodes.
    pub node_limit: usize,
    /// Per-class cap on analysis narrowing steps.
    pub update_cap: u32,
    pub ruleset: Vec<Rewrite>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            iterations: 4,
            node_limit: 10_000,
            update_cap: 1000,
            ruleset: default_ruleset(),
        }
    }
}

impl Config {
    pub fn with_iterations(iterations: u32) -> Self {
        Config { iterations, ..Config::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WidthFlag {
    #[serde(rename = "finite")]
    Finite,
    #[serde(rename = "naive-infinite")]
    NaiveInfinite,
    #[serde(rename = "both-infinite")]
    BothInfinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub naive: Interval,
    pub optimized: Interval,
    pub relative_width: f64,
    pub relative_width_flag: WidthFlag,
    pub iterations_run: u32,
    pub node_count_start: usize,
    pub node_count_end: usize,
    pub rewrites_applied: usize,
    /// Seconds spent inside `run` itself, monotonic clock.
    pub wall_time: f64,
    pub cycle_detected: bool,
}

impl RunReport {
    /// Equality ignoring the timing field.
    pub fn same_results(&self, other: &RunReport) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.wall_time = 0.0;
        b.wall_time = 0.0;
        a == b
    }
}

/// Classical bottom-up interval evaluation of the expression tree, with no
/// rewriting. The baseline the engine is measured against.
pub fn naive_bound(e: &Expr, input_box: &InputBox) -> Result<Interval> {
    match e {
        Expr::Var(v) => input_box.get(v).ok_or_else(|| Error::UnboundVar(v.clone())),
        Expr::Const(c) => Interval::make_const(c),
        Expr::Op(op, children) => {
            let args = children
                .iter()
                .map(|c| naive_bound(c, input_box))
                .collect::<Result<Vec<_>>>()?;
            Ok(iv_apply(*op, &args))
        }
    }
}

/// True iff some class is reachable from itself through child edges, within
/// the subgraph reachable from `root`.
pub fn detect_cycle(g: &EGraph, root: EClassId) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let root = g.find(root);
    let mut colors: HashMap<EClassId, Color> = HashMap::new();
    // iterative DFS with an explicit enter/exit stack
    let mut stack = vec![(root, false)];
    while let Some((id, exiting)) = stack.pop() {
        if exiting {
            colors.insert(id, Color::Black);
            continue;
        }
        match colors.get(&id).copied().unwrap_or(Color::White) {
            Color::Gray => return true,
            Color::Black => continue,
            Color::White => {}
        }
        colors.insert(id, Color::Gray);
        stack.push((id, true));
        for n in g.nodes(id) {
            for &c in n.children() {
                let c = g.find(c);
                match colors.get(&c).copied().unwrap_or(Color::White) {
                    Color::Gray => return true,
                    Color::Black => {}
                    Color::White => stack.push((c, false)),
                }
            }
        }
    }
    false
}

fn relative_width(naive: Interval, optimized: Interval) -> (f64, WidthFlag) {
    let wn = naive.width();
    let wo = optimized.width();
    if wn.is_infinite() {
        if wo.is_infinite() {
            (1.0, WidthFlag::BothInfinite)
        } else {
            (0.0, WidthFlag::NaiveInfinite)
        }
    } else if wn == 0.0 {
        (1.0, WidthFlag::Finite)
    } else {
        (wo / wn, WidthFlag::Finite)
    }
}

/// Runs the full engine and also returns the final e-graph and root class.
pub fn run_full(e: &Expr, input_box: &InputBox, cfg: &Config) -> Result<(RunReport, EGraph, EClassId)> {
    for v in e.free_vars() {
        if !input_box.contains(&v) {
            return Err(Error::UnboundVar(v));
        }
    }
    let start = Instant::now();
    let naive = naive_bound(e, input_box)?;

    let mut g = EGraph::new(input_box.clone(), cfg.update_cap);
    let root = g.add_expr(e)?;
    g.seed_leaves();
    g.propagate()?;
    let node_count_start = g.node_count();

    let mut rewrites_applied = 0;
    let mut iterations_run = 0;
    'outer: for _ in 0..cfg.iterations {
        iterations_run += 1;
        let mut effective = 0;
        for rule in &cfg.ruleset {
            if g.node_count() >= cfg.node_limit {
                rewrites_applied += effective;
                break 'outer;
            }
            effective += apply_rule_with_budget(&mut g, rule, cfg.node_limit)?;
            g.rebuild()?;
            g.propagate()?;
        }
        rewrites_applied += effective;
        if effective == 0 {
            break; // saturated
        }
    }

    let root = g.find(root);
    let optimized = g.class_data(root);
    let (rel, flag) = relative_width(naive, optimized);
    let report = RunReport {
        naive,
        optimized,
        relative_width: rel,
        relative_width_flag: flag,
        iterations_run,
        node_count_start,
        node_count_end: g.node_count(),
        rewrites_applied,
        wall_time: start.elapsed().as_secs_f64(),
        cycle_detected: detect_cycle(&g, root),
    };
    debug_assert!(report.optimized.leq(report.naive), "rewriting must only narrow");
    Ok((report, g, root))
}

/// Builds an e-graph from `e`, saturates under `cfg`, and reports the naive
/// and optimized bounds of the root class.
pub fn run(e: &Expr, input_box: &InputBox, cfg: &Config) -> Result<RunReport> {
    run_full(e, input_box, cfg).map(|(report, _, _)| report)
}
