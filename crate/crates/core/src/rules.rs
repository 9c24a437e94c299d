//! Pattern language, e-matching, interval-checked conditional rewrites, and
//! the default ruleset.
//!
//! Rules are compiled from textual definitions in the pattern syntax:
//!
//! ```text
//! (rule div-invert (/ ?a ?b) (/ 1 (/ ?b ?a)) (and (nonzero ?a) (nonzero (/ ?b ?a))))
//! ```
//!
//! Condition atoms are evaluated abstractly from current class data; the
//! condition term itself (`(/ ?b ?a)` above) never has to exist in the graph.
//! A failed condition simply blocks the rewrite, which is always sound.

use std::collections::{BTreeMap, HashSet};

use crate::egraph::{EClassId, EGraph, ENode};
use crate::error::{Error, ParseError, Result};
use crate::expr::{self, OpKind};
use crate::interval::{iv_apply, Interval};
use crate::sexpr::{self, Sexpr};

/// An expression tree whose leaves may be pattern variables `?a`, `?b`, ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Wild(String),
    Var(String),
    Const(String),
    Op(OpKind, Vec<Pattern>),
}

impl Pattern {
    fn wilds(&self, out: &mut HashSet<String>) {
        match self {
            Pattern::Wild(w) => {
                out.insert(w.clone());
            }
            Pattern::Var(_) | Pattern::Const(_) => {}
            Pattern::Op(_, children) => {
                for c in children {
                    c.wilds(out);
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CondAtom {
    /// `0 ∉ ⟦pattern⟧` under the abstract valuation of the match.
    ExcludesZero(Pattern),
    /// `⟦pattern⟧ ⊆ [0, +inf]`.
    NonNegative(Pattern),
}

impl CondAtom {
    fn pattern(&self) -> &Pattern {
        match self {
            CondAtom::ExcludesZero(p) | CondAtom::NonNegative(p) => p,
        }
    }
}

/// A conjunction of atoms; empty means unconditional.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Condition {
    pub atoms: Vec<CondAtom>,
}

#[derive(Clone, Debug)]
pub struct Rewrite {
    pub name: String,
    pub lhs: Pattern,
    pub rhs: Pattern,
    pub condition: Condition,
}

/// Pattern-variable bindings; total on the LHS variables of a match.
pub type Substitution = BTreeMap<String, EClassId>;

impl Rewrite {
    pub fn new(name: impl Into<String>, lhs: Pattern, rhs: Pattern, condition: Condition) -> Result<Rewrite> {
        let name = name.into();
        let mut lhs_vars = HashSet::new();
        lhs.wilds(&mut lhs_vars);
        let mut rhs_vars = HashSet::new();
        rhs.wilds(&mut rhs_vars);
        for atom in &condition.atoms {
            atom.pattern().wilds(&mut rhs_vars);
        }
        if let Some(free) = rhs_vars.difference(&lhs_vars).next() {
            return Err(Error::Rule {
                rule: name,
                msg: format!("variable ?{free} is not bound by the left-hand side"),
            });
        }
        Ok(Rewrite { name, lhs, rhs, condition })
    }
}

fn pattern_from_sexpr(s: &Sexpr) -> std::result::Result<Pattern, ParseError> {
    match s {
        Sexpr::Atom(a, pos) => {
            if let Some(w) = a.strip_prefix('?') {
                if w.is_empty() || !w.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(ParseError::new(*pos, format!("bad pattern variable `{a}`")));
                }
                return Ok(Pattern::Wild(w.to_string()));
            }
            let as_expr = expr::parse_expr(a).map_err(|e| match e {
                Error::Parse(p) => p,
                other => ParseError::new(*pos, other.to_string()),
            })?;
            Ok(match as_expr {
                expr::Expr::Var(v) => Pattern::Var(v),
                expr::Expr::Const(c) => Pattern::Const(c),
                expr::Expr::Op(..) => unreachable!("atom cannot parse to an application"),
            })
        }
        Sexpr::List(items, pos) => {
            let head = items
                .first()
                .and_then(Sexpr::as_atom)
                .ok_or_else(|| ParseError::new(*pos, "operator must be an atom"))?;
            let args = &items[1..];
            let op = match (head, args.len()) {
                ("+", 2) => OpKind::Add,
                ("-", 2) => OpKind::Sub,
                ("-", 1) | ("neg", 1) => OpKind::Neg,
                ("*", 2) => OpKind::Mul,
                ("/", 2) => OpKind::Div,
                ("sqrt", 1) => OpKind::Sqrt,
                ("ln", 1) => OpKind::Ln,
                ("exp", 1) => OpKind::Exp,
                ("pow", 2) => {
                    let e = expr::parse_pow_exponent(&args[1])?;
                    let base = pattern_from_sexpr(&args[0])?;
                    return Ok(Pattern::Op(OpKind::Pow(e), vec![base]));
                }
                _ => {
                    return Err(ParseError::new(
                        *pos,
                        format!("unknown pattern operator `{head}` with {} argument(s)", args.len()),
                    ))
                }
            };
            let children = args
                .iter()
                .map(pattern_from_sexpr)
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(Pattern::Op(op, children))
        }
    }
}

/// Parses a pattern from s-expression text.
pub fn parse_pattern(text: &str) -> Result<Pattern> {
    let form = sexpr::parse_one(text)?;
    Ok(pattern_from_sexpr(&form)?)
}

fn condition_from_sexpr(s: &Sexpr) -> std::result::Result<Condition, ParseError> {
    fn atom(s: &Sexpr) -> std::result::Result<CondAtom, ParseError> {
        match s {
            Sexpr::List(items, pos) => {
                let head = items
                    .first()
                    .and_then(Sexpr::as_atom)
                    .ok_or_else(|| ParseError::new(*pos, "condition atom must be a list"))?;
                if items.len() != 2 {
                    return Err(ParseError::new(*pos, format!("`{head}` takes one pattern")));
                }
                let p = pattern_from_sexpr(&items[1])?;
                match head {
                    "nonzero" => Ok(CondAtom::ExcludesZero(p)),
                    "nonneg" => Ok(CondAtom::NonNegative(p)),
                    _ => Err(ParseError::new(*pos, format!("unknown condition atom `{head}`"))),
                }
            }
            Sexpr::Atom(a, pos) => Err(ParseError::new(*pos, format!("unexpected atom `{a}` in condition"))),
        }
    }

    match s {
        Sexpr::Atom(a, pos) if a == "true" => {
            let _ = pos;
            Ok(Condition::default())
        }
        Sexpr::List(items, _) if items.first().and_then(Sexpr::as_atom) == Some("and") => {
            let atoms = items[1..]
                .iter()
                .map(atom)
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(Condition { atoms })
        }
        other => Ok(Condition { atoms: vec![atom(other)?] }),
    }
}

/// Parses a ruleset file: a sequence of `(rule name lhs rhs [condition])`
/// forms, `;` comments allowed.
pub fn parse_ruleset(text: &str) -> Result<Vec<Rewrite>> {
    let forms = sexpr::parse_many(text)?;
    let mut out = Vec::new();
    let mut names = HashSet::new();
    for form in &forms {
        let items = match form {
            Sexpr::List(items, _) if items.first().and_then(Sexpr::as_atom) == Some("rule") => items,
            other => {
                return Err(ParseError::new(other.pos(), "expected a (rule ...) form").into());
            }
        };
        if items.len() != 4 && items.len() != 5 {
            return Err(ParseError::new(
                form.pos(),
                "rule form is (rule name lhs rhs [condition])",
            )
            .into());
        }
        let name = items[1]
            .as_atom()
            .ok_or_else(|| ParseError::new(items[1].pos(), "rule name must be an atom"))?
            .to_string();
        if !names.insert(name.clone()) {
            return Err(Error::Rule { rule: name, msg: "duplicate rule name".into() });
        }
        let lhs = pattern_from_sexpr(&items[2])?;
        let rhs = pattern_from_sexpr(&items[3])?;
        let condition = match items.get(4) {
            Some(c) => condition_from_sexpr(c)?,
            None => Condition::default(),
        };
        out.push(Rewrite::new(name, lhs, rhs, condition)?);
    }
    Ok(out)
}

/// The default ruleset. Order matters operationally: within one saturation
/// iteration rules run in this order, each seeing the effects of earlier
/// ones, which lets restructure-then-cancel chains complete in few
/// iterations. Quiescent intervals do not depend on the order.
const DEFAULT_RULES: &str = r#"
; commutativity
(rule add-comm        (+ ?a ?b) (+ ?b ?a))
(rule mul-comm        (* ?a ?b) (* ?b ?a))
; division restructuring
(rule div-to-recip    (/ ?a ?b) (* ?a (/ 1 ?b)) (nonzero ?b))
; multiplicative associativity
(rule mul-assoc       (* (* ?a ?b) ?c) (* ?a (* ?b ?c)))
(rule mul-assoc-rev   (* ?a (* ?b ?c)) (* (* ?a ?b) ?c))
(rule recip-to-div    (* ?a (/ 1 ?b)) (/ ?a ?b) (nonzero ?b))
(rule div-div         (/ (/ ?a ?b) ?c) (/ ?a (* ?b ?c)) (and (nonzero ?b) (nonzero ?c)))
(rule recip-recip     (/ 1 (/ 1 ?a)) ?a (nonzero ?a))
(rule div-invert      (/ ?a ?b) (/ 1 (/ ?b ?a)) (and (nonzero ?a) (nonzero (/ ?b ?a))))
(rule div-split       (/ ?a ?b) (+ 1 (/ (- ?a ?b) ?b)) (nonzero ?b))
(rule binomial        (/ 1 (- 1 ?a)) (+ 1 (/ ?a (- 1 ?a))) (nonzero (- 1 ?a)))
(rule frac-plus-int   (+ (/ ?b ?c) ?a) (/ (+ ?b (* ?a ?c)) ?c) (nonzero ?c))
(rule frac-minus-int  (- (/ ?b ?c) ?a) (/ (- ?b (* ?a ?c)) ?c) (nonzero ?c))
; subtraction/negation normalization and additive associativity
(rule sub-to-neg      (- ?a ?b) (+ ?a (neg ?b)))
(rule add-assoc       (+ (+ ?a ?b) ?c) (+ ?a (+ ?b ?c)))
(rule add-assoc-rev   (+ ?a (+ ?b ?c)) (+ (+ ?a ?b) ?c))
(rule neg-to-sub      (+ ?a (neg ?b)) (- ?a ?b))
(rule neg-neg         (neg (neg ?a)) ?a)
; cancellation
(rule sub-cancel      (- ?a ?a) 0)
(rule div-cancel      (/ ?a ?a) 1 (nonzero ?a))
(rule mul-div-cancel  (/ (* ?a ?b) ?b) ?a (nonzero ?b))
(rule div-mul-cancel  (* (/ ?a ?b) ?b) ?a (nonzero ?b))
(rule zero-div        (/ 0 ?a) 0 (nonzero ?a))
; identities and annihilation
(rule add-zero        (+ ?a 0) ?a)
(rule sub-zero        (- ?a 0) ?a)
(rule mul-one         (* ?a 1) ?a)
(rule mul-zero        (* ?a 0) 0)
(rule div-one         (/ ?a 1) ?a)
; distributivity / common terms
(rule distrib-add     (* ?a (+ ?b ?c)) (+ (* ?a ?b) (* ?a ?c)))
(rule factor-add      (+ (* ?a ?b) (* ?a ?c)) (* ?a (+ ?b ?c)))
(rule distrib-sub     (* ?a (- ?b ?c)) (- (* ?a ?b) (* ?a ?c)))
(rule factor-sub      (- (* ?a ?b) (* ?a ?c)) (* ?a (- ?b ?c)))
; power conversions
(rule pow-zero        (pow ?a 0) 1 (nonzero ?a))
(rule pow-one         (pow ?a 1) ?a)
(rule pow-two         (pow ?a 2) (* ?a ?a))
(rule mul-to-pow      (* ?a ?a) (pow ?a 2))
(rule pow-neg-one     (pow ?a -1) (/ 1 ?a) (nonzero ?a))
; factorisation
(rule factorise       (- (pow ?a 2) 1) (* (- ?a 1) (+ ?a 1)))
; elementary
(rule ln-exp          (ln (exp ?a)) ?a)
"#;

/// The normative 39-rule set.
pub fn default_ruleset() -> Vec<Rewrite> {
    parse_ruleset(DEFAULT_RULES).expect("the built-in ruleset parses")
}

fn match_in(
    g: &EGraph,
    p: &Pattern,
    class: EClassId,
    sub: Substitution,
    out: &mut Vec<Substitution>,
) {
    match p {
        Pattern::Wild(w) => match sub.get(w) {
            Some(&bound) => {
                if bound == class {
                    out.push(sub);
                }
            }
            None => {
                let mut sub = sub;
                sub.insert(w.clone(), class);
                out.push(sub);
            }
        },
        Pattern::Var(v) => {
            if g.lookup(&ENode::Var(v.clone())) == Some(class) {
                out.push(sub);
            }
        }
        Pattern::Const(c) => {
            if g.lookup(&ENode::Const(c.clone())) == Some(class) {
                out.push(sub);
            }
        }
        Pattern::Op(op, kids) => {
            for node in g.nodes(class) {
                let ch = match node {
                    ENode::Op(nop, ch) if nop == op => ch,
                    _ => continue,
                };
                let mut partial = vec![sub.clone()];
                for (kp, &kc) in kids.iter().zip(ch.iter()) {
                    let kc = g.find(kc);
                    let mut next = Vec::new();
                    for s in partial {
                        match_in(g, kp, kc, s, &mut next);
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                out.extend(partial);
            }
        }
    }
}

/// All matches of `p` modulo the current equivalences. Requires a rebuilt
/// graph. Repeated pattern variables must bind the same canonical class.
pub fn ematch(g: &EGraph, p: &Pattern) -> Vec<(EClassId, Substitution)> {
    let mut out = Vec::new();
    let mut seen: HashSet<(EClassId, Vec<(String, EClassId)>)> = HashSet::new();
    for class in g.classes() {
        let mut subs = Vec::new();
        match_in(g, p, class, Substitution::new(), &mut subs);
        for sub in subs {
            let key = (class, sub.iter().map(|(k, v)| (k.clone(), *v)).collect());
            if seen.insert(key) {
                out.push((class, sub));
            }
        }
    }
    out
}

/// Abstractly evaluates a pattern: wildcards take the class data of their
/// binding, named leaves their box/constant abstraction, operators the
/// interval transfer function.
fn abstract_pattern(g: &EGraph, p: &Pattern, sub: &Substitution) -> Option<Interval> {
    match p {
        Pattern::Wild(w) => sub.get(w).map(|&c| g.class_data(c)),
        Pattern::Var(v) => g.input_box().get(v),
        Pattern::Const(c) => Interval::make_const(c).ok(),
        Pattern::Op(op, kids) => {
            let args = kids
                .iter()
                .map(|k| abstract_pattern(g, k, sub))
                .collect::<Option<Vec<_>>>()?;
            Some(iv_apply(*op, &args))
        }
    }
}

/// True iff every atom of the condition holds under the abstract valuation.
/// Anything unresolvable evaluates to false, blocking the rewrite.
pub fn eval_condition(g: &EGraph, cond: &Condition, sub: &Substitution) -> bool {
    cond.atoms.iter().all(|atom| {
        let iv = match abstract_pattern(g, atom.pattern(), sub) {
            Some(iv) => iv,
            None => return false,
        };
        match atom {
            CondAtom::ExcludesZero(_) => iv.excludes_zero(),
            CondAtom::NonNegative(_) => iv.is_nonnegative(),
        }
    })
}

fn instantiate(g: &mut EGraph, p: &Pattern, sub: &Substitution) -> Result<EClassId> {
    match p {
        Pattern::Wild(w) => Ok(g.find(sub[w])),
        Pattern::Var(v) => g.add(ENode::Var(v.clone())),
        Pattern::Const(c) => g.add(ENode::Const(c.clone())),
        Pattern::Op(op, kids) => {
            let ids = kids
                .iter()
                .map(|k| instantiate(g, k, sub))
                .collect::<Result<Vec<_>>>()?;
            g.add(ENode::Op(*op, ids))
        }
    }
}

/// Matches `r` against the graph, filters by its condition on current class
/// data, instantiates the right-hand sides and merges. Returns the number of
/// merges that changed the partition.
pub fn apply_rule(g: &mut EGraph, r: &Rewrite) -> Result<usize> {
    apply_rule_with_budget(g, r, usize::MAX)
}

/// Like [`apply_rule`] but stops instantiating once the graph holds
/// `node_limit` nodes. Matches are applied in discovery order, so a truncated
/// application is still deterministic.
pub fn apply_rule_with_budget(g: &mut EGraph, r: &Rewrite, node_limit: usize) -> Result<usize> {
    let matches: Vec<(EClassId, Substitution)> = ematch(g, &r.lhs)
        .into_iter()
        .filter(|(_, sub)| eval_condition(g, &r.condition, sub))
        .collect();
    let mut applied = 0;
    for (class, sub) in matches {
        if g.node_count() >= node_limit {
            break;
        }
        let rhs = instantiate(g, &r.rhs, &sub)?;
        let (_, changed) = g.merge(class, rhs)?;
        if changed {
            applied += 1;
        }
    }
    Ok(applied)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expr, InputBox};

    fn boxed(vars: &[(&str, f64, f64)]) -> InputBox {
        let mut b = InputBox::new();
        for (n, lo, hi) in vars {
            b.insert(*n, *lo, *hi).unwrap();
        }
        b
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    #[test]
    fn default_ruleset_shape() {
        let rules = default_ruleset();
        assert_eq!(rules.len(), 39);

        let binomial = rules.iter().find(|r| r.name == "binomial").unwrap();
        assert_eq!(binomial.condition.atoms.len(), 1);
        assert_eq!(
            binomial.condition.atoms[0],
            CondAtom::ExcludesZero(parse_pattern("(- 1 ?a)").unwrap())
        );

        let ln_exp = rules.iter().find(|r| r.name == "ln-exp").unwrap();
        assert!(ln_exp.condition.atoms.is_empty());
    }

    #[test]
    fn rule_validation() {
        let err = Rewrite::new(
            "bad",
            parse_pattern("(+ ?a ?a)").unwrap(),
            parse_pattern("(* 2 ?b)").unwrap(),
            Condition::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("?b"));

        assert!(parse_ruleset("(rule a (+ ?a ?b) ?a) (rule a (+ ?a ?b) ?b)").is_err());
    }

    #[test]
    fn ematch_repeated_variables() {
        let mut g = EGraph::with_defaults(boxed(&[("x", 1.0, 2.0), ("y", 1.0, 2.0)]));
        g.add_expr(&parse_expr("(/ x x)").unwrap()).unwrap();
        let p = parse_pattern("(/ ?a ?a)").unwrap();
        let m = ematch(&g, &p);
        assert_eq!(m.len(), 1);
        let x = g.lookup(&ENode::Var("x".into())).unwrap();
        assert_eq!(m[0].1["a"], x);

        let mut g = EGraph::with_defaults(boxed(&[("x", 1.0, 2.0), ("y", 1.0, 2.0)]));
        g.add_expr(&parse_expr("(- x y)").unwrap()).unwrap();
        assert!(ematch(&g, &parse_pattern("(- ?a ?a)").unwrap()).is_empty());
    }

    #[test]
    fn ematch_after_commutativity() {
        let mut g = EGraph::with_defaults(boxed(&[("x", 1.0, 2.0), ("y", 1.0, 2.0)]));
        g.add_expr(&parse_expr("(+ x y)").unwrap()).unwrap();
        let comm = default_ruleset().into_iter().find(|r| r.name == "add-comm").unwrap();
        apply_rule(&mut g, &comm).unwrap();
        g.rebuild().unwrap();
        g.propagate().unwrap();
        let m = ematch(&g, &parse_pattern("(+ ?a ?b)").unwrap());
        assert_eq!(m.len(), 2); // (+ x y) and (+ y x) in the same class
    }

    #[test]
    fn condition_evaluation() {
        let mut g = EGraph::with_defaults(boxed(&[("a", 1.0, 2.0), ("b", 3.0, 4.0), ("c", 0.0, 1.0)]));
        g.add_expr(&parse_expr("(+ (+ a b) c)").unwrap()).unwrap();
        let a = g.lookup(&ENode::Var("a".into())).unwrap();
        let b = g.lookup(&ENode::Var("b".into())).unwrap();
        let c = g.lookup(&ENode::Var("c".into())).unwrap();

        let mut sub = Substitution::new();
        sub.insert("a".into(), a);
        sub.insert("b".into(), b);
        sub.insert("c".into(), c);

        let nz = |p: &str| Condition { atoms: vec![CondAtom::ExcludesZero(parse_pattern(p).unwrap())] };
        assert!(eval_condition(&g, &nz("?a"), &sub));
        assert!(!eval_condition(&g, &nz("?c"), &sub)); // [0,1] contains zero
        // abstract evaluation of a term that is not in the graph: b/a in [1.5, 4]
        assert!(eval_condition(&g, &nz("(/ ?b ?a)"), &sub));
        let iv_ba = abstract_pattern(&g, &parse_pattern("(/ ?b ?a)").unwrap(), &sub).unwrap();
        assert!(iv_ba.leq(iv(1.5_f64.next_down(), 4.0_f64.next_up())));

        let nn = |p: &str| Condition { atoms: vec![CondAtom::NonNegative(parse_pattern(p).unwrap())] };
        assert!(eval_condition(&g, &nn("?c"), &sub));
        assert!(eval_condition(&g, &nn("(- ?b ?a)"), &sub));
        assert!(!eval_condition(&g, &nn("(- ?a ?b)"), &sub));
    }

    #[test]
    fn apply_sub_cancel() {
        let mut g = EGraph::with_defaults(boxed(&[("x", 0.0, 1.0)]));
        let root = g.add_expr(&parse_expr("(- x x)").unwrap()).unwrap();
        let rule = default_ruleset().into_iter().find(|r| r.name == "sub-cancel").unwrap();
        let n = apply_rule(&mut g, &rule).unwrap();
        g.rebuild().unwrap();
        g.propagate().unwrap();
        assert_eq!(n, 1);
        assert_eq!(g.class_data(root), iv(0.0, 0.0));
    }

    #[test]
    fn condition_blocks_unsound_cancel() {
        let mut g = EGraph::with_defaults(boxed(&[("a", -1.0, 1.0)]));
        g.add_expr(&parse_expr("(/ a a)").unwrap()).unwrap();
        let rule = default_ruleset().into_iter().find(|r| r.name == "div-cancel").unwrap();
        assert_eq!(apply_rule(&mut g, &rule).unwrap(), 0);
    }

    #[test]
    fn rules_file_round_trip() {
        let text = r#"
            (rule my-rule (/ ?a ?b) (/ 1 (/ ?b ?a)) (and (nonzero ?a) (nonzero (/ ?b ?a))))
            (rule plain (+ ?a 0) ?a)
        "#;
        let rules = parse_ruleset(text).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(rules[0].name, "my-rule");
        assert_eq!(rules[0].condition.atoms.len(), 2);
        assert!(rules[1].condition.atoms.is_empty());
    }
}
