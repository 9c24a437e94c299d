//! Real-arithmetic expression trees, their textual s-expression form, and a
//! high-precision concrete evaluator used as the testing oracle.

use std::collections::{BTreeMap, BTreeSet};

use crate::dd::Dd;
use crate::error::{Error, ParseError, Result};
use crate::interval::Interval;
use crate::literal;
use crate::sexpr::{self, Sexpr};

/// Largest allowed magnitude for a `pow` exponent.
pub const MAX_POW_EXPONENT: i32 = 32;

/// Operator tags. `Pow` carries its integer exponent: interval evaluation of
/// even powers needs the exponent, not a desugared product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Sqrt,
    Ln,
    Exp,
    Pow(i32),
}

impl OpKind {
    pub fn arity(self) -> usize {
        match self {
            OpKind::Add | OpKind::Sub | OpKind::Mul | OpKind::Div => 2,
            OpKind::Neg | OpKind::Sqrt | OpKind::Ln | OpKind::Exp | OpKind::Pow(_) => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            OpKind::Add => "+",
            OpKind::Sub => "-",
            OpKind::Mul => "*",
            OpKind::Div => "/",
            OpKind::Neg => "neg",
            OpKind::Sqrt => "sqrt",
            OpKind::Ln => "ln",
            OpKind::Exp => "exp",
            OpKind::Pow(_) => "pow",
        }
    }
}

impl std::fmt::Display for OpKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

/// An immutable expression tree. Constants keep their literal text; see
/// [`crate::literal`] for why.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    Const(String),
    Op(OpKind, Vec<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn constant(lit: impl Into<String>) -> Expr {
        Expr::Const(lit.into())
    }

    pub fn unary(op: OpKind, child: Expr) -> Expr {
        assert_eq!(op.arity(), 1, "unary constructor used with {op}");
        Expr::Op(op, vec![child])
    }

    pub fn binary(op: OpKind, lhs: Expr, rhs: Expr) -> Expr {
        assert_eq!(op.arity(), 2, "binary constructor used with {op}");
        Expr::Op(op, vec![lhs, rhs])
    }

    pub fn pow(base: Expr, exponent: i32) -> Expr {
        assert!(exponent.unsigned_abs() <= MAX_POW_EXPONENT as u32);
        Expr::Op(OpKind::Pow(exponent), vec![base])
    }

    /// The set of variable names appearing in the expression.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Const(_) => {}
            Expr::Op(_, children) => {
                for c in children {
                    c.collect_vars(out);
                }
            }
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn looks_numeric(s: &str) -> bool {
    let t = s.strip_prefix(['-', '+']).unwrap_or(s);
    t.starts_with(|c: char| c.is_ascii_digit() || c == '.')
}

fn expr_from_sexpr(s: &Sexpr) -> std::result::Result<Expr, ParseError> {
    match s {
        Sexpr::Atom(a, pos) => {
            if looks_numeric(a) {
                match literal::parse_decimal(a) {
                    Some(_) => Ok(Expr::Const(a.clone())),
                    None => Err(ParseError::new(*pos, format!("malformed numeric literal `{a}`"))),
                }
            } else if is_identifier(a) {
                Ok(Expr::Var(a.clone()))
            } else {
                Err(ParseError::new(*pos, format!("expected a variable or constant, found `{a}`")))
            }
        }
        Sexpr::List(items, pos) => {
            let head = items
                .first()
                .ok_or_else(|| ParseError::new(*pos, "empty application `()`"))?;
            let op = head
                .as_atom()
                .ok_or_else(|| ParseError::new(head.pos(), "operator must be an atom"))?;
            let args = &items[1..];
            let arity_err = |expected: &str| {
                ParseError::new(
                    *pos,
                    format!("operator `{op}` expects {expected} argument(s), found {}", args.len()),
                )
            };
            match op {
                "+" | "*" => {
                    if args.len() < 2 {
                        return Err(arity_err("at least 2"));
                    }
                    let kind = if op == "+" { OpKind::Add } else { OpKind::Mul };
                    let mut iter = args.iter();
                    let mut acc = expr_from_sexpr(iter.next().unwrap())?;
                    for a in iter {
                        acc = Expr::binary(kind, acc, expr_from_sexpr(a)?);
                    }
                    Ok(acc)
                }
                "-" => match args {
                    [x] => Ok(Expr::unary(OpKind::Neg, expr_from_sexpr(x)?)),
                    [x, y] => Ok(Expr::binary(OpKind::Sub, expr_from_sexpr(x)?, expr_from_sexpr(y)?)),
                    _ => Err(arity_err("1 or 2")),
                },
                "/" => match args {
                    [x, y] => Ok(Expr::binary(OpKind::Div, expr_from_sexpr(x)?, expr_from_sexpr(y)?)),
                    _ => Err(arity_err("2")),
                },
                "neg" | "sqrt" | "ln" | "exp" => match args {
                    [x] => {
                        let kind = match op {
                            "neg" => OpKind::Neg,
                            "sqrt" => OpKind::Sqrt,
                            "ln" => OpKind::Ln,
                            _ => OpKind::Exp,
                        };
                        Ok(Expr::unary(kind, expr_from_sexpr(x)?))
                    }
                    _ => Err(arity_err("1")),
                },
                "pow" => match args {
                    [base, e] => {
                        let exponent = parse_pow_exponent(e)?;
                        Ok(Expr::Op(OpKind::Pow(exponent), vec![expr_from_sexpr(base)?]))
                    }
                    _ => Err(arity_err("2")),
                },
                _ => Err(ParseError::new(head.pos(), format!("unknown operator `{op}`"))),
            }
        }
    }
}

pub(crate) fn parse_pow_exponent(e: &Sexpr) -> std::result::Result<i32, ParseError> {
    let bad = |msg: String| ParseError::new(e.pos(), msg);
    let atom = e
        .as_atom()
        .ok_or_else(|| bad("pow exponent must be an integer literal".into()))?;
    let body = atom.strip_prefix(['-', '+']).unwrap_or(atom);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad(format!("pow exponent must be an integer, found `{atom}`")));
    }
    let value: i64 = atom
        .parse()
        .map_err(|_| bad(format!("pow exponent `{atom}` out of range")))?;
    if value.unsigned_abs() > MAX_POW_EXPONENT as u64 {
        return Err(bad(format!(
            "pow exponent `{atom}` out of range (|exponent| <= {MAX_POW_EXPONENT})"
        )));
    }
    Ok(value as i32)
}

/// Parses an expression from s-expression text.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let form = sexpr::parse_one(text)?;
    Ok(expr_from_sexpr(&form)?)
}

/// Canonical s-expression text; round-trips through [`parse_expr`].
pub fn format_expr(e: &Expr) -> String {
    e.to_string()
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expr::Var(v) => f.write_str(v),
            Expr::Const(c) => f.write_str(c),
            Expr::Op(OpKind::Pow(n), children) => write!(f, "(pow {} {})", children[0], n),
            Expr::Op(op, children) => {
                write!(f, "({}", op.symbol())?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A variable assignment for concrete evaluation, at double-double precision.
#[derive(Clone, Debug, Default)]
pub struct Environment {
    bindings: BTreeMap<String, Dd>,
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Dd) {
        self.bindings.insert(name.into(), value);
    }

    pub fn bind_f64(&mut self, name: impl Into<String>, value: f64) {
        self.bind(name, Dd::from(value));
    }

    pub fn get(&self, name: &str) -> Option<Dd> {
        self.bindings.get(name).copied()
    }
}

/// Domain violations surfaced by the concrete evaluator.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("ln of a nonpositive value")]
    LnNonpositive,
    #[error("sqrt of a negative value")]
    SqrtNegative,
    #[error("0/0 is undefined")]
    ZeroOverZero,
    #[error("pow(0, negative exponent) is undefined")]
    PowZeroNegative,
    #[error("indeterminate extended-real operation")]
    Indeterminate,
    #[error("unbound variable `{0}`")]
    Unbound(String),
}

/// Evaluates `e` under `rho` over the extended reals at double-double
/// precision. Infinities are legal values (e.g. dividing by an exact zero);
/// the listed domain violations are reported as errors.
pub fn concrete_eval(e: &Expr, rho: &Environment) -> std::result::Result<Dd, EvalError> {
    let value = match e {
        Expr::Var(v) => rho.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?,
        Expr::Const(c) => {
            let d = literal::parse_decimal(c).expect("Expr::Const holds a validated literal");
            Dd::from_decimal(&d)
        }
        Expr::Op(op, children) => {
            let x = concrete_eval(&children[0], rho)?;
            match op {
                OpKind::Neg => x.neg(),
                OpKind::Sqrt => {
                    if x.is_sign_negative() && !x.is_zero() {
                        return Err(EvalError::SqrtNegative);
                    }
                    x.sqrt()
                }
                OpKind::Ln => {
                    if x.is_zero() || x.is_sign_negative() {
                        return Err(EvalError::LnNonpositive);
                    }
                    x.ln()
                }
                OpKind::Exp => x.exp(),
                OpKind::Pow(n) => {
                    if x.is_zero() && *n < 0 {
                        return Err(EvalError::PowZeroNegative);
                    }
                    x.powi(*n)
                }
                OpKind::Add | OpKind::Sub | OpKind::Mul | OpKind::Div => {
                    let y = concrete_eval(&children[1], rho)?;
                    match op {
                        OpKind::Add => x.add(y),
                        OpKind::Sub => x.sub(y),
                        OpKind::Mul => x.mul(y),
                        OpKind::Div => {
                            if y.is_zero() {
                                if x.is_zero() {
                                    return Err(EvalError::ZeroOverZero);
                                }
                                // signed zero marks the approach direction:
                                // 1/0+ = +inf, 1/0- = -inf
                                let num = if x.is_sign_negative() { -1.0 } else { 1.0 };
                                let den = if y.to_f64().is_sign_negative() { -1.0 } else { 1.0 };
                                Dd::from(num * den * f64::INFINITY)
                            } else {
                                x.div(y)
                            }
                        }
                        _ => unreachable!(),
                    }
                }
            }
        }
    };
    if value.is_nan() {
        return Err(EvalError::Indeterminate);
    }
    Ok(value)
}

/// A precondition: one closed interval per input variable.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct InputBox {
    vars: BTreeMap<String, Interval>,
}

impl InputBox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, lo: f64, hi: f64) -> Result<()> {
        let name = name.into();
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::EmptyRange { name });
        }
        if self.vars.contains_key(&name) {
            return Err(Error::DuplicateVar(name));
        }
        self.vars.insert(name, Interval::new(lo, hi));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<Interval> {
        self.vars.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.vars.contains_key(name)
    }

    /// Variables in sorted name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, Interval)> {
        self.vars.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_f64(text: &str, binds: &[(&str, f64)]) -> std::result::Result<f64, EvalError> {
        let e = parse_expr(text).unwrap();
        let mut env = Environment::new();
        for (n, v) in binds {
            env.bind_f64(*n, *v);
        }
        concrete_eval(&e, &env).map(Dd::to_f64)
    }

    #[test]
    fn parses_the_grammar() {
        let e = parse_expr("(- x x)").unwrap();
        assert_eq!(e, Expr::binary(OpKind::Sub, Expr::var("x"), Expr::var("x")));

        let e = parse_expr("(- 1 (/ (* 2 y) (+ x y)))").unwrap();
        let expected = Expr::binary(
            OpKind::Sub,
            Expr::constant("1"),
            Expr::binary(
                OpKind::Div,
                Expr::binary(OpKind::Mul, Expr::constant("2"), Expr::var("y")),
                Expr::binary(OpKind::Add, Expr::var("x"), Expr::var("y")),
            ),
        );
        assert_eq!(e, expected);

        // unary minus is negation
        assert_eq!(parse_expr("(- x)").unwrap(), Expr::unary(OpKind::Neg, Expr::var("x")));
        // variadic + folds left
        assert_eq!(
            parse_expr("(+ a b c)").unwrap(),
            Expr::binary(
                OpKind::Add,
                Expr::binary(OpKind::Add, Expr::var("a"), Expr::var("b")),
                Expr::var("c"),
            )
        );
    }

    #[test]
    fn pow_exponent_validation() {
        assert_eq!(parse_expr("(pow x 2)").unwrap(), Expr::pow(Expr::var("x"), 2));
        assert_eq!(parse_expr("(pow x -3)").unwrap(), Expr::pow(Expr::var("x"), -3));

        let err = parse_expr("(pow x 2.5)").unwrap_err();
        assert!(err.to_string().contains("integer"), "{err}");
        let err = parse_expr("(pow x 33)").unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
        let err = parse_expr("(pow x y)").unwrap_err();
        assert!(err.to_string().contains("integer"), "{err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_expr("(foo x)").unwrap_err();
        assert!(err.to_string().contains("unknown operator `foo`"));
        assert!(err.to_string().contains("1:2"), "{err}");

        assert!(parse_expr("(/ x)").is_err());
        assert!(parse_expr("()").is_err());
        assert!(parse_expr("(+ x 1) (+ y 2)").is_err());
    }

    #[test]
    fn format_round_trips() {
        for text in ["(- x x)", "0.1", "(pow a 2)", "(neg (sqrt (+ x 1)))", "(ln (exp x))"] {
            let e = parse_expr(text).unwrap();
            assert_eq!(parse_expr(&format_expr(&e)).unwrap(), e);
        }
        // literals are preserved verbatim
        assert_eq!(format_expr(&Expr::constant("0.1")), "0.1");
        assert_eq!(format_expr(&parse_expr("(- x x)").unwrap()), "(- x x)");
        assert_eq!(format_expr(&Expr::pow(Expr::var("a"), 2)), "(pow a 2)");
    }

    #[test]
    fn free_vars_cases() {
        assert_eq!(
            parse_expr("(- x x)").unwrap().free_vars().into_iter().collect::<Vec<_>>(),
            vec!["x"]
        );
        assert!(parse_expr("1").unwrap().free_vars().is_empty());
        let vars = parse_expr("(- 1 (/ (* 2 y) (+ x y)))").unwrap().free_vars();
        assert_eq!(vars.into_iter().collect::<Vec<_>>(), vec!["x", "y"]);
    }

    #[test]
    fn concrete_eval_cases() {
        assert_eq!(eval_f64("(- x x)", &[("x", 0.3)]).unwrap(), 0.0);

        let v = eval_f64("(/ x (+ x y))", &[("x", 1.0), ("y", 2.0)]).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);

        let v = eval_f64("(ln (exp x))", &[("x", 5.0)]).unwrap();
        assert!((v - 5.0).abs() < 1e-14);
    }

    #[test]
    fn concrete_eval_domain_violations() {
        assert_eq!(eval_f64("(ln x)", &[("x", 0.0)]), Err(EvalError::LnNonpositive));
        assert_eq!(eval_f64("(ln x)", &[("x", -1.0)]), Err(EvalError::LnNonpositive));
        assert_eq!(eval_f64("(sqrt x)", &[("x", -2.0)]), Err(EvalError::SqrtNegative));
        assert_eq!(eval_f64("(/ x x)", &[("x", 0.0)]), Err(EvalError::ZeroOverZero));
        assert_eq!(eval_f64("(pow x -1)", &[("x", 0.0)]), Err(EvalError::PowZeroNegative));
        // division by an exact zero is a directed infinity, not an error
        assert_eq!(eval_f64("(/ 1 x)", &[("x", 0.0)]).unwrap(), f64::INFINITY);
        assert_eq!(eval_f64("(/ -1 x)", &[("x", 0.0)]).unwrap(), f64::NEG_INFINITY);
        assert_eq!(
            eval_f64("(- (/ 1 x) (/ 1 x))", &[("x", 0.0)]),
            Err(EvalError::Indeterminate)
        );
    }

    #[test]
    fn eval_is_structural() {
        let e = parse_expr("(* (+ x y) (- x y))").unwrap();
        let mut env = Environment::new();
        env.bind_f64("x", 1.25);
        env.bind_f64("y", -0.5);
        let whole = concrete_eval(&e, &env).unwrap();
        let l = concrete_eval(&parse_expr("(+ x y)").unwrap(), &env).unwrap();
        let r = concrete_eval(&parse_expr("(- x y)").unwrap(), &env).unwrap();
        assert_eq!(whole, l.mul(r));
    }

    #[test]
    fn input_box_validation() {
        let mut b = InputBox::new();
        b.insert("x", 0.0, 1.0).unwrap();
        assert!(matches!(b.insert("x", 0.0, 2.0), Err(Error::DuplicateVar(_))));
        assert!(matches!(b.insert("y", 2.0, 1.0), Err(Error::EmptyRange { .. })));
        assert_eq!(b.get("x"), Some(Interval::new(0.0, 1.0)));
    }
}
