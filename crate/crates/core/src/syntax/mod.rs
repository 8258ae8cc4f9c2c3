//! Abstract syntax of the constructor language, its concrete text form and
//! value substitution.

mod parser;
mod printer;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use parser::{parse_expr, parse_program, ParseError, ParseErrorKind};
pub use printer::print_expr;

pub type Ident = String;

/// A constructor of the ranked alphabet. Two names are the same constructor
/// only if both the name and the arity agree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CtorName {
    name: Arc<str>,
    arity: usize,
}

impl CtorName {
    pub fn new(name: &str, arity: usize) -> Self {
        debug_assert!(name.starts_with(char::is_uppercase));
        CtorName {
            name: Arc::from(name),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Debug for CtorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl fmt::Display for CtorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The program-wide alphabet: constructor name to arity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    ctors: BTreeMap<String, usize>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ctors<'a>(ctors: impl IntoIterator<Item = &'a CtorName>) -> Self {
        let mut alphabet = Alphabet::new();
        for c in ctors {
            alphabet.ctors.insert(c.name().to_string(), c.arity());
        }
        alphabet
    }

    /// Records `name/arity`, returning the previously recorded arity if it
    /// disagrees.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<(), usize> {
        match self.ctors.get(name) {
            Some(&known) if known != arity => Err(known),
            Some(_) => Ok(()),
            None => {
                self.ctors.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.ctors.get(name).copied()
    }

    /// Constructors in name order.
    pub fn ctors(&self) -> Vec<CtorName> {
        self.ctors
            .iter()
            .map(|(name, &arity)| CtorName::new(name, arity))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.ctors.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Var(Ident),
    Ctor(CtorName, Vec<Expr>),
    App(Box<Expr>, Box<Expr>),
    Match(Box<Expr>, Vec<Arm>),
    Rec { fun: Ident, param: Ident, body: Box<Expr> },
    Err,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arm {
    pub ctor: CtorName,
    pub binders: Vec<Ident>,
    pub body: Expr,
}

impl Expr {
    pub fn var(x: &str) -> Expr {
        Expr::Var(x.to_string())
    }

    pub fn ctor(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Ctor(CtorName::new(name, args.len()), args)
    }

    pub fn app(fun: Expr, arg: Expr) -> Expr {
        Expr::App(Box::new(fun), Box::new(arg))
    }

    pub fn rec(fun: &str, param: &str, body: Expr) -> Expr {
        Expr::Rec {
            fun: fun.to_string(),
            param: param.to_string(),
            body: Box::new(body),
        }
    }

    pub fn matches(scrutinee: Expr, arms: Vec<Arm>) -> Expr {
        Expr::Match(Box::new(scrutinee), arms)
    }

    /// Values: literals, functions, constructors over values, and `err`.
    /// A constructor with an `err` component is not a value; it steps to `err`.
    pub fn is_value(&self) -> bool {
        match self {
            Expr::Int(_) | Expr::Rec { .. } | Expr::Err => true,
            Expr::Ctor(_, args) => args.iter().all(|a| a.is_value() && !a.is_err()),
            _ => false,
        }
    }

    /// Values that are neither functions nor `err`.
    pub fn is_non_fun_value(&self) -> bool {
        matches!(self, Expr::Int(_) | Expr::Ctor(..)) && self.is_value()
    }

    pub fn is_err(&self) -> bool {
        matches!(self, Expr::Err)
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Number of AST nodes, arms included.
    pub fn size(&self) -> usize {
        match self {
            Expr::Int(_) | Expr::Var(_) | Expr::Err => 1,
            Expr::Ctor(_, args) => 1 + args.iter().map(Expr::size).sum::<usize>(),
            Expr::App(f, a) => 1 + f.size() + a.size(),
            Expr::Match(s, arms) => 1 + s.size() + arms.iter().map(|a| 1 + a.body.size()).sum::<usize>(),
            Expr::Rec { body, .. } => 1 + body.size(),
        }
    }

    /// Every constructor occurring in the expression, patterns included.
    pub fn ctors(&self) -> BTreeSet<CtorName> {
        let mut out = BTreeSet::new();
        self.visit_ctors(&mut out);
        out
    }

    fn visit_ctors(&self, out: &mut BTreeSet<CtorName>) {
        match self {
            Expr::Int(_) | Expr::Var(_) | Expr::Err => {}
            Expr::Ctor(c, args) => {
                out.insert(c.clone());
                args.iter().for_each(|a| a.visit_ctors(out));
            }
            Expr::App(f, a) => {
                f.visit_ctors(out);
                a.visit_ctors(out);
            }
            Expr::Match(s, arms) => {
                s.visit_ctors(out);
                for arm in arms {
                    out.insert(arm.ctor.clone());
                    arm.body.visit_ctors(out);
                }
            }
            Expr::Rec { body, .. } => body.visit_ctors(out),
        }
    }
}

fn collect_free(e: &Expr, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
    match e {
        Expr::Int(_) | Expr::Err => {}
        Expr::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Expr::Ctor(_, args) => args.iter().for_each(|a| collect_free(a, bound, out)),
        Expr::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Expr::Match(s, arms) => {
            collect_free(s, bound, out);
            for arm in arms {
                let mark = bound.len();
                bound.extend(arm.binders.iter().cloned());
                collect_free(&arm.body, bound, out);
                bound.truncate(mark);
            }
        }
        Expr::Rec { fun, param, body } => {
            bound.push(fun.clone());
            bound.push(param.clone());
            collect_free(body, bound, out);
            bound.truncate(bound.len() - 2);
        }
    }
}

/// `e[x ↦ v]` for a closed value `v`. Binders named `x` shadow the
/// substitution; since `v` is closed no capture can occur.
pub fn subst_value(e: &Expr, x: &str, v: &Expr) -> Expr {
    debug_assert!(v.is_value(), "subst_value expects a value");
    subst_closed(e, x, v)
}

/// `e[x ↦ r]` for any closed `r`. Used for value substitution and for
/// inlining top-level definitions.
pub fn subst_closed(e: &Expr, x: &str, r: &Expr) -> Expr {
    match e {
        Expr::Var(y) if y == x => r.clone(),
        Expr::Int(_) | Expr::Var(_) | Expr::Err => e.clone(),
        Expr::Ctor(c, args) => Expr::Ctor(c.clone(), args.iter().map(|a| subst_closed(a, x, r)).collect()),
        Expr::App(f, a) => Expr::app(subst_closed(f, x, r), subst_closed(a, x, r)),
        Expr::Match(s, arms) => Expr::Match(
            Box::new(subst_closed(s, x, r)),
            arms.iter()
                .map(|arm| {
                    if arm.binders.iter().any(|b| b == x) {
                        arm.clone()
                    } else {
                        Arm {
                            ctor: arm.ctor.clone(),
                            binders: arm.binders.clone(),
                            body: subst_closed(&arm.body, x, r),
                        }
                    }
                })
                .collect(),
        ),
        Expr::Rec { fun, param, body } => {
            if fun == x || param == x {
                e.clone()
            } else {
                Expr::Rec {
                    fun: fun.clone(),
                    param: param.clone(),
                    body: Box::new(subst_closed(body, x, r)),
                }
            }
        }
    }
}

/// Equality up to consistent renaming of bound term variables.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    fn go<'a>(a: &'a Expr, b: &'a Expr, env: &mut Vec<(&'a str, &'a str)>) -> bool {
        match (a, b) {
            (Expr::Int(n), Expr::Int(m)) => n == m,
            (Expr::Err, Expr::Err) => true,
            (Expr::Var(x), Expr::Var(y)) => {
                let left = env.iter().rposition(|(l, _)| *l == x);
                let right = env.iter().rposition(|(_, r)| *r == y);
                match (left, right) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Expr::Ctor(c, xs), Expr::Ctor(d, ys)) => {
                c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, env))
            }
            (Expr::App(f1, a1), Expr::App(f2, a2)) => go(f1, f2, env) && go(a1, a2, env),
            (Expr::Match(s1, arms1), Expr::Match(s2, arms2)) => {
                if !go(s1, s2, env) || arms1.len() != arms2.len() {
                    return false;
                }
                arms1.iter().zip(arms2).all(|(l, r)| {
                    if l.ctor != r.ctor {
                        return false;
                    }
                    let mark = env.len();
                    env.extend(
                        l.binders
                            .iter()
                            .map(String::as_str)
                            .zip(r.binders.iter().map(String::as_str)),
                    );
                    let ok = go(&l.body, &r.body, env);
                    env.truncate(mark);
                    ok
                })
            }
            (
                Expr::Rec {
                    fun: f1,
                    param: x1,
                    body: b1,
                },
                Expr::Rec {
                    fun: f2,
                    param: x2,
                    body: b2,
                },
            ) => {
                let mark = env.len();
                env.push((f1, f2));
                env.push((x1, x2));
                let ok = go(b1, b2, env);
                env.truncate(mark);
                ok
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

/// A parsed source file: ordered top-level definitions and an optional main
/// expression. Definitions may refer to earlier ones by name.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub defs: Vec<(Ident, Expr)>,
    pub main: Option<Expr>,
    pub alphabet: Alphabet,
}

impl Program {
    /// Definitions with references to earlier definitions inlined, so every
    /// returned expression is closed.
    pub fn inlined_defs(&self) -> Vec<(Ident, Expr)> {
        let mut done: Vec<(Ident, Expr)> = Vec::with_capacity(self.defs.len());
        for (name, body) in &self.defs {
            let inlined = inline_with(body, &done);
            done.push((name.clone(), inlined));
        }
        done
    }

    /// The main expression with every definition inlined.
    pub fn inlined_main(&self) -> Option<Expr> {
        let defs = self.inlined_defs();
        self.main.as_ref().map(|m| inline_with(m, &defs))
    }

    pub fn def(&self, name: &str) -> Option<&Expr> {
        self.defs.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }
}

fn inline_with(e: &Expr, defs: &[(Ident, Expr)]) -> Expr {
    // later definitions shadow earlier ones of the same name
    defs.iter()
        .rev()
        .fold(e.clone(), |acc, (name, body)| subst_closed(&acc, name, body))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cons(h: Expr, t: Expr) -> Expr {
        Expr::ctor("Cons", vec![h, t])
    }

    #[test]
    fn subst_replaces_variable() {
        assert_eq!(subst_value(&Expr::var("x"), "x", &Expr::Int(5)), Expr::Int(5));
    }

    #[test]
    fn subst_respects_rec_shadowing() {
        let id = Expr::rec("f", "x", Expr::var("x"));
        assert_eq!(subst_value(&id, "x", &Expr::Int(5)), id);
        let self_ref = Expr::rec("x", "y", Expr::var("x"));
        assert_eq!(subst_value(&self_ref, "x", &Expr::Int(5)), self_ref);
    }

    #[test]
    fn subst_is_congruent_on_ctors() {
        let e = cons(Expr::var("x"), Expr::var("y"));
        let zero = Expr::ctor("Zero", vec![]);
        assert_eq!(subst_value(&e, "x", &zero), cons(zero.clone(), Expr::var("y")));
    }

    #[test]
    fn subst_respects_pattern_binders() {
        let arm = Arm {
            ctor: CtorName::new("Succ", 1),
            binders: vec!["x".into()],
            body: Expr::var("x"),
        };
        let e = Expr::matches(Expr::var("x"), vec![arm.clone()]);
        let out = subst_value(&e, "x", &Expr::Int(1));
        assert_eq!(out, Expr::matches(Expr::Int(1), vec![arm]));
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(Expr::var("x").free_vars(), BTreeSet::from(["x".to_string()]));
        let r = Expr::rec("f", "x", Expr::app(Expr::var("f"), Expr::var("x")));
        assert!(r.free_vars().is_empty());
        let m = Expr::matches(
            Expr::var("y"),
            vec![Arm {
                ctor: CtorName::new("Cons", 2),
                binders: vec!["a".into(), "b".into()],
                body: Expr::var("a"),
            }],
        );
        assert_eq!(m.free_vars(), BTreeSet::from(["y".to_string()]));
    }

    #[test]
    fn value_classification() {
        assert!(Expr::Err.is_value());
        assert!(!cons(Expr::Err, Expr::Int(1)).is_value());
        assert!(cons(Expr::Int(1), Expr::ctor("Nil", vec![])).is_non_fun_value());
        assert!(!Expr::rec("f", "x", Expr::var("x")).is_non_fun_value());
        assert!(!Expr::app(Expr::Int(1), Expr::Int(2)).is_value());
    }

    #[test]
    fn alpha_eq_renames_binders_only() {
        let a = Expr::rec("f", "x", Expr::var("x"));
        let b = Expr::rec("g", "y", Expr::var("y"));
        assert!(alpha_eq(&a, &b));
        assert!(!alpha_eq(&Expr::var("x"), &Expr::var("y")));
        let c = Expr::rec("g", "y", Expr::var("g"));
        assert!(!alpha_eq(&a, &c));
    }
}
