//! Three-valued, depth-bounded decision of crash conditions.

mod eval;
mod subtype;
mod witness;

use std::collections::BTreeMap;
use std::fmt;

use crate::infer::{infer, InferError, Typing};
use crate::syntax::Expr;
use crate::types::{render_cc, subst_many, subst_many_cc, CrashCond, TVar, Type, TypeEnv};

pub use eval::{Member, Resolved, Shape, Solver, WORK_LIMIT};
pub use subtype::subtype;
pub use witness::{enumerate_ground, find_crashing_inputs, inhabitant};

pub const DEFAULT_K: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }

    pub fn is_decided(self) -> bool {
        self != Truth::Unknown
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "true",
            Truth::False => "false",
            Truth::Unknown => "unknown",
        })
    }
}

/// Type variables to ground types.
pub type Interpretation = BTreeMap<TVar, Type>;

pub fn apply_interp(i: &Interpretation, t: &Type) -> Type {
    subst_many(t, &i.iter().map(|(v, t)| (*v, t.clone())).collect::<Vec<_>>())
}

pub fn apply_interp_cc(i: &Interpretation, c: &CrashCond) -> CrashCond {
    subst_many_cc(c, &i.iter().map(|(v, t)| (*v, t.clone())).collect::<Vec<_>>())
}

/// The answer at the smallest budget up to `k` that decides `c`. Each budget
/// runs on a fresh work allowance, so a decision reached cheaply is not lost
/// when a deeper budget runs out of work.
pub fn eval_cc(c: &CrashCond, k: u32) -> Truth {
    (0..=k)
        .map(|budget| eval_cc_at(c, budget))
        .find(|v| v.is_decided())
        .unwrap_or(Truth::Unknown)
}

/// A single solver run at exactly budget `k`.
pub fn eval_cc_at(c: &CrashCond, k: u32) -> Truth {
    Solver::new().eval(c, k)
}

pub fn entails(i: &Interpretation, c: &CrashCond, k: u32) -> Truth {
    eval_cc(&apply_interp_cc(i, c), k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    DefiniteCrashOrDiverge { evidence: String },
    NoCrashAtBound(u32),
    Unknown(u32),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::DefiniteCrashOrDiverge { .. } => "crash",
            Verdict::NoCrashAtBound(_) => "no_crash_at_bound",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn is_crash(&self) -> bool {
        matches!(self, Verdict::DefiniteCrashOrDiverge { .. })
    }
}

pub fn verdict_of(c: &CrashCond, k: u32) -> Verdict {
    match eval_cc(c, k) {
        Truth::True => Verdict::DefiniteCrashOrDiverge { evidence: render_cc(c) },
        Truth::False => Verdict::NoCrashAtBound(k),
        Truth::Unknown => Verdict::Unknown(k),
    }
}

pub fn decide(e: &Expr, env: &TypeEnv, k: u32) -> Result<(Typing, Verdict), InferError> {
    let typing = infer(env, e)?;
    let verdict = verdict_of(&typing.crash, k);
    Ok((typing, verdict))
}

/// Whether the bounded verdict is the same at both budgets.
pub fn fixpoint_probe(c: &CrashCond, k1: u32, k2: u32) -> bool {
    assert!(k1 < k2, "fixpoint_probe needs k1 < k2");
    eval_cc(c, k1) == eval_cc(c, k2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, CtorName};
    use crate::types::{ccapp, has_ctor, not_fun};

    const LEN: &str = "rec len(x) -> match x { Nil -> Zero | Cons(h,t) -> Succ(len t) }";

    fn ty(src: &str) -> Type {
        infer(&TypeEnv::new(), &parse_expr(src).unwrap()).unwrap().ty
    }

    fn list(n: usize) -> Type {
        (0..n).fold(Type::nullary("Nil"), |acc, _| Type::ctor("Cons", vec![Type::Int, acc]))
    }

    #[test]
    fn kleene_tables() {
        use Truth::*;
        assert_eq!(True.and(Unknown), Unknown);
        assert_eq!(False.and(Unknown), False);
        assert_eq!(True.or(Unknown), True);
        assert_eq!(False.or(Unknown), Unknown);
    }

    #[test]
    fn interpretation_examples() {
        let a = TVar::fresh();
        let i = Interpretation::from([(a, Type::Int)]);
        assert_eq!(apply_interp(&i, &Type::Var(a)), Type::Int);
        let f = Type::fun(a, TVar::fresh_self(), Type::Var(a), CrashCond::FF);
        assert_eq!(apply_interp(&i, &f), f);
        assert_eq!(apply_interp(&Interpretation::new(), &Type::Int), Type::Int);
    }

    #[test]
    fn length_crash_condition_on_ground_inputs() {
        let len = ty(LEN);
        assert_eq!(eval_cc(&ccapp(&len, &Type::nullary("Zero")), 2), Truth::True);
        assert_eq!(eval_cc(&ccapp(&len, &list(2)), 3), Truth::False);
        assert_eq!(eval_cc(&ccapp(&len, &list(2)), 1), Truth::Unknown);
        assert_eq!(eval_cc(&ccapp(&len, &Type::Int), 0), Truth::True);
    }

    #[test]
    fn entailment_examples() {
        assert_eq!(entails(&Interpretation::new(), &CrashCond::FF, 3), Truth::False);
        let len = ty(LEN);
        let f = len.as_fun().unwrap();
        let i = Interpretation::from([(f.arg, Type::nullary("Zero")), (f.slf, len.clone())]);
        assert_eq!(entails(&i, &f.crash, 2), Truth::True);
        let a = TVar::fresh();
        let b = TVar::fresh();
        let g = Type::fun(b, TVar::fresh_self(), Type::Int, CrashCond::FF);
        let i = Interpretation::from([(a, g)]);
        assert_eq!(entails(&i, &CrashCond::NotFun(Type::Var(a)), 0), Truth::False);
    }

    #[test]
    fn decide_examples() {
        let env = TypeEnv::new();
        let crash = |src: &str, k| decide(&parse_expr(src).unwrap(), &env, k).unwrap().1;
        assert!(crash("5 3", 0).is_crash());
        assert_eq!(crash("7", 0), Verdict::NoCrashAtBound(0));
        assert!(crash(&format!("({LEN}) Zero"), 2).is_crash());
        assert_eq!(crash(&format!("({LEN}) Cons(1, Nil)"), 5), Verdict::NoCrashAtBound(5));
    }

    #[test]
    fn fixpoint_probe_examples() {
        assert!(fixpoint_probe(&CrashCond::TT, 0, 1));
        let nil = CtorName::new("Nil", 0);
        assert!(fixpoint_probe(&has_ctor(&nil, Type::nullary("Nil")), 1, 4));
        assert!(!fixpoint_probe(&ccapp(&ty(LEN), &list(3)), 1, 5));
        assert!(fixpoint_probe(&not_fun(Type::Int), 0, 9));
    }
}
