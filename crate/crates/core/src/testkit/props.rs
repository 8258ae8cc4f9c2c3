//! Executable metatheory: each check compares inference, the solver and the
//! evaluator on one generated input.

use crate::infer::{infer, infer_patterns, Typing};
use crate::semantics::{evaluate, step, EvalOutcome, StepResult};
use crate::solver::{decide, entails, eval_cc, eval_cc_at, subtype, Interpretation, Truth};
use crate::syntax::{subst_value, Arm, Expr};
use crate::types::{
    alpha_equal, alpha_equal_cc, ccapp, render_cc, render_type, subst_tvar, subst_tvar_cc, TVar, Type, TypeEnv,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub expected: String,
    pub actual: String,
}

impl Mismatch {
    pub fn new(expected: impl Into<String>, actual: impl Into<String>) -> Self {
        Mismatch {
            expected: expected.into(),
            actual: actual.into(),
        }
    }
}

pub type Check = Result<(), Mismatch>;

fn typed(env: &TypeEnv, e: &Expr) -> Result<Typing, Mismatch> {
    infer(env, e).map_err(|err| Mismatch::new("a typing", err.to_string()))
}

fn contradictory(a: Truth, b: Truth) -> bool {
    matches!((a, b), (Truth::True, Truth::False) | (Truth::False, Truth::True))
}

fn same_typing(lhs: &Typing, rhs: &Typing) -> Check {
    if !alpha_equal(&lhs.ty, &rhs.ty) {
        return Err(Mismatch::new(render_type(&lhs.ty), render_type(&rhs.ty)));
    }
    if !alpha_equal_cc(&lhs.crash, &rhs.crash) {
        return Err(Mismatch::new(render_cc(&lhs.crash), render_cc(&rhs.crash)));
    }
    Ok(())
}

/// Along the reduction trace, the new type is never refuted as a subtype of
/// the old one and crash verdicts never contradict each other.
pub fn check_preservation(e: &Expr, max_steps: usize, k: u32) -> Check {
    let env = TypeEnv::new();
    let mut cur = e.clone();
    let mut before = typed(&env, &cur)?;
    let mut verdict = eval_cc(&before.crash, k);
    for i in 0..max_steps {
        let next = match step(&cur) {
            StepResult::Done(_) => return Ok(()),
            StepResult::Stuck(reason) => return Err(Mismatch::new("a step", reason)),
            StepResult::Stepped(next) => next,
        };
        let after = typed(&env, &next)?;
        if subtype(&after.ty, &before.ty, k) == Truth::False {
            return Err(Mismatch::new(
                format!("step {i}: {} <= {}", render_type(&after.ty), render_type(&before.ty)),
                "refuted",
            ));
        }
        let next_verdict = eval_cc(&after.crash, k);
        if contradictory(verdict, next_verdict) {
            return Err(Mismatch::new(
                format!("step {i}: {} stays {verdict}", render_cc(&after.crash)),
                next_verdict.to_string(),
            ));
        }
        cur = next;
        before = after;
        verdict = next_verdict;
    }
    Ok(())
}

/// A definite-crash verdict is never followed by a value.
pub fn check_failure(e: &Expr, fuel: u64, k: u32) -> Check {
    let (_, verdict) = decide(e, &TypeEnv::new(), k).map_err(|err| Mismatch::new("a typing", err.to_string()))?;
    if !verdict.is_crash() {
        return Ok(());
    }
    match evaluate(e, fuel) {
        EvalOutcome::Value(v) => Err(Mismatch::new("error or divergence", crate::syntax::print_expr(&v))),
        _ => Ok(()),
    }
}

/// An unused binding leaves the typing unchanged.
pub fn check_weakening(e: &Expr, name: &str, extra: &Type) -> Check {
    let env = TypeEnv::new();
    let base = typed(&env, e)?;
    let weak = typed(&env.extend(name, extra.clone()), e)?;
    same_typing(&weak, &base)
}

/// Typing `e` under `y : τ_v` agrees with typing `e[y ↦ v]`.
pub fn check_value_substitution(e: &Expr, y: &str, v: &Expr) -> Check {
    let env = TypeEnv::new();
    let tv = typed(&env, v)?;
    if tv.crash != crate::types::CrashCond::FF {
        return Err(Mismatch::new("values do not crash", render_cc(&tv.crash)));
    }
    let open = typed(&env.extend(y, tv.ty), e)?;
    let closed = typed(&env, &subst_value(e, y, v))?;
    same_typing(&closed, &open)
}

/// Typing under `y : α` then substituting agrees with typing under `y : τ`.
pub fn check_type_substitution(e: &Expr, y: &str, replacement: &Type) -> Check {
    let env = TypeEnv::new();
    let a = TVar::fresh();
    let generic = typed(&env.extend(y, Type::Var(a)), e)?;
    let substituted = Typing {
        ty: subst_tvar(&generic.ty, a, replacement),
        crash: subst_tvar_cc(&generic.crash, a, replacement),
    };
    let direct = typed(&env.extend(y, replacement.clone()), e)?;
    same_typing(&direct, &substituted)
}

/// Patterns judged under a false accumulator never yield a crash.
pub fn check_unsat_after_match(arms: &[Arm], instances: &[Type], k: u32) -> Check {
    let a = TVar::fresh();
    let env: TypeEnv = arms
        .iter()
        .flat_map(|arm| arm.body.free_vars())
        .map(|x| (x, Type::Var(TVar::fresh())))
        .collect();
    let t = infer_patterns(&env, crate::types::CrashCond::FF, &Type::Var(a), arms)
        .map_err(|err| Mismatch::new("a typing", err.to_string()))?;
    for inst in instances {
        let i = Interpretation::from([(a, inst.clone())]);
        for budget in 0..=k {
            if entails(&i, &t.crash, budget) == Truth::True {
                return Err(Mismatch::new("not entailed", render_cc(&t.crash)));
            }
        }
    }
    Ok(())
}

/// Once decided at some budget, a ground condition keeps its verdict at every
/// larger budget, and no single solver run contradicts a run at another
/// budget.
pub fn check_monotonicity(c: &crate::types::CrashCond, max_k: u32) -> Check {
    let runs: Vec<Truth> = (0..=max_k).map(|k| eval_cc_at(c, k)).collect();
    for (k0, v0) in runs.iter().enumerate() {
        for (k1, v1) in runs.iter().enumerate().skip(k0 + 1) {
            if contradictory(*v0, *v1) {
                return Err(Mismatch::new(format!("{v0} at k={k0}"), format!("{v1} at k={k1}")));
            }
        }
    }
    let first = runs.iter().position(|v| v.is_decided());
    let settled = first.map_or(Truth::Unknown, |k| runs[k]);
    let deepest = eval_cc(c, max_k);
    if deepest != settled {
        return Err(Mismatch::new(format!("{settled} at k={max_k}"), deepest.to_string()));
    }
    Ok(())
}

/// Ground conditions derived from a closed term: its own crash condition and
/// its type applied to a ground argument.
pub fn ground_conditions(e: &Expr, arg: &Type) -> Vec<crate::types::CrashCond> {
    match infer(&TypeEnv::new(), e) {
        Ok(t) => vec![t.crash.clone(), ccapp(&t.ty, arg)],
        Err(_) => vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn e(src: &str) -> Expr {
        parse_expr(src).unwrap()
    }

    #[test]
    fn preservation_examples() {
        assert_eq!(check_preservation(&e("(rec f(x) -> x) 5"), 50, 5), Ok(()));
        assert_eq!(check_preservation(&e("5 3"), 50, 5), Ok(()));
        let len = "rec len(x) -> match x { Nil -> Zero | Cons(h,t) -> Succ(len t) }";
        assert_eq!(
            check_preservation(&e(&format!("({len}) Cons(1, Cons(2, Nil))")), 50, 5),
            Ok(())
        );
    }

    #[test]
    fn failure_examples() {
        assert_eq!(check_failure(&e("5 3"), 100, 5), Ok(()));
        assert_eq!(check_failure(&e("7"), 100, 5), Ok(()));
        assert_eq!(check_failure(&e("Pair((rec g(x) -> g x) A, err)"), 100, 5), Ok(()));
    }

    #[test]
    fn lemma_examples() {
        assert_eq!(check_weakening(&e("5"), "w", &Type::Int), Ok(()));
        let open = Expr::matches(
            Expr::var("y"),
            vec![Arm {
                ctor: crate::syntax::CtorName::new("Cons", 2),
                binders: vec!["a".into(), "b".into()],
                body: Expr::var("b"),
            }],
        );
        assert_eq!(check_value_substitution(&open, "y", &e("Cons(1, Nil)")), Ok(()));
        assert_eq!(check_value_substitution(&open, "y", &e("rec f(x) -> x")), Ok(()));
        assert_eq!(check_type_substitution(&open, "y", &Type::Int), Ok(()));
        let Expr::Match(_, arms) = e("match Nil { Nil -> err | Zero -> 5 5 }") else {
            unreachable!()
        };
        assert_eq!(
            check_unsat_after_match(&arms, &[Type::nullary("Nil"), Type::Int], 3),
            Ok(())
        );
    }
}
