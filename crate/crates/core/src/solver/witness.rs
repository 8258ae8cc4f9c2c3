//! Ground input enumeration and crashing-input search.

use super::{eval_cc, Truth};
use crate::syntax::{CtorName, Expr};
use crate::types::{ccapp, Type};

/// Enumeration stops after this many types.
pub const ENUM_LIMIT: usize = 20_000;

/// Ground constructor trees of height at most `depth`, breadth first: by
/// height, then constructor name, with `int` closing the first level.
pub fn enumerate_ground(alphabet: &[CtorName], depth: usize) -> Vec<Type> {
    let mut ctors = alphabet.to_vec();
    ctors.sort_by(|a, b| a.name().cmp(b.name()).then(a.arity().cmp(&b.arity())));
    let mut all: Vec<Type> = Vec::new();
    let mut by_height: Vec<Vec<Type>> = Vec::new();
    for h in 1..=depth {
        let mut level = Vec::new();
        if h == 1 {
            level.extend(
                ctors
                    .iter()
                    .filter(|c| c.arity() == 0)
                    .map(|c| Type::Ctor(c.clone(), vec![])),
            );
            level.push(Type::Int);
        } else {
            let lower: Vec<&Type> = by_height.iter().flatten().collect();
            let newest = &by_height[h - 2];
            for c in ctors.iter().filter(|c| c.arity() > 0) {
                tuples(c, &lower, newest, &mut level, ENUM_LIMIT.saturating_sub(all.len()));
            }
        }
        level.truncate(ENUM_LIMIT.saturating_sub(all.len()));
        all.extend(level.iter().cloned());
        by_height.push(level);
        if all.len() >= ENUM_LIMIT {
            break;
        }
    }
    all
}

/// Argument tuples drawn from `lower` with at least one member of `newest`.
fn tuples(c: &CtorName, lower: &[&Type], newest: &[Type], out: &mut Vec<Type>, limit: usize) {
    let n = c.arity();
    let mut idx = vec![0usize; n];
    if lower.is_empty() {
        return;
    }
    loop {
        if out.len() >= limit {
            return;
        }
        let args: Vec<Type> = idx.iter().map(|&i| lower[i].clone()).collect();
        if args.iter().any(|a| newest.contains(a)) {
            out.push(Type::Ctor(c.clone(), args));
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < lower.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Ground inputs on which applying `f` definitely crashes or diverges.
pub fn find_crashing_inputs(f: &Type, alphabet: &[CtorName], depth: usize, k: u32) -> Vec<Type> {
    enumerate_ground(alphabet, depth)
        .into_iter()
        .filter(|t| eval_cc(&ccapp(f, t), k) == Truth::True)
        .collect()
}

/// A value of the given ground type; integers become `0`.
pub fn inhabitant(t: &Type) -> Option<Expr> {
    match t {
        Type::Int => Some(Expr::Int(0)),
        Type::Ctor(c, args) => Some(Expr::Ctor(
            c.clone(),
            args.iter().map(inhabitant).collect::<Option<_>>()?,
        )),
        Type::Union(ms) => ms.iter().find_map(inhabitant),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infer::infer;
    use crate::semantics::{evaluate, EvalOutcome, DEFAULT_FUEL};
    use crate::syntax::parse_expr;
    use crate::types::{render_type, CrashCond, TVar, TypeEnv};

    const LEN: &str = "rec len(x) -> match x { Nil -> Zero | Cons(h,t) -> Succ(len t) }";

    fn alphabet() -> Vec<CtorName> {
        vec![
            CtorName::new("Nil", 0),
            CtorName::new("Zero", 0),
            CtorName::new("Succ", 1),
            CtorName::new("Cons", 2),
        ]
    }

    #[test]
    fn enumeration_order_and_size() {
        let one: Vec<String> = enumerate_ground(&alphabet(), 1).iter().map(render_type).collect();
        assert_eq!(one, ["Nil", "Zero", "int"]);
        let two = enumerate_ground(&alphabet(), 2);
        assert_eq!(two.len(), 3 + 9 + 3);
        assert_eq!(render_type(&two[3]), "Cons(Nil, Nil)");
        assert_eq!(render_type(&two[14]), "Succ(int)");
    }

    #[test]
    fn length_witnesses() {
        let e = parse_expr(LEN).unwrap();
        let len = infer(&TypeEnv::new(), &e).unwrap().ty;
        let found = find_crashing_inputs(&len, &alphabet(), 1, 2);
        let names: Vec<String> = found.iter().map(render_type).collect();
        assert_eq!(names, ["Zero", "int"]);
        for t in find_crashing_inputs(&len, &alphabet(), 2, 3) {
            assert_ne!(t, Type::nullary("Nil"));
            let call = Expr::app(e.clone(), inhabitant(&t).unwrap());
            let out = evaluate(&call, DEFAULT_FUEL);
            assert!(!matches!(out, EvalOutcome::Value(_)), "{}", render_type(&t));
        }
    }

    #[test]
    fn identity_has_no_witnesses() {
        let a = TVar::fresh();
        let id = Type::fun(a, TVar::fresh_self(), Type::Var(a), CrashCond::FF);
        assert!(find_crashing_inputs(&id, &alphabet(), 2, 3).is_empty());
    }
}
