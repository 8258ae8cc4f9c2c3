//! Smart constructors and the three type operators.
//!
//! Condition constructors perform boolean rewrites only. `tapp` and `ccapp`
//! unfold a function head once; `mk_tapp` and `mk_ccapp` keep a function head
//! inert so that substitution always terminates.

use std::sync::Arc;

use super::{subst_many, subst_many_cc, CrashCond, FunType, TVar, Type};
use crate::syntax::CtorName;

pub fn union(members: Vec<Type>) -> Type {
    let mut flat: Vec<Type> = Vec::with_capacity(members.len());
    for m in members {
        match m {
            Type::Bot => {}
            Type::Union(inner) => {
                for t in inner {
                    if !flat.contains(&t) {
                        flat.push(t);
                    }
                }
            }
            t => {
                if !flat.contains(&t) {
                    flat.push(t);
                }
            }
        }
    }
    match flat.len() {
        0 => Type::Bot,
        1 => flat.pop().unwrap(),
        _ => Type::Union(flat),
    }
}

pub fn union2(a: Type, b: Type) -> Type {
    union(vec![a, b])
}

pub fn guard(c: CrashCond, t: Type) -> Type {
    match (c, t) {
        (_, Type::Bot) | (CrashCond::FF, _) => Type::Bot,
        (CrashCond::TT, t) => t,
        (c, Type::Guard(c2, t)) => guard(and(c, (*c2).clone()), (*t).clone()),
        (c, t) => Type::Guard(Arc::new(c), Arc::new(t)),
    }
}

/// Component `i` (1-based) of the `c`-shaped members of `t`.
pub fn proj(t: &Type, c: &CtorName, i: usize) -> Type {
    assert!(i >= 1 && i <= c.arity(), "projection index {i} out of range for {c:?}");
    match t {
        Type::Ctor(d, args) if d == c => args[i - 1].clone(),
        Type::Ctor(..) | Type::Int | Type::Bot | Type::Fun(_) => Type::Bot,
        Type::Union(ms) => union(ms.iter().map(|m| proj(m, c, i)).collect()),
        Type::Guard(g, inner) => guard((**g).clone(), proj(inner, c, i)),
        Type::Var(_) | Type::TApp(..) | Type::Proj(..) => Type::Proj(Arc::new(t.clone()), c.clone(), i),
    }
}

/// `ret[arg ↦ a, slf ↦ head]`.
pub fn unfold_ret(f: &FunType, head: &Type, a: &Type) -> Type {
    subst_many(&f.ret, &[(f.arg, a.clone()), (f.slf, head.clone())])
}

/// `crash[arg ↦ a, slf ↦ head]`.
pub fn unfold_crash(f: &FunType, head: &Type, a: &Type) -> CrashCond {
    subst_many_cc(&f.crash, &[(f.arg, a.clone()), (f.slf, head.clone())])
}

fn app_type(t1: &Type, t2: &Type, eager: bool) -> Type {
    match t1 {
        Type::Fun(f) if eager => unfold_ret(f, t1, t2),
        Type::Fun(_) | Type::Var(_) | Type::TApp(..) | Type::Proj(..) => {
            Type::TApp(Arc::new(t1.clone()), Arc::new(t2.clone()))
        }
        Type::Union(ms) => union(ms.iter().map(|m| app_type(m, t2, eager)).collect()),
        Type::Guard(g, inner) => guard((**g).clone(), app_type(inner, t2, eager)),
        Type::Int | Type::Ctor(..) | Type::Bot => Type::Bot,
    }
}

/// Type-level application; a function head is unfolded once.
pub fn tapp(t1: &Type, t2: &Type) -> Type {
    app_type(t1, t2, true)
}

/// Type-level application that never unfolds a function head.
pub fn mk_tapp(t1: &Type, t2: &Type) -> Type {
    app_type(t1, t2, false)
}

fn app_cc(t1: &Type, t2: &Type, eager: bool) -> CrashCond {
    match t1 {
        Type::Fun(f) if eager => unfold_crash(f, t1, t2),
        Type::Fun(_) | Type::Var(_) | Type::TApp(..) | Type::Proj(..) => CrashCond::CCApp(t1.clone(), t2.clone()),
        // Possible callees are weighed together by the solver.
        Type::Union(ms) if ms.iter().all(never_fun) => CrashCond::TT,
        Type::Union(_) => CrashCond::CCApp(t1.clone(), t2.clone()),
        Type::Guard(_, inner) => app_cc(inner, t2, eager),
        Type::Int | Type::Ctor(..) | Type::Bot => CrashCond::TT,
    }
}

fn never_fun(t: &Type) -> bool {
    match t {
        Type::Int | Type::Ctor(..) | Type::Bot => true,
        Type::Guard(_, inner) => never_fun(inner),
        Type::Union(ms) => ms.iter().all(never_fun),
        Type::Var(_) | Type::Fun(_) | Type::TApp(..) | Type::Proj(..) => false,
    }
}

/// Crash-condition-level application; a function head is unfolded once.
pub fn ccapp(t1: &Type, t2: &Type) -> CrashCond {
    app_cc(t1, t2, true)
}

/// Crash-condition-level application that never unfolds a function head.
pub fn mk_ccapp(t1: &Type, t2: &Type) -> CrashCond {
    app_cc(t1, t2, false)
}

pub fn or(a: CrashCond, b: CrashCond) -> CrashCond {
    or_all(vec![a, b])
}

pub fn and(a: CrashCond, b: CrashCond) -> CrashCond {
    and_all(vec![a, b])
}

pub fn or_all(cs: Vec<CrashCond>) -> CrashCond {
    let mut flat: Vec<CrashCond> = Vec::with_capacity(cs.len());
    for c in cs {
        match c {
            CrashCond::FF => {}
            CrashCond::TT => return CrashCond::TT,
            CrashCond::Or(inner) => {
                for d in inner {
                    if !flat.contains(&d) {
                        flat.push(d);
                    }
                }
            }
            c => {
                if !flat.contains(&c) {
                    flat.push(c);
                }
            }
        }
    }
    match flat.len() {
        0 => CrashCond::FF,
        1 => flat.pop().unwrap(),
        _ => factor_common_head(flat),
    }
}

/// `(p ∧ q) ∨ (p ∧ r)` becomes `p ∧ (q ∨ r)` when every disjunct is a
/// conjunction led by the same `p`.
fn factor_common_head(disjuncts: Vec<CrashCond>) -> CrashCond {
    let head = match &disjuncts[0] {
        CrashCond::And(cs) => cs[0].clone(),
        _ => return CrashCond::Or(disjuncts),
    };
    let shared = disjuncts
        .iter()
        .all(|d| matches!(d, CrashCond::And(cs) if cs[0] == head));
    if !shared {
        return CrashCond::Or(disjuncts);
    }
    let rests = disjuncts
        .into_iter()
        .map(|d| match d {
            CrashCond::And(cs) => and_all(cs[1..].to_vec()),
            _ => unreachable!(),
        })
        .collect();
    and(head, or_all(rests))
}

pub fn and_all(cs: Vec<CrashCond>) -> CrashCond {
    let mut flat: Vec<CrashCond> = Vec::with_capacity(cs.len());
    for c in cs {
        match c {
            CrashCond::TT => {}
            CrashCond::FF => return CrashCond::FF,
            CrashCond::And(inner) => {
                for d in inner {
                    if !flat.contains(&d) {
                        flat.push(d);
                    }
                }
            }
            c => {
                if !flat.contains(&c) {
                    flat.push(c);
                }
            }
        }
    }
    match flat.len() {
        0 => CrashCond::TT,
        1 => flat.pop().unwrap(),
        _ => CrashCond::And(flat),
    }
}

pub fn has_ctor(c: &CtorName, t: Type) -> CrashCond {
    CrashCond::HasCtor(c.clone(), t)
}

pub fn has_no_ctor(c: &CtorName, t: Type) -> CrashCond {
    CrashCond::HasNoCtor(c.clone(), t)
}

/// A function type or a self variable is never a non-function.
pub fn not_fun(t: Type) -> CrashCond {
    match t {
        Type::Fun(_) | Type::Var(TVar { is_self: true, .. }) => CrashCond::FF,
        t => CrashCond::NotFun(t),
    }
}
