//! Normal forms and alpha-equivalence.
//!
//! `canonical` renames function binders by nesting level, sorts union
//! members and puts conditions in absorbed disjunctive normal form, so two
//! types are alpha-equal exactly when their canonical forms are identical.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{
    and_all, guard, has_ctor, has_no_ctor, mk_ccapp, mk_tapp, not_fun, or_all, proj, unfold_crash, unfold_ret, union,
    CrashCond, FunType, TVar, Type,
};

const BINDER_BASE: u64 = 1 << 62;
/// Larger disjunctive normal forms fall back to sorted flattening.
const DNF_CAP: usize = 512;

pub fn normalize(t: &Type) -> Type {
    let normal = norm(t);
    dedupe_alpha(normal)
}

pub fn normalize_cc(c: &CrashCond) -> CrashCond {
    norm_cc(c)
}

fn norm(t: &Type) -> Type {
    match t {
        Type::Var(_) | Type::Int | Type::Bot => t.clone(),
        Type::Fun(f) => Type::fun(f.arg, f.slf, normalize(&f.ret), norm_cc(&f.crash)),
        Type::Ctor(c, args) => Type::Ctor(c.clone(), args.iter().map(normalize).collect()),
        Type::Union(ms) => union(ms.iter().map(normalize).collect()),
        Type::TApp(a, b) => reduce_tapp(&normalize(a), &normalize(b)),
        Type::Proj(a, c, i) => proj(&normalize(a), c, *i),
        Type::Guard(c, a) => guard(norm_cc(c), normalize(a)),
    }
}

fn reduce_tapp(head: &Type, arg: &Type) -> Type {
    match head {
        Type::Fun(f) if f.ret.is_application_free() => normalize(&unfold_ret(f, head, arg)),
        Type::Union(ms) => union(ms.iter().map(|m| reduce_tapp(m, arg)).collect()),
        Type::Guard(c, inner) => guard((**c).clone(), reduce_tapp(inner, arg)),
        _ => mk_tapp(head, arg),
    }
}

fn reduce_ccapp(head: &Type, arg: &Type) -> CrashCond {
    match head {
        Type::Fun(f) if f.crash.is_application_free() => norm_cc(&unfold_crash(f, head, arg)),
        Type::Guard(_, inner) => reduce_ccapp(inner, arg),
        _ => mk_ccapp(head, arg),
    }
}

fn norm_cc(c: &CrashCond) -> CrashCond {
    match c {
        CrashCond::FF | CrashCond::TT => c.clone(),
        CrashCond::Or(cs) => or_all(cs.iter().map(norm_cc).collect()),
        CrashCond::And(cs) => and_all(cs.iter().map(norm_cc).collect()),
        CrashCond::HasCtor(k, t) => has_ctor(k, normalize(t)),
        CrashCond::HasNoCtor(k, t) => has_no_ctor(k, normalize(t)),
        CrashCond::NotFun(t) => not_fun(normalize(t)),
        CrashCond::CCApp(a, b) => reduce_ccapp(&normalize(a), &normalize(b)),
    }
}

/// Drops union members alpha-equal to an earlier member.
fn dedupe_alpha(t: Type) -> Type {
    match t {
        Type::Union(ms) => {
            let mut seen = BTreeSet::new();
            let kept = ms.into_iter().filter(|m| seen.insert(canonical(m))).collect();
            union(kept)
        }
        t => t,
    }
}

pub fn alpha_equal(a: &Type, b: &Type) -> bool {
    canonical(&normalize(a)) == canonical(&normalize(b))
}

pub fn alpha_equal_cc(a: &CrashCond, b: &CrashCond) -> bool {
    canonical_cc(&normalize_cc(a)) == canonical_cc(&normalize_cc(b))
}

pub fn canonical(t: &Type) -> Type {
    Canon { env: Vec::new() }.ty(t)
}

pub fn canonical_cc(c: &CrashCond) -> CrashCond {
    Canon { env: Vec::new() }.cc(c)
}

struct Canon {
    env: Vec<(TVar, TVar)>,
}

impl Canon {
    fn ty(&mut self, t: &Type) -> Type {
        match t {
            Type::Var(v) => Type::Var(self.env.iter().rev().find(|(w, _)| w == v).map_or(*v, |(_, n)| *n)),
            Type::Int | Type::Bot => t.clone(),
            Type::Fun(f) => {
                let level = self.env.len() as u64;
                let arg = TVar {
                    id: BINDER_BASE + level,
                    is_self: false,
                };
                let slf = TVar {
                    id: BINDER_BASE + level + 1,
                    is_self: true,
                };
                self.env.push((f.arg, arg));
                self.env.push((f.slf, slf));
                let ret = self.ty(&f.ret);
                let crash = self.cc(&f.crash);
                self.env.truncate(self.env.len() - 2);
                Type::Fun(Arc::new(FunType { arg, slf, ret, crash }))
            }
            Type::Ctor(c, args) => Type::Ctor(c.clone(), args.iter().map(|a| self.ty(a)).collect()),
            Type::Union(ms) => {
                let set: BTreeSet<Type> = ms.iter().map(|m| self.ty(m)).collect();
                let mut ms: Vec<Type> = set.into_iter().collect();
                if ms.len() == 1 {
                    ms.pop().unwrap()
                } else {
                    Type::Union(ms)
                }
            }
            Type::TApp(a, b) => Type::TApp(Arc::new(self.ty(a)), Arc::new(self.ty(b))),
            Type::Proj(a, c, i) => Type::Proj(Arc::new(self.ty(a)), c.clone(), *i),
            Type::Guard(c, a) => Type::Guard(Arc::new(self.cc(c)), Arc::new(self.ty(a))),
        }
    }

    fn atom(&mut self, c: &CrashCond) -> CrashCond {
        match c {
            CrashCond::HasCtor(k, t) => CrashCond::HasCtor(k.clone(), self.ty(t)),
            CrashCond::HasNoCtor(k, t) => CrashCond::HasNoCtor(k.clone(), self.ty(t)),
            CrashCond::NotFun(t) => CrashCond::NotFun(self.ty(t)),
            CrashCond::CCApp(a, b) => CrashCond::CCApp(self.ty(a), self.ty(b)),
            other => unreachable!("not an atom: {other:?}"),
        }
    }

    fn dnf(&mut self, c: &CrashCond) -> Option<Vec<BTreeSet<CrashCond>>> {
        match c {
            CrashCond::TT => Some(vec![BTreeSet::new()]),
            CrashCond::FF => Some(Vec::new()),
            CrashCond::Or(cs) => {
                let mut out = Vec::new();
                for c in cs {
                    out.extend(self.dnf(c)?);
                    if out.len() > DNF_CAP {
                        return None;
                    }
                }
                Some(out)
            }
            CrashCond::And(cs) => {
                let mut acc = vec![BTreeSet::new()];
                for c in cs {
                    let rhs = self.dnf(c)?;
                    if acc.len() * rhs.len() > DNF_CAP {
                        return None;
                    }
                    acc = acc
                        .iter()
                        .flat_map(|l| rhs.iter().map(move |r| l.union(r).cloned().collect()))
                        .collect();
                }
                Some(acc)
            }
            atom => Some(vec![BTreeSet::from([self.atom(atom)])]),
        }
    }

    fn cc(&mut self, c: &CrashCond) -> CrashCond {
        match self.dnf(c) {
            Some(clauses) => rebuild_dnf(absorb(clauses)),
            None => self.flat(c),
        }
    }

    fn flat(&mut self, c: &CrashCond) -> CrashCond {
        match c {
            CrashCond::TT | CrashCond::FF => c.clone(),
            CrashCond::Or(cs) => {
                let set: BTreeSet<CrashCond> = cs.iter().map(|c| self.flat(c)).collect();
                CrashCond::Or(set.into_iter().collect())
            }
            CrashCond::And(cs) => {
                let set: BTreeSet<CrashCond> = cs.iter().map(|c| self.flat(c)).collect();
                CrashCond::And(set.into_iter().collect())
            }
            atom => self.atom(atom),
        }
    }
}

fn absorb(clauses: Vec<BTreeSet<CrashCond>>) -> BTreeSet<BTreeSet<CrashCond>> {
    let unique: BTreeSet<BTreeSet<CrashCond>> = clauses.into_iter().collect();
    unique
        .iter()
        .filter(|c| !unique.iter().any(|d| d != *c && d.is_subset(c)))
        .cloned()
        .collect()
}

fn rebuild_dnf(clauses: BTreeSet<BTreeSet<CrashCond>>) -> CrashCond {
    let mut ors: Vec<CrashCond> = clauses
        .into_iter()
        .map(|clause| {
            let mut atoms: Vec<CrashCond> = clause.into_iter().collect();
            match atoms.len() {
                0 => CrashCond::TT,
                1 => atoms.pop().unwrap(),
                _ => CrashCond::And(atoms),
            }
        })
        .collect();
    match ors.len() {
        0 => CrashCond::FF,
        1 => ors.pop().unwrap(),
        _ => CrashCond::Or(ors),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::CtorName;
    use crate::types::{and, or, union2};

    fn id_fun() -> Type {
        let a = TVar::fresh();
        Type::fun(a, TVar::fresh_self(), Type::Var(a), CrashCond::FF)
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&Type::Union(vec![Type::Bot, Type::Int])), Type::Int);
        assert_eq!(normalize(&Type::Union(vec![Type::Int, Type::Int])), Type::Int);
        let app = Type::TApp(Arc::new(id_fun()), Arc::new(Type::Int));
        assert_eq!(normalize(&app), Type::Int);
    }

    #[test]
    fn alpha_equal_examples() {
        assert!(alpha_equal(&id_fun(), &id_fun()));
        assert!(!alpha_equal(&Type::Int, &Type::Bot));
        let (a, b) = (Type::nullary("A"), Type::nullary("B"));
        assert!(alpha_equal(&union2(a.clone(), b.clone()), &union2(b, a)));
    }

    #[test]
    fn alpha_equal_dedupes_renamed_members() {
        let u = Type::Union(vec![id_fun(), id_fun(), Type::Int]);
        assert_eq!(normalize(&u).to_owned(), normalize(&normalize(&u)));
        assert!(matches!(normalize(&u), Type::Union(ms) if ms.len() == 2));
    }

    #[test]
    fn conditions_compare_up_to_boolean_laws() {
        let nil = CtorName::new("Nil", 0);
        let p = has_ctor(&nil, Type::Int);
        let q = has_no_ctor(&nil, Type::Int);
        let r = not_fun(Type::Int);
        let lhs = and(p.clone(), or(q.clone(), r.clone()));
        let rhs = or(and(r.clone(), p.clone()), and(q.clone(), p.clone()));
        assert!(alpha_equal_cc(&lhs, &rhs));
        assert!(alpha_equal_cc(&or(p.clone(), and(p.clone(), q.clone())), &p));
        assert!(!alpha_equal_cc(&p, &q));
    }

    #[test]
    fn canonical_is_idempotent() {
        let f = Type::fun(
            TVar::fresh(),
            TVar::fresh_self(),
            union2(Type::Int, id_fun()),
            CrashCond::NotFun(Type::Int),
        );
        let c = canonical(&f);
        assert_eq!(canonical(&c), c);
    }
}
