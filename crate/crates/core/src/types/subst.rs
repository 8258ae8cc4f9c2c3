//! Capture-avoiding simultaneous substitution of type variables.
//!
//! Results are rebuilt through the smart constructors, with application nodes
//! kept inert on function heads.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{
    and_all, guard, has_ctor, has_no_ctor, mk_ccapp, mk_tapp, not_fun, or_all, proj, union, CrashCond, FunType, TVar,
    Type,
};

struct Subst<'a> {
    map: Vec<(TVar, Type)>,
    /// Free variables of all replacements; binders among them are renamed.
    danger: &'a BTreeSet<TVar>,
}

pub fn subst_tvar(t: &Type, v: TVar, replacement: &Type) -> Type {
    subst_many(t, &[(v, replacement.clone())])
}

pub fn subst_tvar_cc(c: &CrashCond, v: TVar, replacement: &Type) -> CrashCond {
    subst_many_cc(c, &[(v, replacement.clone())])
}

pub fn subst_many(t: &Type, map: &[(TVar, Type)]) -> Type {
    let danger = danger_set(map);
    Subst {
        map: map.to_vec(),
        danger: &danger,
    }
    .ty(t)
}

pub fn subst_many_cc(c: &CrashCond, map: &[(TVar, Type)]) -> CrashCond {
    let danger = danger_set(map);
    Subst {
        map: map.to_vec(),
        danger: &danger,
    }
    .cc(c)
}

fn danger_set(map: &[(TVar, Type)]) -> BTreeSet<TVar> {
    map.iter().flat_map(|(_, t)| t.free_tvars()).collect()
}

impl Subst<'_> {
    fn ty(&self, t: &Type) -> Type {
        match t {
            Type::Var(v) => match self.map.iter().find(|(w, _)| w == v) {
                Some((_, r)) => r.clone(),
                None => t.clone(),
            },
            Type::Int | Type::Bot => t.clone(),
            Type::Fun(f) => self.fun(f, t),
            Type::Ctor(c, args) => Type::Ctor(c.clone(), args.iter().map(|a| self.ty(a)).collect()),
            Type::Union(ms) => union(ms.iter().map(|m| self.ty(m)).collect()),
            Type::TApp(a, b) => mk_tapp(&self.ty(a), &self.ty(b)),
            Type::Proj(a, c, i) => proj(&self.ty(a), c, *i),
            Type::Guard(c, a) => guard(self.cc(c), self.ty(a)),
        }
    }

    fn fun(&self, f: &FunType, whole: &Type) -> Type {
        let map: Vec<(TVar, Type)> = self
            .map
            .iter()
            .filter(|(v, _)| *v != f.arg && *v != f.slf)
            .cloned()
            .collect();
        if map.is_empty() {
            return whole.clone();
        }
        let (mut arg, mut slf) = (f.arg, f.slf);
        let (mut ret, mut crash) = (f.ret.clone(), f.crash.clone());
        if self.danger.contains(&f.arg) || self.danger.contains(&f.slf) {
            let (na, ns) = (TVar::fresh(), TVar::fresh_self());
            let rename = [(f.arg, Type::Var(na)), (f.slf, Type::Var(ns))];
            ret = subst_many(&ret, &rename);
            crash = subst_many_cc(&crash, &rename);
            arg = na;
            slf = ns;
        }
        let inner = Subst {
            map,
            danger: self.danger,
        };
        Type::Fun(Arc::new(FunType {
            arg,
            slf,
            ret: inner.ty(&ret),
            crash: inner.cc(&crash),
        }))
    }

    fn cc(&self, c: &CrashCond) -> CrashCond {
        match c {
            CrashCond::FF | CrashCond::TT => c.clone(),
            CrashCond::Or(cs) => or_all(cs.iter().map(|c| self.cc(c)).collect()),
            CrashCond::And(cs) => and_all(cs.iter().map(|c| self.cc(c)).collect()),
            CrashCond::HasCtor(k, t) => has_ctor(k, self.ty(t)),
            CrashCond::HasNoCtor(k, t) => has_no_ctor(k, self.ty(t)),
            CrashCond::NotFun(t) => not_fun(self.ty(t)),
            CrashCond::CCApp(a, b) => mk_ccapp(&self.ty(a), &self.ty(b)),
        }
    }
}

/// Drops every guard, keeping the guarded type.
pub fn erase_guards(t: &Type) -> Type {
    match t {
        Type::Var(_) | Type::Int | Type::Bot => t.clone(),
        Type::Fun(f) => Type::fun(f.arg, f.slf, erase_guards(&f.ret), erase_guards_cc(&f.crash)),
        Type::Ctor(c, args) => Type::Ctor(c.clone(), args.iter().map(erase_guards).collect()),
        Type::Union(ms) => union(ms.iter().map(erase_guards).collect()),
        Type::TApp(a, b) => Type::TApp(Arc::new(erase_guards(a)), Arc::new(erase_guards(b))),
        Type::Proj(a, c, i) => proj(&erase_guards(a), c, *i),
        Type::Guard(_, a) => erase_guards(a),
    }
}

pub fn erase_guards_cc(c: &CrashCond) -> CrashCond {
    match c {
        CrashCond::FF | CrashCond::TT => c.clone(),
        CrashCond::Or(cs) => or_all(cs.iter().map(erase_guards_cc).collect()),
        CrashCond::And(cs) => and_all(cs.iter().map(erase_guards_cc).collect()),
        CrashCond::HasCtor(k, t) => has_ctor(k, erase_guards(t)),
        CrashCond::HasNoCtor(k, t) => has_no_ctor(k, erase_guards(t)),
        CrashCond::NotFun(t) => not_fun(erase_guards(t)),
        CrashCond::CCApp(a, b) => CrashCond::CCApp(erase_guards(a), erase_guards(b)),
    }
}
