//! Output types and crash conditions.
//!
//! Function types carry two binders: `arg` for the parameter and `slf` for the
//! recursive self reference, which may occur in both `ret` and `crash`.
//! `Guard(c, t)` marks a match-arm type that only contributes when the arm's
//! selection condition `c` can hold; `erase_guards` drops them.

mod build;
mod canon;
mod render;
mod subst;

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::syntax::{CtorName, Ident};

pub use build::*;
pub use canon::{alpha_equal, alpha_equal_cc, canonical, canonical_cc, normalize, normalize_cc};
pub use render::{render_cc, render_type, Renderer};
pub use subst::{erase_guards, erase_guards_cc, subst_many, subst_many_cc, subst_tvar, subst_tvar_cc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TVar {
    pub id: u64,
    /// Self variables stand for the enclosing recursive function.
    pub is_self: bool,
}

static NEXT_TVAR: AtomicU64 = AtomicU64::new(1);

impl TVar {
    pub fn fresh() -> TVar {
        TVar {
            id: NEXT_TVAR.fetch_add(1, Ordering::Relaxed),
            is_self: false,
        }
    }

    pub fn fresh_self() -> TVar {
        TVar {
            id: NEXT_TVAR.fetch_add(1, Ordering::Relaxed),
            is_self: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunType {
    pub arg: TVar,
    pub slf: TVar,
    pub ret: Type,
    pub crash: CrashCond,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Var(TVar),
    Fun(Arc<FunType>),
    Ctor(CtorName, Vec<Type>),
    /// At least two members, none of them a union or `Bot`.
    Union(Vec<Type>),
    Int,
    Bot,
    TApp(Arc<Type>, Arc<Type>),
    /// 1-based component index.
    Proj(Arc<Type>, CtorName, usize),
    Guard(Arc<CrashCond>, Arc<Type>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CrashCond {
    FF,
    TT,
    /// At least two operands, none of them an `Or`.
    Or(Vec<CrashCond>),
    /// At least two operands, none of them an `And`.
    And(Vec<CrashCond>),
    HasCtor(CtorName, Type),
    HasNoCtor(CtorName, Type),
    NotFun(Type),
    CCApp(Type, Type),
}

impl Type {
    pub fn var(v: TVar) -> Type {
        Type::Var(v)
    }

    pub fn nullary(name: &str) -> Type {
        Type::Ctor(CtorName::new(name, 0), Vec::new())
    }

    pub fn ctor(name: &str, args: Vec<Type>) -> Type {
        Type::Ctor(CtorName::new(name, args.len()), args)
    }

    pub fn fun(arg: TVar, slf: TVar, ret: Type, crash: CrashCond) -> Type {
        Type::Fun(Arc::new(FunType { arg, slf, ret, crash }))
    }

    pub fn as_fun(&self) -> Option<&FunType> {
        match self {
            Type::Fun(f) => Some(f),
            _ => None,
        }
    }

    pub fn free_tvars(&self) -> BTreeSet<TVar> {
        let mut out = BTreeSet::new();
        FreeVars::default().ty(self, &mut out);
        out
    }

    pub fn is_ground(&self) -> bool {
        self.free_tvars().is_empty()
    }

    pub fn mentions(&self, v: TVar) -> bool {
        self.free_tvars().contains(&v)
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Type::Var(_) | Type::Int | Type::Bot => 1,
            Type::Fun(f) => 1 + f.ret.size() + f.crash.size(),
            Type::Ctor(_, args) => 1 + args.iter().map(Type::size).sum::<usize>(),
            Type::Union(ms) => 1 + ms.iter().map(Type::size).sum::<usize>(),
            Type::TApp(a, b) => 1 + a.size() + b.size(),
            Type::Proj(t, _, _) => 1 + t.size(),
            Type::Guard(c, t) => 1 + c.size() + t.size(),
        }
    }

    /// `size() <= limit`, without walking more than `limit` nodes.
    pub fn size_at_most(&self, limit: usize) -> bool {
        let mut left = limit;
        self.spend(&mut left)
    }

    fn spend(&self, left: &mut usize) -> bool {
        if *left == 0 {
            return false;
        }
        *left -= 1;
        match self {
            Type::Var(_) | Type::Int | Type::Bot => true,
            Type::Fun(f) => f.ret.spend(left) && f.crash.spend(left),
            Type::Ctor(_, ts) | Type::Union(ts) => ts.iter().all(|t| t.spend(left)),
            Type::TApp(a, b) => a.spend(left) && b.spend(left),
            Type::Proj(t, _, _) => t.spend(left),
            Type::Guard(c, t) => c.spend(left) && t.spend(left),
        }
    }

    /// True when no `TApp` or `CCApp` node occurs anywhere inside.
    pub fn is_application_free(&self) -> bool {
        match self {
            Type::Var(_) | Type::Int | Type::Bot => true,
            Type::TApp(..) => false,
            Type::Fun(f) => f.ret.is_application_free() && f.crash.is_application_free(),
            Type::Ctor(_, args) | Type::Union(args) => args.iter().all(Type::is_application_free),
            Type::Proj(t, _, _) => t.is_application_free(),
            Type::Guard(c, t) => c.is_application_free() && t.is_application_free(),
        }
    }
}

impl CrashCond {
    pub fn free_tvars(&self) -> BTreeSet<TVar> {
        let mut out = BTreeSet::new();
        FreeVars::default().cc(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            CrashCond::FF | CrashCond::TT => 1,
            CrashCond::Or(cs) | CrashCond::And(cs) => 1 + cs.iter().map(CrashCond::size).sum::<usize>(),
            CrashCond::HasCtor(_, t) | CrashCond::HasNoCtor(_, t) | CrashCond::NotFun(t) => 1 + t.size(),
            CrashCond::CCApp(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn size_at_most(&self, limit: usize) -> bool {
        let mut left = limit;
        self.spend(&mut left)
    }

    fn spend(&self, left: &mut usize) -> bool {
        if *left == 0 {
            return false;
        }
        *left -= 1;
        match self {
            CrashCond::FF | CrashCond::TT => true,
            CrashCond::Or(cs) | CrashCond::And(cs) => cs.iter().all(|c| c.spend(left)),
            CrashCond::HasCtor(_, t) | CrashCond::HasNoCtor(_, t) | CrashCond::NotFun(t) => t.spend(left),
            CrashCond::CCApp(a, b) => a.spend(left) && b.spend(left),
        }
    }

    pub fn is_application_free(&self) -> bool {
        match self {
            CrashCond::FF | CrashCond::TT => true,
            CrashCond::CCApp(..) => false,
            CrashCond::Or(cs) | CrashCond::And(cs) => cs.iter().all(CrashCond::is_application_free),
            CrashCond::HasCtor(_, t) | CrashCond::HasNoCtor(_, t) | CrashCond::NotFun(t) => t.is_application_free(),
        }
    }
}

/// Free variables with one visit per shared node. Inferred types reuse
/// subterms through `Arc`s, so a plain tree walk can be exponential in the
/// size of the term. Keys stay valid because every node is borrowed from the
/// root for the whole computation.
#[derive(Default)]
struct FreeVars {
    types: HashMap<*const Type, BTreeSet<TVar>>,
    conds: HashMap<*const CrashCond, BTreeSet<TVar>>,
    funs: HashMap<*const FunType, BTreeSet<TVar>>,
}

impl FreeVars {
    fn ty(&mut self, t: &Type, out: &mut BTreeSet<TVar>) {
        match t {
            Type::Var(v) => {
                out.insert(*v);
            }
            Type::Int | Type::Bot => {}
            Type::Fun(f) => self.fun(f, out),
            Type::Ctor(_, args) | Type::Union(args) => args.iter().for_each(|a| self.ty(a, out)),
            Type::TApp(a, b) => {
                self.shared_ty(a, out);
                self.shared_ty(b, out);
            }
            Type::Proj(a, _, _) => self.shared_ty(a, out),
            Type::Guard(c, a) => {
                self.shared_cc(c, out);
                self.shared_ty(a, out);
            }
        }
    }

    fn cc(&mut self, c: &CrashCond, out: &mut BTreeSet<TVar>) {
        match c {
            CrashCond::FF | CrashCond::TT => {}
            CrashCond::Or(cs) | CrashCond::And(cs) => cs.iter().for_each(|c| self.cc(c, out)),
            CrashCond::HasCtor(_, t) | CrashCond::HasNoCtor(_, t) | CrashCond::NotFun(t) => self.ty(t, out),
            CrashCond::CCApp(a, b) => {
                self.ty(a, out);
                self.ty(b, out);
            }
        }
    }

    fn shared_ty(&mut self, t: &Arc<Type>, out: &mut BTreeSet<TVar>) {
        let key = Arc::as_ptr(t);
        if !self.types.contains_key(&key) {
            let mut mine = BTreeSet::new();
            self.ty(t, &mut mine);
            self.types.insert(key, mine);
        }
        out.extend(self.types[&key].iter().copied());
    }

    fn shared_cc(&mut self, c: &Arc<CrashCond>, out: &mut BTreeSet<TVar>) {
        let key = Arc::as_ptr(c);
        if !self.conds.contains_key(&key) {
            let mut mine = BTreeSet::new();
            self.cc(c, &mut mine);
            self.conds.insert(key, mine);
        }
        out.extend(self.conds[&key].iter().copied());
    }

    fn fun(&mut self, f: &Arc<FunType>, out: &mut BTreeSet<TVar>) {
        let key = Arc::as_ptr(f);
        if !self.funs.contains_key(&key) {
            let mut mine = BTreeSet::new();
            self.ty(&f.ret, &mut mine);
            self.cc(&f.crash, &mut mine);
            mine.remove(&f.arg);
            mine.remove(&f.slf);
            self.funs.insert(key, mine);
        }
        out.extend(self.funs[&key].iter().copied());
    }
}

/// Γ: identifiers to types; later bindings shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    bindings: Vec<(Ident, Type)>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.bindings.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn extend(&self, x: &str, t: Type) -> TypeEnv {
        let mut next = self.clone();
        next.bindings.push((x.to_string(), t));
        next
    }

    pub fn push(&mut self, x: &str, t: Type) {
        self.bindings.push((x.to_string(), t));
    }

    pub fn pop(&mut self) {
        self.bindings.pop();
    }

    pub fn contains(&self, x: &str) -> bool {
        self.lookup(x).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Ident, Type)> {
        self.bindings.iter()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl FromIterator<(Ident, Type)> for TypeEnv {
    fn from_iter<I: IntoIterator<Item = (Ident, Type)>>(iter: I) -> Self {
        TypeEnv {
            bindings: iter.into_iter().collect(),
        }
    }
}
