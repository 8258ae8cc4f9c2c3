//! Bounded resolution of types into possible members, and three-valued
//! evaluation of crash conditions over them.
//!
//! The budget is an unfolding depth: resolving a `TApp` or `CCApp` on a
//! function head costs one unit along that path. A predicate is decided only
//! when resolution is complete (no opaque part) and at least one member is
//! definite (not behind an undecided guard); it is then true when every
//! possible member satisfies it and false when none does.

use std::collections::HashMap;
use std::sync::Arc;

use super::Truth;
use crate::syntax::CtorName;
use crate::types::{unfold_crash, unfold_ret, CrashCond, FunType, Type};

/// Evaluation work beyond this many steps yields Unknown.
pub const WORK_LIMIT: u64 = 100_000;

/// Operand size below which `cheap_first` inspects it.
const CHEAP_SIZE: usize = 64;

#[derive(Clone, Debug)]
pub enum Shape {
    Int,
    Ctor(CtorName, Vec<Type>),
    Fun(Arc<FunType>),
}

#[derive(Clone, Debug)]
pub struct Member {
    pub shape: Shape,
    /// Budget left for resolving this member's components or calls.
    pub fuel: u32,
    /// False when the member sits behind a guard that may not hold.
    pub definite: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Resolved {
    pub members: Vec<Member>,
    pub opaque: bool,
}

impl Resolved {
    pub fn decided(&self) -> bool {
        !self.opaque && self.members.iter().any(|m| m.definite)
    }

    /// True if all members satisfy `p`, false if none does.
    pub fn unanimous(&self, p: impl Fn(&Member) -> bool) -> Truth {
        if !self.decided() {
            return Truth::Unknown;
        }
        let hits = self.members.iter().filter(|m| p(m)).count();
        if hits == self.members.len() {
            Truth::True
        } else if hits == 0 {
            Truth::False
        } else {
            Truth::Unknown
        }
    }
}

/// Guarded members resolved at a given budget, keyed by node identity. The
/// entry holds both halves of the guard so the addresses stay valid for the
/// solver's lifetime.
type GuardMemo = HashMap<(*const CrashCond, *const Type, u32), (Arc<CrashCond>, Arc<Type>, Resolved)>;

pub struct Solver {
    work: u64,
    guards: GuardMemo,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            work: 0,
            guards: HashMap::new(),
        }
    }

    /// Work spent so far.
    pub fn work(&self) -> u64 {
        self.work
    }

    fn tick(&mut self) -> bool {
        self.work += 1;
        self.work <= WORK_LIMIT
    }

    pub fn resolve(&mut self, t: &Type, fuel: u32) -> Resolved {
        let mut out = Resolved::default();
        self.resolve_into(t, fuel, true, &mut out);
        out
    }

    fn resolve_into(&mut self, t: &Type, fuel: u32, definite: bool, out: &mut Resolved) {
        if !self.tick() {
            out.opaque = true;
            return;
        }
        match t {
            Type::Var(_) => out.opaque = true,
            Type::Bot => {}
            Type::Int => out.members.push(Member {
                shape: Shape::Int,
                fuel,
                definite,
            }),
            Type::Ctor(c, args) => out.members.push(Member {
                shape: Shape::Ctor(c.clone(), args.clone()),
                fuel,
                definite,
            }),
            Type::Fun(f) => out.members.push(Member {
                shape: Shape::Fun(f.clone()),
                fuel,
                definite,
            }),
            Type::Union(ms) => ms.iter().for_each(|m| self.resolve_into(m, fuel, definite, out)),
            Type::Guard(c, inner) => {
                let shared = self.resolve_guard(c, inner, fuel);
                out.opaque |= shared.opaque;
                out.members.extend(shared.members.into_iter().map(|m| Member {
                    definite: m.definite && definite,
                    ..m
                }));
            }
            Type::Proj(head, c, i) => {
                let h = self.resolve(head, fuel);
                out.opaque |= h.opaque;
                for m in h.members {
                    if let Shape::Ctor(d, args) = &m.shape {
                        if d == c {
                            self.resolve_into(&args[*i - 1], m.fuel, definite && m.definite, out);
                        }
                    }
                }
            }
            Type::TApp(head, arg) => {
                let h = self.resolve(head, fuel);
                out.opaque |= h.opaque;
                for m in h.members {
                    if let Shape::Fun(f) = &m.shape {
                        if m.fuel == 0 {
                            out.opaque = true;
                        } else {
                            let whole = Type::Fun(f.clone());
                            let body = unfold_ret(f, &whole, arg);
                            self.resolve_into(&body, m.fuel - 1, definite && m.definite, out);
                        }
                    }
                }
            }
        }
    }

    /// Guarded types are shared heavily between match arms, so each one is
    /// resolved once per budget.
    fn resolve_guard(&mut self, c: &Arc<CrashCond>, inner: &Arc<Type>, fuel: u32) -> Resolved {
        let key = (Arc::as_ptr(c), Arc::as_ptr(inner), fuel);
        if let Some((_, _, r)) = self.guards.get(&key) {
            return r.clone();
        }
        let mut r = Resolved::default();
        match self.eval(c, fuel) {
            Truth::False => {}
            Truth::True => self.resolve_into(inner, fuel, true, &mut r),
            Truth::Unknown => self.resolve_into(inner, fuel, false, &mut r),
        }
        self.guards.insert(key, (c.clone(), inner.clone(), r.clone()));
        r
    }

    pub fn eval(&mut self, c: &CrashCond, fuel: u32) -> Truth {
        if !self.tick() {
            return Truth::Unknown;
        }
        match c {
            CrashCond::TT => Truth::True,
            CrashCond::FF => Truth::False,
            CrashCond::And(cs) => {
                let mut acc = Truth::True;
                for c in cheap_first(cs) {
                    acc = acc.and(self.eval(c, fuel));
                    if acc == Truth::False {
                        break;
                    }
                }
                acc
            }
            CrashCond::Or(cs) => {
                let mut acc = Truth::False;
                for c in cheap_first(cs) {
                    acc = acc.or(self.eval(c, fuel));
                    if acc == Truth::True {
                        break;
                    }
                }
                acc
            }
            CrashCond::HasCtor(k, t) => self.resolve(t, fuel).unanimous(|m| is_ctor(m, k)),
            CrashCond::HasNoCtor(k, t) => self.resolve(t, fuel).unanimous(|m| !is_ctor(m, k)),
            CrashCond::NotFun(t) => self.resolve(t, fuel).unanimous(|m| !matches!(m.shape, Shape::Fun(_))),
            CrashCond::CCApp(head, arg) => self.eval_call(head, arg, fuel),
        }
    }

    /// Every possible callee must agree.
    fn eval_call(&mut self, head: &Type, arg: &Type, fuel: u32) -> Truth {
        let h = self.resolve(head, fuel);
        if !h.decided() {
            return Truth::Unknown;
        }
        let (mut all_true, mut all_false) = (true, true);
        for m in &h.members {
            let v = match &m.shape {
                Shape::Int | Shape::Ctor(..) => Truth::True,
                Shape::Fun(_) if m.fuel == 0 => Truth::Unknown,
                Shape::Fun(f) => {
                    let whole = Type::Fun(f.clone());
                    let body = unfold_crash(f, &whole, arg);
                    self.eval(&body, m.fuel - 1)
                }
            };
            all_true &= v == Truth::True;
            all_false &= v == Truth::False;
            if !all_true && !all_false {
                return Truth::Unknown;
            }
        }
        if all_true {
            Truth::True
        } else {
            Truth::False
        }
    }
}

/// Small operands that need no unfolding come first so they can
/// short-circuit the expensive ones.
fn cheap_first(cs: &[CrashCond]) -> impl Iterator<Item = &CrashCond> {
    let (cheap, costly): (Vec<&CrashCond>, Vec<&CrashCond>) = cs
        .iter()
        .partition(|c| c.size_at_most(CHEAP_SIZE) && c.is_application_free());
    cheap.into_iter().chain(costly)
}

fn is_ctor(m: &Member, k: &CtorName) -> bool {
    matches!(&m.shape, Shape::Ctor(c, _) if c == k)
}
