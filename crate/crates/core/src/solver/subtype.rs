//! Bounded three-valued subtyping. `False` is reported only for a definite,
//! inhabited member of the left side that no member of the right side can
//! cover.

use super::eval::{Member, Resolved, Shape, Solver};
use super::Truth;
use crate::types::{alpha_equal, alpha_equal_cc, subst_many, CrashCond, FunType, Type};

/// Alpha-equivalence is only tried on types up to this size; beyond it the
/// check falls through to member-wise comparison.
const ALPHA_SIZE: usize = 4_096;

fn small_alpha_equal(a: &Type, b: &Type) -> bool {
    a.size_at_most(ALPHA_SIZE) && b.size_at_most(ALPHA_SIZE) && (a == b || alpha_equal(a, b))
}

pub fn subtype(t1: &Type, t2: &Type, k: u32) -> Truth {
    Solver::new().subtype(t1, k, t2, k)
}

impl Solver {
    pub fn subtype(&mut self, t1: &Type, f1: u32, t2: &Type, f2: u32) -> Truth {
        if *t1 == Type::Bot || small_alpha_equal(t1, t2) {
            return Truth::True;
        }
        let left = self.resolve(t1, f1);
        if left.opaque {
            return Truth::Unknown;
        }
        let right = self.resolve(t2, f2);
        let mut acc = Truth::True;
        for m in &left.members {
            acc = acc.and(self.covered(m, &right));
            if acc == Truth::False {
                break;
            }
        }
        acc
    }

    fn covered(&mut self, m: &Member, right: &Resolved) -> Truth {
        let candidates: Vec<&Member> = right
            .members
            .iter()
            .filter(|r| same_shape(&m.shape, &r.shape))
            .collect();
        let mut verdicts = Vec::with_capacity(candidates.len());
        for r in &candidates {
            let v = self.member_le(m, r);
            if v == Truth::True && r.definite {
                return Truth::True;
            }
            verdicts.push(v);
        }
        let refuted = !right.opaque
            && match verdicts.as_slice() {
                [] => true,
                [only] => *only == Truth::False,
                _ => false,
            };
        if refuted && m.definite && self.member_inhabited(m) {
            Truth::False
        } else {
            Truth::Unknown
        }
    }

    fn member_le(&mut self, a: &Member, b: &Member) -> Truth {
        match (&a.shape, &b.shape) {
            (Shape::Int, Shape::Int) => Truth::True,
            (Shape::Ctor(_, xs), Shape::Ctor(_, ys)) => {
                let mut acc = Truth::True;
                for (x, y) in xs.iter().zip(ys) {
                    acc = acc.and(self.subtype(x, a.fuel, y, b.fuel));
                    if acc == Truth::False {
                        break;
                    }
                }
                acc
            }
            (Shape::Fun(f), Shape::Fun(g)) => self.fun_le(f, g, a.fuel, b.fuel),
            _ => Truth::False,
        }
    }

    /// Covariant result and a syntactically evident implication of crash
    /// conditions; never refutes.
    fn fun_le(&mut self, f: &std::sync::Arc<FunType>, g: &std::sync::Arc<FunType>, ff: u32, gf: u32) -> Truth {
        let (tf, tg) = (Type::Fun(f.clone()), Type::Fun(g.clone()));
        if small_alpha_equal(&tf, &tg) {
            return Truth::True;
        }
        if !(g.ret.size_at_most(ALPHA_SIZE) && g.crash.size_at_most(ALPHA_SIZE)) {
            return Truth::Unknown;
        }
        let rename = [(g.arg, Type::Var(f.arg)), (g.slf, Type::Var(f.slf))];
        let g_ret = subst_many(&g.ret, &rename);
        let g_crash = crate::types::subst_many_cc(&g.crash, &rename);
        let implied = g_crash == CrashCond::FF
            || f.crash == CrashCond::TT
            || (g_crash.size_at_most(ALPHA_SIZE)
                && f.crash.size_at_most(ALPHA_SIZE)
                && alpha_equal_cc(&g_crash, &f.crash));
        if implied && self.subtype(&f.ret, ff, &g_ret, gf) == Truth::True {
            Truth::True
        } else {
            Truth::Unknown
        }
    }

    fn member_inhabited(&mut self, m: &Member) -> bool {
        match &m.shape {
            Shape::Int | Shape::Fun(_) => true,
            Shape::Ctor(_, args) => args.iter().all(|a| {
                let r = self.resolve(a, m.fuel);
                r.members
                    .iter()
                    .filter(|x| x.definite)
                    .any(|x| self.member_inhabited(x))
            }),
        }
    }
}

fn same_shape(a: &Shape, b: &Shape) -> bool {
    match (a, b) {
        (Shape::Int, Shape::Int) | (Shape::Fun(_), Shape::Fun(_)) => true,
        (Shape::Ctor(c, _), Shape::Ctor(d, _)) => c == d,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{union2, TVar};

    #[test]
    fn examples() {
        assert_eq!(subtype(&Type::Bot, &Type::Int, 0), Truth::True);
        let u = union2(Type::Int, Type::nullary("Zero"));
        assert_eq!(subtype(&Type::Int, &u, 0), Truth::True);
        let lhs = Type::ctor("Succ", vec![Type::Int]);
        let rhs = Type::ctor("Succ", vec![Type::Bot]);
        for k in 0..4 {
            assert_eq!(subtype(&lhs, &rhs, k), Truth::False);
        }
    }

    #[test]
    fn union_on_the_right_is_not_refuted_componentwise() {
        let (a, b) = (Type::nullary("A"), Type::nullary("B"));
        let lhs = Type::ctor("P", vec![union2(a.clone(), b.clone())]);
        let rhs = union2(Type::ctor("P", vec![a]), Type::ctor("P", vec![b]));
        assert_ne!(subtype(&lhs, &rhs, 2), Truth::False);
    }

    #[test]
    fn functions_are_never_refuted_against_functions() {
        let a = TVar::fresh();
        let id = Type::fun(a, TVar::fresh_self(), Type::Var(a), CrashCond::FF);
        let b = TVar::fresh();
        let konst = Type::fun(b, TVar::fresh_self(), Type::Int, CrashCond::TT);
        assert_ne!(subtype(&id, &konst, 3), Truth::False);
        assert_eq!(subtype(&id, &id.clone(), 0), Truth::True);
        assert_eq!(subtype(&Type::Int, &id, 0), Truth::False);
    }
}
