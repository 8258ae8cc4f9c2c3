//! Text rendering. Variables get stable names in order of first appearance:
//! `a0, a1, ..` for argument variables and `X0, X1, ..` for self variables.

use std::collections::HashMap;

use super::{CrashCond, Type};
use crate::types::TVar;

#[derive(Default)]
pub struct Renderer {
    names: HashMap<TVar, String>,
    args: usize,
    selves: usize,
}

pub fn render_type(t: &Type) -> String {
    Renderer::new().ty(t)
}

pub fn render_cc(c: &CrashCond) -> String {
    Renderer::new().cc(c)
}

impl Renderer {
    pub fn new() -> Self {
        Self::default()
    }

    fn name(&mut self, v: TVar) -> String {
        if let Some(n) = self.names.get(&v) {
            return n.clone();
        }
        let n = if v.is_self {
            self.selves += 1;
            format!("X{}", self.selves - 1)
        } else {
            self.args += 1;
            format!("a{}", self.args - 1)
        };
        self.names.insert(v, n.clone());
        n
    }

    pub fn ty(&mut self, t: &Type) -> String {
        match t {
            Type::Var(v) => self.name(*v),
            Type::Int => "int".into(),
            Type::Bot => "bot".into(),
            Type::Ctor(c, args) if args.is_empty() => c.name().to_string(),
            Type::Ctor(c, args) => {
                let parts: Vec<String> = args.iter().map(|a| self.ty(a)).collect();
                format!("{}({})", c.name(), parts.join(", "))
            }
            Type::Union(ms) => {
                let parts: Vec<String> = ms.iter().map(|m| self.wrapped(m, matches!(m, Type::Fun(_)))).collect();
                parts.join(" | ")
            }
            Type::Fun(f) => {
                let recursive = f.ret.mentions(f.slf) || f.crash.free_tvars().contains(&f.slf);
                let prefix = if recursive {
                    format!("mu {}.", self.name(f.slf))
                } else {
                    String::new()
                };
                let arg = self.name(f.arg);
                let ret = self.wrapped(&f.ret, matches!(f.ret, Type::Union(_) | Type::Fun(_)));
                let crash = match &f.crash {
                    CrashCond::Or(_) | CrashCond::And(_) => format!("({})", self.cc(&f.crash)),
                    c => self.cc(c),
                };
                format!("{prefix}[{arg}]{ret} & {crash}")
            }
            Type::TApp(a, b) => self.app(a, b),
            Type::Proj(a, c, i) => format!("{}.{}({})", c.name(), i, self.ty(a)),
            Type::Guard(c, a) => format!("({} => {})", self.cc(c), self.ty(a)),
        }
    }

    fn wrapped(&mut self, t: &Type, parens: bool) -> String {
        let s = self.ty(t);
        if parens {
            format!("({s})")
        } else {
            s
        }
    }

    fn app(&mut self, head: &Type, arg: &Type) -> String {
        let h = self.wrapped(head, matches!(head, Type::Union(_) | Type::Fun(_)));
        format!("{h}<{}>", self.ty(arg))
    }

    fn operand(&mut self, t: &Type) -> String {
        self.wrapped(t, matches!(t, Type::Union(_) | Type::Fun(_)))
    }

    pub fn cc(&mut self, c: &CrashCond) -> String {
        match c {
            CrashCond::TT => "tt".into(),
            CrashCond::FF => "ff".into(),
            CrashCond::Or(cs) => {
                let parts: Vec<String> = cs.iter().map(|c| self.cc(c)).collect();
                parts.join(" \\/ ")
            }
            CrashCond::And(cs) => {
                let parts: Vec<String> = cs
                    .iter()
                    .map(|c| match c {
                        CrashCond::Or(_) => format!("({})", self.cc(c)),
                        c => self.cc(c),
                    })
                    .collect();
                parts.join(" /\\ ")
            }
            CrashCond::HasCtor(k, t) => format!("{} in {}", k.name(), self.operand(t)),
            CrashCond::HasNoCtor(k, t) => format!("{} notin {}", k.name(), self.operand(t)),
            CrashCond::NotFun(t) => format!("nofun {}", self.operand(t)),
            CrashCond::CCApp(a, b) => format!("crash {}", self.app(a, b)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::CtorName;
    use crate::types::{and, has_ctor, has_no_ctor, or, proj, union2, TVar};
    use std::sync::Arc;

    #[test]
    fn length_type_rendering() {
        let (a, x) = (TVar::fresh(), TVar::fresh_self());
        let (nil, cons) = (CtorName::new("Nil", 0), CtorName::new("Cons", 2));
        let tail = proj(&Type::Var(a), &cons, 2);
        let rec_call = Type::TApp(Arc::new(Type::Var(x)), Arc::new(tail.clone()));
        let ret = union2(Type::nullary("Zero"), Type::ctor("Succ", vec![rec_call]));
        let crash = and(
            has_no_ctor(&nil, Type::Var(a)),
            or(
                and(has_ctor(&cons, Type::Var(a)), CrashCond::CCApp(Type::Var(x), tail)),
                has_no_ctor(&cons, Type::Var(a)),
            ),
        );
        let t = Type::fun(a, x, ret, crash);
        assert_eq!(
            render_type(&t),
            "mu X0.[a0](Zero | Succ(X0<Cons.2(a0)>)) & (Nil notin a0 /\\ (Cons in a0 /\\ crash X0<Cons.2(a0)> \\/ Cons notin a0))"
        );
    }

    #[test]
    fn non_recursive_function_omits_mu() {
        let a = TVar::fresh();
        let t = Type::fun(a, TVar::fresh_self(), Type::Var(a), CrashCond::FF);
        assert_eq!(render_type(&t), "[a0]a0 & ff");
        assert_eq!(render_type(&union2(t, Type::Int)), "([a0]a0 & ff) | int");
    }

    #[test]
    fn atoms() {
        assert_eq!(render_cc(&CrashCond::NotFun(Type::Int)), "nofun int");
        assert_eq!(render_type(&Type::Bot), "bot");
    }
}
