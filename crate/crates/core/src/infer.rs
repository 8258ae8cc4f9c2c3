//! The judgment `Γ ⊢ e : τ & c` and its pattern-list companion.
//!
//! Arm types are wrapped in guards holding the arm's selection condition, so
//! the solver can discard arms that provably cannot be taken.

use thiserror::Error;

use crate::syntax::{Arm, Expr};
use crate::types::{
    and, ccapp, guard, has_ctor, has_no_ctor, not_fun, or, or_all, proj, tapp, union2, CrashCond, TVar, Type, TypeEnv,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typing {
    pub ty: Type,
    pub crash: CrashCond,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InferError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

pub fn infer(env: &TypeEnv, e: &Expr) -> Result<Typing, InferError> {
    let mut env = env.clone();
    judge(&mut env, e)
}

pub fn infer_patterns(env: &TypeEnv, cm: CrashCond, t0: &Type, arms: &[Arm]) -> Result<Typing, InferError> {
    let mut env = env.clone();
    judge_arms(&mut env, cm, t0, arms)
}

fn judge(env: &mut TypeEnv, e: &Expr) -> Result<Typing, InferError> {
    match e {
        Expr::Int(_) => Ok(Typing {
            ty: Type::Int,
            crash: CrashCond::FF,
        }),
        Expr::Var(x) => env
            .lookup(x)
            .map(|t| Typing {
                ty: t.clone(),
                crash: CrashCond::FF,
            })
            .ok_or_else(|| InferError::UnboundVariable(x.clone())),
        Expr::Err => Ok(Typing {
            ty: Type::Bot,
            crash: CrashCond::TT,
        }),
        Expr::Ctor(c, args) => {
            let mut tys = Vec::with_capacity(args.len());
            let mut crashes = Vec::with_capacity(args.len());
            for a in args {
                let t = judge(env, a)?;
                tys.push(t.ty);
                crashes.push(t.crash);
            }
            Ok(Typing {
                ty: Type::Ctor(c.clone(), tys),
                crash: or_all(crashes),
            })
        }
        Expr::Rec { fun, param, body } => {
            let (arg, slf) = (TVar::fresh(), TVar::fresh_self());
            env.push(fun, Type::Var(slf));
            env.push(param, Type::Var(arg));
            let body = judge(env, body);
            env.pop();
            env.pop();
            let body = body?;
            Ok(Typing {
                ty: Type::fun(arg, slf, body.ty, body.crash),
                crash: CrashCond::FF,
            })
        }
        Expr::App(f, a) => {
            let f = judge(env, f)?;
            let a = judge(env, a)?;
            let ty = tapp(&f.ty, &a.ty);
            let crash = or(or(or(ccapp(&f.ty, &a.ty), f.crash), a.crash), not_fun(f.ty));
            Ok(Typing { ty, crash })
        }
        Expr::Match(scrutinee, arms) => {
            let s = judge(env, scrutinee)?;
            let p = judge_arms(env, CrashCond::TT, &s.ty, arms)?;
            Ok(Typing {
                ty: p.ty,
                crash: or(s.crash, p.crash),
            })
        }
    }
}

fn judge_arms(env: &mut TypeEnv, cm: CrashCond, t0: &Type, arms: &[Arm]) -> Result<Typing, InferError> {
    let Some((arm, rest)) = arms.split_first() else {
        return Ok(Typing {
            ty: Type::Bot,
            crash: cm,
        });
    };
    for (i, x) in arm.binders.iter().enumerate() {
        env.push(x, proj(t0, &arm.ctor, i + 1));
    }
    let body = judge(env, &arm.body);
    arm.binders.iter().for_each(|_| env.pop());
    let body = body?;
    let later = judge_arms(env, and(cm.clone(), has_no_ctor(&arm.ctor, t0.clone())), t0, rest)?;
    let selected = and(cm, has_ctor(&arm.ctor, t0.clone()));
    Ok(Typing {
        ty: union2(guard(selected.clone(), body.ty), later.ty),
        crash: or(and(selected, body.crash), later.crash),
    })
}
