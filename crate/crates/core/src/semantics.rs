//! Deterministic small-step evaluator. Contexts are resolved leftmost first:
//! constructor arguments left to right, function before argument, scrutinee
//! before arms.

use crate::syntax::{subst_value, Expr};

pub const DEFAULT_FUEL: u64 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub enum StepResult {
    Stepped(Expr),
    Done(Expr),
    Stuck(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvalOutcome {
    Value(Expr),
    Error,
    FuelExhausted { steps: u64, last: Expr },
}

impl EvalOutcome {
    pub fn is_error(&self) -> bool {
        matches!(self, EvalOutcome::Error)
    }
}

pub fn step(e: &Expr) -> StepResult {
    if e.is_value() {
        return StepResult::Done(e.clone());
    }
    match reduce(e) {
        Ok(next) => StepResult::Stepped(next),
        Err(reason) => StepResult::Stuck(reason),
    }
}

/// One reduction step of a non-value.
fn reduce(e: &Expr) -> Result<Expr, String> {
    match e {
        Expr::Var(x) => Err(format!("free variable `{x}`")),
        Expr::Int(_) | Expr::Rec { .. } | Expr::Err => Err("value has no reduct".into()),
        Expr::Ctor(c, args) => {
            let i = args
                .iter()
                .position(|a| a.is_err() || !a.is_value())
                .ok_or_else(|| "constructor of values has no reduct".to_string())?;
            if args[i].is_err() {
                return Ok(Expr::Err);
            }
            let mut next = args.clone();
            next[i] = reduce(&args[i])?;
            Ok(Expr::Ctor(c.clone(), next))
        }
        Expr::App(f, a) => {
            if f.is_err() {
                return Ok(Expr::Err);
            }
            if !f.is_value() {
                return Ok(Expr::app(reduce(f)?, (**a).clone()));
            }
            if !a.is_value() {
                return Ok(Expr::app((**f).clone(), reduce(a)?));
            }
            match &**f {
                Expr::Rec { fun, param, body } => {
                    if a.is_err() {
                        return Ok(Expr::Err);
                    }
                    let with_arg = subst_value(body, param, a);
                    Ok(subst_value(&with_arg, fun, f))
                }
                _ => Ok(Expr::Err),
            }
        }
        Expr::Match(scrutinee, arms) => {
            if !scrutinee.is_value() {
                return Ok(Expr::Match(Box::new(reduce(scrutinee)?), arms.clone()));
            }
            let Expr::Ctor(c, vals) = &**scrutinee else {
                return Ok(Expr::Err);
            };
            match arms.first() {
                None => Ok(Expr::Err),
                Some(arm) if arm.ctor.name() == c.name() && arm.binders.len() == vals.len() => Ok(arm
                    .binders
                    .iter()
                    .zip(vals)
                    .fold(arm.body.clone(), |body, (x, v)| subst_value(&body, x, v))),
                Some(_) => Ok(Expr::Match(scrutinee.clone(), arms[1..].to_vec())),
            }
        }
    }
}

enum Progress {
    Value,
    Stepped,
}

/// The same step as `reduce`, found in one descent and applied to the redex
/// only, so long traces cost the depth of the focus rather than the size of
/// the term.
fn reduce_in_place(e: &mut Expr) -> Result<Progress, String> {
    match e {
        Expr::Var(x) => Err(format!("free variable `{x}`")),
        Expr::Int(_) | Expr::Rec { .. } | Expr::Err => Ok(Progress::Value),
        Expr::Ctor(_, args) => {
            for a in args.iter_mut() {
                if let Progress::Stepped = reduce_in_place(a)? {
                    return Ok(Progress::Stepped);
                }
                if a.is_err() {
                    *e = Expr::Err;
                    return Ok(Progress::Stepped);
                }
            }
            Ok(Progress::Value)
        }
        Expr::App(f, a) => {
            if let Progress::Stepped = reduce_in_place(f)? {
                return Ok(Progress::Stepped);
            }
            if !f.is_err() {
                if let Progress::Stepped = reduce_in_place(a)? {
                    return Ok(Progress::Stepped);
                }
            }
            *e = match &**f {
                Expr::Rec { fun, param, body } if !a.is_err() => subst_value(&subst_value(body, param, a), fun, f),
                _ => Expr::Err,
            };
            Ok(Progress::Stepped)
        }
        Expr::Match(scrutinee, arms) => {
            if let Progress::Stepped = reduce_in_place(scrutinee)? {
                return Ok(Progress::Stepped);
            }
            let Expr::Ctor(c, vals) = &**scrutinee else {
                *e = Expr::Err;
                return Ok(Progress::Stepped);
            };
            match arms.first() {
                None => *e = Expr::Err,
                Some(arm) if arm.ctor.name() == c.name() && arm.binders.len() == vals.len() => {
                    *e = arm
                        .binders
                        .iter()
                        .zip(vals)
                        .fold(arm.body.clone(), |body, (x, v)| subst_value(&body, x, v));
                }
                Some(_) => {
                    arms.remove(0);
                }
            }
            Ok(Progress::Stepped)
        }
    }
}

/// Runs at most `fuel` steps.
///
/// # Panics
/// On open terms, which never arise from parsed programs.
pub fn evaluate(e: &Expr, fuel: u64) -> EvalOutcome {
    let mut cur = e.clone();
    let mut steps = 0;
    loop {
        if steps >= fuel && !cur.is_value() {
            return EvalOutcome::FuelExhausted { steps, last: cur };
        }
        match reduce_in_place(&mut cur) {
            Ok(Progress::Stepped) => steps += 1,
            Ok(Progress::Value) if cur.is_err() => return EvalOutcome::Error,
            Ok(Progress::Value) => return EvalOutcome::Value(cur),
            Err(reason) => panic!("evaluation stuck: {reason}"),
        }
    }
}
