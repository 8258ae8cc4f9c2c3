use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Arm, CtorName, Expr, Ident};
use crate::types::{union2, Type};

/// The one free variable open terms may mention.
pub const FREE_VAR: &str = "y";

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    pub max_depth: usize,
    pub alphabet: Vec<CtorName>,
    pub int_range: RangeInclusive<i64>,
    /// When false, terms may mention `FREE_VAR`.
    pub closed_only: bool,
}

pub fn default_alphabet() -> Vec<CtorName> {
    vec![
        CtorName::new("Nil", 0),
        CtorName::new("Zero", 0),
        CtorName::new("Succ", 1),
        CtorName::new("Cons", 2),
    ]
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_depth: 6,
            alphabet: default_alphabet(),
            int_range: -3..=3,
            closed_only: true,
        }
    }
}

impl GenConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn nullary(&self) -> Vec<&CtorName> {
        self.alphabet.iter().filter(|c| c.arity() == 0).collect()
    }
}

pub fn gen_expr(cfg: &GenConfig) -> Expr {
    gen_expr_with(&mut cfg.rng(), cfg)
}

pub fn gen_expr_with(rng: &mut impl Rng, cfg: &GenConfig) -> Expr {
    assert!(
        !cfg.alphabet.is_empty() && cfg.max_depth >= 1,
        "invalid generator configuration"
    );
    let mut scope: Vec<Ident> = Vec::new();
    if !cfg.closed_only {
        scope.push(FREE_VAR.to_string());
    }
    Gen { cfg, rng, names: 0 }.expr(cfg.max_depth, &mut scope)
}

struct Gen<'a, R> {
    cfg: &'a GenConfig,
    rng: &'a mut R,
    names: usize,
}

#[derive(Clone, Copy)]
enum Form {
    Int,
    Ctor,
    Var,
    Err,
    App,
    Match,
    Rec,
}

impl<R: Rng> Gen<'_, R> {
    fn fresh(&mut self, prefix: &str) -> Ident {
        self.names += 1;
        format!("{prefix}{}", self.names - 1)
    }

    fn leaf(&mut self, scope: &[Ident]) -> Expr {
        let nullary = self.cfg.nullary();
        let mut forms = vec![(Form::Int, 2), (Form::Err, 1)];
        if !nullary.is_empty() {
            forms.push((Form::Ctor, 3));
        }
        if !scope.is_empty() {
            forms.push((Form::Var, 4));
        }
        match pick(self.rng, &forms) {
            Form::Int => Expr::Int(self.rng.gen_range(self.cfg.int_range.clone())),
            Form::Ctor => Expr::Ctor((*nullary.choose(self.rng).unwrap()).clone(), vec![]),
            Form::Var => Expr::Var(scope.choose(self.rng).unwrap().clone()),
            _ => Expr::Err,
        }
    }

    fn expr(&mut self, depth: usize, scope: &mut Vec<Ident>) -> Expr {
        if depth <= 1 {
            return self.leaf(scope);
        }
        let mut forms = vec![
            (Form::Int, 1),
            (Form::Ctor, 4),
            (Form::Err, 1),
            (Form::App, 4),
            (Form::Match, 4),
            (Form::Rec, 3),
        ];
        if !scope.is_empty() {
            forms.push((Form::Var, 3));
        }
        match pick(self.rng, &forms) {
            Form::Int | Form::Err | Form::Var => self.leaf(scope),
            Form::Ctor => {
                let c = self.cfg.alphabet.choose(self.rng).unwrap().clone();
                let args = (0..c.arity()).map(|_| self.expr(depth - 1, scope)).collect();
                Expr::Ctor(c, args)
            }
            Form::App => {
                let f = if self.rng.gen_bool(0.5) {
                    self.rec(depth - 1, scope)
                } else {
                    self.expr(depth - 1, scope)
                };
                let a = self.expr(depth - 1, scope);
                Expr::app(f, a)
            }
            Form::Match => {
                let scrutinee = self.expr(depth - 1, scope);
                let mut ctors = self.cfg.alphabet.clone();
                ctors.shuffle(self.rng);
                let n = self.rng.gen_range(0..=ctors.len().min(3));
                let arms = ctors
                    .into_iter()
                    .take(n)
                    .map(|c| {
                        let binders: Vec<Ident> = (0..c.arity()).map(|_| self.fresh("v")).collect();
                        let mark = scope.len();
                        scope.extend(binders.iter().cloned());
                        let body = self.expr(depth - 1, scope);
                        scope.truncate(mark);
                        Arm { ctor: c, binders, body }
                    })
                    .collect();
                Expr::Match(Box::new(scrutinee), arms)
            }
            Form::Rec => self.rec(depth, scope),
        }
    }

    fn rec(&mut self, depth: usize, scope: &mut Vec<Ident>) -> Expr {
        let fun = self.fresh("f");
        let param = self.fresh("x");
        scope.push(fun.clone());
        scope.push(param.clone());
        let body = self.expr(depth.saturating_sub(1).max(1), scope);
        scope.truncate(scope.len() - 2);
        Expr::Rec {
            fun,
            param,
            body: Box::new(body),
        }
    }
}

fn pick<T: Copy>(rng: &mut impl Rng, weighted: &[(T, u32)]) -> T {
    let total: u32 = weighted.iter().map(|(_, w)| w).sum();
    let mut roll = rng.gen_range(0..total);
    for (t, w) in weighted {
        if roll < *w {
            return *t;
        }
        roll -= w;
    }
    unreachable!()
}

/// A closed value without embedded errors.
pub fn gen_value(rng: &mut impl Rng, cfg: &GenConfig, depth: usize) -> Expr {
    let roll = rng.gen_range(0..10);
    if depth <= 1 || roll < 3 {
        let nullary = cfg.nullary();
        return if nullary.is_empty() || rng.gen_bool(0.3) {
            Expr::Int(rng.gen_range(cfg.int_range.clone()))
        } else {
            Expr::Ctor((*nullary.choose(rng).unwrap()).clone(), vec![])
        };
    }
    if roll < 7 {
        let c = cfg.alphabet.choose(rng).unwrap().clone();
        let args = (0..c.arity()).map(|_| gen_value(rng, cfg, depth - 1)).collect();
        return Expr::Ctor(c, args);
    }
    let inner = GenConfig {
        closed_only: true,
        max_depth: depth.saturating_sub(1).max(1),
        ..cfg.clone()
    };
    let mut scope = vec!["g".to_string(), "p".to_string()];
    let body = Gen {
        cfg: &inner,
        rng,
        names: 0,
    }
    .expr(inner.max_depth, &mut scope);
    Expr::rec("g", "p", body)
}

/// A ground first-order type: constructors, `int` and small unions.
pub fn gen_ground_type(rng: &mut impl Rng, alphabet: &[CtorName], depth: usize) -> Type {
    let roll = rng.gen_range(0..10);
    let nullary: Vec<&CtorName> = alphabet.iter().filter(|c| c.arity() == 0).collect();
    if depth <= 1 || roll < 3 {
        return match nullary.choose(rng) {
            Some(c) if rng.gen_bool(0.7) => Type::Ctor((*c).clone(), vec![]),
            _ => Type::Int,
        };
    }
    if roll < 8 {
        let c = alphabet.choose(rng).unwrap().clone();
        let args = (0..c.arity())
            .map(|_| gen_ground_type(rng, alphabet, depth - 1))
            .collect();
        return Type::Ctor(c, args);
    }
    union2(
        gen_ground_type(rng, alphabet, depth - 1),
        gen_ground_type(rng, alphabet, depth - 1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, print_expr};

    #[test]
    fn depth_one_closed_terms_are_leaves() {
        for seed in 0..200 {
            let cfg = GenConfig {
                seed,
                max_depth: 1,
                ..GenConfig::default()
            };
            let e = gen_expr(&cfg);
            assert!(
                matches!(e, Expr::Int(_) | Expr::Err) || matches!(&e, Expr::Ctor(_, args) if args.is_empty()),
                "{e:?}"
            );
        }
    }

    #[test]
    fn same_seed_same_term() {
        let cfg = GenConfig {
            seed: 42,
            ..GenConfig::default()
        };
        assert_eq!(gen_expr(&cfg), gen_expr(&cfg));
    }

    #[test]
    fn generated_terms_round_trip_and_are_closed() {
        let cfg = GenConfig::default();
        let mut rng = cfg.rng();
        for _ in 0..500 {
            let e = gen_expr_with(&mut rng, &cfg);
            assert!(e.is_closed());
            assert_eq!(parse_expr(&print_expr(&e)).unwrap(), e);
        }
    }

    #[test]
    fn generated_values_are_values() {
        let cfg = GenConfig::default();
        let mut rng = cfg.rng();
        for _ in 0..200 {
            let v = gen_value(&mut rng, &cfg, 4);
            assert!(v.is_value() && v.is_closed() && !v.is_err(), "{v:?}");
        }
    }

    fn tally(e: &Expr, counts: &mut std::collections::BTreeMap<&'static str, usize>) {
        let mut bump = |k| *counts.entry(k).or_insert(0) += 1;
        match e {
            Expr::Int(_) => bump("int"),
            Expr::Var(_) => bump("var"),
            Expr::Err => bump("err"),
            Expr::Ctor(..) => bump("ctor"),
            Expr::App(f, _) if matches!(**f, Expr::Int(_) | Expr::Ctor(..)) => bump("non-function app"),
            Expr::App(..) => bump("app"),
            Expr::Match(_, arms) if arms.is_empty() => bump("empty match"),
            Expr::Match(..) => bump("match"),
            Expr::Rec { .. } => bump("rec"),
        }
        match e {
            Expr::Int(_) | Expr::Var(_) | Expr::Err => {}
            Expr::Ctor(_, args) => args.iter().for_each(|a| tally(a, counts)),
            Expr::App(f, a) => {
                tally(f, counts);
                tally(a, counts);
            }
            Expr::Match(s, arms) => {
                tally(s, counts);
                arms.iter().for_each(|a| tally(&a.body, counts));
            }
            Expr::Rec { body, .. } => tally(body, counts),
        }
    }

    #[test]
    fn every_form_is_common() {
        let cfg = GenConfig::default();
        let mut rng = cfg.rng();
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..10_000 {
            tally(&gen_expr_with(&mut rng, &cfg), &mut counts);
        }
        assert_eq!(counts.len(), 9, "{counts:?}");
        assert!(counts.values().all(|&n| n >= 100), "{counts:?}");
    }
}
