//! Random programs, shrinking, and property runs over them.

mod gen;
mod props;
mod shrink;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{parse_expr, print_expr, Expr};
use crate::types::{TVar, Type};

pub use gen::{default_alphabet, gen_expr, gen_expr_with, gen_ground_type, gen_value, GenConfig, FREE_VAR};
pub use props::*;
pub use shrink::shrink;

/// Generated programs can evaluate to deep terms.
pub const WORKER_STACK: usize = 256 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Preservation,
    Failure,
    Weakening,
    ValueSubstitution,
    TypeSubstitution,
    UnsatAfterMatch,
    Monotonicity,
    RoundTrip,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::Preservation,
        Property::Failure,
        Property::Weakening,
        Property::ValueSubstitution,
        Property::TypeSubstitution,
        Property::UnsatAfterMatch,
        Property::Monotonicity,
        Property::RoundTrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Preservation => "preservation",
            Property::Failure => "failure",
            Property::Weakening => "weakening",
            Property::ValueSubstitution => "value-substitution",
            Property::TypeSubstitution => "type-substitution",
            Property::UnsatAfterMatch => "unsat-after-match",
            Property::Monotonicity => "monotonicity",
            Property::RoundTrip => "round-trip",
        }
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Property::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Property::ALL.iter().map(|p| p.name()).collect();
            format!("unknown property `{s}` (expected one of: {})", names.join(", "))
        })
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub fuel: u64,
    pub k: u32,
    pub max_steps: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            fuel: crate::semantics::DEFAULT_FUEL,
            k: crate::solver::DEFAULT_K,
            max_steps: 50,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FailureCase {
    pub seed: u64,
    pub case: u64,
    pub original: Expr,
    pub shrunk: Expr,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug)]
pub struct PropertyReport {
    pub property: Property,
    pub cases: usize,
    pub failures: Vec<FailureCase>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Case `i` draws from stream `i` of the configured seed.
pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

/// One generated case: the term under test and a check that can be re-run on
/// shrunk variants of it.
struct Case {
    term: Expr,
    check: Box<dyn Fn(&Expr) -> Check>,
}

fn build_case(p: Property, cfg: &GenConfig, opts: &CheckOptions, rng: &mut ChaCha8Rng) -> Case {
    let closed = GenConfig {
        closed_only: true,
        ..cfg.clone()
    };
    let open = GenConfig {
        closed_only: false,
        ..cfg.clone()
    };
    let (fuel, k, steps) = (opts.fuel, opts.k, opts.max_steps);
    match p {
        Property::Preservation => Case {
            term: gen_expr_with(rng, &closed),
            check: Box::new(move |e| check_preservation(e, steps, k)),
        },
        Property::Failure => Case {
            term: gen_expr_with(rng, &closed),
            check: Box::new(move |e| check_failure(e, fuel, k)),
        },
        Property::Weakening => {
            let term = gen_expr_with(rng, &closed);
            let extra = if rng.gen_bool(0.5) {
                gen_ground_type(rng, &cfg.alphabet, 3)
            } else {
                Type::Var(TVar::fresh())
            };
            Case {
                term,
                check: Box::new(move |e| check_weakening(e, "fresh_w", &extra)),
            }
        }
        Property::ValueSubstitution => {
            let term = gen_expr_with(rng, &open);
            let v = gen_value(rng, cfg, 3);
            Case {
                term,
                check: Box::new(move |e| check_value_substitution(e, FREE_VAR, &v)),
            }
        }
        Property::TypeSubstitution => {
            let term = gen_expr_with(rng, &open);
            let t = gen_ground_type(rng, &cfg.alphabet, 3);
            Case {
                term,
                check: Box::new(move |e| check_type_substitution(e, FREE_VAR, &t)),
            }
        }
        Property::UnsatAfterMatch => {
            let body = gen_expr_with(rng, &closed);
            let scrutinee = Expr::Ctor(crate::syntax::CtorName::new("Unused", 0), vec![]);
            let term = match body {
                m @ Expr::Match(..) => m,
                other => {
                    let arms = cfg
                        .alphabet
                        .iter()
                        .map(|c| crate::syntax::Arm {
                            ctor: c.clone(),
                            binders: (0..c.arity()).map(|i| format!("b{i}")).collect(),
                            body: other.clone(),
                        })
                        .collect();
                    Expr::Match(Box::new(scrutinee), arms)
                }
            };
            let instances: Vec<Type> = (0..3).map(|_| gen_ground_type(rng, &cfg.alphabet, 3)).collect();
            Case {
                term,
                check: Box::new(move |e| match e {
                    Expr::Match(_, arms) => check_unsat_after_match(arms, &instances, k),
                    _ => Ok(()),
                }),
            }
        }
        Property::Monotonicity => {
            let term = gen_expr_with(rng, &closed);
            let arg = gen_ground_type(rng, &cfg.alphabet, 3);
            Case {
                term,
                check: Box::new(move |e| {
                    ground_conditions(e, &arg)
                        .iter()
                        .try_for_each(|c| check_monotonicity(c, k + 3))
                }),
            }
        }
        Property::RoundTrip => Case {
            term: gen_expr_with(rng, &open),
            check: Box::new(|e| {
                let printed = print_expr(e);
                match parse_expr(&printed) {
                    Ok(back) if crate::syntax::alpha_eq(&back, e) => Ok(()),
                    Ok(back) => Err(Mismatch::new(printed, print_expr(&back))),
                    Err(err) if err.kind == crate::syntax::ParseErrorKind::UnboundName => Ok(()),
                    Err(err) => Err(Mismatch::new(printed, err.to_string())),
                }
            }),
        },
    }
}

fn guarded(check: &dyn Fn(&Expr) -> Check, e: &Expr) -> Check {
    match catch_unwind(AssertUnwindSafe(|| check(e))) {
        Ok(result) => result,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(Mismatch::new("no panic", msg))
        }
    }
}

fn run_case(p: Property, cfg: &GenConfig, opts: &CheckOptions, case: u64) -> Option<FailureCase> {
    let mut rng = case_rng(cfg.seed, case);
    let Case { term, check } = build_case(p, cfg, opts, &mut rng);
    let mismatch = guarded(&*check, &term).err()?;
    let shrunk = shrink(&term, |e| guarded(&*check, e).is_err());
    let (expected, actual) = match guarded(&*check, &shrunk) {
        Err(m) => (m.expected, m.actual),
        Ok(()) => (mismatch.expected, mismatch.actual),
    };
    Some(FailureCase {
        seed: cfg.seed,
        case,
        original: term,
        shrunk,
        expected,
        actual,
    })
}

/// Runs `cases` cases across worker threads; failures come back ordered by
/// case index.
pub fn run_property(p: Property, cfg: &GenConfig, cases: usize, opts: &CheckOptions) -> PropertyReport {
    let workers = std::thread::available_parallelism()
        .map_or(4, |n| n.get())
        .min(cases.max(1));
    let mut failures: Vec<FailureCase> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                std::thread::Builder::new()
                    .stack_size(WORKER_STACK)
                    .spawn_scoped(s, move || {
                        (w..cases)
                            .step_by(workers)
                            .filter_map(|i| run_case(p, cfg, opts, i as u64))
                            .collect::<Vec<_>>()
                    })
                    .expect("spawn worker")
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    failures.sort_by_key(|f| f.case);
    PropertyReport {
        property: p,
        cases,
        failures,
    }
}

/// Runs `f` on a thread with a large stack.
pub fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(WORKER_STACK)
            .spawn_scoped(s, f)
            .expect("spawn")
            .join()
            .expect("thread panicked")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn property_names_parse_back() {
        for p in Property::ALL {
            assert_eq!(p.name().parse::<Property>(), Ok(p));
        }
        assert!("nope".parse::<Property>().is_err());
    }

    #[test]
    fn small_runs_pass() {
        let cfg = GenConfig::default();
        for p in Property::ALL {
            let report = run_property(p, &cfg, 60, &CheckOptions::default());
            assert!(report.passed(), "{}: {:?}", p.name(), report.failures.first());
        }
    }
}
