//! Randomized invariants across the parser, evaluator and solver. Terms come
//! from the crate's own generator, seeded by proptest.

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;

use crashlens::infer::infer;
use crashlens::semantics::{evaluate, step, EvalOutcome, StepResult, DEFAULT_FUEL};
use crashlens::solver::{entails, eval_cc, find_crashing_inputs, inhabitant, Interpretation, Truth};
use crashlens::syntax::{alpha_eq, parse_expr, print_expr, subst_value, Expr, ParseErrorKind};
use crashlens::testkit::{
    case_rng, default_alphabet, gen_expr, gen_ground_type, gen_value, ground_conditions, with_big_stack, GenConfig,
    FREE_VAR,
};
use crashlens::types::{and, has_ctor, has_no_ctor, or, CrashCond, TVar, Type, TypeEnv};

fn config(seed: u64, depth: usize, closed: bool) -> GenConfig {
    GenConfig {
        seed,
        max_depth: depth,
        closed_only: closed,
        ..GenConfig::default()
    }
}

fn closed_term() -> impl Strategy<Value = Expr> {
    (any::<u64>(), 1usize..=6).prop_map(|(seed, depth)| gen_expr(&config(seed, depth, true)))
}

fn open_term() -> impl Strategy<Value = Expr> {
    (any::<u64>(), 1usize..=6).prop_map(|(seed, depth)| gen_expr(&config(seed, depth, false)))
}

fn ground_type() -> impl Strategy<Value = Type> {
    (any::<u64>(), 0usize..=3)
        .prop_map(|(seed, depth)| gen_ground_type(&mut case_rng(seed, 0), &default_alphabet(), depth))
}

fn contradictory(a: Truth, b: Truth) -> bool {
    a.is_decided() && b.is_decided() && a != b
}

fn union_free(t: &Type) -> bool {
    match t {
        Type::Union(_) => false,
        Type::Ctor(_, args) => args.iter().all(union_free),
        _ => true,
    }
}

/// Variables bound by function types anywhere inside `c`, visiting shared
/// nodes once.
fn fun_binders(c: &CrashCond) -> BTreeSet<TVar> {
    fn ty(t: &Type, seen: &mut HashSet<*const ()>, out: &mut BTreeSet<TVar>) {
        match t {
            Type::Var(_) | Type::Int | Type::Bot => {}
            Type::Fun(f) => {
                if seen.insert(std::sync::Arc::as_ptr(f).cast()) {
                    out.extend([f.arg, f.slf]);
                    ty(&f.ret, seen, out);
                    cc(&f.crash, seen, out);
                }
            }
            Type::Ctor(_, args) | Type::Union(args) => args.iter().for_each(|a| ty(a, seen, out)),
            Type::TApp(a, b) => {
                ty(a, seen, out);
                ty(b, seen, out);
            }
            Type::Proj(a, _, _) => ty(a, seen, out),
            Type::Guard(g, a) => {
                if seen.insert(std::sync::Arc::as_ptr(g).cast()) {
                    cc(g, seen, out);
                }
                ty(a, seen, out);
            }
        }
    }
    fn cc(c: &CrashCond, seen: &mut HashSet<*const ()>, out: &mut BTreeSet<TVar>) {
        match c {
            CrashCond::FF | CrashCond::TT => {}
            CrashCond::Or(cs) | CrashCond::And(cs) => cs.iter().for_each(|c| cc(c, seen, out)),
            CrashCond::HasCtor(_, t) | CrashCond::HasNoCtor(_, t) | CrashCond::NotFun(t) => ty(t, seen, out),
            CrashCond::CCApp(a, b) => {
                ty(a, seen, out);
                ty(b, seen, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    cc(c, &mut HashSet::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn print_then_parse_is_identity(e in open_term()) {
        let printed = print_expr(&e);
        match parse_expr(&printed) {
            Ok(back) => prop_assert!(alpha_eq(&back, &e), "{printed} reparsed as {}", print_expr(&back)),
            Err(err) => prop_assert_eq!(err.kind, ParseErrorKind::UnboundName, "{}", printed),
        }
    }

    #[test]
    fn evaluate_agrees_with_iterated_step(e in closed_term()) {
        let fuel = 300;
        let outcome = with_big_stack(|| evaluate(&e, fuel));
        let mut cur = e.clone();
        let mut steps = 0;
        let expected = loop {
            match step(&cur) {
                StepResult::Done(v) if v.is_err() => break EvalOutcome::Error,
                StepResult::Done(v) => break EvalOutcome::Value(v),
                StepResult::Stuck(r) => panic!("stuck: {r}"),
                StepResult::Stepped(next) if steps == fuel => {
                    let _ = next;
                    break EvalOutcome::FuelExhausted { steps, last: cur };
                }
                StepResult::Stepped(next) => {
                    cur = next;
                    steps += 1;
                }
            }
        };
        prop_assert_eq!(outcome, expected);
    }

    #[test]
    fn substituting_a_closed_value_removes_the_variable(e in open_term(), seed in any::<u64>()) {
        let v = gen_value(&mut case_rng(seed, 1), &GenConfig::default(), 2);
        let out = subst_value(&e, FREE_VAR, &v);
        let mut expected = e.free_vars();
        expected.remove(FREE_VAR);
        prop_assert_eq!(out.free_vars(), expected);
    }

    #[test]
    fn has_ctor_and_has_no_ctor_are_dual_on_ground_types(t in ground_type(), pick in 0usize..4) {
        let c = &default_alphabet()[pick];
        let yes = eval_cc(&has_ctor(c, t.clone()), 0);
        let no = eval_cc(&has_no_ctor(c, t.clone()), 0);
        if union_free(&t) {
            prop_assert!(yes.is_decided(), "{c:?} in {t:?}");
        }
        // a union whose members disagree leaves both undecided
        prop_assert_eq!(yes.is_decided(), no.is_decided());
        prop_assert!(!yes.is_decided() || yes != no, "{c:?} in {t:?}: {yes} and {no}");
    }

    #[test]
    fn connectives_commute_and_follow_the_kleene_tables(
        e1 in closed_term(), e2 in closed_term(), t in ground_type(), k in 0u32..=5,
    ) {
        let c1 = ground_conditions(&e1, &t);
        let c2 = ground_conditions(&e2, &t);
        for (a, b) in c1.iter().zip(&c2) {
            let (va, vb) = (eval_cc(a, k), eval_cc(b, k));
            for (both, table) in [
                ((and(a.clone(), b.clone()), and(b.clone(), a.clone())), va.and(vb)),
                ((or(a.clone(), b.clone()), or(b.clone(), a.clone())), va.or(vb)),
            ] {
                let (ab, ba) = (eval_cc(&both.0, k), eval_cc(&both.1, k));
                prop_assert!(!contradictory(ab, ba), "{ab} vs {ba}");
                prop_assert!(!contradictory(ab, table), "{ab} vs table {table}");
            }
        }
    }

    #[test]
    fn bindings_for_bound_variables_are_ignored(e in open_term(), t in ground_type(), k in 0u32..=4) {
        let a = TVar::fresh();
        let Ok(typing) = infer(&TypeEnv::new().extend(FREE_VAR, Type::Var(a)), &e) else {
            return Ok(());
        };
        prop_assume!(typing.crash.size_at_most(2_000));
        let base = Interpretation::from([(a, t)]);
        let mut shadowed = base.clone();
        shadowed.extend(fun_binders(&typing.crash).into_iter().map(|v| (v, Type::Int)));
        prop_assert_eq!(entails(&base, &typing.crash, k), entails(&shadowed, &typing.crash, k));
    }

    #[test]
    fn witnesses_crash_when_run(body in open_term()) {
        let f = Expr::rec("f", FREE_VAR, body);
        let typing = infer(&TypeEnv::new(), &f).expect("closed terms type");
        for w in find_crashing_inputs(&typing.ty, &default_alphabet(), 1, 3) {
            let v = inhabitant(&w).expect("ground witnesses are inhabited");
            let run = Expr::app(f.clone(), v.clone());
            let outcome = with_big_stack(|| evaluate(&run, DEFAULT_FUEL));
            prop_assert!(
                !matches!(outcome, EvalOutcome::Value(_)),
                "{} applied to {} returned a value",
                print_expr(&f),
                print_expr(&v)
            );
        }
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>()) {
        let cfg = config(seed, 6, false);
        prop_assert_eq!(gen_expr(&cfg), gen_expr(&cfg));
    }
}
