//! Browser bindings. Each export takes source text and returns JSON; the
//! plain functions underneath are what the native tests exercise.

use crashlens::cli::analyze_program;
use crashlens::infer::infer;
use crashlens::semantics::{evaluate, EvalOutcome};
use crashlens::solver::{find_crashing_inputs, inhabitant};
use crashlens::syntax::{parse_program, print_expr, Expr, Program};
use crashlens::types::{render_type, Type, TypeEnv};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Keeps witness search responsive in the page.
pub const MAX_DEPTH: usize = 3;

fn parse(src: &str) -> Result<Program, String> {
    parse_program(src).map_err(|e| e.to_string())
}

fn outcome_json(outcome: EvalOutcome) -> Value {
    match outcome {
        EvalOutcome::Value(v) => json!({"outcome": "value", "value": print_expr(&v)}),
        EvalOutcome::Error => json!({"outcome": "error"}),
        EvalOutcome::FuelExhausted { steps, .. } => json!({"outcome": "fuel_exhausted", "steps": steps}),
    }
}

pub fn analyze_source(src: &str, k: u32, witness_depth: usize) -> Result<Value, String> {
    let p = parse(src)?;
    let report = analyze_program("input", &p, k, witness_depth.min(MAX_DEPTH));
    Ok(serde_json::to_value(report.definitions).expect("reports serialize"))
}

pub fn evaluate_source(src: &str, fuel: u64) -> Result<Value, String> {
    let main = parse(src)?.inlined_main().ok_or("the program has no main expression")?;
    Ok(outcome_json(evaluate(&main, fuel.max(1))))
}

/// Crashing argument types for one definition, each with a concrete input
/// and what running the definition on it does.
pub fn witness_search(src: &str, name: &str, depth: usize, k: u32, fuel: u64) -> Result<Value, String> {
    let p = parse(src)?;
    let (_, def) = p
        .inlined_defs()
        .into_iter()
        .find(|(n, _)| n == name)
        .ok_or_else(|| format!("no definition named `{name}`"))?;
    let ty = infer(&TypeEnv::new(), &def).map_err(|e| e.to_string())?.ty;
    if !matches!(ty, Type::Fun(_)) {
        return Err(format!("`{name}` is not a function"));
    }
    let found = find_crashing_inputs(&ty, &p.alphabet.ctors(), depth.min(MAX_DEPTH), k);
    let rows = found
        .iter()
        .map(|w| {
            let input = inhabitant(w).expect("ground witnesses are inhabited");
            let run = evaluate(&Expr::app(def.clone(), input.clone()), fuel.max(1));
            json!({"type": render_type(w), "input": print_expr(&input), "run": outcome_json(run)})
        })
        .collect();
    Ok(Value::Array(rows))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analyze(src: &str, k: u32, witness_depth: u32) -> Result<String, JsError> {
    to_js(analyze_source(src, k, witness_depth as usize))
}

#[wasm_bindgen(js_name = evaluate)]
pub fn evaluate_js(src: &str, fuel: u32) -> Result<String, JsError> {
    to_js(evaluate_source(src, fuel.into()))
}

#[wasm_bindgen]
pub fn witnesses(src: &str, name: &str, depth: u32, k: u32, fuel: u32) -> Result<String, JsError> {
    to_js(witness_search(src, name, depth as usize, k, fuel.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEN: &str = "let len = rec len(x) -> match x { Nil -> Zero | Cons(h, t) -> Succ(len t) };\n";

    #[test]
    fn analyze_lists_definitions_and_main() {
        let v = analyze_source(&format!("{LEN}len Zero"), 5, 1).unwrap();
        let names: Vec<&str> = v
            .as_array()
            .unwrap()
            .iter()
            .map(|d| d["def"].as_str().unwrap())
            .collect();
        assert_eq!(names, ["len", "main"]);
        assert_eq!(v[1]["verdict"], "crash");
    }

    #[test]
    fn evaluate_outcomes() {
        let ok = evaluate_source(&format!("{LEN}len Cons(1, Nil)"), 100).unwrap();
        assert_eq!(ok, json!({"outcome": "value", "value": "Succ(Zero)"}));
        assert_eq!(evaluate_source("5 3", 100).unwrap()["outcome"], "error");
        let loop_ = evaluate_source("(rec g(x) -> g x) A", 50).unwrap();
        assert_eq!(loop_, json!({"outcome": "fuel_exhausted", "steps": 50}));
        assert!(evaluate_source(LEN, 10).is_err());
    }

    #[test]
    fn witnesses_crash_when_run() {
        let rows = witness_search(LEN, "len", 1, 2, 1_000).unwrap();
        let rows = rows.as_array().unwrap();
        assert_eq!(rows[0]["type"], "Zero");
        assert!(rows.iter().all(|r| r["run"]["outcome"] == "error"));
        assert!(witness_search(LEN, "nope", 1, 2, 10).is_err());
        assert!(witness_search("let five = 5;", "five", 1, 2, 10).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(analyze_source("match x {\n Nil -> 1 | Nil -> 2 }", 5, 0)
            .unwrap_err()
            .starts_with("2:"));
    }
}
