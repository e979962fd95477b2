//! Browser bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers/strings and returns JSON (or CSV) text,
//! so the page needs no generated TypeScript types.

use dilemma_core::index_model::{published_coefficient, selection_factor, EvaluationMode, SelectionEvent, SCALE_VARIANCE};
use dilemma_core::scenario::{EvidenceCase, Scenario};
use dilemma_core::solver::{report_document, sweep, GridAxis};
use serde_json::json;
use wasm_bindgen::prelude::*;

// Native builds (tests) cannot construct a `JsError`, so the work happens
// in `String`-erroring helpers and the exports only convert.
fn js(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn export(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

fn parse<T: serde::de::DeserializeOwned>(what: &str, name: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(name.to_owned())).map_err(|_| js(format!("unknown {what} `{name}`")))
}

fn scenario(r: f64, s: f64, c: f64, q: f64, case: &str, mode: &str) -> Result<Scenario, String> {
    let case: EvidenceCase = parse("case", case)?;
    let mode: EvaluationMode = parse("mode", mode)?;
    Scenario::ipd()
        .with_case(case)
        .with_mode(mode)
        .with_parameters(Some(r), Some(s), Some(c), Some(q))
        .map_err(js)
}

/// `k(score)` sampled at `steps + 1` evenly spaced points of `[lo, hi]`,
/// plus the two published table entries for comparison.
fn selection_curve_impl(lo: f64, hi: f64, steps: u32) -> Result<String, String> {
    if !(lo > 0.0 && hi > lo && hi <= 10.0) || steps == 0 {
        return Err(js("need 0 < lo < hi <= 10 and steps >= 1"));
    }
    let points = (0..=steps)
        .map(|i| {
            let score = lo + (hi - lo) * i as f64 / steps as f64;
            selection_factor(score, SCALE_VARIANCE).map(|k| json!([score, k]))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(js)?;
    let published: Vec<_> = [SelectionEvent::Em12, SelectionEvent::Pf21]
        .into_iter()
        .map(|which| {
            let score = which.published_score();
            json!({
                "score": score,
                "published": published_coefficient(EvaluationMode::Published, which).unwrap(),
                "computed": selection_factor(score, SCALE_VARIANCE).unwrap(),
            })
        })
        .collect();
    Ok(json!({ "points": points, "published": published }).to_string())
}

/// Decision report for the bundled police-chief scenario with the given
/// parameters.
fn solve_impl(r: f64, s: f64, c: f64, q: f64, case: &str, mode: &str) -> Result<String, String> {
    let doc = report_document(&scenario(r, s, c, q, case, mode)?).map_err(js)?;
    serde_json::to_string(&doc.report).map_err(js)
}

/// CSV table over one `name=start:stop:step` axis, other parameters fixed.
fn sweep_axis_impl(grid: &str, r: f64, s: f64, c: f64, q: f64, case: &str, mode: &str) -> Result<String, String> {
    let axis = GridAxis::parse(grid).map_err(js)?;
    let name = axis.parameter.name();
    let rows = sweep(&scenario(r, s, c, q, case, mode)?, std::slice::from_ref(&axis)).map_err(js)?;
    let mut out = format!("{name},p_em12,p_pf21,p_cell_11,p_cell_22,indeterminate\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.point[0].1, row.p_em12, row.p_pf21, row.p_cell_11, row.p_cell_22, row.indeterminate
        ));
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn selection_curve(lo: f64, hi: f64, steps: u32) -> Result<String, JsError> {
    export(selection_curve_impl(lo, hi, steps))
}

#[wasm_bindgen]
pub fn solve(r: f64, s: f64, c: f64, q: f64, case: &str, mode: &str) -> Result<String, JsError> {
    export(solve_impl(r, s, c, q, case, mode))
}

#[wasm_bindgen]
pub fn sweep_axis(grid: &str, r: f64, s: f64, c: f64, q: f64, case: &str, mode: &str) -> Result<String, JsError> {
    export(sweep_axis_impl(grid, r, s, c, q, case, mode))
}
