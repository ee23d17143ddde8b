//! wasm-bindgen bindings for the browser demo.
//!
//! Three interactive operations, each returning a JSON string with the same
//! schemas the CLI emits: certified heights with their decomposition, orbit
//! plus preperiodicity verdict, and a small survey range for the ratio plot.
//! Errors come back as `{"error": "..."}` so the page can render them.

use unicrit::dynamics::{decide_preperiodic, default_budget, orbit, MapParams};
use unicrit::global::canonical_height;
use unicrit::rational::{parse_ratio_flexible, Rational};
use unicrit::report::{HeightDoc, OrbitDoc, PreperiodicDoc, SurveyRowDoc};
use unicrit::survey::figure1_dataset;
use wasm_bindgen::prelude::wasm_bindgen;

fn err_json(msg: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

fn parse_inputs(alpha: &str, c: &str, d: u32) -> Result<(Rational, MapParams), String> {
    let a: Rational = alpha.parse().map_err(|e| format!("alpha: {e}"))?;
    let cq: Rational = c.parse().map_err(|e| format!("c: {e}"))?;
    let params = MapParams::new(cq, d).map_err(|e| e.to_string())?;
    Ok((a, params))
}

/// Certified canonical height with per-place decomposition.
#[wasm_bindgen]
pub fn height_json(alpha: &str, c: &str, d: u32, eps: &str) -> String {
    let (a, params) = match parse_inputs(alpha, c, d) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    let e = match parse_ratio_flexible(eps) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    match canonical_height(&a, &params, &e) {
        Ok(report) => {
            let doc = HeightDoc::new(alpha, c, d, eps, &report, true);
            serde_json::to_string(&doc).unwrap_or_else(err_json)
        }
        Err(e) => err_json(e),
    }
}

/// Exact orbit and the preperiodicity verdict, together.
#[wasm_bindgen]
pub fn orbit_json(alpha: &str, c: &str, d: u32, steps: u32) -> String {
    let (a, params) = match parse_inputs(alpha, c, d) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    let o = match orbit(&a, &params, steps) {
        Ok(o) => o,
        Err(e) => return err_json(e),
    };
    let verdict = match decide_preperiodic(&a, &params, default_budget(&params)) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    let odoc = OrbitDoc {
        alpha: alpha.to_string(),
        c: c.to_string(),
        d,
        steps,
        orbit: o.iter().map(|q| q.to_string()).collect(),
    };
    let vdoc = PreperiodicDoc::new(alpha, c, d, &verdict);
    serde_json::json!({ "orbit": odoc, "verdict": vdoc }).to_string()
}

/// Minimal wandering heights for integral c in [c_from, c_to] (<= -1),
/// for the ratio plot. Keep ranges modest in the browser.
#[wasm_bindgen]
pub fn survey_json(c_from: i64, c_to: i64, eps: &str) -> String {
    let e = match parse_ratio_flexible(eps) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    if c_to - c_from > 120 {
        return err_json("range too large for the in-browser demo (max 120)");
    }
    match figure1_dataset(c_from, c_to, &e) {
        Ok(outcomes) => {
            let mut rows: Vec<SurveyRowDoc> = Vec::new();
            let mut errors: Vec<String> = Vec::new();
            for o in &outcomes {
                match &o.row {
                    Ok(row) => match SurveyRowDoc::try_from(row) {
                        Ok(doc) => rows.push(doc),
                        Err(e) => errors.push(format!("c={}: {e}", o.c)),
                    },
                    Err(msg) => errors.push(format!("c={}: {msg}", o.c)),
                }
            }
            serde_json::json!({ "rows": rows, "errors": errors }).to_string()
        }
        Err(e) => err_json(e),
    }
}
