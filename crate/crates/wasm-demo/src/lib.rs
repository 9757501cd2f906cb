//! Browser bindings: JSON in, JSON out, so the page needs no glue beyond
//! `JSON.stringify` and `JSON.parse`.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use liftcut::cutgen::{ContextDef, CutKind};
use liftcut::lifting::{evaluate_grid, GridPoint};
use liftcut::polyoracle::{check_validity, face_dimension};
use liftcut::seed::Cut;

#[derive(Deserialize)]
struct GridRequest {
    context: ContextDef,
    lo: f64,
    hi: f64,
    count: usize,
}

#[derive(Deserialize)]
struct CutRequest {
    context: ContextDef,
    kind: CutKind,
    #[serde(default)]
    exact: bool,
}

#[derive(Serialize)]
struct CutReply {
    cut: Cut,
    /// `None` when the box is too large to enumerate.
    valid: Option<bool>,
    face_dimension: Option<i64>,
}

/// Upper bound on grid size so a typo cannot hang the tab.
const MAX_GRID: usize = 10_000;

pub fn grid_json(request: &str) -> Result<String, String> {
    let req: GridRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    if req.count == 0 || req.count > MAX_GRID || !(req.lo.is_finite() && req.hi.is_finite()) {
        return Err(format!("need finite bounds and 1..={MAX_GRID} points"));
    }
    let (_, ctx) = req.context.build().map_err(|e| e.to_string())?;
    let points: Vec<GridPoint> = evaluate_grid(&ctx, req.lo, req.hi, req.count);
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

pub fn cut_json(request: &str) -> Result<String, String> {
    let req: CutRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let (inst, ctx) = req.context.build().map_err(|e| e.to_string())?;
    let cut = req.kind.build(&ctx, req.exact).map_err(|e| e.to_string())?;
    let valid = check_validity(&cut, &inst).ok().map(|v| v.is_ok());
    let face_dimension = match valid {
        Some(true) => face_dimension(&cut, &inst).ok(),
        _ => None,
    };
    serde_json::to_string(&CutReply {
        cut,
        valid,
        face_dimension,
    })
    .map_err(|e| e.to_string())
}

/// `{context, lo, hi, count}` to an array of lifting-function values.
#[wasm_bindgen]
pub fn evaluate_lifting_grid(request: &str) -> Result<String, JsValue> {
    grid_json(request).map_err(|e| JsValue::from_str(&e))
}

/// `{context, kind, exact}` to the cut plus its validity and face dimension.
#[wasm_bindgen]
pub fn build_cut(request: &str) -> Result<String, JsValue> {
    cut_json(request).map_err(|e| JsValue::from_str(&e))
}
