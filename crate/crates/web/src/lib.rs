//! Browser bindings. Every operation is a plain function from strings to a
//! JSON string so it can be tested natively; the `#[wasm_bindgen]` exports
//! only convert the error type.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use threshold_lab::document::GameDocument;
use threshold_lab::families::FamilySpec;
use threshold_lab::trades::{find_failure, Certificate};
use threshold_lab::weightedness::{decide_weighted, format_ratio, mp_parameters, two_trade_certificate_t2};
use threshold_lab::{CharacteristicInvariants, TradeMode};

/// Largest game the page will reconstruct or search.
const MAX_PLAYERS: usize = 40;
const MAX_K: usize = 6;

fn verdicts(ci: &CharacteristicInvariants, max_k: usize) -> Value {
    let max_k = max_k.clamp(2, MAX_K);
    let mut out = json!({
        "classes": ci.classes(),
        "shift_minimal": ci.rows(),
        "n": ci.n(),
        "t": ci.t(),
        "r": ci.r(),
        "shift_maximal_losing": ci.shift_maximal_losing_types(),
    });
    match decide_weighted(ci) {
        Some(rep) => {
            out["weighted"] = json!(true);
            out["quota"] = json!(rep.quota);
            out["class_weights"] = json!(rep.class_weights);
        }
        None => {
            out["weighted"] = json!(false);
            for (key, mode) in [("trade", TradeMode::Trade), ("invariant", TradeMode::Invariant)] {
                let report = find_failure(ci, mode, max_k);
                out[key] = match report.certificate() {
                    Some(c) => json!({ "k": c.len(), "certificate": c.to_string(), "detail": Certificate::new(mode, c) }),
                    None => json!({ "k": null, "robust_up_to": max_k }),
                };
            }
        }
    }
    if let Ok(mp) = mp_parameters(ci) {
        out["mp"] = json!({
            "m": format_ratio(&mp.m),
            "p": format_ratio(&mp.p),
            "mp": format_ratio(&mp.product()),
        });
    }
    out
}

/// Analyzes any game document (explicit, invariants or weighted).
pub fn analyze_document(text: &str, max_k: usize) -> Result<String, String> {
    let doc = GameDocument::parse(text).map_err(|e| e.to_string())?;
    if let GameDocument::Explicit(g) = &doc {
        if g.n() > MAX_PLAYERS {
            return Err(format!("at most {MAX_PLAYERS} players in the browser"));
        }
    }
    let ci = match doc.to_invariants() {
        Ok((ci, _)) => ci,
        Err(threshold_lab::Error::NotComplete) => {
            let game = doc.to_game().map_err(|e| e.to_string())?;
            let cert = game.swap_certificate().ok_or("no swap certificate")?;
            let v = json!({
                "complete": false,
                "i": cert.i,
                "j": cert.j,
                "x1": cert.x1,
                "x2": cert.x2,
                "y1": cert.y1(),
                "y2": cert.y2(),
            });
            return Ok(v.to_string());
        }
        Err(e) => return Err(e.to_string()),
    };
    let mut v = verdicts(&ci, max_k);
    v["complete"] = json!(true);
    Ok(v.to_string())
}

#[derive(Serialize)]
struct Cell {
    a: u32,
    b: u32,
    winning: bool,
    /// one of "shift_minimal", "minimal", "maximal_losing",
    /// "shift_maximal_losing", "winning", "losing"
    role: &'static str,
}

fn parse_rows(rows: &str) -> Result<Vec<Vec<u32>>, String> {
    rows.split(';')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| {
            r.trim_matches(|c| c == '(' || c == ')')
                .split(',')
                .map(|x| x.trim().parse::<u32>().map_err(|_| format!("bad entry '{x}' in row '{r}'")))
                .collect()
        })
        .collect()
}

/// Every type of a two-class game with its role, plus weights or a
/// two-trade certificate. Rows are written `a,b; a,b`.
pub fn type_grid(n1: u32, n2: u32, rows: &str) -> Result<String, String> {
    if n1 == 0 || n2 == 0 || (n1 + n2) as usize > MAX_PLAYERS {
        return Err(format!("class sizes must be positive with at most {MAX_PLAYERS} players"));
    }
    let ci = CharacteristicInvariants::from_unordered(vec![n1, n2], parse_rows(rows)?).map_err(|e| e.to_string())?;
    let table = ci.table();
    let minimal = table.minimal_winning();
    let maximal = table.maximal_losing();
    let shift_maximal = table.shift_maximal_losing();
    let mut cells = Vec::new();
    for a in 0..=n1 {
        for b in 0..=n2 {
            let s = vec![a, b];
            let winning = ci.is_winning_type(&s);
            let role = if ci.rows().contains(&s) {
                "shift_minimal"
            } else if minimal.contains(&s) {
                "minimal"
            } else if shift_maximal.contains(&s) {
                "shift_maximal_losing"
            } else if maximal.contains(&s) {
                "maximal_losing"
            } else if winning {
                "winning"
            } else {
                "losing"
            };
            cells.push(Cell { a, b, winning, role });
        }
    }
    let mut v = verdicts(&ci, 2);
    v["cells"] = serde_json::to_value(cells).map_err(|e| e.to_string())?;
    if let Ok(cert) = two_trade_certificate_t2(&ci) {
        v["two_trade"] = json!({ "pre": cert.pre_list(), "post": cert.post_list(), "text": cert.to_string() });
    }
    Ok(v.to_string())
}

/// A named family member (`params` like `m=4, l=1`) with its verdicts.
pub fn family(name: &str, params: &str, max_k: usize) -> Result<String, String> {
    let mut map = BTreeMap::new();
    for p in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("'{p}' is not key=value"))?;
        let v: u32 = v.trim().parse().map_err(|_| format!("'{p}' needs a non-negative integer"))?;
        if v > 20 {
            return Err(format!("'{p}' is too large for the browser"));
        }
        map.insert(k.trim().to_string(), v);
    }
    let spec = FamilySpec::parse(name, &map).map_err(|e| e.to_string())?;
    let ci = spec.generate().map_err(|e| e.to_string())?;
    let mut v = verdicts(&ci, max_k);
    v["family"] = json!(spec.to_string());
    Ok(v.to_string())
}

#[wasm_bindgen(js_name = analyzeDocument)]
pub fn analyze_document_js(text: &str, max_k: usize) -> Result<String, JsValue> {
    analyze_document(text, max_k).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = typeGrid)]
pub fn type_grid_js(n1: u32, n2: u32, rows: &str) -> Result<String, JsValue> {
    type_grid(n1, n2, rows).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = family)]
pub fn family_js(name: &str, params: &str, max_k: usize) -> Result<String, JsValue> {
    family(name, params, max_k).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = familyNames)]
pub fn family_names() -> String {
    serde_json::to_string(threshold_lab::families::FAMILY_NAMES).unwrap_or_default()
}
