//! wasm-bindgen bindings behind `www/index.html`.
//!
//! Each export returns a JSON string. The plain `*_json` functions hold the
//! logic so they can be tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use segre_kstab::certificate::{emit, verify_with_cap};
use segre_kstab::cli::sweep_cells;
use segre_kstab::dfcalc::{decide_instability_with_cap, Decision, Polarization};
use segre_kstab::exactmath::{approx_decimal, format_rational};
use segre_kstab::geometry::{is_normal, is_smooth, singular_locus_empty};
use segre_kstab::{AmbientShape, EnumerationCap, NormalForm};

/// Browsers get a smaller enumeration budget; larger pieces use the transfer.
const WEB_CAP: EnumerationCap = EnumerationCap(200_000);

/// Bounds that keep a single click under a second or so.
const MAX_DIM: usize = 8;
const MAX_DEGREE: u64 = 12;

fn normal_form(m: usize, n: usize, r: usize) -> Result<NormalForm, String> {
    if m > MAX_DIM || n > MAX_DIM {
        return Err(format!("demo is limited to m, n <= {MAX_DIM}"));
    }
    let shape = AmbientShape::new(m, n).map_err(|e| e.to_string())?;
    NormalForm::new(shape, r).map_err(|e| e.to_string())
}

pub fn analyze_json(m: usize, n: usize, r: usize) -> Result<String, String> {
    let nf = normal_form(m, n, r)?;
    Ok(json!({
        "m": m,
        "n": n,
        "r": r,
        "normal": is_normal(&nf),
        "smooth": is_smooth(&nf),
        "jacobian_smooth": singular_locus_empty(&nf),
        "theorem_applies": is_normal(&nf) && nf.theorem_applies(),
    })
    .to_string())
}

pub fn sweep_json(m: usize, n: usize, r: usize, dmax: u64, emax: u64) -> Result<String, String> {
    let nf = normal_form(m, n, r)?;
    if dmax == 0 || emax == 0 || dmax > MAX_DEGREE || emax > MAX_DEGREE {
        return Err(format!("dmax and emax must lie in 1..={MAX_DEGREE}"));
    }
    if !is_normal(&nf) {
        return Err("not normal: r=0".into());
    }
    if !nf.theorem_applies() {
        return Err("inconclusive: m=n and X smooth".into());
    }
    let cells = sweep_cells(&nf, dmax, emax, 1, WEB_CAP).map_err(|e| e.to_string())?;
    let cells: Vec<Value> = cells
        .iter()
        .map(|c| {
            json!({
                "d": c.d,
                "e": c.e,
                "df": format_rational(&c.df),
                "approx": approx_decimal(&c.df),
            })
        })
        .collect();
    Ok(json!({ "m": m, "n": n, "r": r, "cells": cells }).to_string())
}

pub fn destabilize_json(m: usize, n: usize, r: usize, d: u64, e: u64) -> Result<String, String> {
    let nf = normal_form(m, n, r)?;
    if d > MAX_DEGREE || e > MAX_DEGREE {
        return Err(format!("d and e must be at most {MAX_DEGREE}"));
    }
    let pol = Polarization::new(d, e).map_err(|e| e.to_string())?;
    match decide_instability_with_cap(&nf, pol, WEB_CAP).map_err(|e| e.to_string())? {
        Decision::Unstable(cert) => emit(&cert).map_err(|e| e.to_string()),
        Decision::Inconclusive { reason } => Err(format!("inconclusive: {reason}")),
    }
}

pub fn verify_json(text: &str) -> Result<String, String> {
    let verdict = verify_with_cap(text, WEB_CAP).map_err(|e| e.to_string())?;
    let failures: Vec<Value> = verdict
        .failures
        .iter()
        .map(|f| json!({ "check": f.check, "expected": f.expected, "found": f.found }))
        .collect();
    Ok(json!({ "ok": verdict.ok, "failures": failures }).to_string())
}

#[wasm_bindgen]
pub fn analyze(m: usize, n: usize, r: usize) -> Result<String, JsError> {
    analyze_json(m, n, r).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep(m: usize, n: usize, r: usize, dmax: u32, emax: u32) -> Result<String, JsError> {
    sweep_json(m, n, r, dmax as u64, emax as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn destabilize(m: usize, n: usize, r: usize, d: u32, e: u32) -> Result<String, JsError> {
    destabilize_json(m, n, r, d as u64, e as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn verify(text: &str) -> Result<String, JsError> {
    verify_json(text).map_err(|e| JsError::new(&e))
}
