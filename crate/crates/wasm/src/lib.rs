//! Browser bindings: root weights, commutator weights and commutant scans,
//! returned as JSON strings for the page in `www/`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qhtoeplitz::commutant::{scan, FEASIBLE_TOL};
use qhtoeplitz::operators::{commutator, power, shift_from_symbol, QuasiSymbol};
use qhtoeplitz::report::scan_svg;
use qhtoeplitz::roots::{build_root, verify_root, RootSpec};

/// Largest K accepted from the page.
const MAX_K: usize = 2000;

fn check_k(k: usize) -> Result<(), String> {
    if k == 0 || k > MAX_K {
        return Err(format!("K must lie in 1..={MAX_K}"));
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct RootView {
    calibration: f64,
    root: Vec<f64>,
    power: Vec<f64>,
    target: Vec<f64>,
    max_relative_deviation: f64,
    pass: bool,
}

pub fn root_json(p: u32, n: u32, k: usize) -> Result<String, String> {
    check_k(k)?;
    let spec = RootSpec::calibrated(p, n, k + p as usize - 1).map_err(|e| e.to_string())?;
    let root = build_root(&spec).map_err(|e| e.to_string())?;
    let pow = power(&root, p).map_err(|e| e.to_string())?;
    let target = shift_from_symbol(&spec.target(), k).map_err(|e| e.to_string())?;
    let rep = verify_root(&spec, k, 1e-10).map_err(|e| e.to_string())?;
    let re = |w: &[num_complex::Complex64]| w.iter().map(|c| c.re).collect::<Vec<_>>();
    json(&RootView {
        calibration: spec.calibration.re,
        root: re(&root.weights()[..=k]),
        power: re(&pow.weights()[..=k]),
        target: re(target.weights()),
        max_relative_deviation: rep.max_relative_deviation,
        pass: rep.pass,
    })
}

#[derive(Serialize)]
struct CommutatorView {
    weights: Vec<f64>,
    max_abs: f64,
}

pub fn commutator_json(p1: u32, n1: u32, p2: u32, n2: u32, k: usize) -> Result<String, String> {
    check_k(k)?;
    let reach = k + p1.max(p2) as usize;
    let a = shift_from_symbol(&QuasiSymbol::monomial(p1, n1), reach).map_err(|e| e.to_string())?;
    let b = shift_from_symbol(&QuasiSymbol::monomial(p2, n2), reach).map_err(|e| e.to_string())?;
    let c = commutator(&a, &b).map_err(|e| e.to_string())?;
    let weights: Vec<f64> = c.weights()[..=k].iter().map(|w| w.re).collect();
    let max_abs = weights.iter().map(|w| w.abs()).fold(0.0, f64::max);
    json(&CommutatorView { weights, max_abs })
}

#[derive(Serialize)]
struct ScanView {
    table: qhtoeplitz::commutant::ScanTable,
    feasible: Vec<(u32, u32)>,
    unexpected: Vec<(u32, u32)>,
    degenerate: bool,
    svg: String,
}

pub fn scan_json(p: u32, s: u32, n: u32, d: u32, k: usize) -> Result<String, String> {
    check_k(k)?;
    let table = scan(p, s, n, d, k, FEASIBLE_TOL, None).map_err(|e| e.to_string())?;
    json(&ScanView {
        feasible: table.feasible_set(),
        unexpected: table.unexpected(),
        degenerate: table.degenerate(),
        svg: scan_svg(&table),
        table,
    })
}

/// Root weights, the p-th power and its target, as JSON.
#[wasm_bindgen]
pub fn root_weights(p: u32, n: u32, k: usize) -> Result<String, JsError> {
    root_json(p, n, k).map_err(|e| JsError::new(&e))
}

/// Weights of `[T_{e^{ip₁θ}r^{n₁}}, T_{e^{ip₂θ}r^{n₂}}]` for `k ≤ K`, as JSON.
#[wasm_bindgen]
pub fn commutator_weights(p1: u32, n1: u32, p2: u32, n2: u32, k: usize) -> Result<String, JsError> {
    commutator_json(p1, n1, p2, n2, k).map_err(|e| JsError::new(&e))
}

/// Scan table plus an SVG residual plot, as JSON.
#[wasm_bindgen]
pub fn scan_residuals(p: u32, s: u32, n: u32, d: u32, k: usize) -> Result<String, JsError> {
    scan_json(p, s, n, d, k).map_err(|e| JsError::new(&e))
}
