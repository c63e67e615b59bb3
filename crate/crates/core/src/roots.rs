//! Degree-one roots of `T_{e^{ipθ}r^n}`.
//!
//! The root `T_{e^{iθ}f}` is known only through the Mellin values
//! `f̂(2k+3) = B((2k+4)/2p, 1−1/p)·B((2k+p+n+2)/2p, 1/p)`, fixed up to a
//! constant that [`calibrate_root`] pins by matching `k = 0` of the `p`-th power.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{power, shift_from_symbol, Provenance, QuasiSymbol, WeightedShift};
use crate::special::beta;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    pub p: u32,
    pub n: u32,
    pub k_max: usize,
    pub calibration: Complex64,
}

impl RootSpec {
    /// Uncalibrated spec (`calibration = 1`).
    pub fn new(p: u32, n: u32, k_max: usize) -> Result<Self> {
        if p < 1 || n < 1 {
            return Err(Error::Precondition(format!("root needs p >= 1 and n >= 1, got p={p}, n={n}")));
        }
        Ok(Self { p, n, k_max, calibration: Complex64::new(1.0, 0.0) })
    }

    pub fn calibrated(p: u32, n: u32, k_max: usize) -> Result<Self> {
        let mut spec = Self::new(p, n, k_max)?;
        spec.calibration = calibrate_root(&spec)?;
        Ok(spec)
    }

    /// The operator whose root this is.
    pub fn target(&self) -> QuasiSymbol {
        QuasiSymbol::monomial(self.p, self.n)
    }
}

/// `f̂(2k+3)` before calibration.
pub fn root_weight_raw(p: u32, n: u32, k: usize) -> Result<f64> {
    if p < 2 {
        return Err(Error::Precondition("p = 1: the root is the operator itself".into()));
    }
    let (pf, nf, kf) = (p as f64, n as f64, k as f64);
    let two_p = 2.0 * pf;
    Ok(beta((2.0 * kf + 4.0) / two_p, 1.0 - 1.0 / pf)? * beta((2.0 * kf + pf + nf + 2.0) / two_p, 1.0 / pf)?)
}

/// The positive `γ` with `(γ·root)^p` matching `2(p+1)/(p+n+2)` at `k = 0`.
pub fn calibrate_root(spec: &RootSpec) -> Result<Complex64> {
    if spec.p == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let p = spec.p as usize;
    let mut composed = 1.0;
    for k in 0..p {
        composed *= 2.0 * (k as f64 + 2.0) * root_weight_raw(spec.p, spec.n, k)?;
    }
    if !(composed > 0.0 && composed.is_finite()) {
        return Err(Error::Calibration(format!("raw k=0 power weight {composed} for p={}, n={}", spec.p, spec.n)));
    }
    let target = 2.0 * (spec.p as f64 + 1.0) / (spec.p as f64 + spec.n as f64 + 2.0);
    Ok(Complex64::new((target / composed).powf(1.0 / spec.p as f64), 0.0))
}

/// Calibrated Mellin values `γ·f̂(2k+3)` for `k ≤ K_max`.
///
/// For `p = 1` these are the Mellin values of `r^n` itself.
pub fn root_mellin_grid(spec: &RootSpec) -> Result<Vec<Complex64>> {
    (0..=spec.k_max)
        .map(|k| {
            if spec.p == 1 {
                Ok(Complex64::new(1.0 / (2.0 * k as f64 + 3.0 + spec.n as f64), 0.0))
            } else {
                Ok(spec.calibration * root_weight_raw(spec.p, spec.n, k)?)
            }
        })
        .collect()
}

/// Degree-one shift with weights `2(k+2)·γ·f̂(2k+3)`.
pub fn build_root(spec: &RootSpec) -> Result<WeightedShift> {
    let grid = root_mellin_grid(spec)?;
    let weights = grid.into_iter().enumerate().map(|(k, v)| 2.0 * (k as f64 + 2.0) * v).collect();
    WeightedShift::new(1, weights, Provenance::Root)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RootReport {
    pub p: u32,
    pub n: u32,
    pub calibration: f64,
    pub max_relative_deviation: f64,
    pub worst_k: usize,
    pub pass: bool,
}

/// Compares `root^p` with `T_{e^{ipθ}r^n}` on `k ≤ K`.
pub fn verify_root(spec: &RootSpec, k: usize, tol: f64) -> Result<RootReport> {
    let p = spec.p as usize;
    if k + p > spec.k_max + 1 {
        return Err(Error::Truncation(format!("K = {k} needs K_max >= {}, have {}", k + p - 1, spec.k_max)));
    }
    let composed = power(&build_root(spec)?, spec.p)?;
    let target = shift_from_symbol(&spec.target(), k)?;
    let (mut worst, mut worst_k) = (0.0f64, 0);
    for (i, (a, b)) in composed.weights().iter().zip(target.weights()).enumerate().take(k + 1) {
        let dev = (a - b).norm() / b.norm();
        if dev > worst || dev.is_nan() {
            worst = dev;
            worst_k = i;
        }
    }
    Ok(RootReport {
        p: spec.p,
        n: spec.n,
        calibration: spec.calibration.re,
        max_relative_deviation: worst,
        worst_k,
        pass: worst < tol,
    })
}
