//! Finite-grid detector for `F = c·G` via the functional equation
//! `F(z)G(z+p) = F(z+p)G(z)`.

use crate::error::{Error, Result};

/// Values of a function on the arithmetic grid `z₀ + i·step`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    pub z0: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl GridFn {
    pub fn sample(z0: f64, step: f64, len: usize, f: impl Fn(f64) -> f64) -> Self {
        Self { z0, step, values: (0..len).map(|i| f(z0 + step * i as f64)).collect() }
    }
}

/// Largest normalized cross-difference
/// `|F(z)G(z+p) − F(z+p)G(z)| / (|F(z)G(z+p)| + |F(z+p)G(z)|)` over the grid.
pub fn cross_residual(f: &GridFn, g: &GridFn, period: u32) -> Result<f64> {
    if f.values.len() != g.values.len() || f.z0 != g.z0 || f.step != g.step {
        return Err(Error::Precondition("F and G must share one grid".into()));
    }
    if let Some(i) = f.values.iter().chain(&g.values).position(|v| *v == 0.0 || !v.is_finite()) {
        return Err(Error::Precondition(format!("zero or non-finite value at grid index {}", i % f.values.len())));
    }
    let ratio = period as f64 / f.step;
    if !(f.step > 0.0) || ratio.fract() != 0.0 {
        return Err(Error::Precondition(format!("grid step {} must divide period {period}", f.step)));
    }
    let shift = ratio as usize;
    if shift >= f.values.len() {
        return Err(Error::Precondition("grid is shorter than one period".into()));
    }
    let (fv, gv) = (&f.values, &g.values);
    Ok((0..fv.len() - shift)
        .map(|i| {
            let a = fv[i] * gv[i + shift];
            let b = fv[i + shift] * gv[i];
            (a - b).abs() / (a.abs() + b.abs())
        })
        .fold(0.0, f64::max))
}

/// Returns the constant `c = median(F/G)` when the cross-difference stays below `tol`.
pub fn proportionality_test(f: &GridFn, g: &GridFn, period: u32, tol: f64) -> Result<Option<f64>> {
    if cross_residual(f, g, period)? >= tol {
        return Ok(None);
    }
    let mut q: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| a / b).collect();
    q.sort_by(f64::total_cmp);
    let n = q.len();
    Ok(Some(if n % 2 == 1 { q[n / 2] } else { 0.5 * (q[n / 2 - 1] + q[n / 2]) }))
}
