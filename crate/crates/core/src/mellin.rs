//! Radial symbols on `[0, 1)` and their Mellin transforms.
//!
//! Convention: `φ̂(z) = ∫₀¹ φ(r) r^{z−1} dr`, so `r^n ↦ 1/(z+n)`. This is the
//! normalization under which the shift weight `2(k+p+1)·φ̂(2k+p+2)` agrees with
//! the Bergman projection computed directly (see `operators::brute_force_toeplitz`).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;

/// A radial function `φ` on `[0, 1)`.
#[derive(Clone)]
pub enum RadialSymbol {
    /// `r^n`.
    Monomial { exponent: u32 },
    /// `Σ cᵢ r^{eᵢ}` with real exponents `eᵢ > −1`.
    MonomialSum { terms: Vec<(f64, f64)> },
    /// An arbitrary callable, integrated numerically.
    Sampled(SampledSymbol),
}

/// A radial function given only by point evaluation.
///
/// `exponent_hint` is a lower bound `e > −1` on the behaviour `φ(r) = O(r^e)`
/// near the origin; it certifies integrability against `dr`.
#[derive(Clone)]
pub struct SampledSymbol {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub exponent_hint: f64,
}

impl fmt::Debug for RadialSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Monomial { exponent } => write!(f, "r^{exponent}"),
            Self::MonomialSum { terms } => f.debug_list().entries(terms).finish(),
            Self::Sampled(s) => write!(f, "Sampled(hint={})", s.exponent_hint),
        }
    }
}

impl RadialSymbol {
    pub fn monomial(exponent: u32) -> Self {
        Self::Monomial { exponent }
    }

    pub fn sum(terms: Vec<(f64, f64)>) -> Result<Self> {
        for &(c, e) in &terms {
            if !c.is_finite() {
                return Err(Error::Domain(format!("non-finite coefficient {c}")));
            }
            if !(e > -1.0) || !e.is_finite() {
                return Err(Error::Domain(format!("exponent {e} is not integrable against dr on [0,1)")));
            }
        }
        Ok(Self::MonomialSum { terms })
    }

    pub fn sampled<F>(eval: F, exponent_hint: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(exponent_hint > -1.0) {
            return Err(Error::Domain(format!("exponent hint {exponent_hint} is not integrable")));
        }
        Ok(Self::Sampled(SampledSymbol { eval: Arc::new(eval), exponent_hint }))
    }

    /// Point value `φ(r)`.
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Monomial { exponent } => r.powi(*exponent as i32),
            Self::MonomialSum { terms } => terms.iter().map(|&(c, e)| c * r.powf(e)).sum(),
            Self::Sampled(s) => (s.eval)(r),
        }
    }
}

/// A point of the closed half-plane `Re z ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinDomainPoint(Complex64);

impl MellinDomainPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re >= 2.0) || !z.im.is_finite() {
            return Err(Error::Domain(format!("Mellin point {z} lies outside Re z >= 2")));
        }
        Ok(Self(z))
    }

    pub fn real(x: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0))
    }

    pub fn z(self) -> Complex64 {
        self.0
    }
}

/// `1/(z+n)`, the transform of `r^n`.
pub fn mellin_monomial(n: u32, z: Complex64) -> Result<Complex64> {
    let shifted = z + n as f64;
    if shifted == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole(format!("z = -{n}")));
    }
    if !(shifted.re > 0.0) {
        return Err(Error::Precondition(format!("Re z = {} must exceed -{n}", z.re)));
    }
    Ok(shifted.inv())
}

/// `φ̂(z)`; closed form for monomials, adaptive quadrature for sampled symbols.
pub fn mellin_eval(symbol: &RadialSymbol, z: MellinDomainPoint, quad_tol: f64) -> Result<Complex64> {
    let z = z.z();
    match symbol {
        RadialSymbol::Monomial { exponent } => mellin_monomial(*exponent, z),
        RadialSymbol::MonomialSum { terms } => Ok(terms.iter().map(|&(c, e)| c * (z + e).inv()).sum()),
        RadialSymbol::Sampled(s) => {
            let (x, y) = (z.re, z.im);
            let f = &s.eval;
            let re = quadrature::integrate(|r| f(r) * r.powf(x - 1.0) * (y * r.ln()).cos(), 0.0, 1.0, 0.5 * quad_tol)?;
            let im = if y == 0.0 {
                0.0
            } else {
                quadrature::integrate(|r| f(r) * r.powf(x - 1.0) * (y * r.ln()).sin(), 0.0, 1.0, 0.5 * quad_tol)?.value
            };
            Ok(Complex64::new(re.value, im))
        }
    }
}

/// Outcome of the finite Müntz–Szász check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MuntzVerdict {
    Satisfied,
    Inconclusive,
    Violated,
}

/// Verdict together with the partial sum `Σ Re(1/dₙ)` that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuntzReport {
    pub verdict: MuntzVerdict,
    pub partial_sum: f64,
}

/// Finite-evidence check of the uniqueness conditions `inf|dₙ| > 0` and
/// `Σ Re(1/dₙ) = ∞` on the supplied points.
pub fn muntz_szasz_check(points: &[Complex64], partial_sum_threshold: f64) -> Result<MuntzReport> {
    if points.is_empty() {
        return Err(Error::Precondition("point list is empty".into()));
    }
    let mut sorted: Vec<Complex64> = points.to_vec();
    sorted.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Precondition(format!("repeated point {}", w[0])));
    }
    if points.iter().any(|d| d.norm() <= f64::EPSILON) {
        return Ok(MuntzReport { verdict: MuntzVerdict::Violated, partial_sum: f64::NAN });
    }
    let partial_sum: f64 = points.iter().map(|d| d.inv().re).sum();
    let verdict = if partial_sum > partial_sum_threshold {
        MuntzVerdict::Satisfied
    } else {
        MuntzVerdict::Inconclusive
    };
    Ok(MuntzReport { verdict, partial_sum })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn constant_symbol_at_three() {
        let v = mellin_eval(&RadialSymbol::monomial(0), MellinDomainPoint::real(3.0).unwrap(), 1e-12).unwrap();
        assert_eq!(v, c(1.0 / 3.0));
    }

    #[test]
    fn r_squared_at_three() {
        // z = 2k+p+2 with k=0, p=1
        let v = mellin_eval(&RadialSymbol::monomial(2), MellinDomainPoint::real(3.0).unwrap(), 1e-12).unwrap();
        assert_eq!(v, c(0.2));
        let q = quadrature::integrate(|r| r * r * r * r, 0.0, 1.0, 1e-14).unwrap();
        assert!((q.value - 0.2).abs() < 1e-14);
    }

    #[test]
    fn sampled_cube_matches_closed_form() {
        let s = RadialSymbol::sampled(|r| r.powi(3), 3.0).unwrap();
        let v = mellin_eval(&s, MellinDomainPoint::real(4.0).unwrap(), 1e-12).unwrap();
        assert!((v.re - 1.0 / 7.0).abs() < 1e-12);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn sampled_complex_point() {
        let s = RadialSymbol::sampled(|r| r * r, 2.0).unwrap();
        let z = Complex64::new(2.5, 1.5);
        let v = mellin_eval(&s, MellinDomainPoint::new(z).unwrap(), 1e-12).unwrap();
        assert!((v - (z + 2.0).inv()).norm() < 1e-12);
    }

    #[test]
    fn monomial_closed_form_examples() {
        assert_eq!(mellin_monomial(0, c(1.0)).unwrap(), c(1.0));
        assert_eq!(mellin_monomial(3, c(4.0)).unwrap(), c(1.0 / 7.0));
        assert!(matches!(mellin_monomial(1, c(-1.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn sum_is_linear() {
        let s = RadialSymbol::sum(vec![(1.0, 2.0), (0.5, 4.0)]).unwrap();
        let v = mellin_eval(&s, MellinDomainPoint::real(4.0).unwrap(), 1e-12).unwrap();
        assert!((v.re - (1.0 / 6.0 + 0.5 / 8.0)).abs() < 1e-16);
    }

    #[test]
    fn rejects_non_integrable() {
        assert!(RadialSymbol::sum(vec![(1.0, -1.0)]).is_err());
        assert!(RadialSymbol::sampled(|r| 1.0 / r, -1.0).is_err());
        assert!(MellinDomainPoint::real(1.5).is_err());
    }

    #[test]
    fn muntz_odd_grid_partial_sum() {
        let pts: Vec<Complex64> = (0..=10_000).map(|k| c(2.0 * k as f64 + 3.0)).collect();
        let rep = muntz_szasz_check(&pts, 5.0).unwrap();
        // Σ_{k≤10⁴} 1/(2k+3) falls short of 5 at this depth.
        let direct: f64 = (0..=10_000).map(|k| 1.0 / (2.0 * k as f64 + 3.0)).sum();
        assert_eq!(rep.partial_sum, direct);
        assert!((rep.partial_sum - 4.587_025_189_208_38).abs() < 1e-11);
        assert_eq!(rep.verdict, MuntzVerdict::Inconclusive);
        assert_eq!(muntz_szasz_check(&pts, 4.0).unwrap().verdict, MuntzVerdict::Satisfied);
    }

    #[test]
    fn muntz_violated_and_imaginary() {
        assert_eq!(muntz_szasz_check(&[c(0.0), c(1.0)], 1.0).unwrap().verdict, MuntzVerdict::Violated);
        let imag: Vec<Complex64> = (1..=100).map(|k| Complex64::new(0.0, k as f64)).collect();
        assert_eq!(muntz_szasz_check(&imag, 1e-9).unwrap().verdict, MuntzVerdict::Inconclusive);
        assert!(muntz_szasz_check(&[c(2.0), c(2.0)], 1.0).is_err());
        assert!(muntz_szasz_check(&[], 1.0).is_err());
    }
}
