//! Quasihomogeneous Toeplitz operators as weighted shifts `z^k ↦ w(k) z^{k+p}`
//! on the monomial basis of the Bergman space.
//!
//! A shift stores `w(0..=K_max)`. Algebra never reads past `K_max`: results are
//! materialized only on the indices where every factor is defined, and an
//! operation with no such index is a truncation error.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mellin::{mellin_eval, MellinDomainPoint, RadialSymbol};
use crate::quadrature;

/// Absolute tolerance used for Mellin values of sampled symbols.
pub const SYMBOL_QUAD_TOL: f64 = 1e-13;

/// The symbol `e^{ipθ}φ(r)`.
#[derive(Debug, Clone)]
pub struct QuasiSymbol {
    pub degree: u32,
    pub radial: RadialSymbol,
}

impl QuasiSymbol {
    pub fn new(degree: u32, radial: RadialSymbol) -> Self {
        Self { degree, radial }
    }

    /// `e^{ipθ} r^n`.
    pub fn monomial(degree: u32, exponent: u32) -> Self {
        Self::new(degree, RadialSymbol::monomial(exponent))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FromSymbol,
    Root,
    Composite,
}

/// `z^k ↦ w(k) z^{k+degree}` for `k ≤ K_max`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct WeightedShift {
    degree: u32,
    weights: Vec<Complex64>,
    provenance: Provenance,
}

impl WeightedShift {
    pub fn new(degree: u32, weights: Vec<Complex64>, provenance: Provenance) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Truncation("a weighted shift needs at least w(0)".into()));
        }
        if let Some(k) = weights.iter().position(|w| !(w.re.is_finite() && w.im.is_finite())) {
            return Err(Error::Domain(format!("weight w({k}) = {} is not finite", weights[k])));
        }
        Ok(Self { degree, weights, provenance })
    }

    pub fn from_real(degree: u32, weights: impl IntoIterator<Item = f64>, provenance: Provenance) -> Result<Self> {
        Self::new(degree, weights.into_iter().map(|w| Complex64::new(w, 0.0)).collect(), provenance)
    }

    pub fn identity(k_max: usize) -> Self {
        Self::constant(0, Complex64::new(1.0, 0.0), k_max)
    }

    /// Multiplication by `z`.
    pub fn unilateral_shift(k_max: usize) -> Self {
        Self::constant(1, Complex64::new(1.0, 0.0), k_max)
    }

    pub fn zero(degree: u32, k_max: usize) -> Self {
        Self::constant(degree, Complex64::new(0.0, 0.0), k_max)
    }

    fn constant(degree: u32, w: Complex64, k_max: usize) -> Self {
        Self { degree, weights: vec![w; k_max + 1], provenance: Provenance::Composite }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn k_max(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn weight(&self, k: usize) -> Option<Complex64> {
        self.weights.get(k).copied()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            degree: self.degree,
            weights: self.weights.iter().map(|w| w * c).collect(),
            provenance: self.provenance,
        }
    }

    pub fn truncate(&self, k_max: usize) -> Result<Self> {
        if k_max > self.k_max() {
            return Err(Error::Truncation(format!("cannot extend K_max {} to {k_max}", self.k_max())));
        }
        Ok(Self { weights: self.weights[..=k_max].to_vec(), ..self.clone() })
    }

    /// `op(e_k)` supported on `k + degree`, for input length `≤ K_max + 1`.
    pub fn apply(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        if coeffs.len() > self.weights.len() {
            return Err(Error::Truncation(format!(
                "input of length {} needs weights up to k = {}, have K_max = {}",
                coeffs.len(),
                coeffs.len() - 1,
                self.k_max()
            )));
        }
        let p = self.degree as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len() + p];
        for (k, c) in coeffs.iter().enumerate() {
            out[k + p] = self.weights[k] * c;
        }
        Ok(out)
    }

    /// The `K×K` section with `M[k+p, k] = w(k)`.
    pub fn matrix(&self, size: usize) -> Result<DMatrix<Complex64>> {
        let mut m = DMatrix::zeros(size, size);
        self.add_into(&mut m, Complex64::new(1.0, 0.0))?;
        Ok(m)
    }

    fn add_into(&self, m: &mut DMatrix<Complex64>, c: Complex64) -> Result<()> {
        let size = m.nrows();
        let p = self.degree as usize;
        if size > p && size - p - 1 > self.k_max() {
            return Err(Error::Truncation(format!(
                "a {size}x{size} section of a degree-{p} shift needs K_max >= {}, have {}",
                size - p - 1,
                self.k_max()
            )));
        }
        for k in 0..size.saturating_sub(p) {
            m[(k + p, k)] += c * self.weights[k];
        }
        Ok(())
    }
}

/// `w(k) = 2(k+p+1)·φ̂(2k+p+2)` for `k ≤ K_max`.
pub fn shift_from_symbol(sym: &QuasiSymbol, k_max: usize) -> Result<WeightedShift> {
    let p = sym.degree as f64;
    let weights = (0..=k_max)
        .map(|k| {
            let k = k as f64;
            let z = MellinDomainPoint::real(2.0 * k + p + 2.0)?;
            Ok(2.0 * (k + p + 1.0) * mellin_eval(&sym.radial, z, SYMBOL_QUAD_TOL)?)
        })
        .collect::<Result<Vec<_>>>()?;
    WeightedShift::new(sym.degree, weights, Provenance::FromSymbol)
}

/// `A∘B` (B first): `w(k) = A(k + deg B)·B(k)`, defined for
/// `k ≤ min(B.K_max, A.K_max − deg B)`.
pub fn compose(a: &WeightedShift, b: &WeightedShift) -> Result<WeightedShift> {
    let db = b.degree as usize;
    if a.k_max() < db {
        return Err(Error::Truncation(format!(
            "A has K_max {} but B shifts by {db}; no index of A∘B is defined",
            a.k_max()
        )));
    }
    let k_max = b.k_max().min(a.k_max() - db);
    let weights = (0..=k_max).map(|k| a.weights[k + db] * b.weights[k]).collect();
    Ok(WeightedShift { degree: a.degree + b.degree, weights, provenance: Provenance::Composite })
}

/// `A^m` for `m ≥ 1`.
pub fn power(a: &WeightedShift, m: u32) -> Result<WeightedShift> {
    if m == 0 {
        return Err(Error::Precondition("power needs m >= 1".into()));
    }
    let p = a.degree as usize;
    let lost = (m as usize - 1) * p;
    if lost > a.k_max() {
        return Err(Error::Truncation(format!("A^{m} needs K_max >= {lost}, have {}", a.k_max())));
    }
    // Direct product avoids m intermediate allocations.
    let weights = (0..=a.k_max() - lost)
        .map(|k| (0..m as usize).map(|j| a.weights[k + j * p]).product())
        .collect();
    let provenance = if m == 1 { a.provenance } else { Provenance::Composite };
    Ok(WeightedShift { degree: a.degree * m, weights, provenance })
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &WeightedShift, b: &WeightedShift) -> Result<WeightedShift> {
    let ab = compose(a, b)?;
    let ba = compose(b, a)?;
    let k_max = ab.k_max().min(ba.k_max());
    let weights = (0..=k_max).map(|k| ab.weights[k] - ba.weights[k]).collect();
    Ok(WeightedShift { degree: a.degree + b.degree, weights, provenance: Provenance::Composite })
}

/// `sup_k |w(k)|·√((k+1)/(k+p+1))`: the norm of the truncated shift in the
/// orthonormalized basis `√(k+1)·z^k`.
pub fn operator_norm_estimate(op: &WeightedShift) -> f64 {
    let p = op.degree as f64;
    op.weights
        .iter()
        .enumerate()
        .map(|(k, w)| w.norm() * ((k as f64 + 1.0) / (k as f64 + p + 1.0)).sqrt())
        .fold(0.0, f64::max)
}

/// Finite sum of shifts with distinct degrees.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShiftSum {
    terms: BTreeMap<u32, WeightedShift>,
}

impl ShiftSum {
    pub fn terms(&self) -> impl Iterator<Item = &WeightedShift> {
        self.terms.values()
    }

    pub fn term(&self, degree: u32) -> Option<&WeightedShift> {
        self.terms.get(&degree)
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.terms.keys().copied().collect()
    }

    pub fn k_max(&self) -> Option<usize> {
        self.terms.values().map(WeightedShift::k_max).min()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { terms: self.terms.iter().map(|(d, t)| (*d, t.scale(c))).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|t| t.weights.iter().all(|w| *w == Complex64::new(0.0, 0.0)))
    }

    pub fn apply(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        let top = self.terms.keys().next_back().copied().unwrap_or(0) as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len() + top];
        for t in self.terms.values() {
            for (i, v) in t.apply(coeffs)?.into_iter().enumerate() {
                out[i] += v;
            }
        }
        Ok(out)
    }

    pub fn matrix(&self, size: usize) -> Result<DMatrix<Complex64>> {
        let mut m = DMatrix::zeros(size, size);
        for t in self.terms.values() {
            t.add_into(&mut m, Complex64::new(1.0, 0.0))?;
        }
        Ok(m)
    }
}

/// Collects shifts of pairwise distinct degrees.
pub fn sum(ops: impl IntoIterator<Item = WeightedShift>) -> Result<ShiftSum> {
    let mut terms = BTreeMap::new();
    for op in ops {
        let d = op.degree;
        if terms.insert(d, op).is_some() {
            return Err(Error::Precondition(format!("two terms of degree {d}")));
        }
    }
    Ok(ShiftSum { terms })
}

/// `⟨P(e^{ipθ}φ(r)·z^k), z^{k+p}⟩ / ‖z^{k+p}‖²` with `dA = r dr dθ/π`,
/// computed from the definition: angular trapezoid rule times radial quadrature
/// of `φ(r)·r^{2k+p+1}`.
pub fn brute_force_toeplitz(sym: &QuasiSymbol, k: usize, quad_tol: f64) -> Result<Complex64> {
    if !(quad_tol > 0.0) {
        return Err(Error::Precondition(format!("quad_tol {quad_tol} must be positive")));
    }
    let p = sym.degree as usize;
    let j = k + p;
    // Trapezoid on [0, 2π) is exact for trigonometric polynomials of degree < nodes.
    let nodes = 2 * (j + k + p) + 8;
    let h = 2.0 * PI / nodes as f64;
    let angular: Complex64 = (0..nodes)
        .map(|i| {
            let t = i as f64 * h;
            Complex64::from_polar(1.0, p as f64 * t) * Complex64::from_polar(1.0, k as f64 * t)
                * Complex64::from_polar(1.0, -(j as f64) * t)
        })
        .sum::<Complex64>()
        * h
        / PI;
    let exponent = (k + j + 1) as i32;
    let radial = &sym.radial;
    let r = quadrature::integrate(|r| radial.eval(r) * r.powi(exponent), 0.0, 1.0, 0.5 * quad_tol / (j as f64 + 1.0))?;
    Ok(angular * r.value * (j as f64 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn mono(p: u32, n: u32, k_max: usize) -> WeightedShift {
        shift_from_symbol(&QuasiSymbol::monomial(p, n), k_max).unwrap()
    }

    #[test]
    fn symbol_weights() {
        for (k, w) in mono(1, 1, 30).weights().iter().enumerate() {
            assert!((w - c(1.0)).norm() < 1e-15, "k={k}");
        }
        for (k, w) in mono(0, 2, 30).weights().iter().enumerate() {
            let k = k as f64;
            assert!((w - c((2.0 * k + 2.0) / (2.0 * k + 4.0))).norm() < 1e-15);
        }
        assert!(mono(2, 2, 30).weights().iter().all(|w| (w - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn projection_oracle_examples() {
        let z5 = brute_force_toeplitz(&QuasiSymbol::monomial(0, 0), 5, 1e-12).unwrap();
        assert!((z5 - c(1.0)).norm() < 1e-12);
        let z = brute_force_toeplitz(&QuasiSymbol::monomial(1, 1), 0, 1e-12).unwrap();
        assert!((z - c(1.0)).norm() < 1e-12);
        let q = brute_force_toeplitz(&QuasiSymbol::monomial(2, 4), 0, 1e-12).unwrap();
        assert!((q - c(0.75)).norm() < 1e-12);
    }

    #[test]
    fn oracle_on_non_monomial_symbol() {
        let sym = QuasiSymbol::new(1, RadialSymbol::sampled(|r| (1.0 - r * r).sqrt() * r, 1.0).unwrap());
        let w = shift_from_symbol(&sym, 6).unwrap();
        for k in 0..=6 {
            let b = brute_force_toeplitz(&sym, k, 1e-12).unwrap();
            assert!((w.weights()[k] - b).norm() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn compose_examples() {
        let s = WeightedShift::unilateral_shift(20);
        let s2 = compose(&s, &s).unwrap();
        assert_eq!(s2.degree(), 2);
        assert!(s2.weights().iter().all(|w| *w == c(1.0)));

        let t = mono(0, 2, 20);
        let ts = compose(&t, &s).unwrap();
        for k in 0..=19 {
            let kf = k as f64;
            // T_{r²}(z^{k+1}) by projection
            let b = brute_force_toeplitz(&QuasiSymbol::monomial(0, 2), k + 1, 1e-13).unwrap();
            assert!((ts.weights()[k] - c((2.0 * kf + 4.0) / (2.0 * kf + 6.0))).norm() < 1e-15);
            assert!((ts.weights()[k] - b).norm() < 1e-12);
        }
        let a = mono(2, 3, 10);
        assert_eq!(compose(&a, &WeightedShift::identity(10)).unwrap().weights(), a.weights());
    }

    #[test]
    fn compose_truncation() {
        let a = mono(1, 1, 5);
        let b = mono(3, 1, 20);
        let ab = compose(&a, &b).unwrap();
        assert_eq!(ab.k_max(), 2);
        assert!(matches!(compose(&mono(1, 1, 2), &b), Err(Error::Truncation(_))));
        assert!(matches!(power(&mono(2, 1, 3), 3), Err(Error::Truncation(_))));
    }

    #[test]
    fn power_examples() {
        let a = mono(2, 3, 20);
        assert_eq!(power(&a, 1).unwrap(), a);
        let s5 = power(&WeightedShift::unilateral_shift(20), 5).unwrap();
        assert_eq!((s5.degree(), s5.k_max()), (5, 16));
        assert!(s5.weights().iter().all(|w| *w == c(1.0)));
        let a3 = power(&a, 3).unwrap();
        let chain = compose(&a, &compose(&a, &a).unwrap()).unwrap();
        assert_eq!(a3.weights(), chain.weights());
    }

    #[test]
    fn commutator_examples() {
        let a = mono(1, 3, 40);
        assert!(commutator(&a, &a).unwrap().weights().iter().all(|w| *w == c(0.0)));

        let z = mono(1, 1, 40);
        let t = mono(0, 2, 40);
        let zt = commutator(&z, &t).unwrap();
        for (k, w) in zt.weights().iter().enumerate() {
            let k = k as f64;
            assert!((w - c(-1.0 / ((k + 2.0) * (k + 3.0)))).norm() < 1e-15);
        }

        let b = mono(2, 3, 40);
        let ab = commutator(&a, &b).unwrap();
        for (k, w) in ab.weights().iter().enumerate() {
            let k = k as f64;
            let exact = 2.0 * (k + 4.0) * (3.0 * k + 11.0) / ((k + 3.0) * (k + 5.0) * (2.0 * k + 7.0) * (2.0 * k + 9.0));
            assert!((w.re - exact).abs() < 1e-15, "k={k}");
        }
        let ab = commutator(&mono(1, 2, 40), &b).unwrap();
        for (k, w) in ab.weights().iter().enumerate() {
            let k = k as f64;
            let exact = 4.0 * (k + 4.0) / ((2.0 * k + 5.0) * (2.0 * k + 7.0) * (2.0 * k + 9.0));
            assert!((w.re - exact).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn commutator_matches_matrix_product() {
        let a = mono(1, 3, 40);
        let b = mono(2, 3, 40);
        let size = 16;
        let (ma, mb) = (a.matrix(size).unwrap(), b.matrix(size).unwrap());
        let prod = &ma * &mb - &mb * &ma;
        let mc = commutator(&a, &b).unwrap().matrix(size).unwrap();
        assert!((prod - mc).norm() < 1e-15);
    }

    #[test]
    fn sums_and_scaling() {
        let a = mono(1, 3, 10);
        let single = sum([a.clone()]).unwrap();
        assert_eq!(single.term(1), Some(&a));
        assert!(single.scale(c(0.0)).is_zero());
        let t = sum([mono(1, 3, 10), mono(2, 3, 10)]).unwrap();
        assert_eq!(t.degrees(), vec![1, 2]);
        assert!(matches!(sum([mono(1, 3, 10), mono(1, 2, 10)]), Err(Error::Precondition(_))));
    }

    #[test]
    fn apply_examples() {
        let s = WeightedShift::unilateral_shift(10);
        let mut e3 = vec![c(0.0); 6];
        e3[3] = c(1.0);
        let out = s.apply(&e3).unwrap();
        assert_eq!(out.iter().position(|v| *v == c(1.0)), Some(4));
        let t = mono(0, 2, 10);
        assert_eq!(t.apply(&[c(1.0)]).unwrap(), vec![c(0.5)]);
        let zero = WeightedShift::zero(2, 10);
        assert!(zero.apply(&[c(1.0), c(2.0)]).unwrap().iter().all(|v| *v == c(0.0)));
        assert!(matches!(s.apply(&[c(1.0); 12]), Err(Error::Truncation(_))));
    }

    #[test]
    fn sum_apply_and_matrix() {
        let t = sum([mono(1, 3, 10), mono(2, 3, 10)]).unwrap();
        let x = vec![c(1.0), c(-2.0), c(0.5)];
        let y = t.apply(&x).unwrap();
        let m = t.matrix(5).unwrap();
        let mut xv = nalgebra::DVector::zeros(5);
        for (i, v) in x.iter().enumerate() {
            xv[i] = *v;
        }
        let my = m * xv;
        for i in 0..5 {
            assert!((my[i] - y[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn matrices() {
        assert_eq!(WeightedShift::identity(5).matrix(3).unwrap(), DMatrix::identity(3, 3));
        let s = WeightedShift::unilateral_shift(5).matrix(3).unwrap();
        let mut expect = DMatrix::zeros(3, 3);
        expect[(1, 0)] = c(1.0);
        expect[(2, 1)] = c(1.0);
        assert_eq!(s, expect);
        assert!(matches!(WeightedShift::identity(2).matrix(5), Err(Error::Truncation(_))));
    }

    #[test]
    fn norm_estimates() {
        let s = operator_norm_estimate(&WeightedShift::unilateral_shift(1000));
        assert!(s < 1.0 && s > 0.999);
        assert_eq!(operator_norm_estimate(&WeightedShift::zero(3, 10)), 0.0);
        let t = operator_norm_estimate(&mono(0, 2, 1000));
        assert!((t - 2002.0 / 2004.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(WeightedShift::from_real(1, [1.0, f64::NAN], Provenance::Composite).is_err());
    }
}
