//! Residual forms of the commutation condition
//! `c1·[F^m, T_{e^{isθ}r^d}] = c2·[T_{e^{ipθ}r^n}, G^l]`, where `F`, `G` are the
//! degree-one roots of the two terms of `T`, and the `(m, l)` feasibility scan.
//!
//! Every residual is normalized per `k` so that weights decaying in `k` do not
//! masquerade as agreement: the operator and product forms use
//! `|c1·a_k − c2·b_k| / √(|a_k|² + |b_k|²)`, the ratio form
//! `|L − R| / (|L| + |R|)`, and the Gamma form the deviation of `L/R` from its
//! median.

use nalgebra::DMatrix;
use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{commutator, power, shift_from_symbol, sum, QuasiSymbol, ShiftSum, WeightedShift};
use crate::roots::{build_root, root_mellin_grid, RootSpec};
use crate::special::{cross_residual, GammaRatio, GridFn};

/// Residual below which a cell counts as feasible.
pub const FEASIBLE_TOL: f64 = 1e-8;
/// Commutator weights below this are treated as vanishing.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CommutantConfig {
    pub p: u32,
    pub s: u32,
    pub n: u32,
    pub d: u32,
    pub m: u32,
    pub l: u32,
    /// Residuals are evaluated for `k ≤ k`.
    pub k: usize,
}

impl CommutantConfig {
    pub fn new(p: u32, s: u32, n: u32, d: u32, m: u32, l: u32, k: usize) -> Self {
        Self { p, s, n, d, m, l, k }
    }

    /// `α = s − p = l − m`, when the degree constraints hold.
    pub fn alpha(&self) -> Option<u32> {
        hypothesis_check(self).then(|| self.s - self.p)
    }

    fn require(&self) -> Result<u32> {
        self.alpha().ok_or_else(|| {
            Error::Precondition(format!(
                "need 1 <= p < s, 1 <= m < l, l + p = m + s; got p={}, s={}, m={}, l={}",
                self.p, self.s, self.m, self.l
            ))
        })
    }
}

/// `1 ≤ p < s`, `1 ≤ m < l`, `l + p = m + s`, and positive exponents.
pub fn hypothesis_check(c: &CommutantConfig) -> bool {
    1 <= c.p && c.p < c.s && 1 <= c.m && c.m < c.l && c.l + c.p == c.m + c.s && c.n >= 1 && c.d >= 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualForm {
    Operator,
    Product,
    Ratio,
    Gamma,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub form: ResidualForm,
    pub per_k: Vec<(usize, f64)>,
    pub best_c1: Complex64,
    pub best_c2: Complex64,
    /// Largest per-`k` residual (after fitting, where constants are fitted).
    pub min_residual: f64,
    pub tolerance: f64,
    pub feasible: bool,
    /// All commutator weights vanish; any constants work.
    pub degenerate: bool,
    /// `m = p`: the difference products are empty and the form reduces to `0 = 0`.
    pub identity_case: bool,
    /// Ratio form: cross residual of the `F/G` functional equation.
    /// Gamma form: the fitted constant `L/R`.
    pub secondary: Option<f64>,
    /// Indices left out because a side vanished or hit a pole.
    pub skipped: Vec<usize>,
}

impl ResidualReport {
    fn new(form: ResidualForm, per_k: Vec<(usize, f64)>, c1: Complex64, c2: Complex64) -> Self {
        let min_residual = per_k.iter().map(|r| r.1).fold(0.0, f64::max);
        Self {
            form,
            per_k,
            best_c1: c1,
            best_c2: c2,
            min_residual,
            tolerance: FEASIBLE_TOL,
            feasible: min_residual < FEASIBLE_TOL,
            degenerate: false,
            identity_case: false,
            secondary: None,
            skipped: Vec::new(),
        }
    }

    fn identity(form: ResidualForm, k: usize) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self { identity_case: true, ..Self::new(form, (0..=k).map(|k| (k, 0.0)).collect(), one, one) }
    }

    /// Re-evaluates the verdict at another tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.feasible = self.min_residual < tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivisibilityProfile {
    /// `2p | p+n`
    pub p_divides_p_plus_n: bool,
    /// `2s | s+d`
    pub s_divides_s_plus_d: bool,
    /// `2p | 2m`
    pub p_divides_2m: bool,
    /// `2s | 2p−2m`
    pub s_divides_2p_minus_2m: bool,
    /// `2s | 2p+s+d`
    pub s_divides_2p_plus_s_plus_d: bool,
}

impl DivisibilityProfile {
    /// Both exponents fall in the exceptional family where the radial parts are
    /// powers of a common root.
    pub fn exceptional(&self) -> bool {
        self.p_divides_p_plus_n && self.s_divides_s_plus_d
    }
}

pub fn divisibility_profile(c: &CommutantConfig) -> DivisibilityProfile {
    let divides = |a: i64, b: i64| b.rem_euclid(a) == 0;
    let (p, s, n, d, m) = (c.p as i64, c.s as i64, c.n as i64, c.d as i64, c.m as i64);
    DivisibilityProfile {
        p_divides_p_plus_n: divides(2 * p, p + n),
        s_divides_s_plus_d: divides(2 * s, s + d),
        p_divides_2m: divides(2 * p, 2 * m),
        s_divides_2p_minus_2m: divides(2 * s, 2 * p - 2 * m),
        s_divides_2p_plus_s_plus_d: divides(2 * s, 2 * p + s + d),
    }
}

/// Roots, their Mellin grids and the two terms of `T`, materialized to a
/// common reach.
struct Ingredients {
    f: WeightedShift,
    g: WeightedShift,
    fhat: Vec<f64>,
    ghat: Vec<f64>,
    tp: WeightedShift,
    ts: WeightedShift,
}

impl Ingredients {
    fn new(p: u32, s: u32, n: u32, d: u32, reach: usize) -> Result<Self> {
        let fs = RootSpec::calibrated(p, n, reach)?;
        let gs = RootSpec::calibrated(s, d, reach)?;
        let re = |v: Vec<Complex64>| v.into_iter().map(|c| c.re).collect();
        Ok(Self {
            f: build_root(&fs)?,
            g: build_root(&gs)?,
            fhat: re(root_mellin_grid(&fs)?),
            ghat: re(root_mellin_grid(&gs)?),
            tp: shift_from_symbol(&QuasiSymbol::monomial(p, n), reach)?,
            ts: shift_from_symbol(&QuasiSymbol::monomial(s, d), reach)?,
        })
    }

    fn reach(c: &CommutantConfig) -> usize {
        c.k + 2 * (c.m + c.s) as usize + 4
    }

    fn for_config(c: &CommutantConfig) -> Result<Self> {
        c.require()?;
        Self::new(c.p, c.s, c.n, c.d, Self::reach(c))
    }

    /// `(a_k, b_k) = ([F^m, T_s](k), [T_p, G^l](k))` for `k ≤ K`.
    fn operator_terms(&self, c: &CommutantConfig) -> Result<Vec<(Complex64, Complex64)>> {
        let lhs = commutator(&power(&self.f, c.m)?, &self.ts)?;
        let rhs = commutator(&self.tp, &power(&self.g, c.l)?)?;
        if lhs.k_max() < c.k || rhs.k_max() < c.k {
            return Err(Error::Truncation(format!("residuals up to k = {} exceed the materialized range", c.k)));
        }
        Ok((0..=c.k).map(|k| (lhs.weights()[k], rhs.weights()[k])).collect())
    }
}

/// `T = T_{e^{ipθ}r^n} + T_{e^{isθ}r^d}` and `S = c1·F^m + c2·G^l`.
pub fn build_candidates(c: &CommutantConfig, c1: Complex64, c2: Complex64) -> Result<(ShiftSum, ShiftSum)> {
    let ing = Ingredients::for_config(c)?;
    let s = sum([power(&ing.f, c.m)?.scale(c1), power(&ing.g, c.l)?.scale(c2)])?;
    let t = sum([ing.tp, ing.ts])?;
    Ok((s, t))
}

/// `[A, B]` has all weights below `tol` on `k ≤ K`.
pub fn commutes(a: &WeightedShift, b: &WeightedShift, k: usize, tol: f64) -> Result<bool> {
    let c = commutator(a, b)?;
    if c.k_max() < k {
        return Err(Error::Truncation(format!("commutator known up to k = {}, asked for {k}", c.k_max())));
    }
    Ok(c.weights()[..=k].iter().all(|w| w.norm() < tol))
}

/// `F^m` commutes with `T_p` and `G^l` with `T_s` on `k ≤ K`.
pub fn component_commutation_check(c: &CommutantConfig, k: usize, tol: f64) -> Result<bool> {
    let ing = Ingredients::for_config(&CommutantConfig { k, ..*c })?;
    Ok(commutes(&power(&ing.f, c.m)?, &ing.tp, k, tol)? && commutes(&power(&ing.g, c.l)?, &ing.ts, k, tol)?)
}

/// Rows where both sides vanish read `0 = 0` and contribute nothing.
fn pair_residual(a: Complex64, b: Complex64, c1: Complex64, c2: Complex64) -> f64 {
    if a.norm() < DEGENERATE_TOL && b.norm() < DEGENERATE_TOL {
        0.0
    } else {
        (c1 * a - c2 * b).norm() / (a.norm_sqr() + b.norm_sqr()).sqrt()
    }
}

fn degenerate(terms: &[(Complex64, Complex64)]) -> bool {
    terms.iter().all(|(a, b)| a.norm() < DEGENERATE_TOL && b.norm() < DEGENERATE_TOL)
}

/// Operator-form residual at fixed constants.
pub fn commutator_residual(c: &CommutantConfig, c1: Complex64, c2: Complex64, k: usize) -> Result<ResidualReport> {
    let c = CommutantConfig { k, ..*c };
    let terms = Ingredients::for_config(&c)?.operator_terms(&c)?;
    Ok(operator_report(&terms, c1, c2))
}

fn operator_report(terms: &[(Complex64, Complex64)], c1: Complex64, c2: Complex64) -> ResidualReport {
    let per_k = terms.iter().enumerate().map(|(k, &(a, b))| (k, pair_residual(a, b, c1, c2))).collect();
    let mut rep = ResidualReport::new(ResidualForm::Operator, per_k, c1, c2);
    rep.degenerate = degenerate(terms);
    rep
}

/// Least-squares `(c1, c2)` on the unit sphere for the normalized system
/// `c1·a_k − c2·b_k ≈ 0`, with a deterministic phase (first nonzero component
/// real and positive).
fn fit_pair(terms: &[(Complex64, Complex64)]) -> (Complex64, Complex64) {
    let rows: Vec<(Complex64, Complex64)> = terms
        .iter()
        .filter(|(a, b)| a.norm() >= DEGENERATE_TOL || b.norm() >= DEGENERATE_TOL)
        .map(|&(a, b)| {
            let scale = (a.norm_sqr() + b.norm_sqr()).sqrt();
            (a / scale, -b / scale)
        })
        .collect();
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    if rows.is_empty() || degenerate(terms) {
        return (h, h);
    }
    let (mut c1, mut c2) = if rows.len() == 1 {
        // One equation x·c1 + y·c2 = 0: the null direction is (−y, x)*.
        let (x, y) = rows[0];
        (-y.conj(), x.conj())
    } else {
        let m = DMatrix::from_fn(rows.len(), 2, |i, j| if j == 0 { rows[i].0 } else { rows[i].1 });
        let svd = m.svd(false, true);
        let Some(vt) = svd.v_t else { return (h, h) };
        let idx = if svd.singular_values[0] <= svd.singular_values[1] { 0 } else { 1 };
        (vt[(idx, 0)].conj(), vt[(idx, 1)].conj())
    };
    let lead = if c1.norm() > 1e-300 { c1 } else { c2 };
    let phase = lead.conj() / lead.norm();
    c1 *= phase;
    c2 *= phase;
    let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
    (c1 / norm, c2 / norm)
}

/// Fits `(c1, c2)` with `|c1|² + |c2|² = 1` and reports the operator residual there.
pub fn fit_constants(c: &CommutantConfig, k: usize) -> Result<ResidualReport> {
    let c = CommutantConfig { k, ..*c };
    let terms = Ingredients::for_config(&c)?.operator_terms(&c)?;
    let (c1, c2) = fit_pair(&terms);
    Ok(operator_report(&terms, c1, c2))
}

/// Signed log of a product of grid values `v[k+j]`, `j ∈ [j0, j1)`.
fn ln_prod(v: &[f64], k: usize, j0: u32, j1: u32) -> Result<(f64, f64)> {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for j in j0..j1 {
        let x = *v
            .get(k + j as usize)
            .ok_or_else(|| Error::Truncation(format!("Mellin grid ends before index {}", k + j as usize)))?;
        if x == 0.0 {
            return Err(Error::Pole(format!("zero Mellin value at grid index {}", k + j as usize)));
        }
        ln += x.abs().ln();
        sign *= x.signum();
    }
    Ok((ln, sign))
}

fn ln_mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 * b.1)
}

fn ln_div(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 * b.1)
}

/// `a − b` in signed-log form; `(-∞, 0)` for an exact zero.
fn ln_sub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let (big, small, flip) = if a.0 >= b.0 { (a, b, 1.0) } else { (b, a, -1.0) };
    let t = big.1 - small.1 * (small.0 - big.0).exp();
    if t == 0.0 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        (big.0 + t.abs().ln(), flip * t.signum())
    }
}

/// Both sides of the product identity, scaled by a common positive factor
/// `e^{−L_k}`: `lhs = A1 − B1`, `rhs = A2 − B2` with
/// `A1 = Πĝ[0,s)·Πf̂[s,m+s)`, `B1 = Πf̂[0,m)·Πĝ[m,m+s)`,
/// `A2 = Πĝ[0,l)·Πf̂[l,p+l)`, `B2 = Πf̂[0,p)·Πĝ[p,p+l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductTerms {
    pub lhs: f64,
    pub rhs: f64,
    pub ln_scale: f64,
}

pub fn product_terms(c: &CommutantConfig, k: usize) -> Result<Vec<ProductTerms>> {
    let c = CommutantConfig { k, ..*c };
    let ing = Ingredients::for_config(&c)?;
    product_terms_with(&ing, &c)
}

fn product_terms_with(ing: &Ingredients, c: &CommutantConfig) -> Result<Vec<ProductTerms>> {
    let (f, g) = (&ing.fhat, &ing.ghat);
    let (p, s, m, l) = (c.p, c.s, c.m, c.l);
    (0..=c.k)
        .map(|k| {
            let a1 = ln_mul(ln_prod(g, k, 0, s)?, ln_prod(f, k, s, m + s)?);
            let b1 = ln_mul(ln_prod(f, k, 0, m)?, ln_prod(g, k, m, m + s)?);
            let a2 = ln_mul(ln_prod(g, k, 0, l)?, ln_prod(f, k, l, p + l)?);
            let b2 = ln_mul(ln_prod(f, k, 0, p)?, ln_prod(g, k, p, p + l)?);
            let top = a1.0.max(b1.0).max(a2.0).max(b2.0);
            let v = |x: (f64, f64)| x.1 * (x.0 - top).exp();
            Ok(ProductTerms { lhs: v(a1) - v(b1), rhs: v(a2) - v(b2), ln_scale: top })
        })
        .collect()
}

/// Product-form residual `|c1·(A1−B1) − c2·(A2−B2)|`, normalized per `k`.
pub fn product_identity_residual(c: &CommutantConfig, c1: Complex64, c2: Complex64, k: usize) -> Result<ResidualReport> {
    let terms = product_terms(c, k)?;
    let pairs: Vec<(Complex64, Complex64)> =
        terms.iter().map(|t| (Complex64::new(t.lhs, 0.0), Complex64::new(t.rhs, 0.0))).collect();
    let per_k = pairs.iter().enumerate().map(|(k, &(a, b))| (k, pair_residual(a, b, c1, c2))).collect();
    let mut rep = ResidualReport::new(ResidualForm::Product, per_k, c1, c2);
    rep.degenerate = degenerate(&pairs);
    Ok(rep)
}

fn symmetric_relative(l: (f64, f64), r: (f64, f64)) -> f64 {
    if l.1 == 0.0 && r.1 == 0.0 {
        return 0.0;
    }
    if l.1 == 0.0 || r.1 == 0.0 {
        return 1.0;
    }
    let (big, small) = if l.0 >= r.0 { (l, r) } else { (r, l) };
    let t = (small.0 - big.0).exp();
    (big.1 - small.1 * t).abs() / (1.0 + t)
}

/// Ratio form at `c1 = c2`: for `m < p`
/// `[Πf̂[s,m+s)·Πĝ[0,l)] / [Πf̂[0,m)·Πĝ[p,p+l)] = [Πĝ[m,p) − Πf̂[m,p)] / [Πĝ[l,s) − Πf̂[l,s)]`,
/// and for `m > p`
/// `[Πf̂[l,m+s)·Πĝ[0,s)] / [Πf̂[0,p)·Πĝ[m,p+l)] = [Πf̂[p,m) − Πĝ[p,m)] / [Πf̂[s,l) − Πĝ[s,l)]`.
///
/// `secondary` carries the cross residual of `F(k)G(k+α) = F(k+α)G(k)` with
/// `F = Πĝ[0,m+α) / (Πf̂[0,m)·Πf̂[α,m+α))` and `G` the difference in the
/// numerator of the right side (divided by `Πf̂[p,m)·Πĝ[p,m)` when `m > p`).
pub fn ratio_equation_residual(c: &CommutantConfig, k: usize) -> Result<ResidualReport> {
    let c = CommutantConfig { k, ..*c };
    let alpha = c.require()?;
    if c.m == c.p {
        return Ok(ResidualReport::identity(ResidualForm::Ratio, k));
    }
    let reach = Ingredients::reach(&c) + alpha as usize;
    let ing = Ingredients::new(c.p, c.s, c.n, c.d, reach)?;
    let (f, g) = (&ing.fhat, &ing.ghat);
    let (p, s, m, l) = (c.p, c.s, c.m, c.l);
    let lower = m < p;
    let sides = |k: usize| -> Result<((f64, f64), (f64, f64))> {
        if lower {
            let lhs = ln_div(
                ln_mul(ln_prod(f, k, s, m + s)?, ln_prod(g, k, 0, l)?),
                ln_mul(ln_prod(f, k, 0, m)?, ln_prod(g, k, p, p + l)?),
            );
            let rhs = ln_div(
                ln_sub(ln_prod(g, k, m, p)?, ln_prod(f, k, m, p)?),
                ln_sub(ln_prod(g, k, l, s)?, ln_prod(f, k, l, s)?),
            );
            Ok((lhs, rhs))
        } else {
            let lhs = ln_div(
                ln_mul(ln_prod(f, k, l, m + s)?, ln_prod(g, k, 0, s)?),
                ln_mul(ln_prod(f, k, 0, p)?, ln_prod(g, k, m, p + l)?),
            );
            let rhs = ln_div(
                ln_sub(ln_prod(f, k, p, m)?, ln_prod(g, k, p, m)?),
                ln_sub(ln_prod(f, k, s, l)?, ln_prod(g, k, s, l)?),
            );
            Ok((lhs, rhs))
        }
    };
    let mut per_k = Vec::with_capacity(k + 1);
    let mut skipped = Vec::new();
    for i in 0..=k {
        let (lhs, rhs) = sides(i)?;
        if rhs.1 == 0.0 || !rhs.0.is_finite() {
            skipped.push(i);
            continue;
        }
        per_k.push((i, symmetric_relative(lhs, rhs)));
    }

    let big_f = |k: usize| -> Result<(f64, f64)> {
        Ok(ln_div(ln_prod(g, k, 0, m + alpha)?, ln_mul(ln_prod(f, k, 0, m)?, ln_prod(f, k, alpha, m + alpha)?)))
    };
    let big_g = |k: usize| -> Result<(f64, f64)> {
        if lower {
            Ok(ln_sub(ln_prod(g, k, m, p)?, ln_prod(f, k, m, p)?))
        } else {
            let (fp, gp) = (ln_prod(f, k, p, m)?, ln_prod(g, k, p, m)?);
            Ok(ln_div(ln_sub(fp, gp), ln_mul(fp, gp)))
        }
    };
    let len = k + alpha as usize + 1;
    let sample = |h: &dyn Fn(usize) -> Result<(f64, f64)>| -> Result<Vec<f64>> {
        (0..len).map(|i| h(i).map(|(ln, sign)| sign * ln.exp())).collect()
    };
    let fv = sample(&big_f)?;
    let gv = sample(&big_g)?;
    let functional = cross_residual(
        &GridFn { z0: 0.0, step: 1.0, values: fv },
        &GridFn { z0: 0.0, step: 1.0, values: gv },
        alpha,
    )
    .ok();

    let one = Complex64::new(1.0, 0.0);
    let mut rep = ResidualReport::new(ResidualForm::Ratio, per_k, one, one);
    rep.secondary = functional;
    rep.skipped = skipped;
    Ok(rep)
}

/// Which closed Gamma-form equation [`gamma_form_residual`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaFormKind {
    /// `m = p`: both sides vanish identically.
    Identity,
    /// `s = 2p`, `m < p`.
    DoubledLower,
    /// `s = 2p`, `m > p`.
    DoubledUpper,
    /// `H(z)·F(z+2α)` against `F(z)`, any `p < s`.
    Functional,
}

pub fn gamma_form_kind(c: &CommutantConfig) -> GammaFormKind {
    if c.m == c.p {
        GammaFormKind::Identity
    } else if c.s == 2 * c.p {
        if c.m < c.p {
            GammaFormKind::DoubledLower
        } else {
            GammaFormKind::DoubledUpper
        }
    } else {
        GammaFormKind::Functional
    }
}

/// `Γ((z+a)/2q)Γ((z+b)/2q) / (Γ((z+c)/2q)Γ((z+e)/2q))`.
fn gr(q: u32, num: [i64; 2], den: [i64; 2], z: f64) -> Result<f64> {
    let (ln, sign) = GammaRatio::new(&num, &den, 2 * q)?.ln_eval(z)?;
    Ok(sign * ln.exp())
}

/// The function `F` whose shift equation `H(z)F(z+2α) = c·F(z)` the
/// commutation condition reduces to.
fn functional_f(c: &CommutantConfig, z: f64) -> Result<f64> {
    let (p, s, n, d, m) = (c.p as i64, c.s as i64, c.n as i64, c.d as i64, c.m as i64);
    let (pu, su) = (c.p, c.s);
    let a = gr(pu, [2 * m, p + n], [0, 2 * m + p + n], z)?;
    let b = gr(su, [2 * m, 2 * p + s + d], [2 * p, 2 * m + s + d], z)?;
    let (zf, mf, pnf) = (z, 2.0 * m as f64, (p + n) as f64);
    Ok(if m < p {
        (zf + mf) / zf * (a - zf / (zf + pnf) * b)
    } else {
        (zf + mf) * ((zf + pnf) / zf * a - b)
    })
}

fn functional_h(c: &CommutantConfig, z: f64) -> f64 {
    let (p, s, n, d, m, l) = (c.p as f64, c.s as f64, c.n as f64, c.d as f64, c.m as f64, c.l as f64);
    let alpha = s - p;
    let lead = if c.m < c.p { z + 2.0 * alpha + p + n } else { z + p + n };
    lead * (z + 2.0 * m + s + d) / ((z + 2.0 * l + p + n) * (z + s + d))
}

fn gamma_sides(c: &CommutantConfig, kind: GammaFormKind, z: f64) -> Result<(f64, f64)> {
    let (p, s, n, d, m) = (c.p as i64, c.s as i64, c.n as i64, c.d as i64, c.m as i64);
    let alpha = s - p;
    let (pu, su) = (c.p, c.s);
    let (mf, pnf) = (2.0 * m as f64, (p + n) as f64);
    let mpn = (2 * m + p + n) as f64;
    match kind {
        GammaFormKind::Identity => Ok((0.0, 0.0)),
        GammaFormKind::DoubledLower => {
            let rp = gr(pu, [0, 2 * m + p + n], [2 * m, p + n], z)?;
            let lhs = z * (z + mpn) / ((z + mf) * (z + pnf))
                * rp
                * rp
                * gr(su, [2 * m + 2 * alpha, s + d], [0, 2 * m + 2 * alpha + s + d], z)?;
            let rhs = gr(su, [2 * p, 2 * m + s + d], [2 * m, 2 * p + s + d], z)? - z / (z + pnf) * rp;
            Ok((lhs, rhs))
        }
        GammaFormKind::DoubledUpper => {
            let lhs = (z + mpn) / (z + mf)
                * gr(pu, [0, 2 * m + p + n], [2 * m, p + n], z)?
                * gr(su, [2 * m + 2 * alpha, s + d], [0, 2 * m + 2 * alpha + s + d], z)?
                * gr(su, [2 * m, 2 * p + s + d], [2 * p, 2 * m + s + d], z)?;
            let rhs = (z + pnf) / z * gr(pu, [2 * m, p + n], [0, 2 * m + p + n], z)?
                - gr(su, [2 * m, 2 * p + s + d], [2 * p, 2 * m + s + d], z)?;
            Ok((lhs, rhs))
        }
        GammaFormKind::Functional => {
            let shifted = functional_f(c, z + 2.0 * alpha as f64)?;
            Ok((functional_h(c, z) * shifted, functional_f(c, z)?))
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Gamma-form residual at `z = 2k+2`, using the `s = 2p` forms when they apply
/// and the shift equation otherwise.
pub fn gamma_form_residual(c: &CommutantConfig, k: usize) -> Result<ResidualReport> {
    gamma_form_residual_as(c, k, gamma_form_kind(c))
}

/// The shift-equation form `H(z)F(z+2α) ≡ F(z)` regardless of `s/p`.
pub fn functional_equation_residual(c: &CommutantConfig, k: usize) -> Result<ResidualReport> {
    let kind = if c.m == c.p { GammaFormKind::Identity } else { GammaFormKind::Functional };
    gamma_form_residual_as(c, k, kind)
}

/// Per-`z` deviation `|q(z)/c − 1|` of `q = L/R` from its median `c`.
pub fn gamma_form_residual_as(c: &CommutantConfig, k: usize, kind: GammaFormKind) -> Result<ResidualReport> {
    c.require()?;
    let doubled = matches!(kind, GammaFormKind::DoubledLower | GammaFormKind::DoubledUpper);
    if doubled && c.s != 2 * c.p {
        return Err(Error::Precondition(format!("this Gamma form needs s = 2p, got p={}, s={}", c.p, c.s)));
    }
    if kind == GammaFormKind::Identity || c.m == c.p {
        let mut rep = ResidualReport::identity(ResidualForm::Gamma, k);
        rep.secondary = Some(1.0);
        return Ok(rep);
    }
    let mut ratios = Vec::with_capacity(k + 1);
    let mut skipped = Vec::new();
    for i in 0..=k {
        let z = 2.0 * i as f64 + 2.0;
        match gamma_sides(c, kind, z) {
            Ok((lhs, rhs)) if rhs != 0.0 && (lhs / rhs).is_finite() => ratios.push((i, lhs / rhs)),
            Ok(_) | Err(Error::Pole(_)) => skipped.push(i),
            Err(e) => return Err(e),
        }
    }
    if ratios.is_empty() {
        return Err(Error::Pole("every sample point was skipped".into()));
    }
    let cst = median(ratios.iter().map(|r| r.1).collect());
    let per_k = ratios.iter().map(|&(i, q)| (i, (q / cst - 1.0).abs())).collect();
    let mut rep = ResidualReport::new(ResidualForm::Gamma, per_k, Complex64::new(cst, 0.0), Complex64::new(1.0, 0.0));
    rep.secondary = Some(cst);
    rep.skipped = skipped;
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub m: u32,
    pub l: u32,
    pub feasible: bool,
    pub degenerate: bool,
    /// Both `2p | p+n` and `2s | s+d`.
    pub exceptional: bool,
    pub min_residual: f64,
    pub c1: Complex64,
    pub c2: Complex64,
    /// Product-form residual at the fitted constants.
    pub product_residual: f64,
    pub product_feasible: bool,
    pub per_k: Vec<f64>,
    pub error: Option<String>,
}

impl ScanRow {
    /// Feasible away from `(p, s)` with no structural excuse.
    pub fn unexpected(&self, p: u32, s: u32) -> bool {
        self.feasible && (self.m, self.l) != (p, s) && !self.degenerate && !self.exceptional
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub p: u32,
    pub s: u32,
    pub n: u32,
    pub d: u32,
    pub k: usize,
    pub tol: f64,
    pub m_max: u32,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn feasible_set(&self) -> Vec<(u32, u32)> {
        self.rows.iter().filter(|r| r.feasible).map(|r| (r.m, r.l)).collect()
    }

    /// Every cell has vanishing commutators.
    pub fn degenerate(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.degenerate)
    }

    pub fn unexpected(&self) -> Vec<(u32, u32)> {
        self.rows.iter().filter(|r| r.unexpected(self.p, self.s)).map(|r| (r.m, r.l)).collect()
    }

    /// Smallest residual among cells other than `(p, s)`.
    pub fn margin(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| (r.m, r.l) != (self.p, self.s) && r.error.is_none())
            .map(|r| r.min_residual)
            .min_by(f64::total_cmp)
    }
}

/// Fits constants for every `(m, m+s−p)` with `1 ≤ m ≤ m_max`.
///
/// Cells run in parallel with the `parallel` feature; rows come back in `m` order.
pub fn scan(p: u32, s: u32, n: u32, d: u32, k: usize, tol: f64, m_max: Option<u32>) -> Result<ScanTable> {
    if !(1 <= p && p < s && n >= 1 && d >= 1) {
        return Err(Error::Precondition(format!("scan needs 1 <= p < s and n, d >= 1; got p={p}, s={s}, n={n}, d={d}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance {tol} must be positive")));
    }
    let m_max = m_max.unwrap_or(2 * s);
    let top = CommutantConfig::new(p, s, n, d, m_max, m_max + s - p, k);
    let ing = Ingredients::new(p, s, n, d, Ingredients::reach(&top))?;
    #[cfg(feature = "parallel")]
    let cells = (1..=m_max).into_par_iter();
    #[cfg(not(feature = "parallel"))]
    let cells = 1..=m_max;
    let rows = cells
        .map(|m| scan_cell(&ing, CommutantConfig::new(p, s, n, d, m, m + s - p, k), tol))
        .collect();
    Ok(ScanTable { p, s, n, d, k, tol, m_max, rows })
}

fn scan_cell(ing: &Ingredients, c: CommutantConfig, tol: f64) -> ScanRow {
    let exceptional = divisibility_profile(&c).exceptional();
    let run = || -> Result<ScanRow> {
        let terms = ing.operator_terms(&c)?;
        let (c1, c2) = fit_pair(&terms);
        let rep = operator_report(&terms, c1, c2).with_tolerance(tol);
        let product = product_terms_with(ing, &c)?
            .iter()
            .map(|t| pair_residual(Complex64::new(t.lhs, 0.0), Complex64::new(t.rhs, 0.0), c1, c2))
            .fold(0.0, f64::max);
        Ok(ScanRow {
            m: c.m,
            l: c.l,
            feasible: rep.feasible,
            degenerate: rep.degenerate,
            exceptional,
            min_residual: rep.min_residual,
            c1,
            c2,
            product_residual: product,
            product_feasible: product < tol,
            per_k: rep.per_k.iter().map(|r| r.1).collect(),
            error: None,
        })
    };
    run().unwrap_or_else(|e| ScanRow {
        m: c.m,
        l: c.l,
        feasible: false,
        degenerate: false,
        exceptional,
        min_residual: f64::INFINITY,
        c1: Complex64::new(0.0, 0.0),
        c2: Complex64::new(0.0, 0.0),
        product_residual: f64::INFINITY,
        product_feasible: false,
        per_k: Vec::new(),
        error: Some(e.to_string()),
    })
}
