//! Rational interpolation of Gamma ratios from point samples.
//!
//! This is an independent check on the divisibility criterion: it never
//! looks at offsets, only at values of `gamma_ratio_eval`.
//!
//! Pipeline:
//! 1. Sample `H` on a window of the scaled variable `w = z/2δ` that extends
//!    well into the negative axis, where a non-rational ratio has more poles
//!    and zeros than any low-degree model can absorb.
//! 2. Fit `P/Q` (Chebyshev basis, linearized least squares with
//!    Sanathanan–Koerner reweighting) for increasing degree.
//! 3. Snap the zeros and poles of the fit to nearby small-denominator
//!    rationals, fix the leading constant, and validate the resulting exact
//!    candidate on held-out points in log space.
//!
//! Working from zeros and poles in the final step sidesteps the loss of
//! relative accuracy that coefficient-form rationals suffer where `|H|` spans
//! many orders of magnitude across the window.

use nalgebra::{DMatrix, Schur};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::rational::{rationalfn_reduce, rationalize, Poly, RationalFn};
use super::ratio::GammaRatio;
use crate::error::{Error, Result};

/// Held-out relative tolerance for accepting a candidate.
pub const HELD_OUT_TOL: f64 = 1e-8;

const WINDOW: (f64, f64) = (-16.0, 8.0);
const POLE_CLEARANCE: f64 = 0.2;
const HELD_OUT_PHASE: f64 = 0.137;
const QUICK_REJECT: f64 = 0.05;
const FIT_GATE: f64 = 0.1;
const SNAP_DEN: i64 = 12;
const SNAP_TOL: f64 = 2e-2;
/// A double root splits into a conjugate pair with imaginary part of order
/// the square root of the fit error, so this is looser than `SNAP_TOL`.
const SNAP_IM_TOL: f64 = 0.1;
const MERGE_DIST: f64 = 0.15;

struct Samples {
    z: Vec<f64>,
    ln: Vec<f64>,
    sign: Vec<f64>,
}

fn sample_points(two_delta: f64, n: usize, phase: f64) -> Vec<f64> {
    let (lo, hi) = (WINDOW.0 * two_delta, WINDOW.1 * two_delta);
    (0..n)
        .map(|i| {
            let z = lo + (hi - lo) * i as f64 / (n - 1) as f64 + phase;
            let r = z.round();
            // Gamma singularities of integer-offset factors sit on integers.
            if (z - r).abs() < POLE_CLEARANCE {
                r + if z >= r { 0.3 } else { -0.3 }
            } else {
                z
            }
        })
        .collect()
}

fn sample(ratio: &GammaRatio, z: Vec<f64>) -> Samples {
    let mut out = Samples { z: Vec::new(), ln: Vec::new(), sign: Vec::new() };
    for zi in z {
        if let Ok((l, s)) = ratio.ln_eval(zi) {
            out.z.push(zi);
            out.ln.push(l);
            out.sign.push(s);
        }
    }
    out
}

fn chebyshev_row(x: f64, deg: usize, row: &mut [f64]) {
    row[0] = 1.0;
    if deg >= 1 {
        row[1] = x;
    }
    for j in 2..=deg {
        row[j] = 2.0 * x * row[j - 1] - row[j - 2];
    }
}

struct Fit {
    p: Vec<f64>,
    q: Vec<f64>,
    residual: f64,
}

/// Linearized fit `P(x) − f·Q(x) ≈ 0` reweighted by the previous `Q`.
fn fit(x: &[f64], f: &[f64], deg: usize, iters: usize) -> Option<Fit> {
    let n = x.len();
    let m = deg + 1;
    let mut basis = DMatrix::<f64>::zeros(n, m);
    let mut row = vec![0.0; m];
    for (i, &xi) in x.iter().enumerate() {
        chebyshev_row(xi, deg, &mut row);
        for j in 0..m {
            basis[(i, j)] = row[j];
        }
    }
    let mut weight = vec![1.0; n];
    let mut best: Option<(Vec<f64>, Vec<f64>)> = None;
    for _ in 0..iters {
        let mut a = DMatrix::<f64>::zeros(n, 2 * m);
        for i in 0..n {
            let mut norm = 0.0;
            for j in 0..m {
                let u = basis[(i, j)] / (f[i] * weight[i]);
                let v = -basis[(i, j)] / weight[i];
                a[(i, j)] = u;
                a[(i, m + j)] = v;
                norm += u * u + v * v;
            }
            let norm = norm.sqrt();
            if !norm.is_finite() || norm == 0.0 {
                return best.map(|(p, q)| finish(&basis, f, p, q));
            }
            for j in 0..2 * m {
                a[(i, j)] /= norm;
            }
        }
        let svd = a.svd(false, true);
        let vt = svd.v_t?;
        let k = (0..svd.singular_values.len())
            .min_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]))?;
        let v: Vec<f64> = vt.row(k).iter().copied().collect();
        let (p, q) = (v[..m].to_vec(), v[m..].to_vec());
        let qv: Vec<f64> = (0..n).map(|i| (0..m).map(|j| basis[(i, j)] * q[j]).sum()).collect();
        let scale = qv.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        best = Some((p, q));
        if scale == 0.0 || qv.iter().any(|v| (v / scale).abs() < 1e-12) {
            break;
        }
        weight = qv.iter().map(|v| v / scale).collect();
    }
    best.map(|(p, q)| finish(&basis, f, p, q))
}

fn finish(basis: &DMatrix<f64>, f: &[f64], p: Vec<f64>, q: Vec<f64>) -> Fit {
    let m = p.len();
    let mut residual = 0.0f64;
    for (i, fi) in f.iter().enumerate() {
        let pv: f64 = (0..m).map(|j| basis[(i, j)] * p[j]).sum();
        let qv: f64 = (0..m).map(|j| basis[(i, j)] * q[j]).sum();
        let r = ((pv / qv - fi) / fi).abs();
        residual = if r.is_nan() { f64::INFINITY } else { residual.max(r) };
    }
    Fit { p, q, residual }
}

/// Roots of a Chebyshev series inside the normalized interval's neighbourhood,
/// via eigenvalues of the colleague matrix.
fn chebyshev_roots(c: &[f64]) -> Option<Vec<(f64, f64)>> {
    let cmax = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut len = c.len();
    while len > 1 && c[len - 1].abs() < 1e-10 * cmax {
        len -= 1;
    }
    let deg = len - 1;
    let roots: Vec<(f64, f64)> = match deg {
        0 => Vec::new(),
        1 => vec![(-c[0] / c[1], 0.0)],
        _ => {
            let mut m = DMatrix::<f64>::zeros(deg, deg);
            m[(0, 1)] = 1.0;
            for i in 1..deg - 1 {
                m[(i, i - 1)] = 0.5;
                m[(i, i + 1)] = 0.5;
            }
            m[(deg - 1, deg - 2)] += 0.5;
            for j in 0..deg {
                m[(deg - 1, j)] -= 0.5 * c[j] / c[deg];
            }
            let schur = Schur::try_new(m, 1e-15, 10_000)?;
            schur.complex_eigenvalues().iter().map(|e| (e.re, e.im)).collect()
        }
    };
    // Roots far outside the sampled interval come from numerically vanishing
    // leading coefficients, not from the function.
    Some(roots.into_iter().filter(|&(re, im)| re.hypot(im) < 3.0).collect())
}

/// Nearest fraction with denominator ≤ `SNAP_DEN`, if within `SNAP_TOL`.
fn snap(re: f64, im: f64) -> Option<(i64, i64)> {
    if im.abs() > SNAP_IM_TOL * re.abs().max(1.0) {
        return None;
    }
    let mut best: Option<(f64, i64, i64)> = None;
    for q in 1..=SNAP_DEN {
        let p = (re * q as f64).round();
        let err = (re - p / q as f64).abs();
        if err <= SNAP_TOL && best.is_none_or(|(e, _, _)| err < e - 1e-15) {
            best = Some((err, p as i64, q));
        }
    }
    best.map(|(_, p, q)| (p, q))
}

/// Snaps roots given in `w`. A root that does not snap on its own is merged
/// with its nearest unsnapped neighbour when their mean snaps (a split double
/// root); anything left over is dropped and left to the held-out check.
fn snap_roots(roots: Vec<(f64, f64)>) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut loose = Vec::new();
    for (re, im) in roots {
        match snap(re, im) {
            Some(r) => out.push(r),
            None => loose.push((re, im)),
        }
    }
    while let Some((re, im)) = loose.pop() {
        let nearest = loose
            .iter()
            .enumerate()
            .map(|(i, &(r2, i2))| (i, (re - r2).hypot(im - i2)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((i, dist)) = nearest {
            let (r2, i2) = loose[i];
            if dist <= MERGE_DIST * re.abs().max(1.0) {
                if let Some(r) = snap(0.5 * (re + r2), 0.5 * (im + i2)) {
                    loose.swap_remove(i);
                    out.push(r);
                    out.push(r);
                }
            }
        }
    }
    out
}

struct Candidate {
    /// Zeros and poles in `z`, as exact fractions `(p, q)`.
    zeros: Vec<(i64, i64)>,
    poles: Vec<(i64, i64)>,
}

impl Candidate {
    fn ln_shape(&self, z: f64) -> (f64, f64) {
        let mut ln = 0.0;
        let mut sign = 1.0;
        for &(p, q) in &self.zeros {
            let t = z - p as f64 / q as f64;
            ln += t.abs().ln();
            sign *= t.signum();
        }
        for &(p, q) in &self.poles {
            let t = z - p as f64 / q as f64;
            ln -= t.abs().ln();
            sign *= t.signum();
        }
        (ln, sign)
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

fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Tries to identify `ratio` as an exact rational function of `z`.
///
/// Returns `Ok(None)` when no candidate of numerator/denominator degree
/// `≤ max_degree` reproduces `2·sample_count` held-out values to relative
/// error below [`HELD_OUT_TOL`].
pub fn rational_detect_oracle(ratio: &GammaRatio, max_degree: usize, sample_count: usize) -> Result<Option<RationalFn>> {
    if sample_count < 2 * max_degree + 3 {
        return Err(Error::Precondition(format!(
            "sample_count {sample_count} must be at least 2*max_degree+3 = {}",
            2 * max_degree + 3
        )));
    }
    let two_delta = ratio.denom() as f64;
    let fit_set = sample(ratio, sample_points(two_delta, sample_count, 0.0));
    if fit_set.z.len() < 2 * max_degree + 3 {
        return Err(Error::Sampling(format!(
            "only {} of {sample_count} sample points avoid the poles",
            fit_set.z.len()
        )));
    }
    let held = sample(ratio, sample_points(two_delta, 2 * sample_count, HELD_OUT_PHASE));
    if held.z.is_empty() {
        return Err(Error::Sampling("every held-out point collides with a pole".into()));
    }

    let shift = fit_set.ln.iter().sum::<f64>() / fit_set.ln.len() as f64;
    let f: Vec<f64> = fit_set.ln.iter().zip(&fit_set.sign).map(|(l, s)| s * (l - shift).exp()).collect();
    let w: Vec<f64> = fit_set.z.iter().map(|z| z / two_delta).collect();
    let (lo, hi) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let x: Vec<f64> = w.iter().map(|wi| (2.0 * wi - lo - hi) / (hi - lo)).collect();
    let to_w = |t: f64| t * (hi - lo) / 2.0 + (hi + lo) / 2.0;

    match fit(&x, &f, max_degree, 2) {
        Some(full) if full.residual <= QUICK_REJECT => {}
        _ => return Ok(None),
    }

    for deg in 0..=max_degree {
        let Some(model) = fit(&x, &f, deg, 6) else { continue };
        if model.residual > FIT_GATE {
            continue;
        }
        let (Some(zr), Some(pr)) = (chebyshev_roots(&model.p), chebyshev_roots(&model.q)) else { continue };
        let snap_all = |roots: Vec<(f64, f64)>| snap_roots(roots.into_iter().map(|(re, im)| (to_w(re), im * (hi - lo) / 2.0)).collect());
        let (mut zeros_w, mut poles_w) = (snap_all(zr), snap_all(pr));
        // Cancel common zero/pole pairs.
        zeros_w.retain(|r| match poles_w.iter().position(|p| p.0 * r.1 == r.0 * p.1) {
            Some(i) => {
                poles_w.remove(i);
                false
            }
            None => true,
        });
        // w − p/q ↦ z − 2δ·p/q
        let scale_root = |(p, q): (i64, i64)| (p * ratio.denom() as i64, q);
        let cand = Candidate {
            zeros: zeros_w.into_iter().map(scale_root).collect(),
            poles: poles_w.into_iter().map(scale_root).collect(),
        };
        let shapes: Vec<(f64, f64)> = fit_set.z.iter().map(|&z| cand.ln_shape(z)).collect();
        let ln_c = median(fit_set.ln.iter().zip(&shapes).map(|(l, s)| l - s.0).collect());
        let sign_c = median(fit_set.sign.iter().zip(&shapes).map(|(a, s)| a * s.1).collect()).signum();
        let Some(constant) = rationalize(sign_c * ln_c.exp(), 1 << 52, 1e-10) else { continue };
        let ln_k = constant.to_f64().map(|k| k.abs().ln()).unwrap_or(f64::NAN);
        let ok = held.z.iter().zip(held.ln.iter().zip(&held.sign)).all(|(&z, (&l, &s))| {
            let (ls, ss) = cand.ln_shape(z);
            (ls + ln_k - l).exp_m1().abs() < HELD_OUT_TOL && ss * sign_c == s
        });
        if !ok || constant.is_zero() {
            continue;
        }
        let num = cand.zeros.iter().fold(Poly::constant(constant), |acc, &(p, q)| acc.mul(&Poly::linear_root(&frac(p, q))));
        let den = cand.poles.iter().fold(Poly::one(), |acc, &(p, q)| acc.mul(&Poly::linear_root(&frac(p, q))));
        return rationalfn_reduce(&num, &den).map(Some);
    }
    Ok(None)
}
