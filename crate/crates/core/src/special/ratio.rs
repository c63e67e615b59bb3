//! Formal quotients of `Γ((z+a)/(2δ))` factors and the divisibility criterion
//! for their rationality.

use serde::Serialize;

use super::gamma::{ln_gamma_diff, ln_gamma_signed};
use crate::error::{Error, Result};

/// One factor `Γ((z + offset)/denom)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GammaFactor {
    pub offset: i64,
    pub denom: u32,
}

impl GammaFactor {
    fn arg(&self, z: f64) -> f64 {
        (z + self.offset as f64) / self.denom as f64
    }

    /// Poles (as a numerator factor) sit at `z = start − denom·j`, `j ∈ ℕ`.
    pub fn singular_progression(&self) -> (i64, i64) {
        (-self.offset, self.denom as i64)
    }

    fn hits_singularity(&self, z: f64) -> bool {
        let x = self.arg(z);
        x <= 0.0 && x == x.round()
    }
}

/// `Π Γ((z+aᵢ)/2δ) / Π Γ((z+cⱼ)/2δ)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaRatio {
    numerator: Vec<GammaFactor>,
    denominator: Vec<GammaFactor>,
    denom: u32,
}

impl GammaRatio {
    pub fn new(num_offsets: &[i64], den_offsets: &[i64], denom: u32) -> Result<Self> {
        if denom < 2 || !denom.is_multiple_of(2) {
            return Err(Error::Precondition(format!("denominator {denom} must be even and at least 2")));
        }
        let wrap = |v: &[i64]| v.iter().map(|&offset| GammaFactor { offset, denom }).collect();
        Ok(Self { numerator: wrap(num_offsets), denominator: wrap(den_offsets), denom })
    }

    /// The 2/2 ratio with offsets `(a, b; c, d)` and `2δ = 2·delta`.
    pub fn two_by_two(delta: u32, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(&[a, b], &[c, d], 2 * delta)
    }

    pub fn numerator(&self) -> &[GammaFactor] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[GammaFactor] {
        &self.denominator
    }

    /// The shared denominator `2δ`.
    pub fn denom(&self) -> u32 {
        self.denom
    }

    /// `λ = Σ numerator offsets − Σ denominator offsets`.
    pub fn lambda(&self) -> i64 {
        self.numerator.iter().map(|f| f.offset).sum::<i64>() - self.denominator.iter().map(|f| f.offset).sum::<i64>()
    }

    /// Arithmetic progressions `z = start − step·ℕ` carrying the poles of the
    /// numerator factors (candidate poles of the ratio).
    pub fn pole_progressions(&self) -> Vec<(i64, i64)> {
        self.numerator.iter().map(GammaFactor::singular_progression).collect()
    }

    /// Progressions carrying the poles of the denominator factors (candidate zeros).
    pub fn zero_progressions(&self) -> Vec<(i64, i64)> {
        self.denominator.iter().map(GammaFactor::singular_progression).collect()
    }

    /// The first factor whose argument is a non-positive integer at `z`.
    pub fn collision(&self, z: f64) -> Option<(&'static str, GammaFactor)> {
        let num = self.numerator.iter().find(|f| f.hits_singularity(z)).map(|f| ("numerator", *f));
        num.or_else(|| self.denominator.iter().find(|f| f.hits_singularity(z)).map(|f| ("denominator", *f)))
    }

    /// `(ln|H(z)|, sign H(z))`.
    pub fn ln_eval(&self, z: f64) -> Result<(f64, f64)> {
        if let Some((side, f)) = self.collision(z) {
            return Err(Error::Pole(format!(
                "{side} factor Gamma((z{:+})/{}) is singular at z = {z}",
                f.offset, f.denom
            )));
        }
        let mut num: Vec<f64> = self.numerator.iter().map(|f| f.arg(z)).collect();
        let mut den: Vec<f64> = self.denominator.iter().map(|f| f.arg(z)).collect();
        // Pair positive arguments in sorted order so balanced large factors cancel analytically.
        num.sort_by(f64::total_cmp);
        den.sort_by(f64::total_cmp);
        let pos_num: Vec<f64> = num.iter().copied().filter(|&x| x > 0.0).collect();
        let pos_den: Vec<f64> = den.iter().copied().filter(|&x| x > 0.0).collect();
        let paired = pos_num.len().min(pos_den.len());
        let mut ln = 0.0;
        let mut sign = 1.0;
        for i in 0..paired {
            ln += ln_gamma_diff(pos_num[pos_num.len() - 1 - i], pos_den[pos_den.len() - 1 - i])?;
        }
        let rest_num = pos_num[..pos_num.len() - paired].iter().chain(num.iter().filter(|&&x| x <= 0.0));
        for &x in rest_num {
            let (l, s) = ln_gamma_signed(x)?;
            ln += l;
            sign *= s;
        }
        let rest_den = pos_den[..pos_den.len() - paired].iter().chain(den.iter().filter(|&&x| x <= 0.0));
        for &x in rest_den {
            let (l, s) = ln_gamma_signed(x)?;
            ln -= l;
            sign *= s;
        }
        Ok((ln, sign))
    }
}

/// `H(z)` evaluated in log space.
pub fn gamma_ratio_eval(ratio: &GammaRatio, z: f64) -> Result<f64> {
    let (ln, sign) = ratio.ln_eval(z)?;
    Ok(sign * ln.exp())
}

/// Divisibility test: a 2/2 ratio is rational iff `2δ | λ` and `2δ | (a−c)`
/// or `2δ | (a−d)`. Symmetric in `a↔b` and in `c↔d`.
pub fn is_rational_criterion(ratio: &GammaRatio) -> Result<bool> {
    let (num, den) = (ratio.numerator(), ratio.denominator());
    if num.len() != 2 || den.len() != 2 {
        return Err(Error::Precondition(format!(
            "criterion needs 2 numerator and 2 denominator factors, got {}/{}",
            num.len(),
            den.len()
        )));
    }
    let m = ratio.denom() as i64;
    let divides = |x: i64| x.rem_euclid(m) == 0;
    let (a, c, d) = (num[0].offset, den[0].offset, den[1].offset);
    Ok(divides(ratio.lambda()) && (divides(a - c) || divides(a - d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn spec_eval_examples() {
        let r = GammaRatio::new(&[2], &[0], 2).unwrap();
        assert!(rel(gamma_ratio_eval(&r, 4.0).unwrap(), 2.0) < 1e-15);
        let r = GammaRatio::new(&[4], &[0], 4).unwrap();
        assert!(rel(gamma_ratio_eval(&r, 8.0).unwrap(), 2.0) < 1e-15);
        let r = GammaRatio::new(&[1], &[0], 2).unwrap();
        let want = std::f64::consts::PI.sqrt() / 2.0;
        assert!(rel(gamma_ratio_eval(&r, 2.0).unwrap(), want) < 1e-15);
    }

    #[test]
    fn negative_arguments_carry_sign() {
        // Γ((z+2)/2)/Γ(z/2) = z/2 holds off the poles, including z < 0.
        let r = GammaRatio::new(&[2], &[0], 2).unwrap();
        for z in [-7.3, -2.5, -0.25, 0.75, 13.1] {
            assert!(rel(gamma_ratio_eval(&r, z).unwrap(), z / 2.0) < 1e-13, "z={z}");
        }
    }

    #[test]
    fn pole_collision_names_factor() {
        let r = GammaRatio::new(&[2], &[0], 2).unwrap();
        let e = gamma_ratio_eval(&r, -4.0).unwrap_err();
        assert!(matches!(e, Error::Pole(ref m) if m.contains("numerator")));
        let e = gamma_ratio_eval(&r, 0.0).unwrap_err();
        assert!(matches!(e, Error::Pole(ref m) if m.contains("denominator")));
    }

    #[test]
    fn large_balanced_arguments() {
        // Γ((z+2)/2)Γ((z+3)/2) / (Γ(z/2)Γ((z+5)/2)) = z/(z+3)
        let r = GammaRatio::new(&[2, 3], &[0, 5], 2).unwrap();
        for z in [100.5, 4567.0, 19_999.0] {
            assert!(rel(gamma_ratio_eval(&r, z).unwrap(), z / (z + 3.0)) < 1e-13, "z={z}");
        }
    }

    #[test]
    fn criterion_examples() {
        assert!(is_rational_criterion(&GammaRatio::two_by_two(1, 2, 0, 0, 0).unwrap()).unwrap());
        assert!(!is_rational_criterion(&GammaRatio::two_by_two(1, 1, 0, 0, 0).unwrap()).unwrap());
        assert!(is_rational_criterion(&GammaRatio::two_by_two(2, 4, 0, 0, 0).unwrap()).unwrap());
        assert!(is_rational_criterion(&GammaRatio::new(&[1], &[0], 2).unwrap()).is_err());
    }

    #[test]
    fn criterion_symmetric() {
        for delta in 1..=3 {
            for a in 0..8 {
                for b in 0..8 {
                    for c in 0..8 {
                        for d in 0..8 {
                            let base = is_rational_criterion(&GammaRatio::two_by_two(delta, a, b, c, d).unwrap());
                            let swapped = is_rational_criterion(&GammaRatio::two_by_two(delta, b, a, d, c).unwrap());
                            assert_eq!(base.unwrap(), swapped.unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn progressions() {
        let r = GammaRatio::two_by_two(2, 3, 1, 0, 2).unwrap();
        assert_eq!(r.pole_progressions(), vec![(-3, 4), (-1, 4)]);
        assert_eq!(r.zero_progressions(), vec![(0, 4), (-2, 4)]);
        assert_eq!(r.lambda(), 2);
    }
}
