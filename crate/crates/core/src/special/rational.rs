//! Exact rational functions with `BigRational` coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense polynomial, ascending powers, no trailing zeros (the zero
/// polynomial is the empty vector).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly(Vec<BigRational>);

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// `z − r`.
    pub fn linear_root(r: &BigRational) -> Self {
        Self::new(vec![-r.clone(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.0.last()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly::new(self.0.iter().map(|a| a * c).collect())
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or_else(|| Error::Domain("division by the zero polynomial".into()))?;
        let lead = d.leading().expect("nonzero polynomial has a leading coefficient");
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return Ok((Poly(Vec::new()), self.clone()));
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / lead;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    rem[i + j] -= &c * dj;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => self.clone(),
        }
    }

    pub fn eval(&self, z: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * z + c)
    }

    pub fn eval_f64(&self, z: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
    }
}

fn fmt_coeff(c: &BigRational) -> String {
    if c.is_integer() {
        c.to_integer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            let unit = mag.is_one() && i > 0;
            if !unit {
                write!(f, "{}", fmt_coeff(&mag))?;
            }
            match i {
                0 => {}
                1 if unit => write!(f, "z")?,
                1 => write!(f, "*z")?,
                _ if unit => write!(f, "z^{i}")?,
                _ => write!(f, "*z^{i}")?,
            }
        }
        Ok(())
    }
}

/// A reduced quotient `N(z)/D(z)`: `gcd(N, D) = 1` and `D` monic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    numerator: Poly,
    denominator: Poly,
}

impl RationalFn {
    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn eval(&self, z: &BigRational) -> Option<BigRational> {
        let d = self.denominator.eval(z);
        (!d.is_zero()).then(|| self.numerator.eval(z) / d)
    }

    pub fn eval_f64(&self, z: f64) -> f64 {
        self.numerator.eval_f64(z) / self.denominator.eval_f64(z)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.degree() == Some(0) {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "({}) / ({})", self.numerator, self.denominator)
        }
    }
}

/// Canonical reduced form of `num/den`.
pub fn rationalfn_reduce(num: &Poly, den: &Poly) -> Result<RationalFn> {
    if den.is_zero() {
        return Err(Error::Domain("zero denominator".into()));
    }
    let g = num.gcd(den);
    let (n, _) = num.div_rem(&g)?;
    let (d, _) = den.div_rem(&g)?;
    let lead = d.leading().expect("denominator stays nonzero").recip();
    Ok(RationalFn { numerator: n.scale(&lead), denominator: d.scale(&lead) })
}

/// Convenience wrapper for integer coefficient lists.
pub fn rationalfn_reduce_ints(num: &[i64], den: &[i64]) -> Result<RationalFn> {
    rationalfn_reduce(&Poly::from_ints(num), &Poly::from_ints(den))
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents), accepted only within `rel_tol`.
pub fn rationalize(x: f64, max_den: u64, rel_tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x.abs();
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e18 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 as u64 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x.abs()).abs() <= rel_tol * x.abs() {
            let q = BigRational::new(BigInt::from(h1), BigInt::from(k1));
            return Some(if x < 0.0 { -q } else { q });
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}
