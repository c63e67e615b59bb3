//! Symbol and number grammar.
//!
//! ```text
//! symbol  := "e" <p> ":" radial
//! radial  := "r^" <exp> | "sum:" term (("+" | "-") term)*
//! term    := [<coef> "*"] "r^" <exp> | <coef>
//! complex := <re> | <re> ("+" | "-") <im> "i" | <im> "i"
//! ```

use num_complex::Complex64;
use qhtoeplitz::mellin::RadialSymbol;
use qhtoeplitz::operators::QuasiSymbol;

pub type ParseResult<T> = Result<T, String>;

pub fn parse_symbol(s: &str) -> ParseResult<QuasiSymbol> {
    let s = s.trim();
    let rest = s.strip_prefix('e').ok_or_else(|| format!("symbol {s:?} must start with e<p>:"))?;
    let (p, radial) = rest.split_once(':').ok_or_else(|| format!("symbol {s:?} is missing ':' after the degree"))?;
    let p: u32 = p.parse().map_err(|_| format!("degree {p:?} is not a non-negative integer"))?;
    Ok(QuasiSymbol::new(p, parse_radial(radial)?))
}

pub fn parse_radial(s: &str) -> ParseResult<RadialSymbol> {
    let s = s.trim();
    if let Some(body) = s.strip_prefix("sum:") {
        let terms = split_terms(body)?.iter().map(|t| parse_term(t)).collect::<ParseResult<Vec<_>>>()?;
        return RadialSymbol::sum(terms).map_err(|e| e.to_string());
    }
    let (c, e) = parse_term(s)?;
    if c != 1.0 || s.contains('*') {
        return Err(format!("{s:?}: scaled terms need the sum: form"));
    }
    if !(e > -1.0) {
        return Err(format!("exponent {e} is not integrable on [0,1); need > -1"));
    }
    if e.fract() == 0.0 && e <= u32::MAX as f64 {
        Ok(RadialSymbol::monomial(e as u32))
    } else {
        RadialSymbol::sum(vec![(1.0, e)]).map_err(|e| e.to_string())
    }
}

/// Splits on `+`/`-` that separate terms, keeping the sign with the term.
fn split_terms(body: &str) -> ParseResult<Vec<String>> {
    let chars: Vec<char> = body.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err("empty sum".into());
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, &ch) in chars.iter().enumerate() {
        let prev = if i == 0 { None } else { Some(chars[i - 1]) };
        let separates = (ch == '+' || ch == '-') && !matches!(prev, None | Some('e' | 'E' | '^' | '*' | '+' | '-'));
        if separates {
            terms.push(std::mem::take(&mut cur));
            if ch == '-' {
                cur.push('-');
            }
        } else {
            cur.push(ch);
        }
    }
    terms.push(cur);
    if terms.iter().any(|t| t.is_empty() || t == "-") {
        return Err(format!("empty term in {body:?}"));
    }
    Ok(terms)
}

fn parse_term(t: &str) -> ParseResult<(f64, f64)> {
    let num = |x: &str| x.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("{x:?} is not a finite number"));
    let (coef, power) = match t.split_once('*') {
        Some((c, r)) => (num(c)?, r),
        None if t.contains("r^") => {
            let (sign, r) = t.strip_prefix('-').map_or((1.0, t), |r| (-1.0, r));
            (sign, r)
        }
        None => return Ok((num(t)?, 0.0)),
    };
    let e = power.strip_prefix("r^").ok_or_else(|| format!("term {t:?} must have the form c*r^n"))?;
    Ok((coef, num(e)?))
}

pub fn parse_complex(s: &str) -> ParseResult<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("{s:?} is not a number of the form x, x+yi or yi");
    let finite = |v: f64| v.is_finite().then_some(v);
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().and_then(finite).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    // Last sign that is not part of an exponent splits re from im.
    let split = body
        .char_indices()
        .filter(|&(i, c)| (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .next_back();
    let im_of = |x: &str| match x {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => x.parse::<f64>().ok().and_then(finite),
    };
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().ok().and_then(finite).ok_or_else(bad)?;
            Ok(Complex64::new(re, im_of(&body[i..]).ok_or_else(bad)?))
        }
        None => Ok(Complex64::new(0.0, im_of(body).ok_or_else(bad)?)),
    }
}

pub fn parse_complex_list(s: &str) -> ParseResult<Vec<Complex64>> {
    s.split(',').map(parse_complex).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qhtoeplitz::mellin::{mellin_eval, MellinDomainPoint};

    fn at(r: &RadialSymbol, z: f64) -> f64 {
        mellin_eval(r, MellinDomainPoint::real(z).unwrap(), 1e-12).unwrap().re
    }

    #[test]
    fn radial_forms() {
        assert!(matches!(parse_radial("r^3").unwrap(), RadialSymbol::Monomial { exponent: 3 }));
        let s = parse_radial("sum:1.0*r^2+0.5*r^4").unwrap();
        assert!((at(&s, 4.0) - (1.0 / 6.0 + 0.5 / 8.0)).abs() < 1e-16);
        let s = parse_radial("sum:2 - r^1 + -1e-1*r^0.5").unwrap();
        assert!((at(&s, 3.0) - (2.0 / 3.0 - 0.25 - 0.1 / 3.5)).abs() < 1e-15);
        assert!((at(&parse_radial("r^0.5").unwrap(), 2.0) - 0.4).abs() < 1e-16);
    }

    #[test]
    fn radial_rejections() {
        for bad in ["r^-5", "r^-1", "", "r", "x^2", "2*r^2", "sum:", "sum:1*r^2+", "sum:1*r^-2", "r^nan", "sum:1*q^2"] {
            assert!(parse_radial(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn symbols() {
        let s = parse_symbol("e2:r^3").unwrap();
        assert_eq!(s.degree, 2);
        assert!(parse_symbol("e0:sum:1*r^2+3*r^4").is_ok());
        for bad in ["2:r^3", "e-1:r^3", "e2r^3", "ex:r^2", "e1:"] {
            assert!(parse_symbol(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn complex_numbers() {
        assert_eq!(parse_complex("4").unwrap(), Complex64::new(4.0, 0.0));
        assert_eq!(parse_complex("2.5+1.5i").unwrap(), Complex64::new(2.5, 1.5));
        assert_eq!(parse_complex("3-i").unwrap(), Complex64::new(3.0, -1.0));
        assert_eq!(parse_complex("-2i").unwrap(), Complex64::new(0.0, -2.0));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), Complex64::new(1e-3, 20.0));
        for bad in ["", "i2", "3+", "1+2j", "inf"] {
            assert!(parse_complex(bad).is_err(), "{bad:?}");
        }
        assert_eq!(parse_complex_list("1,0,2i").unwrap().len(), 3);
    }
}
