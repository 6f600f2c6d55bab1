//! Precision context, error types, and scalar q-machinery.
//!
//! Everything downstream works relative to a [`PrecisionContext`]: an exact
//! rational base `q` in (0,1), a requested decimal precision, and an
//! acceptance tolerance. Working precision adds guard digits on top of the
//! request; individual algorithms raise it further when they detect
//! cancellation.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use std::fmt;

/// log2(10), used to convert decimal digits to mantissa bits.
pub const LOG2_10: f64 = 3.321928094887362;

/// Guard digits added on top of the requested precision for all
/// intermediate work.
pub const GUARD_DIGITS: u32 = 15;

#[derive(Debug, Clone, PartialEq)]
pub enum QError {
    /// Input outside the domain of the operation (bad q, s in a half-plane
    /// where a series diverges, non-positive precision, ...).
    Domain(String),
    /// Evaluation landed on (or numerically indistinguishable from) a pole.
    Pole(String),
    /// A zero table or series truncation cannot cover the request.
    Coverage(String),
    /// A root search failed to certify its result.
    Localization(String),
}

impl fmt::Display for QError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QError::Domain(m) => write!(f, "domain error: {m}"),
            QError::Pole(m) => write!(f, "pole error: {m}"),
            QError::Coverage(m) => write!(f, "coverage error: {m}"),
            QError::Localization(m) => write!(f, "localization error: {m}"),
        }
    }
}

impl std::error::Error for QError {}

pub type QResult<T> = Result<T, QError>;

/// Convert a decimal-digit request to mantissa bits, with headroom.
pub fn bits_for(digits: u32) -> u32 {
    ((digits as f64 + GUARD_DIGITS as f64) * LOG2_10).ceil() as u32 + 32
}

/// Shared evaluation parameters: exact `q`, requested digits, tolerance.
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    q: Rational,
    digits: u32,
    /// Acceptance tolerance as a decimal exponent: tolerance = 10^(-tol_digits).
    tol_digits: u32,
}

impl PrecisionContext {
    /// `q` must lie strictly inside (0,1); `digits` must be at least 20.
    pub fn new(q: Rational, digits: u32) -> QResult<Self> {
        if q <= 0u32 || q >= 1u32 {
            return Err(QError::Domain(format!(
                "q must satisfy 0 < q < 1, got {q}"
            )));
        }
        if digits < 20 {
            return Err(QError::Domain(format!(
                "digits must be at least 20, got {digits}"
            )));
        }
        let tol_digits = digits.saturating_sub(10).max(10);
        Ok(Self { q, digits, tol_digits })
    }

    /// Override the acceptance tolerance (given as 10^(-tol_digits)).
    pub fn with_tol_digits(mut self, tol_digits: u32) -> Self {
        self.tol_digits = tol_digits;
        self
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn tol_digits(&self) -> u32 {
        self.tol_digits
    }

    /// Default working precision in bits.
    pub fn prec(&self) -> u32 {
        bits_for(self.digits)
    }

    /// `q` as a float at the given precision.
    pub fn q_float(&self, prec: u32) -> Float {
        Float::with_val(prec, &self.q)
    }

    /// Acceptance tolerance as a float at working precision.
    pub fn tol(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, 10u32).pow(-(self.tol_digits as i32))
    }

    /// decimal digits of log10(1/q); controls how fast q-powers decay.
    pub fn log10_inv_q(&self) -> f64 {
        let qf = self.q_float(64).to_f64();
        -qf.log10()
    }
}

/// 10^(-d) at precision `prec`.
pub fn pow10_neg(prec: u32, d: u32) -> Float {
    Float::with_val(prec, 10u32).pow(-(d as i32))
}

// ---------------------------------------------------------------------------
// Exact (rational) q-machinery
// ---------------------------------------------------------------------------

/// [n]_q = (1-q^n)/(1-q), exactly.
pub fn q_bracket_exact(n: u32, q: &Rational) -> Rational {
    // 1 + q + ... + q^{n-1}
    let mut acc = Rational::new();
    let mut p = Rational::from(1u32);
    for _ in 0..n {
        acc += &p;
        p *= q;
    }
    acc
}

/// [n]_q! = [1][2]...[n], exactly.
pub fn q_factorial_exact(n: u32, q: &Rational) -> Rational {
    let mut acc = Rational::from(1u32);
    for m in 1..=n {
        acc *= q_bracket_exact(m, q);
    }
    acc
}

/// Gaussian binomial [n choose k]_q, exactly (Pascal recursion).
pub fn q_binomial_exact(n: u32, k: u32, q: &Rational) -> Rational {
    if k > n {
        return Rational::new();
    }
    let k = k.min(n - k);
    // row-by-row Pascal: [m choose j]_q = [m-1 choose j-1]_q + q^j [m-1 choose j]_q
    let mut row: Vec<Rational> = vec![Rational::from(1u32)];
    for m in 1..=n {
        let width = (m.min(k) + 1) as usize;
        let mut next: Vec<Rational> = Vec::with_capacity(width);
        for j in 0..width as u32 {
            let mut v = Rational::new();
            if j > 0 {
                v += &row[(j - 1) as usize];
            }
            if (j as usize) < row.len() {
                let qj = Rational::from(q.clone()).pow(j);
                v += qj * &row[j as usize];
            }
            next.push(v);
        }
        row = next;
    }
    row[k as usize].clone()
}

/// (a;q)_n = prod_{j=0}^{n-1} (1 - a q^j), exactly.
pub fn q_pochhammer_exact(a: &Rational, n: u32, q: &Rational) -> Rational {
    let mut acc = Rational::from(1u32);
    let mut aq = a.clone();
    for _ in 0..n {
        let f = Rational::from(1u32) - &aq;
        acc *= f;
        aq *= q;
    }
    acc
}

/// q^e for integer e (e may be negative), exactly.
pub fn q_intpow(q: &Rational, e: i64) -> Rational {
    let mut r = Rational::from(q.clone()).pow(e.unsigned_abs() as u32);
    if e < 0 {
        r.recip_mut();
    }
    r
}

// ---------------------------------------------------------------------------
// Float q-machinery
// ---------------------------------------------------------------------------

/// [n]_q at float precision of `q`.
pub fn q_bracket_f(n: u32, q: &Float) -> Float {
    let p = q.prec();
    let qn = Float::with_val(p, q.pow(n));
    let num = Float::with_val(p, 1u32 - qn);
    let den = Float::with_val(p, 1u32 - q);
    num / den
}

/// [n]_q! at float precision of `q`.
pub fn q_factorial_f(n: u32, q: &Float) -> Float {
    let p = q.prec();
    let mut acc = Float::with_val(p, 1u32);
    for m in 1..=n {
        acc *= q_bracket_f(m, q);
    }
    acc
}

/// Gaussian binomial at float precision (via factorials; exact-route
/// available in `q_binomial_exact`).
pub fn q_binomial_f(n: u32, k: u32, q: &Float) -> Float {
    if k > n {
        return Float::new(q.prec());
    }
    let num = q_factorial_f(n, q);
    let den = q_factorial_f(k, q) * q_factorial_f(n - k, q);
    num / den
}

/// (a;q)_n finite product at float precision.
pub fn q_pochhammer_f(a: &Float, n: u32, q: &Float) -> Float {
    let p = q.prec().max(a.prec());
    let mut acc = Float::with_val(p, 1u32);
    let mut aq = Float::with_val(p, a);
    for _ in 0..n {
        let f = Float::with_val(p, 1u32 - &aq);
        acc *= f;
        aq *= q;
    }
    acc
}

/// (a;q)_infinity, truncated once |a| q^N drops below 10^-(digits+10) * (1-q).
/// Requires 0 < q < 1.
pub fn q_pochhammer_inf_f(a: &Float, q: &Float, digits: u32) -> Float {
    let p = q.prec().max(a.prec());
    let thresh = pow10_neg(p, digits + 10) * Float::with_val(p, 1u32 - q);
    let mut acc = Float::with_val(p, 1u32);
    let mut aq = Float::with_val(p, a);
    // hard cap keeps pathological inputs from spinning
    let cap = 64 + (40.0 * (digits as f64 + 20.0)) as u32;
    for _ in 0..cap {
        if aq.clone().abs() < thresh {
            break;
        }
        let f = Float::with_val(p, 1u32 - &aq);
        acc *= f;
        aq *= q;
    }
    acc
}

/// Gamma_q(x) = (q;q)_inf / (q^x;q)_inf * (1-q)^{1-x} for real x.
/// Poles at x = 0, -1, -2, ... are reported as errors.
pub fn q_gamma_f(x: &Float, q: &Float, digits: u32) -> QResult<Float> {
    let p = q.prec().max(x.prec());
    let qq = q_pochhammer_inf_f(q, q, digits);
    // q^x = exp(x ln q)
    let lnq = Float::with_val(p, q.ln_ref());
    let qx = Float::with_val(p, x * &lnq).exp();
    // (q^x;q)_inf -- factors (1 - q^{x+j}); a vanishing factor marks a pole.
    let thresh = pow10_neg(p, digits + 10) * Float::with_val(p, 1u32 - q);
    let pole_eps = pow10_neg(p, digits + 5);
    let mut acc = Float::with_val(p, 1u32);
    let mut aq = qx;
    let cap = 64 + (40.0 * (digits as f64 + 20.0)) as u32;
    for _ in 0..cap {
        if aq.clone().abs() < thresh {
            break;
        }
        let f = Float::with_val(p, 1u32 - &aq);
        if f.clone().abs() < pole_eps {
            return Err(QError::Pole(format!(
                "Gamma_q pole at non-positive integer argument (x = {})",
                x.to_f64()
            )));
        }
        acc *= f;
        aq *= q;
    }
    // (1-q)^{1-x} = exp((1-x) ln(1-q)); 0<q<1 so the base is positive.
    let ln1q = Float::with_val(p, 1u32 - q).ln();
    let pw = Float::with_val(p, 1u32 - x) * ln1q;
    Ok(qq / acc * pw.exp())
}

/// Integer power q^e as a float, e possibly negative.
pub fn q_powi_f(q: &Float, e: i64) -> Float {
    let p = q.prec();
    let r = Float::with_val(p, q.pow(e.unsigned_abs() as u32));
    if e < 0 {
        Float::with_val(p, 1u32) / r
    } else {
        r
    }
}

/// q^(num/den) for a rational exponent, as exp((num/den) ln q).
pub fn q_powr_f(q: &Float, e: &Rational) -> Float {
    let p = q.prec();
    let lnq = Float::with_val(p, q.ln_ref());
    let ef = Float::with_val(p, e);
    (ef * lnq).exp()
}

/// Decimal string of a float with `digits` significant digits, in the plain
/// `d.ddde[+/-]exp` form used by all machine-readable output.
pub fn float_to_decimal(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x.is_sign_negative() {
            "-inf".to_string()
        } else {
            "inf".to_string()
        };
    }
    let (sign, mantissa, exp) = to_sci_parts(x, digits);
    let mut s = String::new();
    if sign {
        s.push('-');
    }
    s.push_str(&mantissa[0..1]);
    if mantissa.len() > 1 {
        s.push('.');
        s.push_str(&mantissa[1..]);
    }
    s.push('e');
    let e10 = exp - 1;
    if e10 >= 0 {
        s.push('+');
    }
    s.push_str(&e10.to_string());
    s
}

/// (negative?, mantissa digits, decimal exponent) with the convention
/// value = +/- 0.mantissa * 10^exp.
fn to_sci_parts(x: &Float, digits: u32) -> (bool, String, i64) {
    let (s, e) = x.to_string_radix(10, Some(digits as usize + 2)).split_at_exp();
    (s.0, s.1, e)
}

trait SplitExp {
    fn split_at_exp(&self) -> ((bool, String), i64);
}

impl SplitExp for String {
    fn split_at_exp(&self) -> ((bool, String), i64) {
        // rug renders like "-1.234e-5" or "3.456" or "5.000e2"
        let (body, exp) = match self.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = self[i + 1..].parse().unwrap_or(0);
                (&self[..i], e)
            }
            None => (self.as_str(), 0),
        };
        let neg = body.starts_with('-');
        let body = body.trim_start_matches('-');
        let (int_part, frac_part) = match body.find('.') {
            Some(i) => (&body[..i], &body[i + 1..]),
            None => (body, ""),
        };
        let mut digits: String = format!("{int_part}{frac_part}");
        // normalize: value = 0.digits * 10^(exp + len(int_part)), then strip
        // leading zeros adjusting the exponent.
        let mut e10 = exp + int_part.len() as i64;
        let lead = digits.chars().take_while(|&c| c == '0').count();
        digits.drain(..lead);
        e10 -= lead as i64;
        if digits.is_empty() {
            digits.push('0');
            e10 = 1;
        }
        // strip trailing zeros (cosmetic only; value unchanged)
        let trail = digits.chars().rev().take_while(|&c| c == '0').count();
        if trail > 0 && trail < digits.len() {
            digits.truncate(digits.len() - trail);
        }
        ((neg, digits), e10)
    }
}

/// Parse "1/2" or "0.5" into an exact Rational.
pub fn parse_rational(s: &str) -> QResult<Rational> {
    let s = s.trim();
    if let Some(i) = s.find('/') {
        let num: Integer = s[..i]
            .trim()
            .parse()
            .map_err(|_| QError::Domain(format!("bad rational: {s}")))?;
        let den: Integer = s[i + 1..]
            .trim()
            .parse()
            .map_err(|_| QError::Domain(format!("bad rational: {s}")))?;
        if den == 0 {
            return Err(QError::Domain(format!("zero denominator: {s}")));
        }
        return Ok(Rational::from((num, den)));
    }
    if let Some(i) = s.find('.') {
        let int_part = &s[..i];
        let frac_part = &s[i + 1..];
        if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(QError::Domain(format!("bad decimal: {s}")));
        }
        let neg = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(QError::Domain(format!("bad decimal: {s}")));
        }
        let whole: Integer = if int_digits.is_empty() {
            Integer::new()
        } else {
            int_digits.parse().unwrap()
        };
        let frac: Integer = frac_part.parse().unwrap();
        let scale = Integer::from(10u32).pow(frac_part.len() as u32);
        let mut r = Rational::from((whole * &scale + frac, scale));
        if neg {
            r = -r;
        }
        return Ok(r);
    }
    let n: Integer = s
        .parse()
        .map_err(|_| QError::Domain(format!("bad number: {s}")))?;
    Ok(Rational::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_half() -> Rational {
        Rational::from((1u32, 2u32))
    }

    #[test]
    fn context_validation() {
        assert!(PrecisionContext::new(q_half(), 50).is_ok());
        assert!(PrecisionContext::new(Rational::from(1u32), 50).is_err());
        assert!(PrecisionContext::new(Rational::new(), 50).is_err());
        assert!(PrecisionContext::new(Rational::from((3u32, 2u32)), 50).is_err());
        assert!(PrecisionContext::new(q_half(), 19).is_err());
    }

    #[test]
    fn bracket_and_factorial() {
        let q = q_half();
        // [3] = 1 + 1/2 + 1/4 = 7/4
        assert_eq!(q_bracket_exact(3, &q), Rational::from((7u32, 4u32)));
        // [3]! = 1 * 3/2 * 7/4 = 21/8
        assert_eq!(q_factorial_exact(3, &q), Rational::from((21u32, 8u32)));
        assert_eq!(q_bracket_exact(0, &q), Rational::new());
    }

    #[test]
    fn binomial_pascal_and_symmetry() {
        let q = q_half();
        for n in 0..8u32 {
            for k in 0..=n {
                let b = q_binomial_exact(n, k, &q);
                assert_eq!(b, q_binomial_exact(n, n - k, &q));
                // ratio definition cross-check
                let alt = q_factorial_exact(n, &q)
                    / (q_factorial_exact(k, &q) * q_factorial_exact(n - k, &q));
                assert_eq!(b, alt);
            }
        }
    }

    #[test]
    fn pochhammer_split() {
        // (a;q)_{m+n} = (a;q)_m * (a q^m; q)_n
        let q = q_half();
        let a = Rational::from((3u32, 4u32));
        for m in 0..5u32 {
            for n in 0..5u32 {
                let lhs = q_pochhammer_exact(&a, m + n, &q);
                let am = Rational::from(&a * q_intpow(&q, m as i64));
                let rhs = q_pochhammer_exact(&a, m, &q) * q_pochhammer_exact(&am, n, &q);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn gamma_q_matches_q_factorial() {
        // Gamma_q(n+1) = [n]_q!
        let ctx = PrecisionContext::new(q_half(), 40).unwrap();
        let p = ctx.prec();
        let qf = ctx.q_float(p);
        for n in 0..6u32 {
            let x = Float::with_val(p, n + 1);
            let g = q_gamma_f(&x, &qf, ctx.digits()).unwrap();
            let f = q_factorial_f(n, &qf);
            let diff = Float::with_val(p, &g - &f).abs();
            assert!(diff < pow10_neg(p, 35), "n={n} diff={diff}");
        }
    }

    #[test]
    fn gamma_q_pole_detected() {
        let ctx = PrecisionContext::new(q_half(), 40).unwrap();
        let p = ctx.prec();
        let qf = ctx.q_float(p);
        let x = Float::with_val(p, 0);
        assert!(matches!(q_gamma_f(&x, &qf, ctx.digits()), Err(QError::Pole(_))));
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), q_half());
        assert_eq!(parse_rational("0.5").unwrap(), q_half());
        assert_eq!(parse_rational("0.25").unwrap(), Rational::from((1u32, 4u32)));
        assert_eq!(parse_rational("-1/2").unwrap(), -q_half());
        assert_eq!(parse_rational("3").unwrap(), Rational::from(3u32));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn decimal_rendering() {
        let p = bits_for(40);
        let x = Float::with_val(p, Rational::from((1u32, 7u32)));
        let s = float_to_decimal(&x, 30);
        assert!(s.starts_with("1.4285714285714285714285714285"), "{s}");
        assert!(s.ends_with("e-1"), "{s}");
        let y = Float::with_val(p, -250i32);
        assert_eq!(float_to_decimal(&y, 10), "-2.5e+2");
        let z = Float::new(p);
        assert_eq!(float_to_decimal(&z, 10), "0");
    }
}
