//! Localization of the positive zeros of Sin_q, Cos_q, and the second
//! Jackson q-Bessel family, with certified residuals.
//!
//! The scan walks outward from the origin so indexing cannot shift: the
//! k-th table entry is the k-th positive zero. Step sizes interpolate
//! between the near-classical regime (roughly pi-spaced zeros while
//! k <~ 1/(1-q)) and the geometric regime (consecutive zeros at ratio
//! ~ q^{-2}), and stay a safe factor below both spacings.

use crate::ctx::{bits_for, pow10_neg, QError, QResult};
use crate::qfunctions::{
    bessel_entire, bessel_entire_prime, cos_q, cos_q_prime, sin_q, sin_q_prime, EvalResult,
};
use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroKind {
    SinQ,
    CosQ,
    /// Second Jackson q-Bessel with order nu (> -1); the table's `q` field
    /// holds the Bessel base Q.
    Bessel { nu: Rational },
}

impl ZeroKind {
    pub fn label(&self) -> String {
        match self {
            ZeroKind::SinQ => "sin".into(),
            ZeroKind::CosQ => "cos".into(),
            ZeroKind::Bessel { nu } => format!("bessel({nu})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZeroEntry {
    /// 1-based index
    pub k: u32,
    pub value: Float,
    /// |f(z) / (z f'(z))| at the accepted point: proxy bound for the
    /// relative location error.
    pub residual: Float,
}

#[derive(Debug, Clone)]
pub struct ZeroTable {
    pub kind: ZeroKind,
    pub q: Rational,
    pub digits: u32,
    pub entries: Vec<ZeroEntry>,
    /// Scale constant of the geometric asymptote (q^{-3/2}/(1-q) for the
    /// Sin_q family, q^{-1/2}/(1-q) for Cos_q); None for Bessel tables.
    pub a_const: Option<Float>,
}

impl ZeroTable {
    pub fn values(&self) -> Vec<Float> {
        self.entries.iter().map(|e| e.value.clone()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,q,k,zero,residual,digits\n");
        let kind = self.kind.label();
        for e in &self.entries {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                kind,
                self.q,
                e.k,
                crate::ctx::float_to_decimal(&e.value, self.digits),
                crate::ctx::float_to_decimal(&e.residual, 3),
                self.digits
            ));
        }
        s
    }
}

/// Evaluate the target function in scan units `u`; for Bessel kinds the
/// physical argument is x = 2(1-Q) u.
fn eval_fn(kind: &ZeroKind, q: &Rational, u: &Float, digits: u32) -> QResult<EvalResult> {
    match kind {
        ZeroKind::SinQ => sin_q(u, q, digits),
        ZeroKind::CosQ => cos_q(u, q, digits),
        ZeroKind::Bessel { nu } => {
            let p = u.prec();
            let x = to_bessel_x(q, u, p);
            bessel_entire(nu, &x, q, digits)
        }
    }
}

fn eval_fn_prime(kind: &ZeroKind, q: &Rational, u: &Float, digits: u32) -> QResult<EvalResult> {
    match kind {
        ZeroKind::SinQ => sin_q_prime(u, q, digits),
        ZeroKind::CosQ => cos_q_prime(u, q, digits),
        ZeroKind::Bessel { nu } => {
            let p = u.prec();
            let x = to_bessel_x(q, u, p);
            // d/du = 2(1-Q) d/dx
            let mut d = bessel_entire_prime(nu, &x, q, digits)?;
            let sc = Float::with_val(p, 2u32 * Float::with_val(p, 1u32 - Float::with_val(p, q)));
            d.value *= sc;
            Ok(d)
        }
    }
}

fn to_bessel_x(q: &Rational, u: &Float, p: u32) -> Float {
    let qf = Float::with_val(p, q);
    Float::with_val(p, 2u32 * Float::with_val(p, 1u32 - qf) * u)
}

/// Effective q for spacing estimates: q itself for the trigonometric
/// kinds, sqrt(Q) for Bessel.
fn q_eff(kind: &ZeroKind, q: &Rational, p: u32) -> Float {
    let qf = Float::with_val(p, q);
    match kind {
        ZeroKind::Bessel { .. } => qf.sqrt(),
        _ => qf,
    }
}

/// First-zero scale in scan units, pre-min'd with the classical bound.
fn first_scale(kind: &ZeroKind, qe: &Float) -> Float {
    let p = qe.prec();
    let pi = Float::with_val(p, Constant::Pi);
    let one_m = Float::with_val(p, 1u32 - qe);
    match kind {
        ZeroKind::SinQ => {
            // q^{-3/2}/(1-q)
            let e = Float::with_val(p, -1.5f64);
            let s = Float::with_val(p, (&qe).pow(&e)) / &one_m;
            if s < pi {
                s
            } else {
                pi
            }
        }
        ZeroKind::CosQ => {
            let e = Float::with_val(p, -0.5f64);
            let s = Float::with_val(p, (&qe).pow(&e)) / &one_m;
            let half_pi = pi / 2u32;
            if s < half_pi {
                s
            } else {
                half_pi
            }
        }
        ZeroKind::Bessel { .. } => {
            let one_m2 = Float::with_val(p, 1u32 - Float::with_val(p, qe * qe));
            let e = Float::with_val(p, -1.5f64);
            let s = Float::with_val(p, (&qe).pow(&e)) / one_m2;
            let half_pi = pi / 2u32;
            if s < half_pi {
                s
            } else {
                half_pi
            }
        }
    }
}

fn sign_of(v: &Float) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_sign_negative() {
        -1
    } else {
        1
    }
}

const SCAN_DIGITS: u32 = 14;

/// Locate the first `count` positive zeros, each certified to `digits`
/// significant digits.
pub fn locate_zeros(
    kind: &ZeroKind,
    q: &Rational,
    count: u32,
    digits: u32,
) -> QResult<ZeroTable> {
    if q <= &Rational::new() || q >= &Rational::from(1u32) {
        return Err(QError::Domain("q must lie in (0,1)".into()));
    }
    if let ZeroKind::Bessel { nu } = kind {
        if *nu <= Rational::from(-1i32) {
            return Err(QError::Domain("Bessel order must exceed -1".into()));
        }
    }
    let p_scan = bits_for(digits + 30);
    let qe = q_eff(kind, q, p_scan);
    let fs = first_scale(kind, &qe);
    let start_factor = match kind {
        ZeroKind::SinQ => 0.25f64,
        ZeroKind::CosQ => 0.15,
        ZeroKind::Bessel { .. } => 0.05,
    };
    let mut u = Float::with_val(p_scan, &fs * Float::with_val(p_scan, start_factor));
    // the function is positive at the origin-side start point; back off if
    // the start somehow overshot the first zero
    let mut guard = 0;
    let mut s_prev = loop {
        let v = eval_fn(kind, q, &u, SCAN_DIGITS)?;
        let s = sign_of(&v.value);
        if s > 0 {
            break s;
        }
        u /= 4u32;
        guard += 1;
        if guard > 8 {
            return Err(QError::Localization(
                "could not find a positive start below the first zero".into(),
            ));
        }
    };
    let floor = Float::with_val(p_scan, &fs / 6u32);
    let half_shrink = Float::with_val(p_scan, Float::with_val(p_scan, 1u32 - &qe) / 2u32);
    let mut brackets: Vec<(Float, Float)> = Vec::with_capacity(count as usize);
    let max_steps = 400usize * (count as usize + 2);
    let mut steps = 0usize;
    while brackets.len() < count as usize {
        let mut du = Float::with_val(p_scan, &u * &half_shrink);
        if du < floor {
            du = floor.clone();
        }
        let u_next = Float::with_val(p_scan, &u + &du);
        let v = eval_fn(kind, q, &u_next, SCAN_DIGITS)?;
        let s = sign_of(&v.value);
        if s == 0 {
            // direct hit: brace it with a narrow interval
            let eps = Float::with_val(p_scan, &du / 100u32);
            brackets.push((
                Float::with_val(p_scan, &u_next - &eps),
                Float::with_val(p_scan, &u_next + &eps),
            ));
            s_prev = -s_prev;
        } else if s != s_prev {
            brackets.push((u.clone(), u_next.clone()));
            s_prev = s;
        }
        u = u_next;
        steps += 1;
        if steps > max_steps {
            return Err(QError::Localization(format!(
                "scan exceeded {max_steps} steps before finding {count} zeros"
            )));
        }
    }

    // refine brackets concurrently; results collected in index order
    let refined: QResult<Vec<(Float, Float)>> = brackets
        .par_iter()
        .map(|(a, b)| refine_bracket(kind, q, a, b, digits))
        .collect();
    let refined = refined?;

    let p_out = bits_for(digits + 25);
    let entries: Vec<ZeroEntry> = refined
        .into_iter()
        .enumerate()
        .map(|(i, (z, r))| ZeroEntry {
            k: (i + 1) as u32,
            value: z,
            residual: r,
        })
        .collect();
    let a_const = match kind {
        ZeroKind::SinQ => {
            let qf = Float::with_val(p_out, q);
            let e = Float::with_val(p_out, -1.5f64);
            Some(Float::with_val(p_out, (&qf).pow(&e)) / Float::with_val(p_out, 1u32 - &qf))
        }
        ZeroKind::CosQ => {
            let qf = Float::with_val(p_out, q);
            let e = Float::with_val(p_out, -0.5f64);
            Some(Float::with_val(p_out, (&qf).pow(&e)) / Float::with_val(p_out, 1u32 - &qf))
        }
        ZeroKind::Bessel { .. } => None,
    };
    Ok(ZeroTable {
        kind: kind.clone(),
        q: q.clone(),
        digits,
        entries,
        a_const,
    })
}

/// Bisection + Newton on one bracket; returns (zero, normalized residual)
/// in *physical* units (x for Bessel kinds).
fn refine_bracket(
    kind: &ZeroKind,
    q: &Rational,
    a0: &Float,
    b0: &Float,
    digits: u32,
) -> QResult<(Float, Float)> {
    let p = bits_for(digits + 25);
    let mut a = Float::with_val(p, a0);
    let mut b = Float::with_val(p, b0);
    let mut fa = eval_fn(kind, q, &a, SCAN_DIGITS)?.value;
    for _ in 0..44 {
        let m = Float::with_val(p, &a + &b) / 2u32;
        let fm = eval_fn(kind, q, &m, SCAN_DIGITS)?.value;
        if fm.is_zero() {
            a = m.clone();
            b = m;
            break;
        }
        if sign_of(&fm) == sign_of(&fa) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        let width = Float::with_val(p, &b - &a);
        let rel = Float::with_val(p, width / &b).abs();
        if rel < Float::with_val(p, 1e-12f64) {
            break;
        }
    }
    let mut z = Float::with_val(p, &a + &b) / 2u32;
    // Newton with analytic derivative; quadratic from a ~1e-12 start
    let stop = pow10_neg(p, digits + 10);
    for _ in 0..64 {
        let f = eval_fn(kind, q, &z, digits + 20)?.value;
        let fp = eval_fn_prime(kind, q, &z, digits + 20)?.value;
        if fp.is_zero() {
            return Err(QError::Localization("vanishing derivative in Newton".into()));
        }
        let dz = Float::with_val(p, &f / &fp);
        let rel = Float::with_val(p, &dz / &z).abs();
        z -= dz;
        if rel < stop {
            break;
        }
    }
    // certify
    let f = eval_fn(kind, q, &z, digits + 20)?.value;
    let fp = eval_fn_prime(kind, q, &z, digits + 20)?.value;
    let denom = Float::with_val(p, &fp * &z).abs();
    if denom.is_zero() {
        return Err(QError::Localization("cannot certify: z f'(z) = 0".into()));
    }
    let resid = Float::with_val(p, f.abs() / denom);
    if resid > pow10_neg(p, digits + 3) {
        return Err(QError::Localization(format!(
            "residual {} exceeds certification threshold at z ~ {}",
            resid.to_f64(),
            z.to_f64()
        )));
    }
    // physical units for Bessel: x = 2(1-Q) u
    let z_phys = match kind {
        ZeroKind::Bessel { .. } => to_bessel_x(q, &z, p),
        _ => z,
    };
    Ok((z_phys, resid))
}

/// Newton-polish a user-supplied approximation; returns (zero, residual).
pub fn refine_zero(
    kind: &ZeroKind,
    q: &Rational,
    guess: &Float,
    digits: u32,
) -> QResult<(Float, Float)> {
    let p = bits_for(digits + 25);
    // Bessel guesses arrive in physical x units; convert to scan units
    let mut z = match kind {
        ZeroKind::Bessel { .. } => {
            let qf = Float::with_val(p, q);
            let sc = Float::with_val(p, 2u32 * Float::with_val(p, 1u32 - qf));
            Float::with_val(p, guess / sc)
        }
        _ => Float::with_val(p, guess),
    };
    let z_in = z.clone();
    let stop = pow10_neg(p, digits + 10);
    for _ in 0..80 {
        let f = eval_fn(kind, q, &z, digits + 20)?.value;
        let fp = eval_fn_prime(kind, q, &z, digits + 20)?.value;
        if fp.is_zero() {
            return Err(QError::Localization("vanishing derivative in Newton".into()));
        }
        let dz = Float::with_val(p, &f / &fp);
        let step_rel = Float::with_val(p, &dz / &z).abs();
        z -= dz;
        if z.is_sign_negative()
            || Float::with_val(p, &z - &z_in).abs()
                > Float::with_val(p, &z_in / 2u32).abs()
        {
            return Err(QError::Localization(
                "Newton left the neighborhood of the supplied guess".into(),
            ));
        }
        if step_rel < stop {
            break;
        }
    }
    let f = eval_fn(kind, q, &z, digits + 20)?.value;
    let fp = eval_fn_prime(kind, q, &z, digits + 20)?.value;
    let denom = Float::with_val(p, &fp * &z).abs();
    if denom.is_zero() {
        return Err(QError::Localization("cannot certify: z f'(z) = 0".into()));
    }
    let resid = Float::with_val(p, f.abs() / denom);
    if resid > pow10_neg(p, digits + 3) {
        return Err(QError::Localization(
            "refined point does not certify as a zero".into(),
        ));
    }
    let z_phys = match kind {
        ZeroKind::Bessel { .. } => to_bessel_x(q, &z, p),
        _ => z,
    };
    Ok((z_phys, resid))
}

/// Per-index diagnostics of the geometric asymptote z_k q^{2k} -> const.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// z_k q^{2k} / A with the table's scale constant A
    pub scaled_ratio: Vec<Float>,
    /// |z_k q^{2k}/A - 1|; tends to 1 - q^2 from below in the Sin_q/Cos_q
    /// normalization, decreasing once the geometric regime is reached
    pub deviation: Vec<Float>,
    /// z_k q^{2k} / (A q^2) - 1, the drift from the true asymptote
    pub drift: Vec<Float>,
    /// deviation[k] strictly decreasing for k >= from_index (1-based)
    pub decreasing_from: Option<u32>,
}

pub fn asymptotic_diagnostics(table: &ZeroTable) -> QResult<Diagnostics> {
    let a = table.a_const.as_ref().ok_or_else(|| {
        QError::Domain("asymptotic diagnostics apply to Sin_q/Cos_q tables".into())
    })?;
    let p = a.prec();
    let qf = Float::with_val(p, &table.q);
    let mut scaled_ratio = Vec::new();
    let mut deviation = Vec::new();
    let mut drift = Vec::new();
    let q2 = Float::with_val(p, &qf * &qf);
    for e in &table.entries {
        let q2k = Float::with_val(p, (&qf).pow(2 * e.k));
        let r = Float::with_val(p, &e.value * &q2k) / a;
        let dev = Float::with_val(p, &r - 1u32).abs();
        let dr = Float::with_val(p, &r / &q2) - 1u32;
        scaled_ratio.push(r);
        deviation.push(dev);
        drift.push(dr);
    }
    // find the smallest index from which the deviation strictly decreases
    let n = deviation.len();
    let mut from = None;
    'outer: for start in 0..n {
        for i in start..n.saturating_sub(1) {
            if deviation[i + 1] >= deviation[i] {
                continue 'outer;
            }
        }
        from = Some((start + 1) as u32);
        break;
    }
    Ok(Diagnostics {
        scaled_ratio,
        deviation,
        drift,
        decreasing_from: from,
    })
}

/// eta_k < xi_k < eta_{k+1} for all overlapping indices.
pub fn check_interlacing(sin_table: &ZeroTable, cos_table: &ZeroTable) -> bool {
    let n = sin_table
        .entries
        .len()
        .min(cos_table.entries.len().saturating_sub(1));
    for i in 0..n {
        let eta_k = &cos_table.entries[i].value;
        let xi_k = &sin_table.entries[i].value;
        let eta_k1 = &cos_table.entries[i + 1].value;
        if !(eta_k < xi_k && xi_k < eta_k1) {
            return false;
        }
    }
    n > 0
}

/// Hadamard-style partial product over a zero table:
/// odd = true:  z * prod (1 - z^2/z_k^2)   (Sin_q normalization)
/// odd = false: prod (1 - z^2/z_k^2)       (Cos_q normalization)
/// Errors if the table tail is too short for the requested accuracy.
pub fn product_from_zeros(
    z: &Float,
    zeros: &[Float],
    odd: bool,
    digits: u32,
) -> QResult<Float> {
    if zeros.is_empty() {
        return Err(QError::Coverage("empty zero table".into()));
    }
    let p = bits_for(digits + 15).max(z.prec());
    tail_check(z, zeros, digits, p)?;
    let z2 = Float::with_val(p, z * z);
    let mut acc = if odd {
        Float::with_val(p, z)
    } else {
        Float::with_val(p, 1u32)
    };
    for zk in zeros {
        let zk2 = Float::with_val(p, zk * zk);
        acc *= Float::with_val(p, 1u32 - Float::with_val(p, &z2 / &zk2));
    }
    Ok(acc)
}

/// Product-rule derivative at the n-th table zero (0-based):
/// odd = true:  S'(z_n) = -2 prod_{k!=n} (1 - z_n^2/z_k^2)
/// odd = false: C'(z_n) = (-2/z_n) prod_{k!=n} (1 - z_n^2/z_k^2)
pub fn derivative_at_zero(
    n: usize,
    zeros: &[Float],
    odd: bool,
    digits: u32,
) -> QResult<Float> {
    if n >= zeros.len() {
        return Err(QError::Coverage("index beyond zero table".into()));
    }
    let zn = &zeros[n];
    let p = bits_for(digits + 15).max(zn.prec());
    tail_check(zn, zeros, digits, p)?;
    let zn2 = Float::with_val(p, zn * zn);
    let mut acc = Float::with_val(p, 1u32);
    for (k, zk) in zeros.iter().enumerate() {
        if k == n {
            continue;
        }
        let zk2 = Float::with_val(p, zk * zk);
        acc *= Float::with_val(p, 1u32 - Float::with_val(p, &zn2 / &zk2));
    }
    if odd {
        Ok(-(Float::with_val(p, 2u32 * acc)))
    } else {
        Ok(-(Float::with_val(p, 2u32 * acc / zn)))
    }
}

/// The neglected tail factors deviate from 1 by about
/// (z/z_last)^2 * rho/(1-rho) with rho the squared ratio of the last two
/// zeros; require that below 10^-(digits+5).
fn tail_check(z: &Float, zeros: &[Float], digits: u32, p: u32) -> QResult<()> {
    let last = &zeros[zeros.len() - 1];
    let ratio = if zeros.len() >= 2 {
        let prev = &zeros[zeros.len() - 2];
        let r = Float::with_val(p, prev / last);
        Float::with_val(p, &r * &r)
    } else {
        // single entry: assume at least a factor-4 gap to the next zero
        Float::with_val(p, 0.0625f64)
    };
    let zr = Float::with_val(p, z / last);
    let lead = Float::with_val(p, &zr * &zr);
    let tail = Float::with_val(p, &lead * &ratio) / Float::with_val(p, 1u32 - &ratio);
    if tail.clone().abs() > pow10_neg(p, digits + 5) {
        return Err(QError::Coverage(format!(
            "zero table too short: tail estimate {} at digits {digits}",
            tail.to_f64()
        )));
    }
    Ok(())
}
