//! Spectral series over the zeros of the q-trigonometric functions.
//!
//! The central objects are four Dirichlet-type series built from the positive
//! zeros `xi_k` of `Sin_q` and `eta_k` of `Cos_q`:
//!
//! * `eta_q(s)    = -sum_k  xi_k^{-s}            / Sin_q'(xi_k)`
//! * `eta_star(s) = -sum_k  eta_k^{-s}           / Cos_q'(eta_k)`
//! * `zeta_q(s)   =  sum_k  xi_k^{-s}  Cos_q(xi_k) / Sin_q'(xi_k)`
//! * `zeta_star(s)= -sum_k  eta_k^{-s} Sin_q(eta_k) / Cos_q'(eta_k)`
//!
//! The eta-type series converge for every real `s` because the derivative
//! weights decay like `q^{2k^2}`.  The zeta-type series have weights that grow
//! linearly with the zero, so they converge only for `s > 1`; even integer
//! arguments are instead evaluated through an exact finite rewriting in terms
//! of eta values, and values at and left of `s = 1` are reached through the
//! reflection-based continuation in [`continued_zeta_q`].

use crate::complex::Cpx;
use crate::ctx::{
    float_to_decimal, q_factorial_exact, q_factorial_f, q_intpow, q_powr_f, QError, QResult,
    PrecisionContext,
};
use crate::qfunctions::{
    bessel_entire, bessel_entire_prime, cos_q, cos_q_prime, sin_q, sin_q_prime,
};
use crate::qnumbers::{self, QNumberFamilies};
use crate::zeros::{check_interlacing, locate_zeros, ZeroKind, ZeroTable};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// A truncated spectral sum together with its accounting data.
///
/// `value` is the partial sum, `tail_bound` a rigorous-style geometric bound on
/// the discarded remainder, and `k_used` the number of zeros consumed.  Every
/// constructor in this module guarantees `tail_bound < 10^-tol_digits` (scaled
/// by the magnitude of the value) or returns a `Coverage` error instead.
#[derive(Debug, Clone)]
pub struct SeriesValue {
    pub value: Cpx,
    pub tail_bound: Float,
    pub k_used: usize,
}

impl SeriesValue {
    fn real(value: Float, tail_bound: Float, k_used: usize) -> Self {
        SeriesValue {
            value: Cpx::from_real(value),
            tail_bound,
            k_used,
        }
    }

    /// Real part of the value; the series for real `s` are real-valued.
    pub fn re(&self) -> &Float {
        &self.value.re
    }
}

/// Precomputed zero tables and derivative weights shared by all spectral sums.
///
/// Building one is the expensive step (zero localization plus four series
/// evaluations per zero); everything downstream is a cheap weighted power sum.
pub struct SpectralContext {
    ctx: PrecisionContext,
    sin_zeros: ZeroTable,
    cos_zeros: ZeroTable,
    /// `Cos_q(xi_k)`, all positive, growing like `c * xi_k`.
    cos_at_xi: Vec<Float>,
    /// `Sin_q'(xi_k)`, alternating sign, decaying like `q^{2k^2}`.
    sinp_at_xi: Vec<Float>,
    /// `Sin_q(eta_k)`, alternating sign.
    sin_at_eta: Vec<Float>,
    /// `Cos_q'(eta_k)`, alternating sign, opposite phase to `Sin_q(eta_k)`.
    cosp_at_eta: Vec<Float>,
}

impl SpectralContext {
    /// Locate `k_count` zeros of both `Sin_q` and `Cos_q` and evaluate the four
    /// weight sequences at them.
    pub fn build(ctx: &PrecisionContext, k_count: usize) -> QResult<SpectralContext> {
        if k_count == 0 {
            return Err(QError::Domain("need at least one zero".into()));
        }
        let wdigits = ctx.digits() + 10;
        let sin_zeros = locate_zeros(&ZeroKind::SinQ, ctx.q(), k_count as u32, wdigits)?;
        let cos_zeros = locate_zeros(&ZeroKind::CosQ, ctx.q(), k_count as u32, wdigits)?;
        if !check_interlacing(&sin_zeros, &cos_zeros) {
            return Err(QError::Localization(
                "sin/cos zero tables do not interlace".into(),
            ));
        }

        let xi: Vec<&Float> = sin_zeros.entries.iter().map(|e| &e.value).collect();
        let eta: Vec<&Float> = cos_zeros.entries.iter().map(|e| &e.value).collect();
        let q = ctx.q();

        let cos_at_xi: Vec<Float> = xi
            .par_iter()
            .map(|z| cos_q(z, q, wdigits).map(|r| r.value))
            .collect::<QResult<_>>()?;
        let sinp_at_xi: Vec<Float> = xi
            .par_iter()
            .map(|z| sin_q_prime(z, q, wdigits).map(|r| r.value))
            .collect::<QResult<_>>()?;
        let sin_at_eta: Vec<Float> = eta
            .par_iter()
            .map(|z| sin_q(z, q, wdigits).map(|r| r.value))
            .collect::<QResult<_>>()?;
        let cosp_at_eta: Vec<Float> = eta
            .par_iter()
            .map(|z| cos_q_prime(z, q, wdigits).map(|r| r.value))
            .collect::<QResult<_>>()?;

        // Sign structure forced by interlacing (eta_1 < xi_1 < eta_2 < ...):
        // Sin_q', Cos_q at the xi's and Cos_q' all alternate starting negative;
        // Sin_q at the eta's alternates starting positive.  Consequently
        // Cos/Sin' > 0 at every xi_k and Sin/Cos' < 0 at every eta_k.
        for k in 0..k_count {
            let neg = k % 2 == 0;
            if (sinp_at_xi[k] < 0) != neg
                || (cos_at_xi[k] < 0) != neg
                || (cosp_at_eta[k] < 0) != neg
                || (sin_at_eta[k] < 0) == neg
            {
                return Err(QError::Localization(format!(
                    "weight sign pattern broken at k={}; zero table unreliable",
                    k + 1
                )));
            }
        }

        Ok(SpectralContext {
            ctx: ctx.clone(),
            sin_zeros,
            cos_zeros,
            cos_at_xi,
            sinp_at_xi,
            sin_at_eta,
            cosp_at_eta,
        })
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }
    pub fn k_count(&self) -> usize {
        self.cos_at_xi.len()
    }
    pub fn sin_zero_table(&self) -> &ZeroTable {
        &self.sin_zeros
    }
    pub fn cos_zero_table(&self) -> &ZeroTable {
        &self.cos_zeros
    }
    /// k-th positive zero of `Sin_q` (1-based `k`).
    pub fn xi(&self, k: usize) -> &Float {
        &self.sin_zeros.entries[k - 1].value
    }
    /// k-th positive zero of `Cos_q` (1-based `k`).
    pub fn eta(&self, k: usize) -> &Float {
        &self.cos_zeros.entries[k - 1].value
    }
    pub fn cos_at_xi(&self, k: usize) -> &Float {
        &self.cos_at_xi[k - 1]
    }
    pub fn sinp_at_xi(&self, k: usize) -> &Float {
        &self.sinp_at_xi[k - 1]
    }
    pub fn sin_at_eta(&self, k: usize) -> &Float {
        &self.sin_at_eta[k - 1]
    }
    pub fn cosp_at_eta(&self, k: usize) -> &Float {
        &self.cosp_at_eta[k - 1]
    }

    fn prec(&self) -> u32 {
        self.ctx.prec()
    }
}

/// `s` treated as an exact integer when it is one; spectral dispatch branches
/// on this.
fn as_integer(s: &Float) -> Option<i64> {
    if s.is_integer() {
        s.to_integer().and_then(|i| i.to_i64())
    } else {
        None
    }
}

/// Shared core for the eta-type sums: `sign * sum_k z_k^{-s} w_k` with
/// alternating terms and superexponentially decaying weights.
fn eta_like_sum(
    sctx: &SpectralContext,
    s: &Float,
    zeros: &[&Float],
    inv_weights: &[Float],
    label: &str,
) -> QResult<SeriesValue> {
    let p = sctx.prec();
    let tol = sctx.ctx.tol();
    let sigma = s.to_f64();

    // Left of the axis the summand peaks near k* = |s|/2 before the q^{2k^2}
    // decay wins; the sum then loses about lq*s^2/2 digits to cancellation.
    if sigma < 0.0 {
        let lq = sctx.ctx.log10_inv_q();
        let cancel = 0.5 * sigma * sigma * lq;
        let needed_k = (-sigma / 2.0).ceil() as usize + 4;
        if sctx.k_count() < needed_k {
            return Err(QError::Coverage(format!(
                "{} at s={:.3} needs at least {} zeros (have {})",
                label,
                sigma,
                needed_k,
                sctx.k_count()
            )));
        }
        let needed_digits = sctx.ctx.tol_digits() as f64 + cancel + 15.0;
        if (sctx.ctx.digits() as f64) < needed_digits {
            return Err(QError::Coverage(format!(
                "{} at s={:.3} cancels ~{:.0} digits; rebuild context with digits >= {:.0}",
                label, sigma, cancel, needed_digits
            )));
        }
    }

    let neg_s = Float::with_val(p, -s.clone());
    let mut acc = Float::with_val(p, 0);
    let mut prev_abs: Option<Float> = None;
    let mut tail = Float::with_val(p, 0);
    let mut k_used = 0usize;
    let mut converged = false;

    for k in 0..zeros.len() {
        let zp = Float::with_val(p, zeros[k].pow(&neg_s));
        let term = Float::with_val(p, &zp / &inv_weights[k]);
        acc -= &term;
        k_used = k + 1;
        let t_abs = term.abs();
        if let Some(prev) = &prev_abs {
            if *prev > 0 {
                let ratio = Float::with_val(p, &t_abs / prev);
                if ratio < 0.5 {
                    let one_minus = Float::with_val(p, 1 - &ratio);
                    tail = Float::with_val(p, &t_abs * &ratio) / one_minus;
                    let scale = Float::with_val(p, acc.clone().abs()).max(&Float::with_val(p, 1));
                    let budget = Float::with_val(p, &tol * &scale);
                    if tail < budget {
                        converged = true;
                        break;
                    }
                }
            }
        }
        prev_abs = Some(t_abs);
    }

    if !converged {
        return Err(QError::Coverage(format!(
            "{} did not reach tolerance with {} zeros; tail ~ {}",
            label,
            zeros.len(),
            float_to_decimal(&tail, 3)
        )));
    }
    Ok(SeriesValue::real(acc, tail, k_used))
}

/// `eta_q(s) = -sum_k xi_k^{-s} / Sin_q'(xi_k)`; converges for all real `s`.
pub fn eta_q(sctx: &SpectralContext, s: &Float) -> QResult<SeriesValue> {
    let zeros: Vec<&Float> = sctx.sin_zeros.entries.iter().map(|e| &e.value).collect();
    eta_like_sum(sctx, s, &zeros, &sctx.sinp_at_xi, "eta_q")
}

/// `eta_star_q(s) = -sum_k eta_k^{-s} / Cos_q'(eta_k)`; converges for all real `s`.
pub fn eta_star_q(sctx: &SpectralContext, s: &Float) -> QResult<SeriesValue> {
    let zeros: Vec<&Float> = sctx.cos_zeros.entries.iter().map(|e| &e.value).collect();
    eta_like_sum(sctx, s, &zeros, &sctx.cosp_at_eta, "eta_star_q")
}

/// Shared core for the zeta-type sums on `Re s > 1`: terms are single-signed
/// and decay geometrically with ratio `q^{2(s-1)}` once the weight growth is
/// absorbed.
fn zeta_like_direct(
    sctx: &SpectralContext,
    s: &Float,
    zeros: &[&Float],
    numer: &[Float],
    denom: &[Float],
    negate: bool,
    label: &str,
) -> QResult<SeriesValue> {
    let p = sctx.prec();
    let tol = sctx.ctx.tol();
    let sigma = s.to_f64();
    if sigma <= 1.0 {
        return Err(QError::Domain(format!(
            "{} direct series diverges for s <= 1; use the continued evaluator",
            label
        )));
    }

    // Geometric ratio of consecutive zeros is q^{-2}, so the terms shrink at
    // least like q^{2(s-1)} once the linear weight growth is absorbed.
    let qf = sctx.ctx.q_float(p);
    let ratio_bound = Float::with_val(p, (&qf).pow(2.0 * (sigma - 1.0)));
    if ratio_bound >= 1 {
        return Err(QError::Domain(format!(
            "{} tail ratio not contractive at s={:.3}",
            label, sigma
        )));
    }

    let neg_s = Float::with_val(p, -s.clone());
    let mut acc = Float::with_val(p, 0);
    let mut tail = Float::with_val(p, 0);
    let mut k_used = 0usize;
    let mut converged = false;

    for k in 0..zeros.len() {
        let zp = Float::with_val(p, zeros[k].pow(&neg_s));
        let mut term = Float::with_val(p, &zp * &numer[k]);
        term /= &denom[k];
        if negate {
            term = -term;
        }
        if term <= 0 {
            return Err(QError::Localization(format!(
                "{} term {} not positive; weight table unreliable",
                label,
                k + 1
            )));
        }
        acc += &term;
        k_used = k + 1;
        // Stated bound: remainder after term K is below term_K / (1 - q^{2(s-1)}).
        tail = Float::with_val(p, &term / Float::with_val(p, 1 - &ratio_bound));
        let scale = Float::with_val(p, acc.clone().abs()).max(&Float::with_val(p, 1));
        if k >= 1 && tail < Float::with_val(p, &tol * &scale) {
            converged = true;
            break;
        }
    }

    if !converged {
        return Err(QError::Coverage(format!(
            "{} needs more zeros at s={:.3}: tail ~ {} after {} terms",
            label,
            sigma,
            float_to_decimal(&tail, 3),
            k_used
        )));
    }
    Ok(SeriesValue::real(acc, tail, k_used))
}

/// Coefficient `q^{e} / [m]_q!` as a `Float`, with the power exact.
fn qpow_over_factorial(ctx: &PrecisionContext, p: u32, e: u32, m: u32) -> Float {
    let qe = q_intpow(ctx.q(), e as i64);
    let qf = ctx.q_float(p);
    let fact = q_factorial_f(m, &qf);
    Float::with_val(p, &qe) / fact
}

/// `zeta_q(s) = sum_k xi_k^{-s} Cos_q(xi_k)/Sin_q'(xi_k)`.
///
/// Even integer `s >= 2` is routed through the exact finite rewriting
/// `zeta_q(s) = sum_{j>=0} (-1)^{j+1} q^{j(2j-1)}/[2j]_q! * eta_q(s-2j)`,
/// which terminates because `eta_q` is evaluated down to argument zero.
/// Non-integer `s > 1` uses the direct sum.  Anything at or left of `s = 1`
/// is a domain error pointing at [`continued_zeta_q`].
pub fn zeta_q(sctx: &SpectralContext, s: &Float) -> QResult<SeriesValue> {
    let p = sctx.prec();
    if let Some(n2) = as_integer(s) {
        if n2 >= 2 && n2 % 2 == 0 {
            let n = (n2 / 2) as u32;
            let mut acc = Float::with_val(p, 0);
            let mut tail = Float::with_val(p, 0);
            let mut k_used = 0usize;
            for j in 0..=n {
                let arg = Float::with_val(p, n2 - 2 * j as i64);
                let ev = eta_q(sctx, &arg)?;
                let e = if j == 0 { 0 } else { j * (2 * j - 1) };
                let coeff = qpow_over_factorial(&sctx.ctx, p, e, 2 * j);
                let signed = if j % 2 == 0 { -1 } else { 1 };
                acc += Float::with_val(p, ev.re() * &coeff) * signed;
                tail += Float::with_val(p, &ev.tail_bound * &coeff);
                k_used = k_used.max(ev.k_used);
            }
            return Ok(SeriesValue::real(acc, tail, k_used));
        }
    }
    let zeros: Vec<&Float> = sctx.sin_zeros.entries.iter().map(|e| &e.value).collect();
    zeta_like_direct(
        sctx,
        s,
        &zeros,
        &sctx.cos_at_xi,
        &sctx.sinp_at_xi,
        false,
        "zeta_q",
    )
}

/// `zeta_star_q(s) = -sum_k eta_k^{-s} Sin_q(eta_k)/Cos_q'(eta_k)`.
///
/// Even integer `s >= 2` goes through the exact finite rewriting
/// `zeta_star_q(s) = sum_{j=0}^{n-1} (-1)^j q^{j(2j+1)}/[2j+1]_q! * eta_star_q(s-2j-1)`.
pub fn zeta_star_q(sctx: &SpectralContext, s: &Float) -> QResult<SeriesValue> {
    let p = sctx.prec();
    if let Some(n2) = as_integer(s) {
        if n2 >= 2 && n2 % 2 == 0 {
            let n = (n2 / 2) as u32;
            let mut acc = Float::with_val(p, 0);
            let mut tail = Float::with_val(p, 0);
            let mut k_used = 0usize;
            for j in 0..n {
                let arg = Float::with_val(p, n2 - 2 * j as i64 - 1);
                let ev = eta_star_q(sctx, &arg)?;
                let coeff = qpow_over_factorial(&sctx.ctx, p, j * (2 * j + 1), 2 * j + 1);
                let signed = if j % 2 == 0 { 1 } else { -1 };
                acc += Float::with_val(p, ev.re() * &coeff) * signed;
                tail += Float::with_val(p, &ev.tail_bound * &coeff);
                k_used = k_used.max(ev.k_used);
            }
            return Ok(SeriesValue::real(acc, tail, k_used));
        }
    }
    let zeros: Vec<&Float> = sctx.cos_zeros.entries.iter().map(|e| &e.value).collect();
    zeta_like_direct(
        sctx,
        s,
        &zeros,
        &sctx.sin_at_eta,
        &sctx.cosp_at_eta,
        true,
        "zeta_star_q",
    )
}

/// Exact `zeta_q(2n)` as a rational number:
/// `(-1)^{n+1} 2^{2n-1} beta_{2n} / [2n]_q!`.
pub fn zeta_even_exact(q: &Rational, n: u32) -> Rational {
    let fam = qnumbers::compute_families(2 * n);
    let beta = &fam.beta[2 * n as usize];
    let fact = q_factorial_exact(2 * n, q);
    let mut v = beta.eval_rational(q).expect("beta denominators nonzero on (0,1)");
    v *= Rational::from(Integer::from(1) << (2 * n - 1));
    v /= fact;
    if n % 2 == 0 {
        v = -v;
    }
    v
}

/// Exact `zeta_star_q(2n)`:
/// `(-1)^n 2^{2n-2} Etilde_{2n-1} / [2n-1]_q!`.
pub fn zeta_star_even_exact(q: &Rational, n: u32) -> Rational {
    let fam = qnumbers::compute_families(2 * n);
    let et = &fam.e_tilde[2 * n as usize - 1];
    let fact = q_factorial_exact(2 * n - 1, q);
    let mut v = et.eval_rational(q).expect("E~ denominators nonzero on (0,1)");
    v *= Rational::from(Integer::from(1) << (2 * n - 2));
    v /= fact;
    if n % 2 == 1 {
        v = -v;
    }
    v
}

/// Exact `eta_q(2n)`: `(-1)^n 2^{2n-1} b_{2n}(1/2) / [2n]_q!`.
pub fn eta_even_exact(q: &Rational, n: u32) -> Rational {
    let fam = qnumbers::compute_families(2 * n);
    let half = Rational::from((1, 2));
    let val = fam.b_poly[2 * n as usize]
        .eval_x(&half)
        .eval_rational(q)
        .expect("b_{2n}(1/2) denominators nonzero on (0,1)");
    let fact = q_factorial_exact(2 * n, q);
    let mut v = val * Rational::from(Integer::from(1) << (2 * n - 1)) / fact;
    if n % 2 == 1 {
        v = -v;
    }
    v
}

/// Exact `eta_star_q(2n+1)`: `(-1)^n 2^{2n-1} e_{2n}(1/2) / [2n]_q!`
/// (for `n = 0` the power of two is the rational `1/2`).
pub fn eta_star_odd_exact(q: &Rational, n: u32) -> Rational {
    let fam = qnumbers::compute_families(2 * n + 1);
    let half = Rational::from((1, 2));
    let val = fam.e_poly[2 * n as usize]
        .eval_x(&half)
        .eval_rational(q)
        .expect("e_{2n}(1/2) denominators nonzero on (0,1)");
    let fact = q_factorial_exact(2 * n, q);
    let two_pow = if n == 0 {
        Rational::from((1, 2))
    } else {
        Rational::from(Integer::from(1) << (2 * n - 1))
    };
    let mut v = val * two_pow / fact;
    if n % 2 == 1 {
        v = -v;
    }
    v
}

/// Values of `zeta_q` away from the direct-series half-plane, through the
/// reflection against the boundary sum at argument `1-s`.
///
/// * even `s >= 2`: exact closed form (cross-checked elsewhere against the
///   direct evaluator);
/// * `s = 0`: exactly `-1/2`;
/// * negative even `s`: exactly `0` (trivial zeros);
/// * `s = 1`: pole;
/// * odd `s <= -1`: the reflection degenerates to `0/0` and is reported as
///   out of domain;
/// * non-integer `s > 1`: direct series; other non-integer `s`: out of domain.
pub fn continued_zeta_q(sctx: &SpectralContext, s: &Float) -> QResult<SeriesValue> {
    let p = sctx.prec();
    if let Some(n) = as_integer(s) {
        if n == 1 {
            return Err(QError::Pole("zeta_q has its pole at s = 1".into()));
        }
        if n % 2 == 0 {
            let exact = if n >= 2 {
                zeta_even_exact(sctx.ctx.q(), (n / 2) as u32)
            } else if n == 0 {
                Rational::from((-1, 2))
            } else {
                Rational::new()
            };
            return Ok(SeriesValue::real(
                Float::with_val(p, &exact),
                Float::with_val(p, 0),
                0,
            ));
        }
        if n >= 3 {
            return zeta_q(sctx, s);
        }
        return Err(QError::Domain(
            "at negative odd s both the boundary sum and the reflection factor vanish \
             exactly; the quotient is a genuine 0/0 and no value is assigned"
                .into(),
        ));
    }
    if s.to_f64() > 1.0 {
        return zeta_q(sctx, s);
    }
    Err(QError::Domain(
        "non-integer s <= 1: the direct series diverges and the reflection is only \
         available at integer arguments"
            .into(),
    ))
}

/// Continuation companion of [`zeta_star_q`]; same dispatch with
/// `zeta_star_q(0) = 0` and pole at `s = 1`.
pub fn continued_zeta_q_star(sctx: &SpectralContext, s: &Float) -> QResult<SeriesValue> {
    let p = sctx.prec();
    if let Some(n) = as_integer(s) {
        if n == 1 {
            return Err(QError::Pole("zeta_star_q has its pole at s = 1".into()));
        }
        if n % 2 == 0 {
            let exact = if n >= 2 {
                zeta_star_even_exact(sctx.ctx.q(), (n / 2) as u32)
            } else {
                Rational::new()
            };
            return Ok(SeriesValue::real(
                Float::with_val(p, &exact),
                Float::with_val(p, 0),
                0,
            ));
        }
        if n >= 3 {
            return zeta_star_q(sctx, s);
        }
        return Err(QError::Domain(
            "at negative odd s the reflection for zeta_star_q degenerates to 0/0; \
             no value is assigned"
                .into(),
        ));
    }
    if s.to_f64() > 1.0 {
        return zeta_star_q(sctx, s);
    }
    Err(QError::Domain(
        "non-integer s <= 1: the direct series diverges and the reflection is only \
         available at integer arguments"
            .into(),
    ))
}

/// Rayleigh-type zero sum `sigma_{2n}(nu; q^2) = sum_j j_k^{-2n}` over the
/// positive zeros `j_k` of the entire q-Bessel-type function of order `nu`
/// with base `Q = q^2`, computed through the residue weights
/// `-j^{1-2n} J_{nu+1}(j) / ((1-Q^{nu+1}) J_nu'(j))`.
///
/// Builds its own zero table: the table size needed depends on `n` and the
/// Bessel zeros, not on the trigonometric tables in the context.
pub fn rayleigh_sigma(sctx: &SpectralContext, n: u32, nu: &Rational) -> QResult<SeriesValue> {
    if n == 0 {
        return Err(QError::Domain("sigma_{2n} needs n >= 1".into()));
    }
    let ctx = &sctx.ctx;
    let p = sctx.prec();
    let lq = ctx.log10_inv_q();
    // Terms decay like q^{2(2n-1)k}; size the table so the tail clears tol.
    let k_count = ((ctx.tol_digits() as f64 + 6.0) / (2.0 * (2.0 * n as f64 - 1.0) * lq)).ceil()
        as usize
        + 4;
    if k_count > 400 {
        return Err(QError::Coverage(format!(
            "sigma_{{2n}} at n={} q={} would need {} Bessel zeros",
            n,
            ctx.q(),
            k_count
        )));
    }
    let bigq = Rational::from(ctx.q() * ctx.q());
    let wdigits = ctx.digits() + 10;
    let table = locate_zeros(
        &ZeroKind::Bessel { nu: nu.clone() },
        &bigq,
        k_count as u32,
        wdigits,
    )?;

    let bigq_f = Float::with_val(p, &bigq);
    let nu_plus = Rational::from(nu + 1u32);
    let qnu1 = q_powr_f(&bigq_f, &nu_plus);
    let one_minus = Float::with_val(p, 1 - &qnu1);
    if one_minus == 0 {
        return Err(QError::Domain("1 - Q^{nu+1} vanishes".into()));
    }

    let terms: Vec<Float> = table
        .entries
        .par_iter()
        .map(|e| -> QResult<Float> {
            let j = &e.value;
            let jnup1 = bessel_entire(&nu_plus, j, &bigq, wdigits)?.value;
            let jp = bessel_entire_prime(nu, j, &bigq, wdigits)?.value;
            let jpow = Float::with_val(p, j.pow(1i32 - 2 * n as i32));
            let mut t = Float::with_val(p, &jpow * &jnup1);
            t /= &one_minus;
            t /= &jp;
            Ok(-t)
        })
        .collect::<QResult<_>>()?;

    let mut acc = Float::with_val(p, 0);
    for t in &terms {
        acc += t;
    }
    let last = terms.last().unwrap().clone().abs();
    let qf = ctx.q_float(p);
    let ratio = Float::with_val(p, (&qf).pow(2 * (2 * n - 1)));
    let tail = Float::with_val(p, &last * &ratio) / Float::with_val(p, 1 - &ratio);
    let tol = ctx.tol();
    let scale = Float::with_val(p, acc.clone().abs()).max(&Float::with_val(p, 1));
    if tail >= Float::with_val(p, &tol * &scale) {
        return Err(QError::Coverage(format!(
            "sigma_{{2n}} tail {} above tolerance after {} zeros",
            float_to_decimal(&tail, 3),
            k_count
        )));
    }
    Ok(SeriesValue::real(acc, tail, k_count))
}

/// Exact Taylor route to the same sums: `sigma_2, sigma_4, ..., sigma_{2 n_max}`
/// of order `nu` (with `2 nu` integral) and base `Q = q^2`, from the logarithmic
/// derivative of the entire Bessel-type series.  All arithmetic is rational.
pub fn rayleigh_sigma_taylor(
    q: &Rational,
    nu: &Rational,
    n_max: u32,
) -> QResult<Vec<Rational>> {
    let two_nu = Rational::from(nu * 2u32);
    if !two_nu.is_integer() {
        return Err(QError::Domain(
            "exact Taylor route needs nu with 2*nu an integer, so that q^{2 nu} is rational"
                .into(),
        ));
    }
    let nu2: i64 = two_nu.numer().to_i64().ok_or_else(|| {
        QError::Domain("nu out of range".into())
    })?;
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let bigq = Rational::from(q * q);
    // q^m for possibly negative integer m.
    let qp = |m: i64| -> Rational {
        if m >= 0 {
            q.clone().pow(m as u32)
        } else {
            Rational::from(1) / q.clone().pow((-m) as u32)
        }
    };
    let one = Rational::from(1);
    let fourc = Rational::from(&one - &bigq).pow(2u32) * 4u32;

    // Coefficients of the entire series in the variable x^2:
    //   a_m = -a_{m-1} Q^{2m-1+nu} / ([m]_Q [m+nu]_Q 4(1-Q)^2).
    let coeffs = |order2: i64| -> QResult<Vec<Rational>> {
        let mut a = vec![Rational::from(1)];
        for m in 1..=(n_max as i64) {
            let qpow = qp(4 * m - 2 + order2);
            let brm = Rational::from(&one - bigq.clone().pow(m as u32))
                / Rational::from(&one - &bigq);
            let e = 2 * m + order2;
            let brmnu = Rational::from(&one - qp(e)) / Rational::from(&one - &bigq);
            if brmnu == 0 {
                return Err(QError::Domain(format!(
                    "order nu = {} hits a vanishing bracket; series not defined",
                    Rational::from((order2, 2))
                )));
            }
            let prev = a.last().unwrap().clone();
            let denom = brm * brmnu * &fourc;
            a.push(-(prev * qpow / denom));
        }
        Ok(a)
    };

    let upper = coeffs(nu2 + 2)?;
    let lower = coeffs(nu2)?;
    // Cauchy division r = upper / lower in the x^2 variable.
    let mut r: Vec<Rational> = Vec::with_capacity(n_max as usize + 1);
    for m in 0..=(n_max as usize) {
        let mut acc = upper[m].clone();
        for i in 0..m {
            acc -= Rational::from(&r[i] * &lower[m - i]);
        }
        r.push(acc);
    }
    let denom = Rational::from(&one - qp(nu2 + 2)) * 2u32;
    if denom == 0 {
        return Err(QError::Domain("1 - Q^{nu+1} vanishes".into()));
    }
    Ok((1..=n_max as usize)
        .map(|n| Rational::from(&r[n - 1] / &denom))
        .collect())
}

/// Families snapshot re-exported for callers that need the polynomial data
/// behind the exact even values.
pub fn number_families(n_max: u32) -> QNumberFamilies {
    qnumbers::compute_families(n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctx::{bits_for, parse_rational};

    fn fl(p: u32, s: &str) -> Float {
        Float::with_val(p, Float::parse(s).unwrap())
    }

    fn half_ctx(digits: u32) -> PrecisionContext {
        PrecisionContext::new(parse_rational("1/2").unwrap(), digits)
            .unwrap()
            .with_tol_digits(digits / 2)
    }

    fn assert_close(got: &Float, want: &Float, tol10: i32, label: &str) {
        let d = Float::with_val(got.prec(), got - want).abs();
        let bound = Float::with_val(got.prec(), 10).pow(tol10);
        assert!(
            d < bound,
            "{label}: |{} - {}| = {} >= 1e{tol10}",
            float_to_decimal(got, 25),
            float_to_decimal(want, 25),
            float_to_decimal(&d, 3)
        );
    }

    #[test]
    fn context_weights_have_expected_signs() {
        let ctx = half_ctx(40);
        let sctx = SpectralContext::build(&ctx, 8).unwrap();
        assert_eq!(sctx.k_count(), 8);
        // first sin zero weight: negative slope at xi_1
        assert!(sctx.sinp_at_xi(1) < &Float::with_val(32, 0));
        for k in 1..=8 {
            // Cos/Sin' > 0 at xi_k (zeta terms single-signed) ...
            let rz = Float::with_val(64, sctx.cos_at_xi(k) / sctx.sinp_at_xi(k));
            assert!(rz > 0, "C/S' sign at k={k}");
            // ... and Sin/Cos' < 0 at eta_k
            let r = Float::with_val(64, sctx.sin_at_eta(k) / sctx.cosp_at_eta(k));
            assert!(r < 0, "S/C' sign at k={k}");
        }
    }

    #[test]
    fn eta_values_match_exact_rationals() {
        let ctx = half_ctx(50);
        let sctx = SpectralContext::build(&ctx, 10).unwrap();
        let p = bits_for(50);

        let e2 = eta_q(&sctx, &Float::with_val(p, 2)).unwrap();
        let want = Float::with_val(p, Rational::from((1, 42)));
        assert_close(e2.re(), &want, -25, "eta_q(2) = 1/42");
        assert!(e2.tail_bound < ctx.tol());

        let e0 = eta_q(&sctx, &Float::with_val(p, 0)).unwrap();
        assert_close(e0.re(), &Float::with_val(p, Rational::from((1, 2))), -25, "eta_q(0) = 1/2");

        // exact closed form for eta_q(4) as a cross-check
        let want4 = Float::with_val(p, &eta_even_exact(ctx.q(), 2));
        let e4 = eta_q(&sctx, &Float::with_val(p, 4)).unwrap();
        assert_close(e4.re(), &want4, -25, "eta_q(4) closed form");
    }

    #[test]
    fn eta_at_negative_even_arguments_vanishes() {
        let ctx = half_ctx(60);
        let sctx = SpectralContext::build(&ctx, 12).unwrap();
        let p = bits_for(60);
        for m in [2i64, 4] {
            let v = eta_q(&sctx, &Float::with_val(p, -m)).unwrap();
            let z = Float::with_val(p, 0);
            assert_close(v.re(), &z, -(ctx.tol_digits() as i32), &format!("eta_q(-{m})"));
        }
    }

    #[test]
    fn eta_negative_argument_guards_fire() {
        let ctx = half_ctx(30);
        let sctx = SpectralContext::build(&ctx, 6).unwrap();
        let p = bits_for(30);
        match eta_q(&sctx, &Float::with_val(p, -40)) {
            Err(QError::Coverage(_)) => {}
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    #[test]
    fn zeta_even_integers_match_exact_values() {
        let ctx = half_ctx(50);
        let sctx = SpectralContext::build(&ctx, 10).unwrap();
        let p = bits_for(50);

        let z2 = zeta_q(&sctx, &Float::with_val(p, 2)).unwrap();
        assert_close(z2.re(), &Float::with_val(p, Rational::from((1, 7))), -25, "zeta_q(2) = 1/7");

        let z4 = zeta_q(&sctx, &Float::with_val(p, 4)).unwrap();
        let want = Float::with_val(p, Rational::from((8, 1519)));
        assert_close(z4.re(), &want, -25, "zeta_q(4) = 8/1519");
        assert_eq!(
            zeta_even_exact(ctx.q(), 2),
            Rational::from((8, 1519)),
            "closed form zeta_q(4)"
        );

        let zs2 = zeta_star_q(&sctx, &Float::with_val(p, 2)).unwrap();
        assert_close(zs2.re(), &Float::with_val(p, Rational::from((1, 2))), -25, "zeta*_q(2) = 1/2");

        let zs4 = zeta_star_q(&sctx, &Float::with_val(p, 4)).unwrap();
        assert_close(zs4.re(), &Float::with_val(p, Rational::from((1, 7))), -25, "zeta*_q(4) = 1/7");
        assert_eq!(zeta_star_even_exact(ctx.q(), 2), Rational::from((1, 7)));
    }

    #[test]
    fn direct_series_at_s_2p5_match_frozen_oracles() {
        // Oracle decimals computed independently at 40+ digits.
        let ctx = PrecisionContext::new(parse_rational("1/2").unwrap(), 30)
            .unwrap()
            .with_tol_digits(22);
        let sctx = SpectralContext::build(&ctx, 26).unwrap();
        let p = bits_for(30);
        let s = fl(p, "2.5");

        let z = zeta_q(&sctx, &s).unwrap();
        let want = fl(p, "0.0582536741444039494442020123476059554");
        assert_close(z.re(), &want, -20, "zeta_q(2.5)");

        let zs = zeta_star_q(&sctx, &s).unwrap();
        let want = fl(p, "0.348114535856017931585898531802616469");
        assert_close(zs.re(), &want, -20, "zeta_star_q(2.5)");

        let e = eta_q(&sctx, &s).unwrap();
        let want = fl(p, "0.0110021555886195216033034943791717473");
        assert_close(e.re(), &want, -20, "eta_q(2.5)");

        let es = eta_star_q(&sctx, &s).unwrap();
        let want = fl(p, "0.220713018601821654408707830233293693");
        assert_close(es.re(), &want, -20, "eta_star_q(2.5)");
    }

    #[test]
    fn zeta_left_of_one_is_domain_error() {
        let ctx = half_ctx(40);
        let sctx = SpectralContext::build(&ctx, 6).unwrap();
        let p = bits_for(40);
        match zeta_q(&sctx, &fl(p, "0.5")) {
            Err(QError::Domain(msg)) => assert!(msg.contains("continued")),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn continued_values_at_special_points() {
        let ctx = half_ctx(50);
        let sctx = SpectralContext::build(&ctx, 10).unwrap();
        let p = bits_for(50);

        let z0 = continued_zeta_q(&sctx, &Float::with_val(p, 0)).unwrap();
        assert_close(z0.re(), &Float::with_val(p, Rational::from((-1, 2))), -40, "zeta_q(0)");

        let zm2 = continued_zeta_q(&sctx, &Float::with_val(p, -2)).unwrap();
        assert!(zm2.re().is_zero(), "trivial zero at -2");

        let zs0 = continued_zeta_q_star(&sctx, &Float::with_val(p, 0)).unwrap();
        assert!(zs0.re().is_zero(), "zeta_star_q(0) = 0");

        // agreement with the direct route at s = 2
        let z2c = continued_zeta_q(&sctx, &Float::with_val(p, 2)).unwrap();
        assert_close(z2c.re(), &Float::with_val(p, Rational::from((1, 7))), -25, "continued at 2");

        match continued_zeta_q(&sctx, &Float::with_val(p, 1)) {
            Err(QError::Pole(_)) => {}
            other => panic!("expected pole, got {other:?}"),
        }
        match continued_zeta_q(&sctx, &Float::with_val(p, -3)) {
            Err(QError::Domain(_)) => {}
            other => panic!("expected 0/0 domain error, got {other:?}"),
        }
    }

    #[test]
    fn taylor_sigmas_are_exact_fractions() {
        let q = parse_rational("1/2").unwrap();
        let plus = parse_rational("1/2").unwrap();
        let minus = parse_rational("-1/2").unwrap();
        let sp = rayleigh_sigma_taylor(&q, &plus, 3).unwrap();
        assert_eq!(sp[0], Rational::from((4, 7)));
        assert_eq!(sp[1], Rational::from((32, 1519)));
        assert_eq!(sp[2], Rational::from((1280, 1350391)));
        let sm = rayleigh_sigma_taylor(&q, &minus, 3).unwrap();
        assert_eq!(sm[0], Rational::from(1));
        assert_eq!(sm[1], Rational::from((2, 7)));
        assert_eq!(sm[2], Rational::from((20, 217)));

        let q7 = parse_rational("7/10").unwrap();
        let sp7 = rayleigh_sigma_taylor(&q7, &plus, 2).unwrap();
        assert_eq!(sp7[0], Rational::from((500, 657)));
        assert_eq!(sp7[1], Rational::from((4287500000u64, 35910175257u64)));
        let sm7 = rayleigh_sigma_taylor(&q7, &minus, 1).unwrap();
        assert_eq!(sm7[0], Rational::from((5, 3)));
    }

    #[test]
    fn zero_sum_route_matches_taylor_route() {
        let ctx = PrecisionContext::new(parse_rational("1/2").unwrap(), 30)
            .unwrap()
            .with_tol_digits(16);
        let sctx = SpectralContext::build(&ctx, 2).unwrap();
        let p = bits_for(30);
        let nu = parse_rational("1/2").unwrap();
        let zs = rayleigh_sigma(&sctx, 2, &nu).unwrap();
        let want = Float::with_val(p, Rational::from((32, 1519)));
        assert_close(zs.re(), &want, -15, "sigma_4(1/2) zero-sum vs exact");
    }

    #[test]
    fn taylor_route_rejects_irrational_base_orders() {
        let q = parse_rational("1/2").unwrap();
        let nu = parse_rational("1/3").unwrap();
        match rayleigh_sigma_taylor(&q, &nu, 2) {
            Err(QError::Domain(_)) => {}
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn eta_star_odd_exact_matches_series() {
        let ctx = half_ctx(50);
        let sctx = SpectralContext::build(&ctx, 10).unwrap();
        let p = bits_for(50);
        for n in 0u32..=2 {
            let s = Float::with_val(p, 2 * n + 1);
            let got = eta_star_q(&sctx, &s).unwrap();
            let want = Float::with_val(p, &eta_star_odd_exact(ctx.q(), n));
            assert_close(got.re(), &want, -25, &format!("eta_star_q({})", 2 * n + 1));
        }
    }
}
