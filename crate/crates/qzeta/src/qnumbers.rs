//! Exact q-Bernoulli, q-Euler, and q-Genocchi families as rational
//! functions of q.
//!
//! Everything here is exact: polynomials over arbitrary-precision
//! rationals, rational functions kept gcd-reduced with monic
//! denominators, and power series in the t^n/[n]_q! convention where
//! multiplication is the q-binomial convolution.

use crate::ctx::{QError, QResult};
use rug::Rational;

// ---------------------------------------------------------------------------
// Polynomials in q over the rationals
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct PolyQ {
    /// ascending coefficients, no trailing zeros
    c: Vec<Rational>,
}

impl PolyQ {
    pub fn from_coeffs(v: Vec<Rational>) -> Self {
        let mut c = v;
        while c.last().map_or(false, |x| *x == 0) {
            c.pop();
        }
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1u32))
    }

    pub fn constant(r: Rational) -> Self {
        Self::from_coeffs(vec![r])
    }

    pub fn monomial(deg: usize, coeff: Rational) -> Self {
        let mut v = vec![Rational::new(); deg + 1];
        v[deg] = coeff;
        Self::from_coeffs(v)
    }

    /// [n]_q = 1 + q + ... + q^{n-1} as a polynomial.
    pub fn q_bracket(n: u32) -> Self {
        Self::from_coeffs(vec![Rational::from(1u32); n as usize])
    }

    /// [n]_q! as a polynomial.
    pub fn q_factorial(n: u32) -> Self {
        let mut acc = Self::one();
        for m in 1..=n {
            acc = acc.mul(&Self::q_bracket(m));
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.c.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(Rational::from(self.coeff(i) + o.coeff(i)));
        }
        Self::from_coeffs(v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(Rational::from(self.coeff(i) - o.coeff(i)));
        }
        Self::from_coeffs(v)
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.c.iter().map(|x| Rational::from(-x.clone())).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rational::new(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                v[i + j] += Rational::from(a * b);
            }
        }
        Self::from_coeffs(v)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::from_coeffs(self.c.iter().map(|x| Rational::from(x * r)).collect())
    }

    fn lead(&self) -> Rational {
        self.c.last().cloned().unwrap_or_default()
    }

    /// Long division: self = quot * d + rem with deg rem < deg d.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let dd = d.degree().unwrap();
        let dl = d.lead();
        let mut quot = vec![
            Rational::new();
            self.c.len().saturating_sub(d.c.len()).saturating_add(1)
        ];
        while !rem.is_zero() && rem.degree().unwrap() >= dd {
            let shift = rem.degree().unwrap() - dd;
            let f = Rational::from(rem.lead() / &dl);
            quot[shift] += &f;
            let sub = d.mul(&Self::monomial(shift, f));
            rem = rem.sub(&sub);
        }
        (Self::from_coeffs(quot), rem)
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut r0 = a.clone();
        let mut r1 = b.clone();
        while !r1.is_zero() {
            let (_, r) = r0.divrem(&r1);
            r0 = r1;
            r1 = r;
        }
        if r0.is_zero() {
            return r0;
        }
        let inv = Rational::from(r0.lead().recip_ref());
        r0.scale(&inv)
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        // Horner
        let mut acc = Rational::new();
        for c in self.c.iter().rev() {
            acc *= q;
            acc += c;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Rational functions of q
// ---------------------------------------------------------------------------

/// Reduced rational function of q: gcd(num, den) = 1 and den is monic,
/// so equality is structural.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunctionQ {
    num: PolyQ,
    den: PolyQ,
}

pub type RF = RationalFunctionQ;

impl RationalFunctionQ {
    pub fn new(num: PolyQ, den: PolyQ) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self { num, den: PolyQ::one() };
        }
        let g = PolyQ::gcd(&num, &den);
        let (mut num, _) = num.divrem(&g);
        let (mut den, _) = den.divrem(&g);
        let inv = Rational::from(den.lead().recip_ref());
        num = num.scale(&inv);
        den = den.scale(&inv);
        Self { num, den }
    }

    pub fn from_poly(p: PolyQ) -> Self {
        Self { num: p, den: PolyQ::one() }
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_poly(PolyQ::constant(r))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from(n))
    }

    pub fn zero() -> Self {
        Self { num: PolyQ::zero(), den: PolyQ::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(PolyQ::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn num(&self) -> &PolyQ {
        &self.num
    }

    pub fn den(&self) -> &PolyQ {
        &self.den
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(
            self.num.mul(&o.den).sub(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "division by zero rational function");
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn eval_rational(&self, q: &Rational) -> QResult<Rational> {
        let d = self.den.eval(q);
        if d == 0 {
            return Err(QError::Pole(format!(
                "rational function denominator vanishes at q = {q}"
            )));
        }
        Ok(Rational::from(self.num.eval(q) / d))
    }

    /// JSON object {"num_coeffs": [...], "den_coeffs": [...]} with exact
    /// rational strings, ascending powers of q.
    pub fn to_json(&self) -> String {
        let fmt = |p: &PolyQ| {
            let n = p.degree().map_or(1, |d| d + 1);
            let items: Vec<String> = (0..n).map(|i| format!("\"{}\"", p.coeff(i))).collect();
            format!("[{}]", items.join(","))
        };
        format!(
            "{{\"num_coeffs\":{},\"den_coeffs\":{}}}",
            fmt(&self.num),
            fmt(&self.den)
        )
    }
}

// ---------------------------------------------------------------------------
// Polynomials in x over the rational functions of q
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct PolyX {
    /// ascending x-coefficients, trimmed
    c: Vec<RF>,
}

impl PolyX {
    pub fn from_coeffs(v: Vec<RF>) -> Self {
        let mut c = v;
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: Vec::new() }
    }

    pub fn constant(r: RF) -> Self {
        Self::from_coeffs(vec![r])
    }

    pub fn monomial(deg: usize, coeff: RF) -> Self {
        let mut v = vec![RF::zero(); deg + 1];
        v[deg] = coeff;
        Self::from_coeffs(v)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> RF {
        self.c.get(i).cloned().unwrap_or_else(RF::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect())
    }

    pub fn scale(&self, r: &RF) -> Self {
        Self::from_coeffs(self.c.iter().map(|x| x.mul(r)).collect())
    }

    /// Evaluate at a rational x, leaving a rational function of q.
    pub fn eval_x(&self, x: &Rational) -> RF {
        let mut acc = RF::zero();
        for c in self.c.iter().rev() {
            acc = acc.mul(&RF::from_rational(x.clone())).add(c);
        }
        acc
    }

    /// JSON array of coefficient objects, ascending powers of x.
    pub fn to_json(&self) -> String {
        let n = self.degree().map_or(1, |d| d + 1);
        let items: Vec<String> = (0..n).map(|i| self.coeff(i).to_json()).collect();
        format!("[{}]", items.join(","))
    }
}

// ---------------------------------------------------------------------------
// Generating-function machinery
// ---------------------------------------------------------------------------

/// Pascal table of Gaussian binomials as rational functions (they are in
/// fact polynomials), up to row n_max.
fn pascal(n_max: usize) -> Vec<Vec<RF>> {
    let mut qb: Vec<Vec<PolyQ>> = Vec::with_capacity(n_max + 1);
    qb.push(vec![PolyQ::one()]);
    for n in 1..=n_max {
        let prev = &qb[n - 1];
        let mut row = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut v = PolyQ::zero();
            if k > 0 {
                v = v.add(&prev[k - 1]);
            }
            if k < n {
                v = v.add(&prev[k].mul(&PolyQ::monomial(k, Rational::from(1u32))));
            }
            row.push(v);
        }
        qb.push(row);
    }
    qb.into_iter()
        .map(|row| row.into_iter().map(RF::from_poly).collect())
        .collect()
}

/// Triangular solve for out with num = out * den (q-binomial product),
/// den[0] invertible; den entries are scalars in q, numerators may carry x.
fn series_div(num: &[PolyX], den: &[RF], qb: &[Vec<RF>]) -> Vec<PolyX> {
    let n = num.len();
    let mut out: Vec<PolyX> = Vec::with_capacity(n);
    let d0inv = RF::one().div(&den[0]);
    for m in 0..n {
        let mut acc = num[m].clone();
        for k in 0..m {
            let w = qb[m][k].mul(&den[m - k]);
            acc = acc.sub(&out[k].scale(&w));
        }
        out.push(acc.scale(&d0inv));
    }
    out
}

/// The same triangular solve restricted to scalar numerators.  Because the
/// denominators and q-binomial weights carry no x, the x^0 column of the
/// polynomial division is closed under the recurrence, so this produces the
/// number sequences exactly as `series_div` would, at a fraction of the cost.
fn scalar_series_div(num: &[RF], den: &[RF], qb: &[Vec<RF>]) -> Vec<RF> {
    let n = num.len();
    let mut out: Vec<RF> = Vec::with_capacity(n);
    let d0inv = RF::one().div(&den[0]);
    for m in 0..n {
        let mut acc = num[m].clone();
        for k in 0..m {
            let w = qb[m][k].mul(&den[m - k]);
            acc = acc.sub(&out[k].mul(&w));
        }
        out.push(acc.mul(&d0inv));
    }
    out
}

/// All exact number/polynomial families through index n_max.
#[derive(Debug, Clone)]
pub struct QNumberFamilies {
    pub n_max: u32,
    /// q-Bernoulli numbers beta_n = b_n(0)
    pub beta: Vec<RF>,
    /// q-Bernoulli polynomials, first kind: b_n(x;q)
    pub b_poly: Vec<PolyX>,
    /// q-Bernoulli polynomials, second kind: B_n(x;q)
    pub big_b_poly: Vec<PolyX>,
    /// q-Euler polynomials e_n(x;q)
    pub e_poly: Vec<PolyX>,
    /// q-Euler polynomials E_n(x;q)
    pub big_e_poly: Vec<PolyX>,
    /// q-Euler numbers e_n(0) = E_n(0)
    pub e_tilde: Vec<RF>,
    /// q-Genocchi numbers G_n
    pub genocchi: Vec<RF>,
}

/// Shared series data behind every family: the q-binomial table, the
/// divided kernel coefficients d_m, and the shifted kernel eps + 1.
struct SeriesBases {
    qb: Vec<Vec<RF>>,
    d: Vec<RF>,
    ep1: Vec<RF>,
}

fn series_bases(n: usize) -> SeriesBases {
    let qb = pascal(n + 1);
    // eps coefficients c_m = 2^{-m} sum_k qbinom(m,k) q^{k(k-1)/2}
    let mut c: Vec<RF> = Vec::with_capacity(n + 2);
    for m in 0..=(n + 1) {
        let mut num = PolyQ::zero();
        for k in 0..=m {
            let e = k * (k.saturating_sub(1)) / 2;
            num = num.add(&qb[m][k].num().mul(&PolyQ::monomial(e, Rational::from(1u32))));
        }
        let two_m = Rational::from(rug::Integer::from(1u32) << (m as u32));
        c.push(RF::new(num, PolyQ::constant(two_m)));
    }
    // (eps - 1)/t in the same convention: d_m = c_{m+1}/[m+1]
    let mut d: Vec<RF> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let br = RF::from_poly(PolyQ::q_bracket((m + 1) as u32));
        d.push(c[m + 1].div(&br));
    }
    // eps + 1
    let mut ep1: Vec<RF> = c[..=n].to_vec();
    ep1[0] = ep1[0].add(&RF::one());
    SeriesBases { qb, d, ep1 }
}

/// Compute every family exactly through n_max (>= 1).
pub fn compute_families(n_max: u32) -> QNumberFamilies {
    let n = n_max as usize;
    let SeriesBases { qb, d, ep1 } = series_bases(n);

    // numerators
    let e_small_num: Vec<PolyX> = (0..=n).map(|m| PolyX::monomial(m, RF::one())).collect();
    let e_big_num: Vec<PolyX> = (0..=n)
        .map(|m| {
            let e = m * (m.saturating_sub(1)) / 2;
            PolyX::monomial(m, RF::from_poly(PolyQ::monomial(e, Rational::from(1u32))))
        })
        .collect();
    let two = RF::from_int(2);
    let e_small_num2: Vec<PolyX> = e_small_num.iter().map(|p| p.scale(&two)).collect();
    let e_big_num2: Vec<PolyX> = e_big_num.iter().map(|p| p.scale(&two)).collect();
    let mut g_num = vec![PolyX::zero(); n + 1];
    if n >= 1 {
        g_num[1] = PolyX::constant(two.clone());
    }

    let ep1_scalar: Vec<RF> = ep1.clone();
    let b_poly = series_div(&e_small_num, &d, &qb);
    let big_b_poly = series_div(&e_big_num, &d, &qb);
    let e_poly = series_div(&e_small_num2, &ep1_scalar, &qb);
    let big_e_poly = series_div(&e_big_num2, &ep1_scalar, &qb);
    let g_series = series_div(&g_num, &ep1_scalar, &qb);

    let beta: Vec<RF> = b_poly.iter().map(|p| p.coeff(0)).collect();
    let e_tilde: Vec<RF> = e_poly.iter().map(|p| p.coeff(0)).collect();
    let genocchi: Vec<RF> = g_series.iter().map(|p| p.coeff(0)).collect();

    QNumberFamilies {
        n_max,
        beta,
        b_poly,
        big_b_poly,
        e_poly,
        big_e_poly,
        e_tilde,
        genocchi,
    }
}

/// Just the scalar sequences through n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct QNumberScalars {
    pub beta: Vec<RF>,
    pub e_tilde: Vec<RF>,
    pub genocchi: Vec<RF>,
}

/// The number sequences without the x-polynomial families.  Exact same
/// division structure as `compute_families`, collapsed to the x = 0 column;
/// prefer this when only beta_n, E~_n, or G_n are needed, since the
/// polynomial route grows much faster with n_max.
pub fn compute_scalar_families(n_max: u32) -> QNumberScalars {
    let n = n_max as usize;
    let SeriesBases { qb, d, ep1 } = series_bases(n);

    let mut b_num = vec![RF::zero(); n + 1];
    b_num[0] = RF::one();
    let mut e_num = vec![RF::zero(); n + 1];
    e_num[0] = RF::from_int(2);
    let mut g_num = vec![RF::zero(); n + 1];
    if n >= 1 {
        g_num[1] = RF::from_int(2);
    }

    QNumberScalars {
        beta: scalar_series_div(&b_num, &d, &qb),
        e_tilde: scalar_series_div(&e_num, &ep1, &qb),
        genocchi: scalar_series_div(&g_num, &ep1, &qb),
    }
}

/// q-binomial convolution route: b_n(x) = sum_k qbinom(n,k) beta_{n-k} x^k.
/// Cross-check against the division route.
pub fn b_poly_convolution(beta: &[RF], n: usize) -> PolyX {
    let qb = pascal(n);
    let mut acc = PolyX::zero();
    for k in 0..=n {
        let w = qb[n][k].mul(&beta[n - k]);
        acc = acc.add(&PolyX::monomial(k, w));
    }
    acc
}

/// Gaussian binomial as an exact rational function (polynomial) of q.
pub fn q_binomial_rf(n: u32, k: u32) -> RF {
    if k > n {
        return RF::zero();
    }
    let qb = pascal(n as usize);
    qb[n as usize][k as usize].clone()
}
