//! Minimal complex arithmetic over pairs of `rug::Float`.
//!
//! Only what the contour and product code needs: field ops, abs/arg,
//! exp/ln, and real powers. Precision follows the operands (max of the
//! two real-part precisions).

use rug::Float;

#[derive(Debug, Clone)]
pub struct Cpx {
    pub re: Float,
    pub im: Float,
}

impl Cpx {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self { re: Float::with_val(prec, 1u32), im: Float::new(prec) }
    }

    pub fn from_real(re: Float) -> Self {
        let p = re.prec();
        Self { re, im: Float::new(p) }
    }

    pub fn from_imag(im: Float) -> Self {
        let p = im.prec();
        Self { re: Float::new(p), im }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    fn p2(&self, o: &Cpx) -> u32 {
        self.prec().max(o.prec())
    }

    pub fn add(&self, o: &Cpx) -> Cpx {
        let p = self.p2(o);
        Cpx::new(
            Float::with_val(p, &self.re + &o.re),
            Float::with_val(p, &self.im + &o.im),
        )
    }

    pub fn sub(&self, o: &Cpx) -> Cpx {
        let p = self.p2(o);
        Cpx::new(
            Float::with_val(p, &self.re - &o.re),
            Float::with_val(p, &self.im - &o.im),
        )
    }

    pub fn mul(&self, o: &Cpx) -> Cpx {
        let p = self.p2(o);
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Cpx::new(re, im)
    }

    pub fn div(&self, o: &Cpx) -> Cpx {
        let p = self.p2(o);
        let d = Float::with_val(p, &o.re * &o.re) + Float::with_val(p, &o.im * &o.im);
        let re = (Float::with_val(p, &self.re * &o.re)
            + Float::with_val(p, &self.im * &o.im))
            / &d;
        let im = (Float::with_val(p, &self.im * &o.re)
            - Float::with_val(p, &self.re * &o.im))
            / &d;
        Cpx::new(re, im)
    }

    pub fn neg(&self) -> Cpx {
        let p = self.prec();
        Cpx::new(Float::with_val(p, -&self.re), Float::with_val(p, -&self.im))
    }

    pub fn conj(&self) -> Cpx {
        let p = self.prec();
        Cpx::new(self.re.clone(), Float::with_val(p, -&self.im))
    }

    /// multiply by i in place-free form: i(a+bi) = -b + ai
    pub fn mul_i(&self) -> Cpx {
        let p = self.prec();
        Cpx::new(Float::with_val(p, -&self.im), self.re.clone())
    }

    pub fn scale(&self, c: &Float) -> Cpx {
        let p = self.prec().max(c.prec());
        Cpx::new(Float::with_val(p, &self.re * c), Float::with_val(p, &self.im * c))
    }

    pub fn abs(&self) -> Float {
        let p = self.prec();
        let h = Float::with_val(p, &self.re * &self.re) + Float::with_val(p, &self.im * &self.im);
        h.sqrt()
    }

    pub fn arg(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.im.atan2_ref(&self.re))
    }

    pub fn exp(&self) -> Cpx {
        let p = self.prec();
        let r = Float::with_val(p, self.re.exp_ref());
        let c = Float::with_val(p, self.im.cos_ref());
        let s = Float::with_val(p, self.im.sin_ref());
        Cpx::new(Float::with_val(p, &r * &c), Float::with_val(p, &r * &s))
    }

    /// principal branch
    pub fn ln(&self) -> Cpx {
        Cpx::new(self.abs().ln(), self.arg())
    }

    /// z^s for real s, principal branch.
    pub fn powf(&self, s: &Float) -> Cpx {
        let l = self.ln().scale(s);
        l.exp()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// (i)^s and (-i)^s for real s, principal branch: exp(+/- i pi s / 2).
pub fn i_pow(s: &Float, negative: bool) -> Cpx {
    let p = s.prec();
    let pi = Float::with_val(p, rug::float::Constant::Pi);
    let mut ang = pi * s / 2u32;
    if negative {
        ang = -ang;
    }
    Cpx::new(
        Float::with_val(p, ang.cos_ref()),
        Float::with_val(p, ang.sin_ref()),
    )
}
