//! Structural invariants checked over randomized inputs: exact identities on
//! rationals where possible, tolerance comparisons on floats where not.

use proptest::prelude::*;
use qzeta::ctx::{
    bits_for, q_binomial_exact, q_intpow, q_pochhammer_exact, q_pochhammer_inf_f,
    PrecisionContext,
};
use qzeta::qfunctions::{cos_q, e_big, e_small, sin_q};
use qzeta::spectral::{eta_q, SpectralContext};
use rug::ops::Pow;
use rug::{Float, Rational};

fn pow10(p: u32, e: i32) -> Float {
    Float::with_val(p, 10u32).pow(e)
}

fn q_grid() -> impl Strategy<Value = Rational> {
    (25u32..=75).prop_map(|n| Rational::from((n, 100)))
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-199i32..=199).prop_map(|n| Rational::from((n, 100)))
}

fn rel_close(a: &Float, b: &Float, tol_exp: i32) -> bool {
    let p = a.prec();
    let diff = Float::with_val(p, a - b).abs();
    let scale = Float::with_val(p, b.clone().abs()).max(&Float::with_val(p, 1));
    diff < pow10(p, tol_exp) * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `(a;q)_{m+n} = (a;q)_m * (a q^m; q)_n` exactly on rationals.
    #[test]
    fn pochhammer_splits_at_any_midpoint(
        q in q_grid(),
        a in small_rational(),
        m in 0u32..=6,
        n in 0u32..=6,
    ) {
        let whole = q_pochhammer_exact(&a, m + n, &q);
        let left = q_pochhammer_exact(&a, m, &q);
        let shifted = Rational::from(&a * &q_intpow(&q, m as i64));
        let right = q_pochhammer_exact(&shifted, n, &q);
        prop_assert_eq!(whole, left * right);
    }

    /// Symmetry and the Pascal recurrence of the q-binomials, exactly.
    #[test]
    fn q_binomial_symmetry_and_pascal(
        q in q_grid(),
        n in 1u32..=12,
        k_seed in 0u32..=12,
    ) {
        let k = k_seed % (n + 1);
        let b = q_binomial_exact(n, k, &q);
        prop_assert_eq!(&b, &q_binomial_exact(n, n - k, &q));
        if k >= 1 && k <= n - 1 {
            let rec = q_binomial_exact(n - 1, k - 1, &q)
                + q_intpow(&q, k as i64) * q_binomial_exact(n - 1, k, &q);
            prop_assert_eq!(&b, &rec);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The two exponential kernels invert each other: `e(z) E(-z) = 1`.
    #[test]
    fn kernel_product_inverts(q in q_grid(), t in -3.0f64..0.9) {
        let digits = 30;
        let p = bits_for(digits);
        let one_minus = Float::with_val(p, &Rational::from(Rational::from(1) - &q));
        let z = Float::with_val(p, t) / &one_minus;
        let small = e_small(&z, &q, digits).unwrap().value;
        let neg_z = -z.clone();
        let big = e_big(&neg_z, &q, digits).unwrap().value;
        let prod = Float::with_val(p, &small * &big);
        prop_assert!(
            rel_close(&prod, &Float::with_val(p, 1), -25),
            "e(z)E(-z) = {prod} at q={q}, t={t}"
        );
    }

    /// `Cos^2 + Sin^2` collapses to the infinite product `(-(1-q)^2 y^2; q^2)_inf`.
    #[test]
    fn pythagorean_product_form(q in q_grid(), yc in -500i32..=500) {
        let digits = 30;
        let p = bits_for(digits);
        let y = Float::with_val(p, Rational::from((yc, 100)));
        let s = sin_q(&y, &q, digits).unwrap().value;
        let c = cos_q(&y, &q, digits).unwrap().value;
        let lhs = Float::with_val(p, s.square_ref()) + Float::with_val(p, c.square_ref());
        let one_minus = Float::with_val(p, &Rational::from(Rational::from(1) - &q));
        let arg = -Float::with_val(p, Float::with_val(p, &y * &one_minus).square_ref());
        let q2 = Float::with_val(p, &Rational::from(&q * &q));
        let rhs = q_pochhammer_inf_f(&arg, &q2, digits);
        prop_assert!(
            rel_close(&lhs, &rhs, -24),
            "Cos^2+Sin^2 = {lhs} vs product {rhs} at q={q}, y={y}"
        );
    }

    /// The entire kernel's power series agrees with its product form.
    #[test]
    fn entire_kernel_series_matches_product(q in q_grid(), zc in -400i32..=400) {
        let digits = 30;
        let p = bits_for(digits);
        let z = Float::with_val(p, Rational::from((zc, 100)));
        let prod = e_big(&z, &q, digits).unwrap().value;
        // E(z) = sum_k q^{k(k-1)/2} ((1-q)z)^k / (q;q)_k
        let qf = Float::with_val(p, &q);
        let one_minus = Float::with_val(p, 1 - &qf);
        let base = Float::with_val(p, &z * &one_minus);
        let mut acc = Float::with_val(p, 1);
        let mut num = Float::with_val(p, 1); // q^{k(k-1)/2} ((1-q)z)^k
        let mut poch = Float::with_val(p, 1); // (q;q)_k
        let mut qpow = Float::with_val(p, 1); // q^k
        let tol = pow10(p, -35);
        for k in 1..=600u32 {
            num *= &base;
            if k >= 2 {
                // accumulate q^{k-1} into the triangular power
                num *= Float::with_val(p, qzeta::ctx::q_powi_f(&qf, (k - 1) as i64));
            }
            qpow *= &qf;
            poch *= Float::with_val(p, 1 - &qpow);
            let term = Float::with_val(p, &num / &poch);
            let scale = Float::with_val(p, acc.clone().abs()).max(&Float::with_val(p, 1));
            acc += &term;
            if Float::with_val(p, term.abs_ref()) < Float::with_val(p, &tol * &scale) {
                break;
            }
        }
        prop_assert!(
            rel_close(&acc, &prod, -24),
            "series {acc} vs product {prod} at q={q}, z={z}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// Zero tables interlace and the weight ratios keep their signs: the
    /// cosine-over-sine-derivative ratio is positive at every sine zero, the
    /// sine-over-cosine-derivative ratio negative at every cosine zero.
    #[test]
    fn zero_tables_interlace_and_weights_keep_sign(qn in 28u32..=72) {
        let q = Rational::from((qn, 100));
        let ctx = PrecisionContext::new(q.clone(), 25).unwrap().with_tol_digits(15);
        let sctx = SpectralContext::build(&ctx, 6).unwrap();
        for k in 1..=6usize {
            if k < 6 {
                prop_assert!(sctx.eta(k) < sctx.xi(k));
                prop_assert!(sctx.xi(k) < sctx.eta(k + 1));
            }
            let zr = Float::with_val(ctx.prec(), sctx.cos_at_xi(k) / sctx.sinp_at_xi(k));
            prop_assert!(zr > 0, "cos/sin' ratio at sine zero {k} is {zr}");
            let zs = Float::with_val(ctx.prec(), sctx.sin_at_eta(k) / sctx.cosp_at_eta(k));
            prop_assert!(zs < 0, "sin/cos' ratio at cosine zero {k} is {zs}");
        }
    }

    /// Deepening the zero table does not move a converged eta value.
    #[test]
    fn eta_stable_under_deeper_tables(qn in 30u32..=70, sc in 13i32..=57) {
        let q = Rational::from((qn, 100));
        let s_val = Rational::from((sc, 10));
        let ctx = PrecisionContext::new(q.clone(), 25).unwrap().with_tol_digits(15);
        let p = ctx.prec();
        let shallow = SpectralContext::build(&ctx, 8).unwrap();
        let deep = SpectralContext::build(&ctx, 12).unwrap();
        let s = Float::with_val(p, &s_val);
        let a = eta_q(&shallow, &s).unwrap();
        let b = eta_q(&deep, &s).unwrap();
        let diff = Float::with_val(p, a.re() - b.re()).abs();
        let scale = Float::with_val(p, b.re().clone().abs()).max(&Float::with_val(p, 1));
        let budget = Float::with_val(p, &a.tail_bound + &b.tail_bound)
            + Float::with_val(p, &ctx.tol() * &scale) * 5u32;
        prop_assert!(diff <= budget, "eta({s_val}) moved by {diff:e} at q={q}");
    }
}
