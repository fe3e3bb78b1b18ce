//! The perturbation recursion for `u_t = k u_xx + a u - b u^q`: starting
//! from the time-independent initial profile, each order adds
//! `v_{n+1} = integral_0^t (k v_n'' + a v_n - b [v^q]_n) dt` with zero
//! integration constant, where `[v^q]_n` collects the order-`n` part of the
//! nonlinearity.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::symexpr::{expr_add, expr_mul, Expr};
use crate::tseries::{
    ts_add, ts_d2dx, ts_from_expr, ts_integrate_t, ts_scale_rat, TSeries,
};

/// Default cap on the series order; numerator degrees grow linearly with the
/// order, so this bounds both memory and runtime.
pub const DEFAULT_MAX_ORDER: usize = 12;

/// A validated instance of `u_t = k u_xx + a u - b u^q`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub k: Rational,
    pub a: Rational,
    pub b: Rational,
    pub q: u32,
    pub ic: Expr,
    pub r: Rational,
    pub s: Rational,
}

/// Validate and build a problem: `k > 0`, integer `q >= 2` (lower powers
/// make the equation linear), `r > 0`, and the profile must live over the
/// same `r`.
pub fn build_problem(
    k: Rational,
    a: Rational,
    b: Rational,
    q: u32,
    ic: Expr,
    r: Rational,
    s: Rational,
) -> Result<Problem> {
    if !k.is_positive() {
        return Err(Error::Validation(format!("diffusion constant k must be positive, got {k}")));
    }
    if q < 2 {
        return Err(Error::Validation(format!(
            "nonlinearity power q must be at least 2 (q = {q} is linear)"
        )));
    }
    if !r.is_positive() {
        return Err(Error::Validation(format!("r must be positive, got {r}")));
    }
    if ic.r() != &r {
        return Err(Error::Validation(format!(
            "initial profile is over r = {}, problem expects r = {r}",
            ic.r()
        )));
    }
    if s.is_negative() {
        return Err(Error::Validation(format!("extension radicand s must be nonnegative, got {s}")));
    }
    Ok(Problem { k, a, b, q, ic, r, s })
}

/// The four benchmark instantiations. `lambda` is the constant initial value
/// of case 1 and must be absent for the others.
pub fn preset_case(id: u32, lambda: Option<Rational>) -> Result<Problem> {
    let rat = |n: i64, d: i64| Rational::new(n.into(), d.into());
    if id == 1 {
        let lam = lambda.ok_or_else(|| {
            Error::Validation("case 1 requires a lambda value for its constant profile".into())
        })?;
        let r = rat(1, 1);
        let ic = Expr::constant(r.clone(), Scalar::from_rational(lam));
        return build_problem(rat(1, 1), rat(2, 1), rat(3, 1), 2, ic, r, Rational::zero());
    }
    if lambda.is_some() {
        return Err(Error::Validation(format!("lambda applies only to case 1, not case {id}")));
    }
    match id {
        2 => {
            let r = rat(1, 6);
            let ic = Expr::term(r.clone(), Scalar::one(), 0, rat(2, 1))?;
            build_problem(rat(1, 1), rat(1, 1), rat(1, 1), 2, ic, r, Rational::zero())
        }
        3 => {
            let r = rat(9, 10);
            let ic = Expr::term(r.clone(), Scalar::one(), 0, rat(2, 3))?;
            build_problem(rat(1, 1), rat(1, 1), rat(1, 1), 4, ic, r, Rational::zero())
        }
        4 => {
            let r = rat(3, 2);
            let s = rat(3, 4);
            let amp = Scalar::sqrt_of(s.clone())?;
            let ic = Expr::term(r.clone(), amp, 1, rat(1, 1))?;
            build_problem(rat(1, 1), rat(3, 1), rat(4, 1), 3, ic, r, s)
        }
        other => Err(Error::Validation(format!("unknown case id {other} (expected 1..4)"))),
    }
}

/// Order-`n` part of `v^q` for time-homogeneous terms (`v_i` carried by
/// `t^i`): the sum over all ordered index tuples `i_1 + ... + i_q = n` of
/// the products of the corresponding weights, returned as the weight of
/// `t^n`. Enumerated directly, independent of the truncated-product path.
pub fn nonlinear_coeff(vs: &[TSeries], n: usize, q: u32) -> Result<Expr> {
    assert!(q >= 1, "nonlinearity power must be positive");
    assert!(vs.len() > n, "need terms v_0..v_{n}");
    let r = vs[0].r().clone();
    let weights: Vec<Expr> = (0..=n)
        .map(|i| {
            debug_assert!(
                (0..=vs[i].order()).all(|j| j == i || vs[i].coeff(j).is_zero()),
                "terms must be time-homogeneous of their index degree"
            );
            vs[i].coeff(i)
        })
        .collect();

    fn walk(
        weights: &[Expr],
        parts_left: u32,
        budget: usize,
        partial: &Expr,
        acc: &mut Expr,
    ) -> Result<()> {
        if parts_left == 1 {
            let term = expr_mul(partial, &weights[budget])?;
            *acc = expr_add(acc, &term)?;
            return Ok(());
        }
        for i in 0..=budget {
            let next = expr_mul(partial, &weights[i])?;
            if next.is_zero() {
                continue;
            }
            walk(weights, parts_left - 1, budget - i, &next, acc)?;
        }
        Ok(())
    }

    let mut acc = Expr::zero(r.clone());
    let one = Expr::constant(r, Scalar::one());
    walk(&weights, q, n, &one, &mut acc)?;
    Ok(acc)
}

/// Compute `v_0..v_N` with a caller-supplied order cap.
pub fn hpm_terms_with_cap(p: &Problem, n: usize, cap: usize) -> Result<Vec<TSeries>> {
    if n > cap {
        return Err(Error::Validation(format!("order {n} exceeds the configured maximum {cap}")));
    }
    let mut terms = vec![ts_from_expr(p.ic.clone())];
    for m in 0..n {
        let vm = &terms[m];
        let lin = ts_add(
            &ts_scale_rat(&p.k, &ts_d2dx(vm)),
            &ts_scale_rat(&p.a, vm),
        )?;
        let nl = nonlinear_coeff(&terms, m, p.q)?;
        let nl_series = TSeries::monomial(nl.scale_rat(&-p.b.clone()), m, m);
        let integrand = ts_add(&lin, &nl_series)?.padded(m + 1);
        terms.push(ts_integrate_t(&integrand)?);
    }
    Ok(terms)
}

/// Compute `v_0..v_N` under the default cap.
pub fn hpm_terms(p: &Problem, n: usize) -> Result<Vec<TSeries>> {
    hpm_terms_with_cap(p, n, DEFAULT_MAX_ORDER)
}

/// Exact sum `v_0 + ... + v_n`.
pub fn partial_sum(terms: &[TSeries], n: usize) -> Result<TSeries> {
    if n >= terms.len() {
        return Err(Error::IndexOutOfRange(n));
    }
    let mut acc = terms[0].padded(n);
    for t in &terms[1..=n] {
        acc = ts_add(&acc, t)?;
    }
    Ok(acc)
}

/// Deterministic listing of `v_0..v_N`, one line per order in the
/// factorial-normalized `t^i/i!` form.
pub fn dump_terms(p: &Problem, n: usize) -> Result<String> {
    let terms = hpm_terms(p, n)?;
    let sum = partial_sum(&terms, n)?;
    Ok(sum.render_dump())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::symexpr::{expr_equals, expr_pow};
    use crate::tseries::ts_pow_trunc;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    fn konst(r: Rational, n: i64, d: i64) -> Expr {
        Expr::constant(r, Scalar::from_rational(q(n, d)))
    }

    #[test]
    fn build_problem_validations() {
        let r = q(9, 10);
        let ic = Expr::term(r.clone(), Scalar::one(), 0, q(2, 3)).unwrap();
        let ok = build_problem(q(1, 1), q(1, 1), q(1, 1), 4, ic.clone(), r.clone(), q(0, 1));
        assert!(ok.is_ok());
        assert!(build_problem(q(0, 1), q(1, 1), q(1, 1), 4, ic.clone(), r.clone(), q(0, 1)).is_err());
        assert!(build_problem(q(1, 1), q(1, 1), q(1, 1), 1, ic.clone(), r.clone(), q(0, 1)).is_err());
        assert!(build_problem(q(1, 1), q(1, 1), q(1, 1), 4, ic.clone(), q(-1, 6), q(0, 1)).is_err());
        // Profile over a different r than declared.
        assert!(build_problem(q(1, 1), q(1, 1), q(1, 1), 4, ic, q(1, 6), q(0, 1)).is_err());
    }

    #[test]
    fn preset_fields() {
        let p2 = preset_case(2, None).unwrap();
        assert_eq!((p2.k, p2.a, p2.b, p2.q), (q(1, 1), q(1, 1), q(1, 1), 2));
        assert_eq!(p2.r, q(1, 6));
        let want = Expr::term(q(1, 6), Scalar::one(), 0, q(2, 1)).unwrap();
        assert!(expr_equals(&p2.ic, &want).unwrap());

        let p3 = preset_case(3, None).unwrap();
        assert_eq!((p3.q, p3.r.clone()), (4, q(9, 10)));

        let p4 = preset_case(4, None).unwrap();
        assert_eq!((p4.k, p4.a, p4.b, p4.q), (q(1, 1), q(3, 1), q(4, 1), 3));
        assert_eq!((p4.r.clone(), p4.s.clone()), (q(3, 2), q(3, 4)));
        let amp = Scalar::sqrt_of(q(3, 4)).unwrap();
        let want = Expr::term(q(3, 2), amp, 1, q(1, 1)).unwrap();
        assert!(expr_equals(&p4.ic, &want).unwrap());

        let p1 = preset_case(1, Some(q(1, 10))).unwrap();
        assert_eq!(p1.ic.as_constant().unwrap().to_rational().unwrap(), q(1, 10));

        assert!(preset_case(5, None).is_err());
        assert!(preset_case(1, None).is_err());
        assert!(preset_case(2, Some(q(1, 10))).is_err());
    }

    #[test]
    fn constant_profile_terms() {
        // With the constant profile 1/10 the weights are plain rationals:
        // 17/100, 119/1000, 799/30000, -6307/300000, -59449/3000000.
        let p = preset_case(1, Some(q(1, 10))).unwrap();
        let terms = hpm_terms(&p, 5).unwrap();
        let want = [
            q(1, 10),
            q(17, 100),
            q(119, 1000),
            q(799, 30000),
            q(-6307, 300000),
            q(-59449, 3000000),
        ];
        for (i, w) in want.iter().enumerate() {
            let got = terms[i].coeff(i).as_constant().unwrap().to_rational().unwrap();
            assert_eq!(&got, w, "order {i}");
        }
    }

    #[test]
    fn second_case_terms() {
        let p = preset_case(2, None).unwrap();
        let terms = hpm_terms(&p, 3).unwrap();
        let r = q(1, 6);
        let v1 = Expr::term(r.clone(), Scalar::from_rational(q(5, 3)), 1, q(3, 1)).unwrap();
        assert!(expr_equals(&terms[1].coeff(1), &v1).unwrap());
        let v2 = Expr::from_terms(
            r.clone(),
            &[
                (Scalar::from_rational(q(-25, 36)), 1, q(4, 1)),
                (Scalar::from_rational(q(50, 36)), 2, q(4, 1)),
            ],
        )
        .unwrap();
        assert!(expr_equals(&terms[2].coeff(2), &v2).unwrap());
        let v3 = Expr::from_terms(
            r,
            &[
                (Scalar::from_rational(q(125, 648)), 1, q(5, 1)),
                (Scalar::from_rational(q(-875, 648)), 2, q(5, 1)),
                (Scalar::from_rational(q(500, 648)), 3, q(5, 1)),
            ],
        )
        .unwrap();
        assert!(expr_equals(&terms[3].coeff(3), &v3).unwrap());
    }

    #[test]
    fn third_case_first_term() {
        let p = preset_case(3, None).unwrap();
        let terms = hpm_terms(&p, 1).unwrap();
        let v1 = Expr::term(q(9, 10), Scalar::from_rational(q(7, 5)), 1, q(5, 3)).unwrap();
        assert!(expr_equals(&terms[1].coeff(1), &v1).unwrap());
    }

    #[test]
    fn fourth_case_terms() {
        let p = preset_case(4, None).unwrap();
        let terms = hpm_terms(&p, 2).unwrap();
        let amp = Scalar::sqrt_of(q(3, 4)).unwrap();
        let v1 = Expr::term(q(3, 2), amp.scale(&q(9, 2)), 1, q(2, 1)).unwrap();
        assert!(expr_equals(&terms[1].coeff(1), &v1).unwrap());
        let v2 = Expr::from_terms(
            q(3, 2),
            &[
                (amp.scale(&q(81, 8)), 1, q(3, 1)),
                (amp.scale(&q(-81, 8)), 2, q(3, 1)),
            ],
        )
        .unwrap();
        assert!(expr_equals(&terms[2].coeff(2), &v2).unwrap());
    }

    #[test]
    fn terms_are_time_homogeneous() {
        for id in 1..=4u32 {
            let lam = (id == 1).then(|| q(1, 10));
            let p = preset_case(id, lam).unwrap();
            let terms = hpm_terms(&p, 8).unwrap();
            for (i, v) in terms.iter().enumerate() {
                assert!(!v.coeff(i).is_zero(), "case {id}: v_{i} weight vanished");
                for j in 0..=v.order() {
                    if j != i {
                        assert!(v.coeff(j).is_zero(), "case {id}: v_{i} has stray degree {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn defining_recursion_holds_exactly() {
        // (n+1) w_{n+1} = k d2dx(w_n) + a w_n - b [v^q]_n on the weights.
        for id in 1..=4u32 {
            let lam = (id == 1).then(|| q(1, 10));
            let p = preset_case(id, lam).unwrap();
            let terms = hpm_terms(&p, 6).unwrap();
            for n in 0..6 {
                let wn = terms[n].coeff(n);
                let rhs = expr_add(
                    &expr_add(
                        &crate::symexpr::expr_d2dx(&wn).scale_rat(&p.k),
                        &wn.scale_rat(&p.a),
                    )
                    .unwrap(),
                    &nonlinear_coeff(&terms, n, p.q)
                        .unwrap()
                        .scale_rat(&-p.b.clone()),
                )
                .unwrap();
                let lhs = terms[n + 1].coeff(n + 1).scale_rat(&q((n + 1) as i64, 1));
                assert!(expr_equals(&lhs, &rhs).unwrap(), "case {id}, order {n}");
            }
        }
    }

    #[test]
    fn nonlinear_coeff_low_orders() {
        let r = q(1, 6);
        let vs: Vec<TSeries> = (0..=2)
            .map(|i| TSeries::monomial(konst(r.clone(), (i + 2) as i64, 1), i, i))
            .collect();
        // v0=2, v1=3, v2=4 as weights.
        let n0 = nonlinear_coeff(&vs, 0, 2).unwrap();
        assert!(expr_equals(&n0, &konst(r.clone(), 4, 1)).unwrap());
        // q=2, n=2: 2 v0 v2 + v1^2 = 16 + 9 = 25.
        let n2 = nonlinear_coeff(&vs, 2, 2).unwrap();
        assert!(expr_equals(&n2, &konst(r.clone(), 25, 1)).unwrap());
        // q=3, n=2: 3 v0^2 v2 + 3 v0 v1^2 = 48 + 54 = 102.
        let n23 = nonlinear_coeff(&vs, 2, 3).unwrap();
        assert!(expr_equals(&n23, &konst(r, 102, 1)).unwrap());
    }

    #[test]
    fn nonlinear_coeff_matches_truncated_power() {
        for id in 1..=4u32 {
            let lam = (id == 1).then(|| q(1, 10));
            let p = preset_case(id, lam).unwrap();
            let terms = hpm_terms(&p, 6).unwrap();
            for n in 0..=6 {
                let direct = nonlinear_coeff(&terms, n, p.q).unwrap();
                let summed = partial_sum(&terms, n).unwrap();
                let powered = ts_pow_trunc(&summed, p.q, n).unwrap();
                assert!(
                    expr_equals(&direct, &powered.coeff(n)).unwrap(),
                    "case {id}, order {n}"
                );
            }
        }
    }

    #[test]
    fn partial_sum_examples() {
        let p = preset_case(1, Some(q(1, 10))).unwrap();
        let terms = hpm_terms(&p, 5).unwrap();
        let s0 = partial_sum(&terms, 0).unwrap();
        assert!(expr_equals(&s0.coeff(0), &p.ic).unwrap());
        let s1 = partial_sum(&terms, 1).unwrap();
        assert!(expr_equals(&s1.coeff(0), &konst(q(1, 1), 1, 10)).unwrap());
        assert!(expr_equals(&s1.coeff(1), &konst(q(1, 1), 17, 100)).unwrap());
        // Telescoping: S_n - S_{n-1} = v_n.
        for n in 1..=5 {
            let hi = partial_sum(&terms, n).unwrap();
            let lo = partial_sum(&terms, n - 1).unwrap();
            let diff = ts_add(&hi, &ts_scale_rat(&q(-1, 1), &lo)).unwrap();
            for j in 0..=n {
                assert!(expr_equals(&diff.coeff(j), &terms[n].coeff(j)).unwrap());
            }
        }
        match partial_sum(&terms, 6) {
            Err(Error::IndexOutOfRange(6)) => (),
            other => panic!("expected index error, got {other:?}"),
        }
    }

    #[test]
    fn order_cap_is_enforced() {
        let p = preset_case(2, None).unwrap();
        assert!(hpm_terms(&p, DEFAULT_MAX_ORDER + 1).is_err());
        assert!(hpm_terms_with_cap(&p, DEFAULT_MAX_ORDER + 1, DEFAULT_MAX_ORDER + 1).is_ok());
    }

    #[test]
    fn dump_listing() {
        let p = preset_case(2, None).unwrap();
        let text = dump_terms(&p, 1).unwrap();
        assert!(text.contains("t^1/1! : 5/3 * w^1 / (1+w)^3"), "got:\n{text}");
        let only_ic = dump_terms(&p, 0).unwrap();
        assert_eq!(only_ic, "t^0/0! : 1 / (1+w)^2");
        let p4 = preset_case(4, None).unwrap();
        let text = dump_terms(&p4, 2).unwrap();
        let v2_line = text.lines().nth(2).unwrap();
        assert_eq!(
            v2_line,
            "t^2/2! : (0 + 81/4*sqrt(3/4)) * w^1 / (1+w)^3 + (0 + -81/4*sqrt(3/4)) * w^2 / (1+w)^3"
        );
    }

    /// Taylor coefficients of u' = 2u - 3u^2, u(0) = lambda, by the direct
    /// recurrence (n+1) c_{n+1} = 2 c_n - 3 sum_{i+j=n} c_i c_j — a scalar
    /// path that never touches the series machinery.
    fn logistic_taylor(lam: &Rational, upto: usize) -> Vec<Rational> {
        let mut c = vec![lam.clone()];
        for n in 0..upto {
            let mut sq = Rational::zero();
            for i in 0..=n {
                sq += &c[i] * &c[n - i];
            }
            let num = q(2, 1) * &c[n] - q(3, 1) * sq;
            c.push(num / q((n + 1) as i64, 1));
        }
        c
    }

    #[test]
    fn constant_profile_matches_scalar_recurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..20 {
            let den = rng.gen_range(3i64..=60);
            let num = rng.gen_range(1i64..=(2 * den - 1) / 3);
            let lam = q(num, den);
            assert!(lam > q(0, 1) && lam < q(2, 3));
            let p = preset_case(1, Some(lam.clone())).unwrap();
            let terms = hpm_terms(&p, 4).unwrap();
            let want = logistic_taylor(&lam, 4);
            for i in 1..=4 {
                let got = terms[i].coeff(i).as_constant().unwrap().to_rational().unwrap();
                assert_eq!(got, want[i], "lambda {lam}, order {i}");
            }
        }
    }

    #[test]
    fn quartic_power_is_consistent() {
        // Cross-check the composition enumeration against the closed form
        // for q=4, n=2: 4 v0^3 v2 + 6 v0^2 v1^2.
        let r = q(9, 10);
        let vs: Vec<TSeries> = (0..=2)
            .map(|i| TSeries::monomial(konst(r.clone(), (i + 2) as i64, 1), i, i))
            .collect();
        let got = nonlinear_coeff(&vs, 2, 4).unwrap();
        // 4*8*4 + 6*4*9 = 128 + 216 = 344.
        assert!(expr_equals(&got, &konst(r, 344, 1)).unwrap());
        // And against the symbolic power of the summed series.
        let p = preset_case(3, None).unwrap();
        let terms = hpm_terms(&p, 3).unwrap();
        let s3 = partial_sum(&terms, 3).unwrap();
        let w3 = ts_pow_trunc(&s3, 4, 3).unwrap().coeff(3);
        let alt = nonlinear_coeff(&terms, 3, 4).unwrap();
        assert!(expr_equals(&w3, &alt).unwrap());
        // The zeroth nonlinear term is the profile to the fourth power.
        let n0 = nonlinear_coeff(&terms, 0, 4).unwrap();
        assert!(expr_equals(&n0, &expr_pow(&p.ic, 4)).unwrap());
    }
}
