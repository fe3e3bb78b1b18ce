//! Truncated polynomials in `t` with exact symbolic coefficients: the
//! carrier for series terms, partial sums, and nonlinear-power bookkeeping.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::symexpr::{expr_add, expr_d2dx, expr_eval, Expr};

/// Polynomial in `t` of fixed truncation order `N`: coefficients are exact
/// functions of `x`, indexed by `t`-degree, with at most `N+1` entries
/// (absent entries are zero). The order is a capacity, not the actual
/// degree; operations that would need degree `> N` are errors, not silent
/// truncations, except for the explicitly truncating products.
#[derive(Clone, Debug)]
pub struct TSeries {
    r: Rational,
    order: usize,
    coeffs: Vec<Expr>,
}

/// `j!` as an exact rational.
pub fn factorial(j: usize) -> Rational {
    let mut f = BigInt::one();
    for i in 2..=j {
        f *= BigInt::from(i);
    }
    Rational::from_integer(f)
}

impl TSeries {
    /// The zero series of the given order.
    pub fn zero(r: Rational, order: usize) -> Self {
        TSeries { r, order, coeffs: Vec::new() }
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `t^j` (zero when absent).
    pub fn coeff(&self, j: usize) -> Expr {
        self.coeffs.get(j).cloned().unwrap_or_else(|| Expr::zero(self.r.clone()))
    }

    /// Highest degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Same coefficients under a larger truncation order.
    pub fn padded(&self, order: usize) -> TSeries {
        TSeries {
            r: self.r.clone(),
            order: self.order.max(order),
            coeffs: self.coeffs.clone(),
        }
    }

    fn set_coeff(&mut self, j: usize, e: Expr) {
        debug_assert!(j <= self.order);
        while self.coeffs.len() <= j {
            self.coeffs.push(Expr::zero(self.r.clone()));
        }
        self.coeffs[j] = e;
    }

    /// Single nonzero coefficient `e` at degree `j`, order `order`.
    pub fn monomial(e: Expr, j: usize, order: usize) -> TSeries {
        let mut s = TSeries::zero(e.r().clone(), order.max(j));
        if !e.is_zero() {
            s.set_coeff(j, e);
        }
        s
    }

    fn require_same_r(&self, other: &TSeries) -> Result<()> {
        if self.r == other.r {
            Ok(())
        } else {
            Err(Error::MismatchedR(self.r.to_string(), other.r.to_string()))
        }
    }

    /// One line per degree, `t^j/j! : <expr>`, where the printed expression
    /// carries the factorial normalization (coefficient times `j!`).
    pub fn render_dump(&self) -> String {
        (0..=self.order)
            .map(|j| format!("t^{j}/{j}! : {}", self.coeff(j).scale_rat(&factorial(j))))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Degree-0 series holding one expression.
pub fn ts_from_expr(e: Expr) -> TSeries {
    let r = e.r().clone();
    let mut s = TSeries::zero(r, 0);
    if !e.is_zero() {
        s.set_coeff(0, e);
    }
    s
}

/// Degree-wise exact sum; the result takes the larger order.
pub fn ts_add(s1: &TSeries, s2: &TSeries) -> Result<TSeries> {
    s1.require_same_r(s2)?;
    let mut out = TSeries::zero(s1.r.clone(), s1.order.max(s2.order));
    for j in 0..s1.coeffs.len().max(s2.coeffs.len()) {
        let c = expr_add(&s1.coeff(j), &s2.coeff(j))?;
        if !c.is_zero() {
            out.set_coeff(j, c);
        }
    }
    Ok(out)
}

/// Scale every coefficient by an exact scalar.
pub fn ts_scale(c: &Scalar, s: &TSeries) -> Result<TSeries> {
    let mut out = TSeries::zero(s.r.clone(), s.order);
    for (j, e) in s.coeffs.iter().enumerate() {
        let e = e.scale(c)?;
        if !e.is_zero() {
            out.set_coeff(j, e);
        }
    }
    Ok(out)
}

/// Scale by a plain rational (infallible).
pub fn ts_scale_rat(c: &Rational, s: &TSeries) -> TSeries {
    let mut out = TSeries::zero(s.r.clone(), s.order);
    for (j, e) in s.coeffs.iter().enumerate() {
        let e = e.scale_rat(c);
        if !e.is_zero() {
            out.set_coeff(j, e);
        }
    }
    out
}

/// Cauchy product truncated at order `n`: coefficient `j` is
/// `sum_{i<=j} s1[i] s2[j-i]` for `j <= n`; higher terms are discarded.
pub fn ts_mul_trunc(s1: &TSeries, s2: &TSeries, n: usize) -> Result<TSeries> {
    s1.require_same_r(s2)?;
    let mut out = TSeries::zero(s1.r.clone(), n);
    for j in 0..=n {
        let mut acc = Expr::zero(s1.r.clone());
        for i in 0..=j {
            let a = s1.coeff(i);
            let b = s2.coeff(j - i);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc = expr_add(&acc, &crate::symexpr::expr_mul(&a, &b)?)?;
        }
        if !acc.is_zero() {
            out.set_coeff(j, acc);
        }
    }
    Ok(out)
}

/// `s^q` truncated at order `n` via repeated truncated products; `q = 0`
/// gives the constant-one series.
pub fn ts_pow_trunc(s: &TSeries, q: u32, n: usize) -> Result<TSeries> {
    let one = ts_from_expr(Expr::constant(s.r.clone(), Scalar::one())).padded(n);
    let mut acc = one;
    for _ in 0..q {
        acc = ts_mul_trunc(&acc, s, n)?;
    }
    Ok(acc)
}

/// Integrate in `t` from 0 (zero integration constant): coefficient `j`
/// moves to `j+1`, divided exactly by `j+1`. The order is unchanged, so a
/// nonzero top coefficient cannot be shifted out and is an error instead of
/// a silent truncation.
pub fn ts_integrate_t(s: &TSeries) -> Result<TSeries> {
    if let Some(top) = s.coeffs.get(s.order) {
        if !top.is_zero() {
            return Err(Error::OrderOverflow(s.order));
        }
    }
    let mut out = TSeries::zero(s.r.clone(), s.order);
    for (j, e) in s.coeffs.iter().enumerate().take(s.order) {
        if e.is_zero() {
            continue;
        }
        let denom = Rational::from_integer(BigInt::from(j + 1));
        out.set_coeff(j + 1, e.scale_rat(&denom.recip()));
    }
    Ok(out)
}

/// Exact second `x`-derivative, coefficient-wise.
pub fn ts_d2dx(s: &TSeries) -> TSeries {
    let mut out = TSeries::zero(s.r.clone(), s.order);
    for (j, e) in s.coeffs.iter().enumerate() {
        let d = expr_d2dx(e);
        if !d.is_zero() {
            out.set_coeff(j, d);
        }
    }
    out
}

/// Horner evaluation in `t` of the evaluated coefficients.
pub fn ts_eval(s: &TSeries, x: f64, t: f64) -> Result<f64> {
    let mut acc = 0.0;
    for e in s.coeffs.iter().rev() {
        acc = acc * t + expr_eval(e, x)?;
    }
    Ok(acc)
}
