//! Exact symbolic functions of `x` closed under the series recursion:
//! finite sums of `c * w^j / (1+w)^(B+delta)` with `w = e^{kappa x}` and
//! `kappa^2 = r` rational. The second derivative, products, and powers of
//! such sums stay in the same family, which is what lets every series
//! coefficient be carried exactly.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Rational, Scalar};

/// Polynomial in `w` with exact scalar coefficients; index = degree.
/// Trailing zeros are trimmed; the zero polynomial is the empty sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WPoly {
    coeffs: Vec<Scalar>,
}

impl WPoly {
    pub fn zero() -> Self {
        WPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        WPoly { coeffs: vec![Scalar::one()] }
    }

    /// Build from dense coefficients (index = degree), trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        WPoly { coeffs }
    }

    /// `c * w^j`.
    pub fn monomial(j: usize, c: Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Scalar::zero(); j + 1];
        coeffs[j] = c;
        WPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    fn add(&self, other: &WPoly) -> Result<WPoly> {
        let mut out = Vec::with_capacity(self.coeffs.len().max(other.coeffs.len()));
        for j in 0..self.coeffs.len().max(other.coeffs.len()) {
            let a = self.coeffs.get(j).cloned().unwrap_or_else(Scalar::zero);
            let b = other.coeffs.get(j).cloned().unwrap_or_else(Scalar::zero);
            out.push(a.add(&b)?);
        }
        Ok(WPoly::from_coeffs(out))
    }

    fn mul(&self, other: &WPoly) -> Result<WPoly> {
        if self.is_zero() || other.is_zero() {
            return Ok(WPoly::zero());
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(WPoly::from_coeffs(out))
    }

    fn scale(&self, c: &Scalar) -> Result<WPoly> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.mul(c)?);
        }
        Ok(WPoly::from_coeffs(out))
    }

    fn scale_rat(&self, c: &Rational) -> WPoly {
        WPoly::from_coeffs(self.coeffs.iter().map(|a| a.scale(c)).collect())
    }

    /// Multiply by `(1+w)` (shift-and-add).
    fn mul_one_plus_w(&self) -> WPoly {
        if self.is_zero() {
            return WPoly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            out[j] = out[j].add(a).expect("one polynomial shares one extension");
            out[j + 1] = out[j + 1].add(a).expect("one polynomial shares one extension");
        }
        WPoly::from_coeffs(out)
    }

    /// Exact division by `(1+w)` via synthetic division at the root `w = -1`;
    /// `None` when the remainder is nonzero.
    fn div_one_plus_w(&self) -> Option<WPoly> {
        if self.is_zero() {
            return Some(WPoly::zero());
        }
        let n = self.coeffs.len() - 1;
        if n == 0 {
            return None;
        }
        let mut q = vec![Scalar::zero(); n];
        q[n - 1] = self.coeffs[n].clone();
        for j in (1..n).rev() {
            q[j - 1] = self.coeffs[j]
                .sub(&q[j])
                .expect("one polynomial shares one extension");
        }
        let rem = self.coeffs[0]
            .sub(&q[0])
            .expect("one polynomial shares one extension");
        rem.is_zero().then(|| WPoly::from_coeffs(q))
    }

    /// `w * d/dw` of the polynomial: coefficient `j` scales by `j`.
    fn w_deriv(&self) -> WPoly {
        WPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c.scale(&Rational::from_integer(j.into())))
                .collect(),
        )
    }

    fn eval_f64(&self, w: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c.to_f64();
        }
        acc
    }
}

/// One denominator class: `num(w) / (1+w)^(B + delta)` with integer `B >= 0`
/// and fractional part `delta` in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpRational {
    num: WPoly,
    beta_int: u32,
    delta: Rational,
}

impl ExpRational {
    pub fn num(&self) -> &WPoly {
        &self.num
    }

    pub fn beta_int(&self) -> u32 {
        self.beta_int
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    /// Total denominator exponent `B + delta`.
    pub fn beta(&self) -> Rational {
        Rational::from_integer(self.beta_int.into()) + &self.delta
    }

    /// Divide the numerator by `(1+w)` while exactly divisible, decrementing
    /// `B` (stops at `B = 0`: the fractional part cannot absorb a factor).
    fn reduced(mut self) -> Self {
        while self.beta_int >= 1 {
            match self.num.div_one_plus_w() {
                Some(q) => {
                    self.num = q;
                    self.beta_int -= 1;
                }
                None => break,
            }
        }
        self
    }

    /// One application of `(1/kappa) d/dx`: for `f = num/(1+w)^beta` with
    /// `w' = kappa w`, `f'/kappa = (w num'(w)(1+w) - beta w num(w)) / (1+w)^(beta+1)`.
    fn lower(&self) -> ExpRational {
        let term1 = self.num.w_deriv().mul_one_plus_w();
        let mut shifted = vec![Scalar::zero()];
        shifted.extend(self.num.coeffs.iter().cloned());
        let term2 = WPoly::from_coeffs(shifted).scale_rat(&(-self.beta()));
        let num = term1.add(&term2).expect("one polynomial shares one extension");
        ExpRational { num, beta_int: self.beta_int + 1, delta: self.delta.clone() }
    }

    fn eval_f64(&self, w: f64) -> f64 {
        let n = self.num.eval_f64(w);
        let d = if self.delta.is_zero() {
            (1.0 + w).powi(self.beta_int as i32)
        } else {
            (1.0 + w).powf(self.beta_int as f64 + rational_to_f64(&self.delta))
        };
        n / d
    }
}

/// Exact symbolic function of `x`: a sum of delta-classes sharing one
/// `r = kappa^2`. Always held in canonical form (numerators trimmed and not
/// divisible by `(1+w)` while `B >= 1`; no zero classes), so structural
/// equality is function equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    r: Rational,
    classes: BTreeMap<Rational, ExpRational>,
}

impl Expr {
    /// The zero function (no classes).
    pub fn zero(r: Rational) -> Self {
        Expr { r, classes: BTreeMap::new() }
    }

    /// A constant as a degenerate class `c / (1+w)^0`.
    pub fn constant(r: Rational, c: Scalar) -> Self {
        let mut e = Expr::zero(r);
        if !c.is_zero() {
            e.classes.insert(
                Rational::zero(),
                ExpRational {
                    num: WPoly::from_coeffs(vec![c]),
                    beta_int: 0,
                    delta: Rational::zero(),
                },
            );
        }
        e
    }

    /// Single term `c * w^j / (1+w)^beta`, `beta >= 0`.
    pub fn term(r: Rational, c: Scalar, j: usize, beta: Rational) -> Result<Self> {
        if r.is_negative() || r.is_zero() {
            return Err(Error::Validation(format!("r must be positive, got {r}")));
        }
        if beta.is_negative() {
            return Err(Error::Validation(format!(
                "denominator exponent must be nonnegative, got {beta}"
            )));
        }
        let b_floor = beta.floor();
        let beta_int = b_floor
            .to_integer()
            .to_u32()
            .ok_or_else(|| Error::Validation(format!("denominator exponent {beta} too large")))?;
        let delta = &beta - b_floor;
        let mut e = Expr::zero(r);
        if !c.is_zero() {
            e.classes.insert(
                delta.clone(),
                ExpRational { num: WPoly::monomial(j, c), beta_int, delta }.reduced(),
            );
        }
        Ok(e)
    }

    /// Sum of terms `(c, j, beta)` over one `r`.
    pub fn from_terms(r: Rational, terms: &[(Scalar, usize, Rational)]) -> Result<Self> {
        let mut acc = Expr::zero(r.clone());
        for (c, j, beta) in terms {
            acc = expr_add(&acc, &Expr::term(r.clone(), c.clone(), *j, beta.clone())?)?;
        }
        Ok(acc)
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn is_zero(&self) -> bool {
        self.classes.is_empty()
    }

    /// The value as a single scalar, if the expression is constant in `x`.
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.classes.is_empty() {
            return Some(Scalar::zero());
        }
        if self.classes.len() > 1 {
            return None;
        }
        let p = self.classes.values().next().unwrap();
        if p.beta_int == 0 && p.delta.is_zero() && p.num.degree() == Some(0) {
            Some(p.num.coeffs()[0].clone())
        } else {
            None
        }
    }

    /// Iterate classes in delta order.
    pub fn classes(&self) -> impl Iterator<Item = &ExpRational> {
        self.classes.values()
    }

    /// Scale by an exact rational (infallible).
    pub fn scale_rat(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero(self.r.clone());
        }
        let classes = self
            .classes
            .iter()
            .map(|(d, p)| {
                (
                    d.clone(),
                    ExpRational {
                        num: p.num.scale_rat(c),
                        beta_int: p.beta_int,
                        delta: p.delta.clone(),
                    },
                )
            })
            .collect();
        Expr { r: self.r.clone(), classes }
    }

    /// Scale by a scalar.
    pub fn scale(&self, c: &Scalar) -> Result<Expr> {
        if c.is_zero() {
            return Ok(Expr::zero(self.r.clone()));
        }
        let mut classes = BTreeMap::new();
        for (d, p) in &self.classes {
            let num = p.num.scale(c)?;
            if !num.is_zero() {
                classes.insert(
                    d.clone(),
                    ExpRational { num, beta_int: p.beta_int, delta: p.delta.clone() },
                );
            }
        }
        Ok(Expr { r: self.r.clone(), classes })
    }

    fn require_same_r(&self, other: &Expr) -> Result<()> {
        if self.r == other.r {
            Ok(())
        } else {
            Err(Error::MismatchedR(self.r.to_string(), other.r.to_string()))
        }
    }
}

/// Class-wise sum over the common denominator `(1+w)^(max B + delta)`.
pub fn expr_add(e1: &Expr, e2: &Expr) -> Result<Expr> {
    e1.require_same_r(e2)?;
    let mut classes = e1.classes.clone();
    for (d, p2) in &e2.classes {
        match classes.remove(d) {
            None => {
                classes.insert(d.clone(), p2.clone());
            }
            Some(p1) => {
                let b = p1.beta_int.max(p2.beta_int);
                let mut n1 = p1.num.clone();
                for _ in p1.beta_int..b {
                    n1 = n1.mul_one_plus_w();
                }
                let mut n2 = p2.num.clone();
                for _ in p2.beta_int..b {
                    n2 = n2.mul_one_plus_w();
                }
                let num = n1.add(&n2)?;
                if !num.is_zero() {
                    classes.insert(
                        d.clone(),
                        ExpRational { num, beta_int: b, delta: d.clone() }.reduced(),
                    );
                }
            }
        }
    }
    Ok(Expr { r: e1.r.clone(), classes })
}

/// Difference, via scaling by -1.
pub fn expr_sub(e1: &Expr, e2: &Expr) -> Result<Expr> {
    expr_add(e1, &e2.scale_rat(&-Rational::one()))
}

/// Distribute across classes: numerators multiply, denominator exponents
/// add, and a delta-carry (`delta1 + delta2 >= 1`) folds into `B`.
pub fn expr_mul(e1: &Expr, e2: &Expr) -> Result<Expr> {
    e1.require_same_r(e2)?;
    let mut acc = Expr::zero(e1.r.clone());
    for p1 in e1.classes.values() {
        for p2 in e2.classes.values() {
            let num = p1.num.mul(&p2.num)?;
            if num.is_zero() {
                continue;
            }
            let mut beta_int = p1.beta_int + p2.beta_int;
            let mut delta = &p1.delta + &p2.delta;
            if delta >= Rational::one() {
                delta -= Rational::one();
                beta_int += 1;
            }
            let part = ExpRational { num, beta_int, delta: delta.clone() }.reduced();
            let mut single = Expr::zero(e1.r.clone());
            single.classes.insert(delta, part);
            acc = expr_add(&acc, &single)?;
        }
    }
    Ok(acc)
}

/// Repeated product; `q = 0` gives the constant 1.
pub fn expr_pow(e: &Expr, q: u32) -> Expr {
    let mut acc = Expr::constant(e.r.clone(), Scalar::one());
    for _ in 0..q {
        acc = expr_mul(&acc, e).expect("powers share r and extension");
    }
    acc
}

/// Exact second derivative in `x`, using `dw/dx = kappa w` twice so only
/// `kappa^2 = r` (rational) enters the coefficients.
pub fn expr_d2dx(e: &Expr) -> Expr {
    let mut acc = Expr::zero(e.r.clone());
    for p in e.classes.values() {
        let twice = p.lower().lower().reduced();
        if twice.num.is_zero() {
            continue;
        }
        let mut single = Expr::zero(e.r.clone());
        single.classes.insert(twice.delta.clone(), twice);
        acc = expr_add(&acc, &single).expect("derivative stays in the same field");
    }
    acc.scale_rat(&e.r.clone())
}

/// Re-reduce every class and drop zero classes. All constructors already
/// produce canonical expressions, so this is an idempotent safety net.
pub fn expr_canonicalize(e: &Expr) -> Expr {
    let mut classes = BTreeMap::new();
    for (d, p) in &e.classes {
        let p = p.clone().reduced();
        if !p.num.is_zero() {
            classes.insert(d.clone(), p);
        }
    }
    Expr { r: e.r.clone(), classes }
}

/// Evaluate at `x` with `w = exp(kappa x)`, `kappa = +sqrt(r)`.
pub fn expr_eval(e: &Expr, x: f64) -> Result<f64> {
    let kappa = rational_to_f64(&e.r).sqrt();
    let arg = kappa * x;
    if !arg.is_finite() || arg.abs() > 700.0 {
        return Err(Error::Range(format!(
            "exponent argument {arg:e} exceeds the representable range at x = {x}"
        )));
    }
    let w = arg.exp();
    let value: f64 = e.classes.values().map(|p| p.eval_f64(w)).sum();
    // The flat bound above catches w itself overflowing; powers of w in
    // the numerator or denominator can still overflow for smaller |x|.
    if !value.is_finite() {
        return Err(Error::Range(format!(
            "evaluation overflows the floating-point range at x = {x}"
        )));
    }
    Ok(value)
}

/// Structural equality of canonical forms (= function equality).
pub fn expr_equals(e1: &Expr, e2: &Expr) -> Result<bool> {
    e1.require_same_r(e2)?;
    Ok(expr_canonicalize(e1) == expr_canonicalize(e2))
}

impl fmt::Display for Expr {
    /// Terms `c * w^j / (1+w)^(B+delta)` ordered by `(delta, j)`, joined by
    /// ` + `; the `w` factor is omitted at `j = 0`, the divisor at exponent 0,
    /// fractional exponents are parenthesized, surd scalars parenthesized.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for p in self.classes.values() {
            let beta = p.beta();
            let pow_str = if beta.is_zero() {
                None
            } else if p.delta.is_zero() {
                Some(format!("{}", p.beta_int))
            } else {
                Some(format!("({beta})"))
            };
            for (j, c) in p.num.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut out = if c.surd_part().is_zero() {
                    format!("{c}")
                } else {
                    format!("({c})")
                };
                if j > 0 {
                    out.push_str(&format!(" * w^{j}"));
                }
                if let Some(p) = &pow_str {
                    out.push_str(&format!(" / (1+w)^{p}"));
                }
                terms.push(out);
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}
