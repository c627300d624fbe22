//! Truncated multivariate Taylor polynomials with rational coefficients, and the expression
//! trees used to describe control-affine vector fields.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{FpaError, Result};
use crate::series::{q, Q};

/// Polynomial in deviation variables `δ = x - x(0)`, exact up to total degree `degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorPoly {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

fn deg(e: &[u32]) -> usize {
    e.iter().map(|&k| k as usize).sum()
}

impl TaylorPoly {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        TaylorPoly { nvars, degree, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, degree: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars, degree);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// `x_i = x_i(0) + δ_i`.
    pub fn variable(nvars: usize, degree: usize, i: usize, at: &Q) -> Self {
        let mut p = Self::constant(nvars, degree, at.clone());
        if degree >= 1 {
            let mut e = vec![0; nvars];
            e[i] = 1;
            p.terms.insert(e, Q::one());
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn value_at_origin(&self) -> Q {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() || deg(&e) > self.degree {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &TaylorPoly) -> TaylorPoly {
        let mut out = TaylorPoly::zero(self.nvars, self.degree.min(o.degree));
        for (e, c) in self.terms.iter().chain(&o.terms) {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Q) -> TaylorPoly {
        let mut out = TaylorPoly::zero(self.nvars, self.degree);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, o: &TaylorPoly) -> TaylorPoly {
        let mut out = TaylorPoly::zero(self.nvars, self.degree.min(o.degree));
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// `∂/∂δ_i`; exactness drops by one degree.
    pub fn derivative(&self, i: usize) -> TaylorPoly {
        let mut out = TaylorPoly::zero(self.nvars, self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * q(e[i] as i64));
            }
        }
        out
    }

    pub fn truncate(&self, degree: usize) -> TaylorPoly {
        let mut out = TaylorPoly::zero(self.nvars, degree.min(self.degree));
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    /// `Σ_k coeffs[k] p^k` for `p` without constant term.
    fn power_series(&self, coeffs: impl Fn(usize) -> Q) -> Result<TaylorPoly> {
        if !self.value_at_origin().is_zero() {
            return Err(FpaError::Domain("transcendental function expanded away from zero has irrational coefficients".into()));
        }
        let mut out = TaylorPoly::constant(self.nvars, self.degree, coeffs(0));
        let mut pw = TaylorPoly::constant(self.nvars, self.degree, Q::one());
        for k in 1..=self.degree {
            pw = pw.mul(self);
            let c = coeffs(k);
            if !c.is_zero() {
                out = out.add(&pw.scale(&c));
            }
        }
        Ok(out)
    }
}

fn inv_factorial(k: usize) -> Q {
    let f: num_bigint::BigInt = (1..=k as u64).map(num_bigint::BigInt::from).product();
    Q::new(1.into(), f)
}

/// Scalar expression in the state variables.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Q),
    Var(usize),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn c(n: i64) -> Expr {
        Expr::Const(q(n))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => crate::series::q_to_f64(c),
            Expr::Var(i) => x[*i],
            Expr::Add(v) => v.iter().map(|e| e.eval(x)).sum(),
            Expr::Mul(v) => v.iter().map(|e| e.eval(x)).product(),
            Expr::Neg(e) => -e.eval(x),
            Expr::Sin(e) => e.eval(x).sin(),
            Expr::Cos(e) => e.eval(x).cos(),
            Expr::Exp(e) => e.eval(x).exp(),
        }
    }

    /// Taylor expansion about `at` to total degree `degree`.
    pub fn taylor(&self, at: &[Q], degree: usize) -> Result<TaylorPoly> {
        let n = at.len();
        Ok(match self {
            Expr::Const(c) => TaylorPoly::constant(n, degree, c.clone()),
            Expr::Var(i) => TaylorPoly::variable(n, degree, *i, &at[*i]),
            Expr::Add(v) => {
                let mut acc = TaylorPoly::zero(n, degree);
                for e in v {
                    acc = acc.add(&e.taylor(at, degree)?);
                }
                acc
            }
            Expr::Mul(v) => {
                let mut acc = TaylorPoly::constant(n, degree, Q::one());
                for e in v {
                    acc = acc.mul(&e.taylor(at, degree)?);
                }
                acc
            }
            Expr::Neg(e) => e.taylor(at, degree)?.scale(&-Q::one()),
            Expr::Sin(e) => e.taylor(at, degree)?.power_series(|k| {
                if k % 2 == 1 {
                    let s = if k % 4 == 1 { Q::one() } else { -Q::one() };
                    s * inv_factorial(k)
                } else {
                    Q::zero()
                }
            })?,
            Expr::Cos(e) => e.taylor(at, degree)?.power_series(|k| {
                if k % 2 == 0 {
                    let s = if k % 4 == 0 { Q::one() } else { -Q::one() };
                    s * inv_factorial(k)
                } else {
                    Q::zero()
                }
            })?,
            Expr::Exp(e) => e.taylor(at, degree)?.power_series(inv_factorial)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::qr;

    #[test]
    fn sine_expansion() {
        let s = Expr::Sin(Box::new(Expr::Var(0))).taylor(&[q(0)], 5).unwrap();
        assert_eq!(s.terms.get(&vec![1]), Some(&q(1)));
        assert_eq!(s.terms.get(&vec![3]), Some(&qr(-1, 6)));
        assert_eq!(s.terms.get(&vec![5]), Some(&qr(1, 120)));
        assert_eq!(s.terms.len(), 3);
    }

    #[test]
    fn shifted_variable_and_product() {
        // x^2 about x = 1 is 1 + 2δ + δ^2
        let p = Expr::Mul(vec![Expr::Var(0), Expr::Var(0)]).taylor(&[q(1)], 4).unwrap();
        assert_eq!(p.value_at_origin(), q(1));
        assert_eq!(p.derivative(0).value_at_origin(), q(2));
        assert!(Expr::Sin(Box::new(Expr::Var(0))).taylor(&[q(1)], 3).is_err());
    }
}
