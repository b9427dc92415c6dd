use std::fmt;

use num_traits::{One, Zero};

use super::rational::{int, Rational};
use crate::error::{Error, Result};

/// Truncated Laurent series Σ_{low ≤ e < trunc} c_e var^e.
///
/// Coefficients are stored densely from `low`; every exponent below `low` is
/// exactly zero and nothing at or above `trunc` is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniSeries {
    var: String,
    low: i64,
    coeffs: Vec<Rational>,
    trunc: i64,
}

impl UniSeries {
    /// `coeffs[i]` is the coefficient of `var^(low + i)`; entries at or past
    /// `trunc` are dropped, missing ones are zero.
    pub fn new(var: &str, low: i64, coeffs: Vec<Rational>, trunc: i64) -> Self {
        let mut coeffs = coeffs;
        let len = (trunc - low).max(0) as usize;
        coeffs.truncate(len);
        coeffs.resize(len, Rational::zero());
        let mut s = Self { var: var.to_string(), low: low.min(trunc), coeffs, trunc };
        s.normalize();
        s
    }

    pub fn from_fn(var: &str, low: i64, trunc: i64, f: impl Fn(i64) -> Rational) -> Self {
        Self::new(var, low, (low..trunc).map(f).collect(), trunc)
    }

    pub fn zero(var: &str, trunc: i64) -> Self {
        Self::new(var, trunc, Vec::new(), trunc)
    }

    pub fn constant(var: &str, c: Rational, trunc: i64) -> Self {
        Self::new(var, 0, vec![c], trunc)
    }

    pub fn one(var: &str, trunc: i64) -> Self {
        Self::constant(var, Rational::one(), trunc)
    }

    pub fn monomial(var: &str, c: Rational, exponent: i64, trunc: i64) -> Self {
        Self::new(var, exponent, vec![c], trunc)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = self.trunc;
        }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// Lowest exponent with a nonzero coefficient, or `None` if every known
    /// coefficient vanishes.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.low)
        }
    }

    pub fn low_order(&self) -> i64 {
        self.low
    }

    pub fn truncation_order(&self) -> i64 {
        self.trunc
    }

    pub fn coeff(&self, e: i64) -> Result<Rational> {
        if e >= self.trunc {
            return Err(Error::BeyondTruncation {
                var: self.var.clone(),
                exponent: e,
                truncation: self.trunc,
            });
        }
        Ok(self.coeff_known(e))
    }

    fn coeff_known(&self, e: i64) -> Rational {
        if e < self.low {
            return Rational::zero();
        }
        self.coeffs.get((e - self.low) as usize).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero (exponent, coefficient) pairs in increasing order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        let low = self.low;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (low + i as i64, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_var(&self, other: &Self) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch(self.var.clone(), other.var.clone()));
        }
        Ok(())
    }

    /// Lower bound on the exponents, counting an all-zero series as O(var^trunc).
    fn order(&self) -> i64 {
        self.valuation().unwrap_or(self.trunc)
    }

    pub fn truncate(&self, trunc: i64) -> Self {
        Self::new(&self.var, self.low, self.coeffs.clone(), trunc.min(self.trunc))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let trunc = self.trunc.min(other.trunc);
        let low = self.low.min(other.low).min(trunc);
        Ok(Self::from_fn(&self.var, low, trunc, |e| self.coeff_known(e) + other.coeff_known(e)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(&self.var, self.low, self.coeffs.iter().map(|x| x * c).collect(), self.trunc)
    }

    /// Multiply by var^k.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(&self.var, self.low + k, self.coeffs.clone(), self.trunc + k)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let trunc = (self.trunc + other.order()).min(other.trunc + self.order());
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.var, trunc));
        }
        let low = self.low + other.low;
        let len = (trunc - low).max(0) as usize;
        let mut out = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(Self::new(&self.var, low, out, trunc))
    }

    pub fn inv(&self) -> Result<Self> {
        let v = self.valuation().ok_or(Error::ZeroDivisor)?;
        let rel = self.trunc - v;
        let a0 = self.coeffs[0].clone();
        let mut out: Vec<Rational> = Vec::with_capacity(rel.max(0) as usize);
        for n in 0..rel.max(0) as usize {
            if n == 0 {
                out.push(Rational::one() / &a0);
                continue;
            }
            let mut acc = Rational::zero();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                acc += &self.coeffs[k] * &out[n - k];
            }
            out.push(-acc / &a0);
        }
        Ok(Self::new(&self.var, -v, out, rel - v))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    fn require_unit_constant(&self, op: &str) -> Result<()> {
        if self.low < 0 || self.coeff_known(0) != Rational::one() || self.trunc < 1 {
            return Err(Error::SeriesDomain(format!("{op} needs a power series with constant term 1")));
        }
        Ok(())
    }

    /// Coefficients 0..trunc of a power series (low ≥ 0 assumed).
    fn dense_from_zero(&self) -> Vec<Rational> {
        (0..self.trunc.max(0)).map(|e| self.coeff_known(e)).collect()
    }

    pub fn exp(&self) -> Result<Self> {
        if !self.is_zero() && self.low < 1 {
            return Err(Error::SeriesDomain("exp needs valuation ≥ 1".into()));
        }
        let a = self.dense_from_zero();
        let n_max = a.len();
        let mut f = vec![Rational::zero(); n_max];
        if n_max > 0 {
            f[0] = Rational::one();
        }
        for n in 1..n_max {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !a[k].is_zero() {
                    acc += int(k as i64) * &a[k] * &f[n - k];
                }
            }
            f[n] = acc / int(n as i64);
        }
        Ok(Self::new(&self.var, 0, f, self.trunc))
    }

    pub fn log(&self) -> Result<Self> {
        self.require_unit_constant("log")?;
        let f = self.dense_from_zero();
        let n_max = f.len();
        let mut g = vec![Rational::zero(); n_max];
        for n in 1..n_max {
            let mut acc = int(n as i64) * &f[n];
            for k in 1..n {
                if !g[k].is_zero() {
                    acc -= int(k as i64) * &g[k] * &f[n - k];
                }
            }
            g[n] = acc / int(n as i64);
        }
        Ok(Self::new(&self.var, 0, g, self.trunc))
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.pow_rational(&Rational::new(1.into(), 2.into()))
    }

    /// f^p for a power series with constant term 1 and rational p.
    pub fn pow_rational(&self, p: &Rational) -> Result<Self> {
        self.require_unit_constant("rational power")?;
        let f = self.dense_from_zero();
        let n_max = f.len();
        let mut g = vec![Rational::zero(); n_max];
        g[0] = Rational::one();
        let p1 = p + Rational::one();
        for n in 1..n_max {
            let mut acc = Rational::zero();
            for k in 1..=n {
                if !f[k].is_zero() {
                    acc += (&p1 * int(k as i64) - int(n as i64)) * &f[k] * &g[n - k];
                }
            }
            g[n] = acc / int(n as i64);
        }
        Ok(Self::new(&self.var, 0, g, self.trunc))
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        if n == 0 {
            return Ok(Self::one(&self.var, self.trunc.max(1)));
        }
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&base)?,
                    None => base.clone(),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        let acc = acc.unwrap();
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let low = self.low - 1;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * int(self.low + i as i64))
            .collect();
        Self::new(&self.var, low, coeffs, self.trunc - 1)
    }

    /// Coefficient of var^{-1}.
    pub fn residue(&self) -> Result<Rational> {
        self.coeff(-1)
    }

    /// outer(inner) for a power series `outer` and `inner` of valuation ≥ 1.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if outer.low < 0 {
            return Err(Error::SeriesDomain("composition needs a power series outside".into()));
        }
        if !inner.is_zero() && inner.low < 1 {
            return Err(Error::SeriesDomain("composition needs inner valuation ≥ 1".into()));
        }
        let trunc = inner.trunc.min(if outer.trunc > 0 {
            outer.trunc.saturating_mul(inner.order().max(1))
        } else {
            0
        });
        let mut acc = Self::zero(&inner.var, trunc);
        for e in (0..outer.trunc).rev() {
            acc = acc.mul(inner)?.truncate(trunc);
            let c = outer.coeff_known(e);
            if !c.is_zero() {
                acc = acc.add(&Self::constant(&inner.var, c, trunc))?;
            }
        }
        Ok(acc)
    }

    /// f(c·var).
    pub fn rescale(&self, c: &Rational) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, x)| x * pow_rat(c, self.low + i as i64))
            .collect();
        Self::new(&self.var, self.low, coeffs, self.trunc)
    }
}

pub(crate) fn pow_rat(c: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(c.clone(), e as usize)
    } else {
        num_traits::pow(c.recip(), (-e) as usize)
    }
}

impl fmt::Display for UniSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c}){}^{e}", self.var)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.var, self.trunc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn s(coeffs: &[i64], trunc: i64) -> UniSeries {
        UniSeries::new("z", 0, coeffs.iter().map(|&c| int(c)).collect(), trunc)
    }

    #[test]
    fn geometric_inverse() {
        let inv = s(&[1, -1], 8).inv().unwrap();
        for e in 0..8 {
            assert_eq!(inv.coeff(e).unwrap(), int(1));
        }
        assert!(inv.coeff(8).is_err());
    }

    #[test]
    fn laurent_inverse() {
        let z = UniSeries::monomial("z", int(1), 1, 10);
        let zi = z.inv().unwrap();
        assert_eq!(zi.valuation(), Some(-1));
        let one = z.mul(&zi).unwrap();
        assert_eq!(one.coeff(0).unwrap(), int(1));
        assert!(one.terms().all(|(e, _)| e == 0));
    }

    #[test]
    fn zero_divisor() {
        assert_eq!(UniSeries::zero("z", 5).inv(), Err(Error::ZeroDivisor));
    }

    #[test]
    fn exp_log_round_trip() {
        let a = s(&[1, 1, 1], 10);
        let back = a.log().unwrap().exp().unwrap();
        assert_eq!(back, a);
        assert_eq!(UniSeries::zero("z", 6).exp().unwrap(), UniSeries::one("z", 6));
        assert!(s(&[2, 1], 5).log().is_err());
        assert!(s(&[1, 1], 5).exp().is_err());
    }

    #[test]
    fn mercator() {
        let l = s(&[1, -1], 9).log().unwrap();
        for r in 1..9 {
            assert_eq!(l.coeff(r).unwrap(), rat(-1, r));
        }
    }

    #[test]
    fn sqrt_binomial() {
        let r = s(&[1, -4], 8).sqrt().unwrap();
        let expected = [1, -2, -2, -4, -10, -28, -84, -264];
        for (e, c) in expected.iter().enumerate() {
            assert_eq!(r.coeff(e as i64).unwrap(), int(*c));
        }
        assert_eq!(r.mul(&r).unwrap(), s(&[1, -4], 8));
    }

    #[test]
    fn derivative_residue_vanishes() {
        let f = UniSeries::new("z", -3, vec![int(2), rat(1, 3), int(-1), int(5)], 4);
        assert_eq!(f.derivative().residue().unwrap(), int(0));
        assert_eq!(f.residue().unwrap(), int(-1));
    }

    #[test]
    fn compose_exp_of_log() {
        let exp = UniSeries::from_fn("t", 0, 8, |e| {
            Rational::one() / int(crate::algebra::factorial(e as u64))
        });
        let inner = s(&[1, 1], 8).log().unwrap();
        let back = UniSeries::compose(&exp, &inner).unwrap();
        assert_eq!(back, s(&[1, 1], 8));
    }
}
