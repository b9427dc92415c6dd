use num_traits::{One, Zero};

use super::rational::{int, Rational};
use super::uni::UniSeries;
use crate::error::{Error, Result};

/// Dense univariate polynomial, `coeffs[i]` multiplies var^i; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// (var − a)^m
    pub fn linear_power(a: &Rational, m: u32) -> Self {
        let lin = Self::new(vec![-a.clone(), Rational::one()]);
        (0..m).fold(Self::constant(Rational::one()), |acc, _| acc.mul(&lin))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        Self::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn div_rem(&self, other: &Self) -> Result<(Self, Self)> {
        let lead = other.leading().ok_or(Error::ZeroDivisor)?.clone();
        let dn = other.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dn {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dn];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dn] / &lead;
            if !c.is_zero() {
                for (j, b) in other.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * b;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dn);
        Ok((Self::new(quot), Self::new(rem)))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => Self::zero(),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Coefficients of p(a + t) as a polynomial in t.
    pub fn taylor_shift(&self, a: &Rational) -> Self {
        let mut out = Self::zero();
        let t_plus_a = Self::new(vec![a.clone(), Rational::one()]);
        for c in self.coeffs.iter().rev() {
            out = out.mul(&t_plus_a).add(&Self::constant(c.clone()));
        }
        out
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
    }
}

/// Quotient of polynomials in one variable, normalized so that the
/// denominator is monic and coprime to the numerator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    var: String,
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(var: &str, num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.degree().unwrap_or(0) > 0 {
            (num.div_rem(&g)?.0, den.div_rem(&g)?.0)
        } else {
            (num, den)
        };
        let lead = den.leading().unwrap().clone();
        num = num.scale(&lead.recip());
        den = den.monic();
        Ok(Self { var: var.to_string(), num, den })
    }

    pub fn polynomial(var: &str, p: Poly) -> Self {
        Self { var: var.to_string(), num: p, den: Poly::constant(Rational::one()) }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Self::new(&self.var, self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(
            &self.var,
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(&self.var, self.den.clone(), self.num.clone())
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.num.eval(x) / d)
    }

    /// Laurent expansion in t = var − point, exact for exponents < `order`.
    pub fn laurent_expand_at(&self, point: &Rational, order: i64, t: &str) -> Result<UniSeries> {
        let num = self.num.taylor_shift(point);
        let den = self.den.taylor_shift(point);
        let v = den.coeffs().iter().take_while(|c| c.is_zero()).count() as i64;
        // polynomials are exact; pad their truncation so the quotient is known below `order`
        let den_series = UniSeries::new(t, 0, den.coeffs().to_vec(), (order + 2 * v).max(v + 1));
        let num_series = UniSeries::new(t, 0, num.coeffs().to_vec(), (order + v).max(0));
        let out = num_series.mul(&den_series.inv()?)?;
        Ok(out.truncate(order))
    }

    /// Principal part at `point`: coefficients c_m of (var − point)^{−m}, m = 1..
    pub fn principal_part(&self, point: &Rational) -> Result<Vec<Rational>> {
        let s = self.laurent_expand_at(point, 0, "t")?;
        let low = s.low_order();
        Ok((1..=-low.min(0)).map(|m| s.coeff(-m).unwrap()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn simple_pole() {
        let f = RationalFunction::new("z", Poly::from_ints(&[1]), Poly::from_ints(&[-1, 1])).unwrap();
        let s = f.laurent_expand_at(&int(1), 3, "t").unwrap();
        assert_eq!(s.coeff(-1).unwrap(), int(1));
        assert!(s.terms().all(|(e, _)| e == -1));
    }

    #[test]
    fn double_pole_partial_fractions() {
        // (z+1)/(z−2)² = 3/(z−2)² + 1/(z−2)
        let f = RationalFunction::new("z", Poly::from_ints(&[1, 1]), Poly::linear_power(&int(2), 2)).unwrap();
        let s = f.laurent_expand_at(&int(2), 2, "t").unwrap();
        assert_eq!(s.coeff(-2).unwrap(), int(3));
        assert_eq!(s.coeff(-1).unwrap(), int(1));
        assert_eq!(s.coeff(0).unwrap(), int(0));
        assert_eq!(f.principal_part(&int(2)).unwrap(), vec![int(1), int(3)]);
    }

    #[test]
    fn polynomial_taylor_shift() {
        let p = RationalFunction::polynomial("z", Poly::from_ints(&[1, 2, 3]));
        let s = p.laurent_expand_at(&rat(1, 2), 5, "t").unwrap();
        assert_eq!(s.residue().unwrap(), int(0));
        assert_eq!(s.coeff(0).unwrap(), p.eval(&rat(1, 2)).unwrap());
        assert_eq!(s.coeff(2).unwrap(), int(3));
    }

    #[test]
    fn normalization() {
        // (z²−1)/(2z−2) = (z+1)/2
        let f = RationalFunction::new("z", Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[-2, 2])).unwrap();
        assert_eq!(f.denominator(), &Poly::from_ints(&[1]));
        assert_eq!(f.numerator().coeffs(), &[rat(1, 2), rat(1, 2)]);
        assert_eq!(f.eval(&int(3)).unwrap(), int(2));
    }
}
