use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::rational::{int, Rational};
use super::uni::UniSeries;
use crate::error::{Error, Result};

/// Sparse multivariate Laurent series with a per-variable exclusive upper
/// bound (`None` means the series is exact in that variable).
///
/// Contract used by multiplication: in every variable, exponents of all
/// terms, including the unknown ones past a bound, are at least the smallest
/// stored exponent. Power series and finite Laurent polynomials satisfy it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    vars: Vec<String>,
    bounds: Vec<Option<i64>>,
    terms: BTreeMap<Vec<i64>, Rational>,
}

fn min_bound(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl MultiSeries {
    pub fn zero(vars: &[&str], bounds: &[Option<i64>]) -> Self {
        assert_eq!(vars.len(), bounds.len());
        Self {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            bounds: bounds.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    /// Exact polynomial from (exponents, coefficient) pairs.
    pub fn from_terms(vars: &[&str], terms: impl IntoIterator<Item = (Vec<i64>, Rational)>) -> Self {
        let mut s = Self::zero(vars, &vec![None; vars.len()]);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_terms(&[], [(vec![], c)])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn from_uni(u: &UniSeries) -> Self {
        let mut s = Self::zero(&[u.var()], &[Some(u.truncation_order())]);
        for (e, c) in u.terms() {
            s.add_term(vec![e], c.clone());
        }
        s
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn bounds(&self) -> &[Option<i64>] {
        &self.bounds
    }

    pub fn bound(&self, var: &str) -> Result<Option<i64>> {
        Ok(self.bounds[self.index(var)?])
    }

    pub fn index(&self, var: &str) -> Result<usize> {
        self.vars.iter().position(|v| v == var).ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn in_bounds(&self, e: &[i64]) -> bool {
        e.iter().zip(&self.bounds).all(|(x, b)| b.is_none_or(|b| *x < b))
    }

    /// Adds c·monomial, silently dropping it if it lies past a bound.
    pub fn add_term(&mut self, e: Vec<i64>, c: Rational) {
        if c.is_zero() || !self.in_bounds(&e) {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Coefficient of the monomial given by `(var, exponent)` pairs; variables
    /// not listed have exponent 0. Errors if the monomial lies past a bound.
    pub fn coeff(&self, monomial: &[(&str, i64)]) -> Result<Rational> {
        let mut e = vec![0; self.vars.len()];
        for (v, x) in monomial {
            match self.index(v) {
                Ok(i) => e[i] = *x,
                Err(_) if *x == 0 => {}
                Err(err) => return Err(err),
            }
        }
        self.coeff_vec(&e)
    }

    pub fn coeff_vec(&self, e: &[i64]) -> Result<Rational> {
        for (i, (x, b)) in e.iter().zip(&self.bounds).enumerate() {
            if let Some(b) = b {
                if x >= b {
                    return Err(Error::BeyondTruncation {
                        var: self.vars[i].clone(),
                        exponent: *x,
                        truncation: *b,
                    });
                }
            }
        }
        Ok(self.terms.get(e).cloned().unwrap_or_else(Rational::zero))
    }

    /// Re-expresses `self` over `vars` (a superset), new variables exact at exponent 0.
    fn embed(&self, vars: &[String]) -> Self {
        let map: Vec<usize> = self.vars.iter().map(|v| vars.iter().position(|w| w == v).unwrap()).collect();
        let mut bounds = vec![None; vars.len()];
        for (i, &j) in map.iter().enumerate() {
            bounds[j] = self.bounds[i];
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut f = vec![0; vars.len()];
                for (i, &j) in map.iter().enumerate() {
                    f[j] = e[i];
                }
                (f, c.clone())
            })
            .collect();
        Self { vars: vars.to_vec(), bounds, terms }
    }

    fn union_vars(&self, other: &Self) -> Vec<String> {
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        if self.vars == other.vars {
            return (self.clone(), other.clone());
        }
        let vars = self.union_vars(other);
        (self.embed(&vars), other.embed(&vars))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let bounds: Vec<_> = a.bounds.iter().zip(&b.bounds).map(|(x, y)| min_bound(*x, *y)).collect();
        let mut out = Self { vars: a.vars.clone(), bounds, terms: BTreeMap::new() };
        for (e, c) in a.terms.into_iter().chain(b.terms) {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self { vars: self.vars.clone(), bounds: self.bounds.clone(), terms: BTreeMap::new() };
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        out
    }

    fn min_exponents(&self) -> Vec<Option<i64>> {
        let mut m: Vec<Option<i64>> = vec![None; self.vars.len()];
        for e in self.terms.keys() {
            for (slot, x) in m.iter_mut().zip(e) {
                *slot = Some(slot.map_or(*x, |y| y.min(*x)));
            }
        }
        m
    }

    fn is_exact(&self) -> bool {
        self.bounds.iter().all(Option::is_none)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let (ma, mb) = (a.min_exponents(), b.min_exponents());
        let exact_zero = (a.is_empty() && a.is_exact()) || (b.is_empty() && b.is_exact());
        let bounds: Vec<Option<i64>> = (0..a.vars.len())
            .map(|i| {
                if exact_zero {
                    return None;
                }
                // an empty factor with a bound is O(var^bound)
                let lo_a = ma[i].or(a.bounds[i]).unwrap_or(0);
                let lo_b = mb[i].or(b.bounds[i]).unwrap_or(0);
                min_bound(a.bounds[i].map(|u| u + lo_b), b.bounds[i].map(|u| u + lo_a))
            })
            .collect();
        let mut acc: std::collections::HashMap<Vec<i64>, Rational> = std::collections::HashMap::new();
        let n = a.vars.len();
        let mut e = vec![0i64; n];
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let mut ok = true;
                for i in 0..n {
                    e[i] = ea[i] + eb[i];
                    if let Some(u) = bounds[i] {
                        if e[i] >= u {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    let prod = ca * cb;
                    match acc.get_mut(&e) {
                        Some(x) => *x += prod,
                        None => {
                            acc.insert(e.clone(), prod);
                        }
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Self { vars: a.vars, bounds, terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Tightens the bound of `var` (never loosens it).
    pub fn truncate(&self, var: &str, bound: i64) -> Result<Self> {
        let i = self.index(var)?;
        let mut out = self.clone();
        out.bounds[i] = min_bound(out.bounds[i], Some(bound));
        let b = out.bounds[i].unwrap();
        out.terms.retain(|e, _| e[i] < b);
        Ok(out)
    }

    /// Keeps only terms satisfying the predicate. Bounds are unchanged, so the
    /// caller is responsible for only discarding terms it will never read.
    pub fn filter(&self, keep: impl Fn(&[i64]) -> bool) -> Self {
        let mut out = self.clone();
        out.terms.retain(|e, _| keep(e));
        out
    }

    /// Coefficient of var^{-1}, as a series in the remaining variables.
    pub fn residue(&self, var: &str) -> Result<Self> {
        self.coefficient_of(var, -1)
    }

    /// `self.mul(other).residue(var)` without forming the full product.
    pub fn residue_of_product(&self, other: &Self, var: &str) -> Result<Self> {
        let (a, b) = self.aligned(other);
        let i = a.index(var)?;
        if a.bounds.iter().chain(&b.bounds).any(Option::is_some) {
            return a.mul(&b).residue(var);
        }
        let mut by_exp: std::collections::HashMap<i64, Vec<(&Vec<i64>, &Rational)>> = std::collections::HashMap::new();
        for (e, c) in &b.terms {
            by_exp.entry(e[i]).or_default().push((e, c));
        }
        let mut vars = a.vars.clone();
        vars.remove(i);
        let mut acc: std::collections::HashMap<Vec<i64>, Rational> = std::collections::HashMap::new();
        for (ea, ca) in &a.terms {
            let Some(partners) = by_exp.get(&(-1 - ea[i])) else { continue };
            for (eb, cb) in partners {
                let mut e: Vec<i64> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                e.remove(i);
                let prod = ca * *cb;
                match acc.get_mut(&e) {
                    Some(x) => *x += prod,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Self { bounds: vec![None; vars.len()], vars, terms })
    }

    /// Coefficient of var^k, as a series in the remaining variables.
    pub fn coefficient_of(&self, var: &str, k: i64) -> Result<Self> {
        let i = self.index(var)?;
        if let Some(b) = self.bounds[i] {
            if k >= b {
                return Err(Error::BeyondTruncation { var: var.to_string(), exponent: k, truncation: b });
            }
        }
        let mut vars = self.vars.clone();
        vars.remove(i);
        let mut bounds = self.bounds.clone();
        bounds.remove(i);
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] == k)
            .map(|(e, c)| {
                let mut f = e.clone();
                f.remove(i);
                (f, c.clone())
            })
            .collect();
        Ok(Self { vars, bounds, terms })
    }

    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        let i = self.index(from)?;
        if self.vars.iter().any(|v| v == to) {
            return Err(Error::InvalidArgument(format!("variable `{to}` already present")));
        }
        let mut out = self.clone();
        out.vars[i] = to.to_string();
        Ok(out)
    }

    /// Sets variables `a` and `b` equal, keeping the name `a`.
    pub fn identify(&self, a: &str, b: &str) -> Result<Self> {
        let (ia, ib) = (self.index(a)?, self.index(b)?);
        let (ma, mb) = (self.min_exponents()[ia], self.min_exponents()[ib]);
        let bound = min_bound(
            self.bounds[ia].map(|u| u + mb.unwrap_or(0)),
            self.bounds[ib].map(|u| u + ma.unwrap_or(0)),
        );
        let mut vars = self.vars.clone();
        vars.remove(ib);
        let mut bounds = self.bounds.clone();
        bounds[ia] = bound;
        bounds.remove(ib);
        let mut out = Self { vars, bounds, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f[ia] += e[ib];
            f.remove(ib);
            out.add_term(f, c.clone());
        }
        Ok(out)
    }

    /// Derivative in `var`.
    pub fn derivative(&self, var: &str) -> Result<Self> {
        let i = self.index(var)?;
        let mut out = Self { vars: self.vars.clone(), bounds: self.bounds.clone(), terms: BTreeMap::new() };
        out.bounds[i] = out.bounds[i].map(|b| b - 1);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f[i] -= 1;
            out.add_term(f, c * int(e[i]));
        }
        Ok(out)
    }

    /// Substitutes `var := value`. Only nonnegative exponents of `var` are allowed.
    pub fn substitute(&self, var: &str, value: &Self) -> Result<Self> {
        let i = self.index(var)?;
        if self.bounds[i].is_some() {
            return Err(Error::SeriesDomain(format!("cannot substitute truncated variable `{var}`")));
        }
        let mut by_power: BTreeMap<i64, Self> = BTreeMap::new();
        let mut rest_vars = self.vars.clone();
        rest_vars.remove(i);
        let mut rest_bounds = self.bounds.clone();
        rest_bounds.remove(i);
        for (e, c) in &self.terms {
            if e[i] < 0 {
                return Err(Error::SeriesDomain(format!("negative power of `{var}` in substitution")));
            }
            let mut f = e.clone();
            f.remove(i);
            by_power
                .entry(e[i])
                .or_insert_with(|| Self {
                    vars: rest_vars.clone(),
                    bounds: rest_bounds.clone(),
                    terms: BTreeMap::new(),
                })
                .add_term(f, c.clone());
        }
        let mut out = Self { vars: rest_vars.clone(), bounds: rest_bounds.clone(), terms: BTreeMap::new() };
        let mut power = Self::one();
        let mut k = 0;
        for (p, part) in by_power {
            while k < p {
                power = power.mul(value);
                k += 1;
            }
            out = out.add(&part.mul(&power));
        }
        Ok(out)
    }

    /// f(g) for a univariate power series f and a series g without constant
    /// term; iterates g^k until all powers fall past the bounds.
    pub fn compose_univariate(f: &UniSeries, g: &Self, max_power: usize) -> Result<Self> {
        if f.low_order() < 0 {
            return Err(Error::SeriesDomain("composition needs a power series outside".into()));
        }
        if g.terms.keys().any(|e| e.iter().all(|x| *x == 0)) {
            return Err(Error::SeriesDomain("inner series has a constant term".into()));
        }
        let mut out = g.scale(&Rational::zero());
        let mut power = Self::one();
        for k in 0.. {
            if k > 0 {
                power = power.mul(g);
                // f(g) is only known within g's own bounds
                for (v, b) in g.vars.iter().zip(&g.bounds) {
                    if let Some(b) = b {
                        power = power.truncate(v, *b)?;
                    }
                }
                if power.is_empty() {
                    break;
                }
            }
            if k >= max_power {
                return Err(Error::SeriesDomain("composition did not terminate within bounds".into()));
            }
            let c = f.coeff(k as i64)?;
            out = out.add(&power.scale(&c));
        }
        Ok(out)
    }

    /// Exact division by (a − b); a and b must be exact variables.
    pub fn div_by_difference(&self, a: &str, b: &str) -> Result<Self> {
        let (ia, ib) = (self.index(a)?, self.index(b)?);
        if self.bounds[ia].is_some() || self.bounds[ib].is_some() {
            return Err(Error::SeriesDomain("division by a difference needs exact variables".into()));
        }
        // group by all other exponents and by total degree h = e_a + e_b
        let mut groups: BTreeMap<(Vec<i64>, i64), BTreeMap<i64, Rational>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            rest[ia] = 0;
            rest[ib] = 0;
            groups.entry((rest, e[ia] + e[ib])).or_default().insert(e[ia], c.clone());
        }
        let mut out = Self { vars: self.vars.clone(), bounds: self.bounds.clone(), terms: BTreeMap::new() };
        for ((rest, h), poly) in groups {
            // p_i = q_{i−1} − q_i, where p_i multiplies a^i b^{h−i}
            let lo = *poly.keys().next().unwrap();
            let hi = *poly.keys().next_back().unwrap();
            let mut prev = Rational::zero();
            for i in lo..hi {
                let p = poly.get(&i).cloned().unwrap_or_else(Rational::zero);
                let q = &prev - p;
                let mut e = rest.clone();
                e[ia] = i;
                e[ib] = h - 1 - i;
                out.add_term(e, q.clone());
                prev = q;
            }
            let p_hi = poly.get(&hi).cloned().unwrap_or_else(Rational::zero);
            if prev != p_hi {
                return Err(Error::InexactDivision(format!("remainder in division by ({a} − {b})")));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (v, x) in self.vars.iter().zip(e) {
                if *x != 0 {
                    write!(f, "*{v}^{x}")?;
                }
            }
        }
        for (v, b) in self.vars.iter().zip(&self.bounds) {
            if let Some(b) = b {
                write!(f, " + O({v}^{b})")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn residue_of_geometric_kernel() {
        // 1/(z(u0 − z)) = Σ_k z^{k−1} u0^{−k−1}
        let f = MultiSeries::from_terms(&["z", "u0"], (0..6).map(|k| (vec![k - 1, -k - 1], int(1))))
            .truncate("z", 5)
            .unwrap();
        let r = f.residue("z").unwrap();
        assert_eq!(r.coeff(&[("u0", -1)]).unwrap(), int(1));
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn product_bounds() {
        let a = MultiSeries::from_uni(&UniSeries::new("x", 0, vec![int(1), int(1)], 4));
        let b = MultiSeries::from_uni(&UniSeries::new("x", -1, vec![int(1)], 2));
        let p = a.mul(&b);
        assert_eq!(p.bound("x").unwrap(), Some(2));
        assert_eq!(p.coeff(&[("x", -1)]).unwrap(), int(1));
        assert_eq!(p.coeff(&[("x", 0)]).unwrap(), int(1));
        assert!(p.coeff(&[("x", 2)]).is_err());
    }

    #[test]
    fn difference_division() {
        // (a² − b²)/(a − b) = a + b
        let p = MultiSeries::from_terms(&["a", "b"], [(vec![2, 0], int(1)), (vec![0, 2], int(-1))]);
        let q = p.div_by_difference("a", "b").unwrap();
        assert_eq!(q, MultiSeries::from_terms(&["a", "b"], [(vec![1, 0], int(1)), (vec![0, 1], int(1))]));
        let bad = MultiSeries::from_terms(&["a", "b"], [(vec![1, 0], int(1))]);
        assert!(bad.div_by_difference("a", "b").is_err());
    }

    #[test]
    fn identify_and_substitute() {
        let p = MultiSeries::from_terms(&["a", "b"], [(vec![1, 2], rat(1, 2))]);
        let d = p.identify("a", "b").unwrap();
        assert_eq!(d.coeff(&[("a", 3)]).unwrap(), rat(1, 2));
        let two = MultiSeries::constant(int(2));
        let s = p.substitute("b", &two).unwrap();
        assert_eq!(s.coeff(&[("a", 1)]).unwrap(), int(2));
    }

    #[test]
    fn compose_sqrt() {
        // sqrt(1 − 4u) with u = q·y², q truncated
        let f = UniSeries::new("t", 0, vec![int(1), int(-4)], 8).sqrt().unwrap();
        let g = MultiSeries::from_terms(&["q", "y"], [(vec![1, 2], int(1))]).truncate("q", 6).unwrap();
        let h = MultiSeries::compose_univariate(&f, &g, 100).unwrap();
        assert_eq!(h.coeff(&[("q", 3), ("y", 6)]).unwrap(), int(-4));
        assert!(h.coeff(&[("q", 6), ("y", 12)]).is_err());
    }

    #[test]
    fn fused_residue_matches_product() {
        let a = MultiSeries::from_terms(&["x", "u"], (0..5).map(|k| (vec![k, -k - 1], int(k + 1))));
        let b = MultiSeries::from_terms(&["y", "x"], (1..6).map(|k| (vec![k % 2, -k - 1], rat(1, k))));
        assert_eq!(a.residue_of_product(&b, "x").unwrap(), a.mul(&b).residue("x").unwrap());
    }
}
