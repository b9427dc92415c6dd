//! Connected stationary invariants ⟨∏τ_{k_i}(Q)⟩_{g,n;d} of P¹ from the
//! Okounkov-Pandharipande recursion for F°_{(1^d),(1^d)}(z_1,…,z_n).

use std::collections::HashMap;
use std::sync::RwLock;

use num_traits::{One, Zero};

use crate::algebra::{factorial, int, MultiSeries, Rational, UniSeries};
use crate::error::{Error, Result};

/// Default cap on the number of variables; the set-partition sums grow like 3^n.
pub const DEFAULT_MAX_POINTS: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    /// (1^d)
    pub fn ones(d: u32) -> Self {
        Self { parts: vec![1; d as usize] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn multiplicity_of_one(&self) -> usize {
        self.parts.iter().filter(|&&p| p == 1).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StationaryKey {
    pub genus: u32,
    pub degree: u32,
    levels: Vec<u32>,
}

impl StationaryKey {
    pub fn new(genus: u32, degree: u32, mut levels: Vec<u32>) -> Self {
        levels.sort_unstable();
        Self { genus, degree, levels }
    }

    /// Key with the degree fixed by Σ(k_i + 1) = 2g − 2 + 2d + n, if one exists.
    pub fn from_levels(genus: u32, levels: Vec<u32>) -> Option<Self> {
        let n = levels.len() as i64;
        let lhs: i64 = levels.iter().map(|&k| k as i64 + 1).sum();
        let twice_d = lhs - n + 2 - 2 * genus as i64;
        if twice_d < 0 || twice_d % 2 != 0 {
            return None;
        }
        Some(Self::new(genus, (twice_d / 2) as u32, levels))
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn satisfies_selection_rule(&self) -> bool {
        let lhs: i64 = self.levels.iter().map(|&k| k as i64 + 1).sum();
        lhs == 2 * self.genus as i64 - 2 + 2 * self.degree as i64 + self.levels.len() as i64
    }

    pub fn is_stable(&self) -> bool {
        let n = self.levels.len();
        !(self.degree == 0 && matches!((self.genus, n), (0, 0) | (0, 1) | (0, 2) | (1, 0)))
    }
}

/// ζ(z) = 2 sinh(z/2) = Σ_{j≥0} z^{2j+1}/(4^j (2j+1)!), known below `order`.
pub fn zeta_series(order: i64) -> UniSeries {
    zeta_in("z", order)
}

pub fn zeta_in(var: &str, order: i64) -> UniSeries {
    UniSeries::from_fn(var, 0, order, |e| {
        if e % 2 == 1 {
            Rational::one() / int(factorial(e as u64) * (num_bigint::BigInt::one() << (e - 1)))
        } else {
            Rational::zero()
        }
    })
}

/// S(z) = sinh(z/2)/(z/2), known below `order`.
pub fn s_series(order: i64) -> UniSeries {
    zeta_series(order + 1).shift(-1)
}

/// Polynomial with exponent box ∏[0, bound_i), stored sparsely by linear index.
type Sparse = Vec<(usize, Rational)>;

struct BoxShape {
    bounds: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl BoxShape {
    fn new(bounds: &[usize]) -> Self {
        let mut strides = Vec::with_capacity(bounds.len());
        let mut size = 1;
        for &b in bounds {
            strides.push(size);
            size *= b;
        }
        Self { bounds: bounds.to_vec(), strides, size }
    }

    fn coord(&self, idx: usize, i: usize) -> usize {
        (idx / self.strides[i]) % self.bounds[i]
    }

    fn coords(&self, idx: usize) -> Vec<usize> {
        (0..self.bounds.len()).map(|i| self.coord(idx, i)).collect()
    }
}

/// Dense accumulator over a box that remembers which slots were touched.
struct Acc {
    vals: Vec<Rational>,
    seen: Vec<bool>,
    touched: Vec<usize>,
}

impl Acc {
    fn new(size: usize) -> Self {
        Self { vals: vec![Rational::zero(); size], seen: vec![false; size], touched: Vec::new() }
    }

    fn add(&mut self, i: usize, c: Rational) {
        if !self.seen[i] {
            self.seen[i] = true;
            self.touched.push(i);
        }
        self.vals[i] += c;
    }

    fn take(&mut self) -> Sparse {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            self.seen[i] = false;
            let c = std::mem::take(&mut self.vals[i]);
            if !c.is_zero() {
                out.push((i, c));
            }
        }
        self.touched.clear();
        out
    }
}

/// Multiplies by (Σ_{i∈mask} z_i), dropping exponents past the box.
fn mul_by_sum(shape: &BoxShape, p: &Sparse, mask: usize, acc: &mut Acc) -> Sparse {
    for (idx, c) in p {
        for i in 0..shape.bounds.len() {
            if mask >> i & 1 == 1 && shape.coord(*idx, i) + 1 < shape.bounds[i] {
                acc.add(idx + shape.strides[i], c.clone());
            }
        }
    }
    acc.take()
}

/// ζ(Σ_{i∈mask} z_i)² · p with ζ(s)² = Σ_{j≥1} 2 s^{2j}/(2j)!.
fn mul_by_zeta_sq(shape: &BoxShape, p: &Sparse, mask: usize, acc: &mut Acc) -> Sparse {
    let mut total = Acc::new(shape.size);
    let mut g = p.clone();
    let mut j = 0u64;
    loop {
        g = mul_by_sum(shape, &g, mask, acc);
        g = mul_by_sum(shape, &g, mask, acc);
        j += 1;
        if g.is_empty() {
            break;
        }
        let w = int(2) / int(factorial(2 * j));
        for (idx, c) in &g {
            total.add(*idx, c * &w);
        }
    }
    total.take()
}

/// F°_{(1^a),(1^a)} over every subset of the box variables for a = 1..=d.
///
/// F°_a(z_S) = U(a−1, S)/a², where U(D, S) sums over set partitions of S and
/// over the ways to hand D ones to the blocks (as multisets, so each
/// composition counts once) of ∏ ζ(Σ_B)² F°_{a_B}(z_B), with F°_0(z) = 1/ζ(z).
fn connected_box(d: usize, bounds: &[usize]) -> Vec<Vec<Sparse>> {
    let n = bounds.len();
    let shape = BoxShape::new(bounds);
    let masks = 1usize << n;
    let mut acc = Acc::new(shape.size);
    // f[a][mask] = F°_a(z_mask); f[0] is unused (handled through h(0, ·))
    let mut f: Vec<Vec<Sparse>> = vec![vec![Vec::new(); masks]; d + 1];
    // h[a][mask] = ζ(s_mask)² F°_a(z_mask)
    let mut h: Vec<Vec<Sparse>> = vec![vec![Vec::new(); masks]; d];
    for i in 0..n {
        // h(0, {i}) = ζ(z_i)² / ζ(z_i) = ζ(z_i)
        let z = zeta_series(bounds[i] as i64);
        h[0][1 << i] = z.terms().map(|(e, c)| (e as usize * shape.strides[i], c.clone())).collect();
    }
    // u[D][mask]
    let mut u: Vec<Vec<Sparse>> = Vec::with_capacity(d);
    for a in 1..=d {
        let big_d = a - 1;
        // U(D, ·) for D = a − 1 only needs h(a', ·) with a' ≤ D, all available now
        let mut row: Vec<Sparse> = vec![Vec::new(); masks];
        if big_d == 0 {
            row[0] = vec![(0, Rational::one())];
        }
        for s in 1..masks {
            let low = s & s.wrapping_neg();
            let rest_all = s ^ low;
            let mut sub = rest_all;
            loop {
                let block = sub | low;
                let rest = s ^ block;
                for a2 in 0..=big_d {
                    let hb = &h[a2][block];
                    let ur = if a2 == big_d {
                        if rest == 0 {
                            None
                        } else {
                            Some(&row_prev_or_self(&u, &row, big_d, 0)[rest])
                        }
                    } else {
                        Some(&row_prev_or_self(&u, &row, big_d, big_d - a2)[rest])
                    };
                    if hb.is_empty() {
                        continue;
                    }
                    match ur {
                        None => {
                            for (i, c) in hb {
                                acc.add(*i, c.clone());
                            }
                        }
                        Some(ur) => {
                            for (i, c) in hb {
                                for (j, c2) in ur {
                                    acc.add(i + j, c * c2);
                                }
                            }
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest_all;
            }
            row[s] = acc.take();
        }
        u.push(row);
        let pref = Rational::one() / int((a * a) as u64);
        for s in 1..masks {
            f[a][s] = u[big_d][s].iter().map(|(i, c)| (*i, c * &pref)).collect();
            if a < d {
                h[a][s] = mul_by_zeta_sq(&shape, &f[a][s], s, &mut acc);
            }
        }
    }
    f
}

/// U(D, rest) where the row for `d_row` may still be under construction.
fn row_prev_or_self<'a>(u: &'a [Vec<Sparse>], row: &'a [Sparse], d_row: usize, d: usize) -> &'a [Sparse] {
    if d == d_row {
        row
    } else {
        &u[d]
    }
}

/// Memoized oracle for stationary invariants.
pub struct StationaryOracle {
    max_points: usize,
    values: RwLock<HashMap<(u32, Vec<u32>), Rational>>,
    // per (degree, n): sorted exclusive exponent bounds already fully extracted
    boxes: RwLock<HashMap<(u32, usize), Vec<Vec<usize>>>>,
}

impl Default for StationaryOracle {
    fn default() -> Self {
        Self::new()
    }
}

impl StationaryOracle {
    pub fn new() -> Self {
        Self::with_max_points(DEFAULT_MAX_POINTS)
    }

    /// Raises the cap on the number of insertions (the override flag).
    pub fn with_max_points(max_points: usize) -> Self {
        Self { max_points, values: RwLock::new(HashMap::new()), boxes: RwLock::new(HashMap::new()) }
    }

    pub fn max_points(&self) -> usize {
        self.max_points
    }

    /// ⟨∏τ_{k_i}(Q)⟩_{g,n;d}; zero when the selection rule fails.
    pub fn correlator(&self, key: &StationaryKey) -> Result<Rational> {
        if !key.satisfies_selection_rule() {
            return Ok(Rational::zero());
        }
        let n = key.levels.len();
        if n == 0 {
            return Err(Error::InvalidArgument("stationary key without insertions".into()));
        }
        if key.degree == 0 {
            return Ok(degree_zero(key));
        }
        if n > self.max_points {
            return Err(Error::InvalidArgument(format!(
                "{n} insertions exceed the set-partition cap of {}; raise it explicitly",
                self.max_points
            )));
        }
        let lookup = (key.degree, key.levels.clone());
        if let Some(v) = self.values.read().unwrap().get(&lookup) {
            return Ok(v.clone());
        }
        let want: Vec<usize> = key.levels.iter().map(|&k| k as usize + 2).collect();
        let dominated = |boxes: &HashMap<(u32, usize), Vec<Vec<usize>>>| {
            boxes
                .get(&(key.degree, n))
                .is_some_and(|bs| bs.iter().any(|b| b.iter().zip(&want).all(|(x, y)| x >= y)))
        };
        if dominated(&self.boxes.read().unwrap()) {
            return Ok(Rational::zero());
        }
        self.fill_box(key.degree, &want)?;
        Ok(self.values.read().unwrap().get(&lookup).cloned().unwrap_or_else(Rational::zero))
    }

    /// Computes F°_d on the box with the given (sorted) bounds and records every coefficient.
    fn fill_box(&self, degree: u32, bounds: &[usize]) -> Result<()> {
        let f = connected_box(degree as usize, bounds);
        let shape = BoxShape::new(bounds);
        let full = (1usize << bounds.len()) - 1;
        let mut found: Vec<((u32, Vec<u32>), Rational)> = Vec::new();
        for (idx, c) in &f[degree as usize][full] {
            let coords = shape.coords(*idx);
            if coords.contains(&0) {
                continue;
            }
            let mut levels: Vec<u32> = coords.iter().map(|&e| e as u32 - 1).collect();
            levels.sort_unstable();
            found.push(((degree, levels), c.clone()));
        }
        let mut values = self.values.write().unwrap();
        for (k, v) in found {
            values.insert(k, v);
        }
        self.boxes.write().unwrap().entry((degree, bounds.len())).or_default().push(bounds.to_vec());
        Ok(())
    }

    pub fn cached_values(&self) -> usize {
        self.values.read().unwrap().len()
    }
}

/// Degree zero: only the one-point series from 1/ζ survives.
fn degree_zero(key: &StationaryKey) -> Rational {
    if key.levels.len() != 1 {
        return Rational::zero();
    }
    let k = key.levels[0] as i64;
    // [z^{k+1}] 1/ζ(z) = [z^{k+2}] S(z)^{-1}
    s_series(k + 3).inv().and_then(|s| s.coeff(k + 2)).unwrap_or_else(|_| Rational::zero())
}

/// F°_{μ,ν}(z_1,…,z_n) with exclusive per-variable exponent bounds `orders`.
pub fn connected_f(mu: &Partition, nu: &Partition, n: usize, orders: &[i64]) -> Result<MultiSeries> {
    if mu.size() != nu.size() {
        return Err(Error::InvalidArgument(format!("|μ| = {} differs from |ν| = {}", mu.size(), nu.size())));
    }
    if mu.parts.iter().chain(&nu.parts).any(|&p| p != 1) {
        return Err(Error::UnsupportedProfile("only μ = ν = (1^d) is implemented".into()));
    }
    if orders.len() != n || n == 0 {
        return Err(Error::InvalidArgument("one truncation order per variable is required".into()));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let bounds: Vec<Option<i64>> = orders.iter().map(|&o| Some(o)).collect();
    let d = mu.size() as usize;
    let mut out = MultiSeries::zero(&vars, &bounds);
    if d == 0 {
        if n == 1 {
            let inv = zeta_series(orders[0] + 2).inv()?;
            for (e, c) in inv.terms() {
                out.add_term(vec![e], c.clone());
            }
        }
        return Ok(out);
    }
    let box_bounds: Vec<usize> = orders.iter().map(|&o| o.max(0) as usize).collect();
    if box_bounds.contains(&0) {
        return Ok(out);
    }
    let f = connected_box(d, &box_bounds);
    let shape = BoxShape::new(&box_bounds);
    for (idx, c) in &f[d][(1 << n) - 1] {
        out.add_term(shape.coords(*idx).into_iter().map(|x| x as i64).collect(), c.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn z(i: usize) -> MultiSeries {
        let name = format!("z{i}");
        MultiSeries::from_uni(&zeta_in(&name, 12))
    }

    #[test]
    fn zeta_coefficients() {
        let zeta = zeta_series(8);
        assert_eq!(zeta.coeff(1).unwrap(), int(1));
        assert_eq!(zeta.coeff(3).unwrap(), rat(1, 24));
        assert_eq!(zeta.coeff(5).unwrap(), rat(1, 1920));
        assert_eq!(zeta.coeff(4).unwrap(), int(0));
        let s = s_series(7);
        assert_eq!(s, zeta_series(8).shift(-1));
    }

    #[test]
    fn degree_one_two_points() {
        let f = connected_f(&Partition::ones(1), &Partition::ones(1), 2, &[12, 12]).unwrap();
        let expected = z(1).mul(&z(2));
        assert_eq!(f, expected);
    }

    #[test]
    fn degree_two_two_points() {
        // (ζ1ζ2/2!²)[ζ(z1+z2)² + ζ1² + ζ2²]
        let f = connected_f(&Partition::ones(2), &Partition::ones(2), 2, &[8, 8]).unwrap();
        let sum = MultiSeries::from_terms(&["z1", "z2"], [(vec![1, 0], int(1)), (vec![0, 1], int(1))])
            .truncate("z1", 8)
            .unwrap()
            .truncate("z2", 8)
            .unwrap();
        let zs = MultiSeries::compose_univariate(&zeta_series(16), &sum, 20).unwrap();
        let bracket = zs.mul(&zs).add(&z(1).mul(&z(1))).add(&z(2).mul(&z(2)));
        let expected = z(1).mul(&z(2)).mul(&bracket).scale(&rat(1, 4));
        let expected = expected.truncate("z1", 8).unwrap().truncate("z2", 8).unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn oracle_values() {
        let o = StationaryOracle::new();
        let v = |g, d, l: &[u32]| o.correlator(&StationaryKey::new(g, d, l.to_vec())).unwrap();
        assert_eq!(v(0, 1, &[0, 0]), int(1));
        assert_eq!(v(1, 1, &[2]), rat(1, 24));
        assert_eq!(v(0, 2, &[2, 0]), rat(1, 2));
        assert_eq!(v(0, 2, &[1, 1]), rat(1, 2));
        assert_eq!(v(1, 2, &[1, 3]), rat(5, 48));
        assert_eq!(v(2, 1, &[2, 2]), rat(1, 576));
        assert_eq!(v(2, 1, &[0, 4]), rat(1, 1920));
        assert_eq!(v(0, 1, &[0, 0, 0]), int(1));
        assert_eq!(v(1, 0, &[0]), rat(-1, 24));
        // selection rule violated
        assert_eq!(v(0, 1, &[0, 1]), int(0));
        // degree zero, several points
        assert_eq!(v(1, 0, &[1, 0]), int(0));
    }

    #[test]
    fn point_cap() {
        let o = StationaryOracle::new();
        let key = StationaryKey::from_levels(0, vec![0; 6]).unwrap();
        assert!(o.correlator(&key).is_err());
        let o = StationaryOracle::with_max_points(6);
        assert!(o.correlator(&key).is_ok());
    }

    #[test]
    fn unsupported_profile() {
        let mu = Partition::new(vec![2]).unwrap();
        let e = connected_f(&mu, &mu, 1, &[4]).unwrap_err();
        assert!(matches!(e, Error::UnsupportedProfile(_)));
        assert!(connected_f(&Partition::ones(2), &Partition::ones(1), 1, &[4]).is_err());
    }

    #[test]
    fn index_roundtrip() {
        assert_eq!(BoxShape::new(&[3, 4]).coords(5), vec![2, 1]);
    }
}
