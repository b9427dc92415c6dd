//! Eynard–Orantin topological recursion on x = z + q/z, y = ln z,
//! B = dz₁dz₂/(z₁−z₂)², with q = s² for a rational s.
//!
//! ω_{g,n} is kept as an exact partial-fraction sum of products
//! ∏_i (z_i − ε_i s)^{−m_i} dz_i. Residues at the branch points ±s are taken
//! in the local parameter t = z − a, with the spectator dependence carried as
//! partial-fraction monomials alongside each t-series.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_traits::{One, Signed, Zero};

use crate::algebra::{factorial, int, Rational, UniSeries};
use crate::error::{Error, Result};
use crate::report::Check;
use crate::stationary::{StationaryKey, StationaryOracle};

/// (variable, ε = ±1, m): the factor (z_var − ε s)^{−m}.
pub type Pole = (usize, i8, u32);
/// Product of poles, sorted by variable, one per variable.
pub type Mono = Vec<Pole>;

/// ω_{g,n} as Σ c·∏(z_i − ε_i s)^{−m_i}dz_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Omega {
    pub genus: u32,
    pub n: usize,
    pub terms: BTreeMap<Mono, Rational>,
}

impl Omega {
    pub fn max_pole_order(&self) -> u32 {
        self.terms.keys().flat_map(|m| m.iter().map(|p| p.2)).max().unwrap_or(0)
    }

    /// Relabels variable i as perm[i].
    pub fn permuted(&self, perm: &[usize]) -> BTreeMap<Mono, Rational> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut p: Mono = m.iter().map(|&(v, e, k)| (perm[v], e, k)).collect();
                p.sort_unstable();
                (p, c.clone())
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n.saturating_sub(1)).all(|i| {
            let mut perm: Vec<usize> = (0..self.n).collect();
            perm.swap(i, i + 1);
            self.permuted(&perm) == self.terms
        }) && {
            let perm: Vec<usize> = (0..self.n).map(|i| (i + 1) % self.n).collect();
            self.permuted(&perm) == self.terms
        }
    }
}

/// Spectator partial fractions with t-series coefficients.
type Local = BTreeMap<Mono, UniSeries>;

fn local_add(acc: &mut Local, mono: Mono, s: UniSeries) -> Result<()> {
    match acc.get_mut(&mono) {
        Some(x) => *x = x.add(&s)?,
        None => {
            acc.insert(mono, s);
        }
    }
    Ok(())
}

fn merge(a: &Mono, b: &Mono) -> Mono {
    let mut m: Mono = a.iter().chain(b.iter()).copied().collect();
    m.sort_unstable();
    debug_assert!(m.windows(2).all(|w| w[0].0 != w[1].0), "spectator used twice");
    m
}

fn local_mul(a: &Local, b: &Local) -> Result<Local> {
    let mut out = Local::new();
    for (ma, sa) in a {
        for (mb, sb) in b {
            local_add(&mut out, merge(ma, mb), sa.mul(sb)?)?;
        }
    }
    Ok(out)
}

fn local_scale(a: &Local, s: &UniSeries) -> Result<Local> {
    a.iter().map(|(m, x)| Ok((m.clone(), x.mul(s)?))).collect()
}

/// Expansions at z = a + t for one branch point.
struct BranchPoint {
    a: Rational,
    eps: i8,
    prec: i64,
    /// σ(z) − a
    delta: UniSeries,
    /// σ'(z)
    sigma_prime: UniSeries,
    /// 1/(2(y(z) − y(σz))·(1 − q/z²)), times the kernel sign
    kappa: UniSeries,
}

impl BranchPoint {
    fn new(s: &Rational, eps: i8, prec: i64, sign: i64) -> Result<Self> {
        let a = if eps > 0 { s.clone() } else { -s.clone() };
        let p = prec + 6;
        let one_plus = UniSeries::new("t", 0, vec![int(1), Rational::one() / &a], p);
        let inv = one_plus.inv()?;
        let delta = inv.sub(&UniSeries::one("t", p))?.scale(&a);
        let inv_sq = inv.mul(&inv)?;
        let sigma_prime = inv_sq.neg();
        let log_ratio = one_plus.log()?.scale(&int(2));
        let dx = UniSeries::one("t", p).sub(&inv_sq)?;
        let kappa = log_ratio.scale(&int(2)).mul(&dx)?.inv()?.scale(&int(sign));
        Ok(Self { a, eps, prec, delta, sigma_prime, kappa })
    }

    fn series(&self, coeffs: Vec<Rational>, low: i64) -> UniSeries {
        UniSeries::new("t", low, coeffs, self.prec + 6)
    }

    /// (z − εs)^{−m}
    fn z_pole(&self, eps: i8, m: u32) -> Result<UniSeries> {
        if eps == self.eps {
            Ok(self.series(vec![int(1)], -(m as i64)))
        } else {
            self.series(vec![&self.a * int(2), int(1)], 0).pow(-(m as i64))
        }
    }

    /// (σ(z) − εs)^{−m}
    fn sz_pole(&self, eps: i8, m: u32) -> Result<UniSeries> {
        if eps == self.eps {
            // δ = −t + …, so δ^{−m} = (δ/t)^{−m}·t^{−m}
            Ok(self.delta.shift(-1).pow(-(m as i64))?.shift(-(m as i64)))
        } else {
            self.delta.add(&UniSeries::constant("t", &self.a * int(2), self.prec + 6))?.pow(-(m as i64))
        }
    }

    /// B(z, z_i) = Σ_j (j+1) t^j (z_i − a)^{−j−2}
    fn bergman_z(&self, var: usize) -> Local {
        (0..self.prec.max(1))
            .map(|j| {
                let s = self.series(vec![int(j + 1)], j);
                (vec![(var, self.eps, (j + 2) as u32)], s)
            })
            .collect()
    }

    /// B(σz, z_i) without dσ(z)
    fn bergman_sz(&self, var: usize) -> Result<Local> {
        let mut out = Local::new();
        let mut power = UniSeries::one("t", self.prec + 6);
        for j in 0..self.prec.max(1) {
            local_add(&mut out, vec![(var, self.eps, (j + 2) as u32)], power.scale(&int(j + 1)))?;
            power = power.mul(&self.delta)?;
        }
        Ok(out)
    }

    /// 1/(z − σz)², without dσ(z)
    fn bergman_diagonal(&self) -> Result<UniSeries> {
        let t = self.series(vec![int(1)], 1);
        t.sub(&self.delta)?.pow(-2)
    }

    /// (1/(z₀−z) − 1/(z₀−σz)) = Σ_{j≥1} (t^j − δ^j)(z₀ − a)^{−j−1}
    fn kernel_numerator(&self, var: usize) -> Result<Local> {
        let mut out = Local::new();
        let mut power = self.delta.clone();
        for j in 1..=self.prec + 2 {
            let tj = self.series(vec![int(1)], j);
            local_add(&mut out, vec![(var, self.eps, (j + 1) as u32)], tj.sub(&power)?)?;
            power = power.mul(&self.delta)?;
        }
        Ok(out)
    }
}

/// Memoized recursion for the curve with q = s².
pub struct EoEngine {
    s: Rational,
    sign: i64,
    memo: RwLock<HashMap<(u32, usize), Arc<Omega>>>,
}

impl EoEngine {
    /// Kernel sign chosen once: the one for which ⟨τ₀(Q)³⟩_{0;1} = +1.
    pub fn calibrated(s: Rational) -> Result<Self> {
        let trial = Self::with_sign(s.clone(), 1)?;
        let v = trial.correlators(0, 3, 0)?.get(&vec![0, 0, 0]).cloned().unwrap_or_else(Rational::zero);
        if v == int(1) {
            Ok(trial)
        } else if v == int(-1) {
            Self::with_sign(s, -1)
        } else {
            Err(Error::InvalidArgument(format!("no kernel sign gives <t0^3> = 1 (found {v})")))
        }
    }

    pub fn with_sign(s: Rational, sign: i64) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::InvalidArgument("s must be a positive rational".into()));
        }
        if sign.abs() != 1 {
            return Err(Error::InvalidArgument("kernel sign must be ±1".into()));
        }
        Ok(Self { s, sign, memo: RwLock::new(HashMap::new()) })
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    pub fn q(&self) -> Rational {
        &self.s * &self.s
    }

    pub fn sign(&self) -> i64 {
        self.sign
    }

    pub fn omega(&self, g: u32, n: usize) -> Result<Arc<Omega>> {
        if n == 0 || 2 * g as i64 - 2 + n as i64 <= 0 {
            return Err(Error::InvalidArgument(format!("omega_{g},{n} is not stable")));
        }
        if let Some(w) = self.memo.read().unwrap().get(&(g, n)) {
            return Ok(w.clone());
        }
        // precision guess, raised if a residue lands past the truncation
        let mut prec = 6 * g as i64 + 2 * n as i64 + 4;
        let omega = loop {
            match self.recursion(g, n, prec) {
                Err(Error::BeyondTruncation { .. }) if prec < 200 => prec *= 2,
                other => break other?,
            }
        };
        let bound = 6 * g as i64 - 4 + 2 * n as i64;
        for m in omega.terms.keys() {
            if m.len() != n || m.iter().any(|p| p.2 < 2 || p.2 as i64 > bound) {
                return Err(Error::InvalidArgument(format!("omega_{g},{n} has an unexpected pole {m:?}")));
            }
        }
        let omega = Arc::new(omega);
        self.memo.write().unwrap().insert((g, n), omega.clone());
        Ok(omega)
    }

    /// ω_{g,n}(z, z_I) or ω_{g,n}(σz, z_I) at branch point `bp`, variable 0 of ω
    /// mapped to the local parameter and variable j ≥ 1 to spectators[j−1].
    fn local_omega(&self, bp: &BranchPoint, g: u32, spectators: &[usize], at_sigma: bool) -> Result<Local> {
        if g == 0 && spectators.len() == 1 {
            return if at_sigma { bp.bergman_sz(spectators[0]) } else { Ok(bp.bergman_z(spectators[0])) };
        }
        let w = self.omega(g, spectators.len() + 1)?;
        let mut grouped: BTreeMap<(i8, u32), Vec<(Mono, &Rational)>> = BTreeMap::new();
        for (mono, c) in &w.terms {
            let head = mono.iter().find(|p| p.0 == 0).unwrap();
            let mut rest: Mono =
                mono.iter().filter(|p| p.0 != 0).map(|&(v, e, k)| (spectators[v - 1], e, k)).collect();
            rest.sort_unstable();
            grouped.entry((head.1, head.2)).or_default().push((rest, c));
        }
        let mut out = Local::new();
        for ((eps, m), rest) in grouped {
            let s = if at_sigma { bp.sz_pole(eps, m)? } else { bp.z_pole(eps, m)? };
            for (mono, c) in rest {
                local_add(&mut out, mono, s.scale(c))?;
            }
        }
        Ok(out)
    }

    /// ω_{g−1,n+2}(z, σz, z_I) at the branch point.
    fn local_diagonal(&self, bp: &BranchPoint, g: u32, spectators: &[usize]) -> Result<Local> {
        if g == 1 && spectators.is_empty() {
            return Ok(Local::from([(Mono::new(), bp.bergman_diagonal()?)]));
        }
        let w = self.omega(g - 1, spectators.len() + 2)?;
        let mut grouped: BTreeMap<(i8, u32, i8, u32), Vec<(Mono, &Rational)>> = BTreeMap::new();
        for (mono, c) in &w.terms {
            let p0 = mono.iter().find(|p| p.0 == 0).unwrap();
            let p1 = mono.iter().find(|p| p.0 == 1).unwrap();
            let mut rest: Mono =
                mono.iter().filter(|p| p.0 >= 2).map(|&(v, e, k)| (spectators[v - 2], e, k)).collect();
            rest.sort_unstable();
            grouped.entry((p0.1, p0.2, p1.1, p1.2)).or_default().push((rest, c));
        }
        let mut out = Local::new();
        for ((e0, m0, e1, m1), rest) in grouped {
            let s = bp.z_pole(e0, m0)?.mul(&bp.sz_pole(e1, m1)?)?;
            for (mono, c) in rest {
                local_add(&mut out, mono, s.scale(c))?;
            }
        }
        Ok(out)
    }

    fn recursion(&self, g: u32, n: usize, prec: i64) -> Result<Omega> {
        let spectators: Vec<usize> = (1..n).collect();
        let mut terms: BTreeMap<Mono, Rational> = BTreeMap::new();
        for eps in [1i8, -1] {
            let bp = BranchPoint::new(&self.s, eps, prec, self.sign)?;
            let mut bracket = Local::new();
            if g >= 1 {
                for (m, s) in self.local_diagonal(&bp, g, &spectators)? {
                    local_add(&mut bracket, m, s)?;
                }
            }
            let k = spectators.len();
            for mask in 0..(1usize << k) {
                let i1: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| spectators[i]).collect();
                let i2: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).map(|i| spectators[i]).collect();
                for g1 in 0..=g {
                    let g2 = g - g1;
                    if (g1 == 0 && i1.is_empty()) || (g2 == 0 && i2.is_empty()) {
                        continue;
                    }
                    let a = self.local_omega(&bp, g1, &i1, false)?;
                    let b = self.local_omega(&bp, g2, &i2, true)?;
                    for (m, s) in local_mul(&a, &b)? {
                        local_add(&mut bracket, m, s)?;
                    }
                }
            }
            let weight = bp.kappa.mul(&bp.sigma_prime)?;
            let integrand = local_mul(&bp.kernel_numerator(0)?, &local_scale(&bracket, &weight)?)?;
            for (mono, s) in integrand {
                let r = s.residue()?;
                if !r.is_zero() {
                    let slot = terms.entry(mono).or_insert_with(Rational::zero);
                    *slot += r;
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Omega { genus: g, n, terms })
    }

    /// Per-variable expansion at z = ∞ in w = 1/x of (z − εs)^{−m}dz/dx,
    /// through the branch z = (x + sqrt(x² − 4q))/2.
    fn x_expansion(&self, eps: i8, m: u32, order: i64) -> Result<UniSeries> {
        let q = self.q();
        let p = order + 2;
        // u = 1/z = w·c(q w²), c the Catalan series
        let root = UniSeries::new("w", 0, vec![int(1), Rational::zero(), -int(4) * &q], p + 2).sqrt()?;
        let u = UniSeries::one("w", p + 2).sub(&root)?.scale(&(Rational::one() / (int(2) * &q))).shift(-1).truncate(p);
        let b = if eps > 0 { self.s.clone() } else { -self.s.clone() };
        let one = UniSeries::one("w", p);
        let factor = one.sub(&u.scale(&b))?.pow(-(m as i64))?;
        let jac = one.sub(&u.mul(&u)?.scale(&q))?.inv()?;
        u.pow(m as i64)?.mul(&factor)?.mul(&jac)
    }

    /// ⟨∏τ_{k_i}(Q)⟩_{g;d} for all nondecreasing k⃗ with k_i ≤ max_level, read off
    /// ω_{g,n} = Σ⟨…⟩q^d∏(k_i+1)!dx_i/x_i^{k_i+2}.
    pub fn correlators(&self, g: u32, n: usize, max_level: u32) -> Result<BTreeMap<Vec<u32>, Rational>> {
        let w = self.omega(g, n)?;
        let order = max_level as i64 + 3;
        let mut cache: HashMap<(i8, u32), UniSeries> = HashMap::new();
        for mono in w.terms.keys() {
            for &(_, e, m) in mono {
                if let std::collections::hash_map::Entry::Vacant(v) = cache.entry((e, m)) {
                    v.insert(self.x_expansion(e, m, order)?);
                }
            }
        }
        let q = self.q();
        let mut out = BTreeMap::new();
        let mut levels = vec![0u32; n];
        loop {
            if let Some(key) = StationaryKey::from_levels(g, levels.clone()) {
                let mut v = Rational::zero();
                for (mono, c) in &w.terms {
                    let mut prod = c.clone();
                    for &(var, e, m) in mono {
                        prod *= cache[&(e, m)].coeff(levels[var] as i64 + 2)?;
                        if prod.is_zero() {
                            break;
                        }
                    }
                    v += prod;
                }
                let norm: Rational = levels.iter().map(|&k| int(factorial(k as u64 + 1))).product();
                let qd = num_traits::pow(q.clone(), key.degree as usize);
                out.insert(levels.clone(), v / norm / qd);
            }
            let Some(i) = (0..n).rev().find(|&i| levels[i] < max_level) else { break };
            let next = levels[i] + 1;
            levels[i..].iter_mut().for_each(|l| *l = next);
        }
        Ok(out)
    }
}

/// Extracted correlators of ω_{g,n} against the stationary oracle, plus symmetry.
pub fn eo_check(engine: &EoEngine, oracle: &StationaryOracle, g: u32, n: usize, max_level: u32) -> Result<Check> {
    let mut check = Check::new(format!("EO omega_{g},{n} vs OP, levels <= {max_level}"));
    let w = engine.omega(g, n)?;
    if !w.is_symmetric() {
        check.fail(format!("omega_{g},{n}"), "not symmetric");
    }
    for (levels, v) in engine.correlators(g, n, max_level)? {
        let key = StationaryKey::from_levels(g, levels.clone()).unwrap();
        let expected = oracle.correlator(&key)?;
        check.compare(|| format!("{levels:?} (d = {})", key.degree), &expected, &v);
    }
    check.note(format!("{} partial-fraction terms, max pole order {}", w.terms.len(), w.max_pole_order()));
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn base_cases() {
        let e = EoEngine::calibrated(int(1)).unwrap();
        assert_eq!(e.correlators(0, 3, 0).unwrap()[&vec![0, 0, 0]], int(1));
        assert_eq!(e.correlators(1, 1, 2).unwrap()[&vec![2]], rat(1, 24));
        assert!(e.omega(0, 2).is_err());
        assert!(e.omega(0, 3).unwrap().is_symmetric());
    }

    #[test]
    fn q_scaling() {
        let one = EoEngine::calibrated(int(1)).unwrap();
        let two = EoEngine::calibrated(int(2)).unwrap();
        assert_eq!(one.sign(), two.sign());
        assert_eq!(one.correlators(1, 1, 6).unwrap(), two.correlators(1, 1, 6).unwrap());
        // unnormalized coefficients differ by exactly q^d = 4^d
        let (a, b) = (one.omega(0, 3).unwrap(), two.omega(0, 3).unwrap());
        assert_eq!(a.terms.len(), b.terms.len());
    }
}
