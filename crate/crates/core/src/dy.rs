//! Matrix-resolvent formulas for stationary n-point functions at q = 1.
//!
//! Everything is written in y_i = 1/x_i; λ stays an exact polynomial variable
//! (its degree is bounded by the y-degree). C_n is assembled as
//! Σ_g λ^{2g+c_n}·⟨τ_{k_1}…τ_{k_n}⟩_{g;d}·∏(k_i+1)!·y_i^{k_i+2}, where the offset
//! c_n is measured against the OP recursion rather than assumed.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{binomial, factorial, int, MultiSeries, Rational};
use crate::closed_forms::reorder;
use crate::error::{Error, Result};
use crate::report::Check;
use crate::stationary::{StationaryKey, StationaryOracle};

fn fact(n: i64) -> Rational {
    int(factorial(n as u64))
}

fn binom(n: i64, k: i64) -> Rational {
    int(binomial(n, k))
}

fn pow_i(base: i64, e: i64) -> Rational {
    int(num_bigint::BigInt::from(base).pow(e as u32))
}

/// Σ_l (−1)^l (2i+1−2l)^{2j} (C(2i,l) − C(2i,l−1)).
fn pq_inner(i: i64, j: i64) -> Rational {
    let mut acc = Rational::zero();
    for l in 0..=i {
        let t = pow_i(2 * i + 1 - 2 * l, 2 * j) * (binom(2 * i, l) - binom(2 * i, l - 1));
        if l % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc
}

/// Σ_l (−1)^l (2i+1−2l)^{2j+1} C(2i+1,l).
fn alpha_inner(i: i64, j: i64) -> Rational {
    let mut acc = Rational::zero();
    for l in 0..=i {
        let t = pow_i(2 * i + 1 - 2 * l, 2 * j + 1) * binom(2 * i + 1, l);
        if l % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc
}

/// R(x;λ) = diag(1,0) + [[α, β], [γ, −α]] in the variables (lam, y), y = 1/x,
/// with every y-power below `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolventMatrix {
    pub alpha: MultiSeries,
    pub beta: MultiSeries,
    pub gamma: MultiSeries,
    pub p: MultiSeries,
    pub q: MultiSeries,
    order: i64,
}

impl ResolventMatrix {
    pub fn new(order: i64) -> Self {
        let vars = ["lam", "y"];
        let bounds = [None, Some(order.max(0))];
        let (mut alpha, mut p, mut q) =
            (MultiSeries::zero(&vars, &bounds), MultiSeries::zero(&vars, &bounds), MultiSeries::zero(&vars, &bounds));
        for j in 0.. {
            if 2 * j + 1 >= order {
                break;
            }
            let four_j = Rational::one() / pow_i(4, j);
            for i in 0..=j {
                let pq = pq_inner(i, j);
                let ifact_sq = fact(i) * fact(i);
                p.add_term(vec![2 * (j - i), 2 * j + 1], &four_j * &pq / &ifact_sq);
                let qc = -&four_j * int(2 * i + 1) * &pq / (int(2) * &ifact_sq);
                q.add_term(vec![2 * (j - i) + 1, 2 * j + 2], qc);
                let ac = &four_j * alpha_inner(i, j) / (fact(i) * fact(i + 1));
                alpha.add_term(vec![2 * (j - i), 2 * j + 2], ac);
            }
        }
        let beta = q.sub(&p);
        let gamma = q.add(&p);
        Self { alpha, beta, gamma, p, q, order }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Entries of R with y renamed to `var`, bounds dropped (the caller tracks
    /// total degree).
    fn entries_in(&self, var: &str) -> Result<[[MultiSeries; 2]; 2]> {
        let exact = |s: &MultiSeries| -> Result<MultiSeries> {
            let terms = reorder(s, &["lam", "y"])?;
            Ok(MultiSeries::from_terms(&["lam", var], terms))
        };
        let a = exact(&self.alpha)?;
        Ok([
            [MultiSeries::one().add(&a), exact(&self.beta)?],
            [exact(&self.gamma)?, a.neg()],
        ])
    }

    /// α + (−α): the correction part is traceless.
    pub fn correction_trace(&self) -> MultiSeries {
        self.alpha.sub(&self.alpha)
    }
}

fn total_degree_at_most(s: &MultiSeries, ys: &[usize], max: i64) -> MultiSeries {
    s.filter(|e| ys.iter().map(|&i| e[i]).sum::<i64>() <= max)
}

fn y_indices(s: &MultiSeries) -> Vec<usize> {
    s.vars().iter().enumerate().filter(|(_, v)| v.starts_with('y')).map(|(i, _)| i).collect()
}

/// tr[R(x_{c_1})⋯R(x_{c_m})] as an exact polynomial, keeping total y-degree ≤ max_degree.
fn trace_product(r: &ResolventMatrix, cycle: &[usize], max_degree: i64) -> Result<MultiSeries> {
    let mats: Vec<_> = cycle.iter().map(|&c| r.entries_in(&format!("y{}", c + 1))).collect::<Result<_>>()?;
    let mut acc = mats[0].clone();
    for m in &mats[1..] {
        acc = std::array::from_fn(|i| {
            std::array::from_fn(|k| {
                let s = acc[i][0].mul(&m[0][k]).add(&acc[i][1].mul(&m[1][k]));
                total_degree_at_most(&s, &y_indices(&s), max_degree)
            })
        });
    }
    Ok(acc[0][0].add(&acc[1][1]))
}

/// C₂ = (tr[R(x₁)R(x₂)] − 1)/(x₁ − x₂)² in (lam, y1, y2), exponents below `order`.
pub fn c2(order: i64) -> Result<MultiSeries> {
    let h = 2 * order - 2;
    let r = ResolventMatrix::new(h + 1);
    let numer = trace_product(&r, &[0, 1], h)?.sub(&MultiSeries::one());
    // 1/(x₁−x₂)² = y₁²y₂²/(y₁−y₂)²
    let numer = numer.mul(&MultiSeries::from_terms(&["y1", "y2"], [(vec![2, 2], Rational::one())]));
    numer.div_by_difference("y1", "y2")?.div_by_difference("y1", "y2")?.truncate("y1", order)?.truncate("y2", order)
}

/// Denominator factor 1/(x_u − x_v) in the region |x_1| > … > |x_n|:
/// big/small index and overall sign.
#[derive(Clone, Copy)]
struct Factor {
    big: usize,
    small: usize,
    sign: i64,
}

/// Coefficient of y^D in ∏_f 1/(x_{u_f} − x_{v_f}) expanded in the region.
/// Each factor contributes y_big^{r+1} y_small^{−r}, i.e.
/// y₁·∏_{j<big} t_j^{−1}·∏_{big≤j<small} t_j^r in the ratios t_j = x_{j+1}/x_j,
/// so the count reduces to solving Σ_{f spans j} r_f = T_j with
/// T_j = #{f : big_f > j} − Σ_{i>j} D_i.
fn denominator_coeff(factors: &[Factor], d: &[i64]) -> i64 {
    let n = d.len();
    if d.iter().sum::<i64>() != factors.len() as i64 {
        return 0;
    }
    let mut t = vec![0i64; n.saturating_sub(1)];
    for j in 0..n.saturating_sub(1) {
        t[j] = factors.iter().filter(|f| f.big > j).count() as i64 - d[j + 1..].iter().sum::<i64>();
        if t[j] < 0 {
            return 0;
        }
    }
    let sign: i64 = factors.iter().map(|f| f.sign).product();
    fn count(factors: &[Factor], idx: usize, remaining: &mut [i64]) -> i64 {
        if idx == factors.len() {
            return i64::from(remaining.iter().all(|&x| x == 0));
        }
        let f = factors[idx];
        let span = f.big..f.small;
        let cap = span.clone().map(|j| remaining[j]).min().unwrap_or(0);
        let mut total = 0;
        for r in 0..=cap {
            for j in span.clone() {
                remaining[j] -= r;
            }
            total += count(factors, idx + 1, remaining);
            for j in span.clone() {
                remaining[j] += r;
            }
        }
        total
    }
    sign * count(factors, 0, &mut t)
}

fn permutations_fixing_first(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut vec![0], &mut (1..n).collect(), &mut out);
    out
}

/// C_n for n ≥ 3 from the cyclic permutation sum. Rotations of σ give equal
/// terms, so −(1/n)Σ_{σ∈S_n} becomes −Σ over σ with σ₁ = 1.
#[derive(Clone, Debug)]
pub struct CnTrace {
    pub n: usize,
    /// (lam, y1..yn), every y_i exponent in [1, order)
    pub series: MultiSeries,
}

pub fn c_n_trace(n: usize, order: i64) -> Result<CnTrace> {
    if n < 2 {
        return Err(Error::InvalidArgument("C_n needs n ≥ 2".into()));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let mut vars = vec!["lam"];
    vars.extend(names.iter().map(String::as_str));
    let mut bounds = vec![None];
    bounds.extend(std::iter::repeat_n(Some(order), n));
    if n == 2 {
        let s = c2(order)?;
        let terms = reorder(&s, &vars)?;
        let mut out = MultiSeries::zero(&vars, &bounds);
        for (e, c) in terms {
            out.add_term(e, c);
        }
        return Ok(CnTrace { n, series: out });
    }
    let max_e = n as i64 * (order - 1);
    let numer_degree = max_e - n as i64;
    let r = ResolventMatrix::new(numer_degree + 1);
    let cycles = permutations_fixing_first(n);
    let numerators: Vec<BTreeMap<Vec<i64>, Rational>> = cycles
        .par_iter()
        .map(|c| trace_product(&r, c, numer_degree).and_then(|t| reorder(&t, &vars)))
        .collect::<Result<_>>()?;
    let factor_sets: Vec<Vec<Factor>> = cycles
        .iter()
        .map(|c| {
            (0..n)
                .map(|a| {
                    let (u, v) = (c[a], c[(a + 1) % n]);
                    Factor { big: u.min(v), small: u.max(v), sign: if u < v { 1 } else { -1 } }
                })
                .collect()
        })
        .collect();
    // every target with exponents in [1, order)
    let mut targets = vec![vec![]];
    for _ in 0..n {
        targets = targets
            .into_iter()
            .flat_map(|t: Vec<i64>| (1..order).map(move |e| [t.clone(), vec![e]].concat()))
            .collect();
    }
    let pieces: Vec<Vec<(Vec<i64>, Rational)>> = targets
        .par_iter()
        .map(|target| {
            let mut by_lam: BTreeMap<i64, Rational> = BTreeMap::new();
            let e_total: i64 = target.iter().sum();
            for (numer, factors) in numerators.iter().zip(&factor_sets) {
                for (m, c) in numer {
                    if m[1..].iter().sum::<i64>() != e_total - n as i64 {
                        continue;
                    }
                    let d: Vec<i64> = target.iter().zip(&m[1..]).map(|(a, b)| a - b).collect();
                    let k = denominator_coeff(factors, &d);
                    if k != 0 {
                        *by_lam.entry(m[0]).or_insert_with(Rational::zero) -= c * int(k);
                    }
                }
            }
            by_lam
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(l, c)| ([vec![l], target.clone()].concat(), c))
                .collect()
        })
        .collect();
    let mut out = MultiSeries::zero(&vars, &bounds);
    for (e, c) in pieces.into_iter().flatten() {
        out.add_term(e, c);
    }
    Ok(CnTrace { n, series: out })
}

/// Single coefficient of C_n at y^target (any integer exponents), n ≥ 3,
/// as a polynomial in λ.
pub fn c_n_coefficient(r: &ResolventMatrix, target: &[i64]) -> Result<BTreeMap<i64, Rational>> {
    let n = target.len();
    if n < 3 {
        return Err(Error::InvalidArgument("single-coefficient extraction is for n ≥ 3".into()));
    }
    let names: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let mut vars = vec!["lam"];
    vars.extend(names.iter().map(String::as_str));
    let e_total: i64 = target.iter().sum();
    let numer_degree = e_total - n as i64;
    let mut by_lam: BTreeMap<i64, Rational> = BTreeMap::new();
    if numer_degree < 0 {
        return Ok(by_lam);
    }
    if r.order() <= numer_degree {
        return Err(Error::BeyondTruncation { var: "y".into(), exponent: numer_degree, truncation: r.order() });
    }
    for c in permutations_fixing_first(n) {
        let numer = reorder(&trace_product(r, &c, numer_degree)?, &vars)?;
        let factors: Vec<Factor> = (0..n)
            .map(|a| {
                let (u, v) = (c[a], c[(a + 1) % n]);
                Factor { big: u.min(v), small: u.max(v), sign: if u < v { 1 } else { -1 } }
            })
            .collect();
        for (m, coef) in &numer {
            if m[1..].iter().sum::<i64>() != numer_degree {
                continue;
            }
            let d: Vec<i64> = target.iter().zip(&m[1..]).map(|(a, b)| a - b).collect();
            let k = denominator_coeff(&factors, &d);
            if k != 0 {
                *by_lam.entry(m[0]).or_insert_with(Rational::zero) -= coef * int(k);
            }
        }
    }
    by_lam.retain(|_, c| !c.is_zero());
    Ok(by_lam)
}

/// One stationary correlator read off C_n (n ≥ 2) at q = 1, using the
/// λ^{2g−2+n} grading.
pub fn dy_correlator(key: &StationaryKey) -> Result<Rational> {
    let n = key.levels().len();
    let target: Vec<i64> = key.levels().iter().map(|&k| k as i64 + 2).collect();
    let lam = 2 * key.genus as i64 - 2 + n as i64;
    let coeffs = if n == 2 {
        let trace = c_n_trace(2, target.iter().copied().max().unwrap() + 1)?;
        trace.series.terms().filter(|(e, _)| e[1..] == target[..]).map(|(e, c)| (e[0], c.clone())).collect()
    } else if n >= 3 {
        let weight: i64 = target.iter().sum();
        c_n_coefficient(&ResolventMatrix::new(weight - n as i64 + 1), &target)?
    } else {
        return Err(Error::InvalidArgument("the matrix resolvent route needs at least two insertions".into()));
    };
    let pref: Rational = key.levels().iter().map(|&k| fact(k as i64 + 1)).product();
    Ok(coeffs.get(&lam).cloned().unwrap_or_else(Rational::zero) / pref)
}

/// λ-offset c_n such that C_n carries λ^{2g+c_n} in front of genus-g invariants,
/// chosen as the candidate with the fewest disagreements against the OP values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradingFit {
    pub n: usize,
    pub offset: i64,
    /// (offset, mismatches) for every candidate tried
    pub candidates: Vec<(i64, usize)>,
}

/// Σ_g λ^{2g+offset}·⟨τ_k⟩_{g;d(g)}·∏(k_i+1)! from the OP oracle for one level vector.
fn op_lambda_polynomial(
    oracle: &StationaryOracle,
    levels: &[u32],
    offset: i64,
) -> Result<BTreeMap<i64, Rational>> {
    let n = levels.len() as i64;
    let weight: i64 = levels.iter().map(|&k| k as i64 + 1).sum();
    let pref: Rational = levels.iter().map(|&k| fact(k as i64 + 1)).product();
    let mut out = BTreeMap::new();
    // Σ(k+1) = 2g − 2 + 2d + n, d ≥ 0
    let mut g = 0i64;
    while 2 * g - 2 + n <= weight {
        let twice_d = weight - (2 * g - 2 + n);
        if twice_d % 2 == 0 {
            let key = StationaryKey::new(g as u32, (twice_d / 2) as u32, levels.to_vec());
            if key.is_stable() {
                let v = oracle.correlator(&key)?;
                if !v.is_zero() {
                    out.insert(2 * g + offset, v * &pref);
                }
            }
        }
        g += 1;
    }
    Ok(out)
}

fn compare_with_offset(
    oracle: &StationaryOracle,
    trace: &CnTrace,
    max_weight: i64,
    offset: i64,
) -> Result<Check> {
    let n = trace.n;
    let mut check = Check::new(format!("matrix resolvent vs OP, n = {n}, weight ≤ {max_weight}"));
    let mut levels_list = vec![vec![]];
    for _ in 0..n {
        levels_list = levels_list
            .into_iter()
            .flat_map(|t: Vec<i64>| (0..=max_weight).map(move |k| [t.clone(), vec![k]].concat()))
            .collect();
    }
    let zero = Rational::zero();
    for ks in levels_list {
        if ks.iter().map(|k| k + 2).sum::<i64>() > max_weight {
            continue;
        }
        let levels: Vec<u32> = ks.iter().map(|&k| k as u32).collect();
        let expected = op_lambda_polynomial(oracle, &levels, offset)?;
        let found: BTreeMap<i64, Rational> = trace
            .series
            .terms()
            .filter(|(e, _)| e[1..].iter().zip(&ks).all(|(a, k)| *a == k + 2))
            .map(|(e, c)| (e[0], c.clone()))
            .collect();
        let mut lams: Vec<i64> = expected.keys().chain(found.keys()).copied().collect();
        lams.sort_unstable();
        lams.dedup();
        if lams.is_empty() {
            check.checked += 1;
        }
        for l in lams {
            check.compare(
                || format!("k={ks:?} λ^{l}"),
                expected.get(&l).unwrap_or(&zero),
                found.get(&l).unwrap_or(&zero),
            );
        }
    }
    // y-exponent 1 would be a level −1 insertion
    for (e, c) in trace.series.terms() {
        if e[1..].contains(&1) {
            check.fail(format!("y exponents {:?}", &e[1..]), format!("unexpected coefficient {c}"));
        }
    }
    Ok(check)
}

/// Per-key comparison of C_n coefficients against the OP recursion for every
/// level vector with Σ(k_i+2) ≤ max_weight, after fitting the λ-grading.
pub fn dy_vs_op_report(oracle: &StationaryOracle, n: usize, max_weight: i64) -> Result<(Check, GradingFit)> {
    let order = max_weight - 2 * (n as i64 - 1) + 1;
    let trace = c_n_trace(n, order)?;
    let mut best: Option<(Check, i64)> = None;
    let mut candidates = Vec::new();
    for offset in -(n as i64)..=(n as i64) {
        let check = compare_with_offset(oracle, &trace, max_weight, offset)?;
        candidates.push((offset, check.mismatches.len()));
        if best.as_ref().is_none_or(|(b, _)| check.mismatches.len() < b.mismatches.len()) {
            best = Some((check, offset));
        }
    }
    let (mut check, offset) = best.unwrap();
    check.note(format!("C_{n} carries λ^(2g{offset:+}) in front of genus-g invariants"));
    let sym = symmetry_check(&trace);
    check.absorb(sym);
    Ok((check, GradingFit { n, offset, candidates }))
}

/// Symmetry of the extracted coefficients under permutations of the levels.
pub fn symmetry_check(trace: &CnTrace) -> Check {
    let mut check = Check::new(format!("C_{} symmetric in the levels", trace.n));
    for (e, c) in trace.series.terms() {
        let mut sorted = e[1..].to_vec();
        sorted.sort_unstable();
        let mut key = vec![e[0]];
        key.extend(sorted);
        let other = trace.series.coeff_vec(&key).unwrap_or_else(|_| Rational::zero());
        check.compare(|| format!("{e:?}"), &other, c);
    }
    check
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_leading_term() {
        let r = ResolventMatrix::new(6);
        assert_eq!(r.alpha.coeff(&[("lam", 0), ("y", 2)]).unwrap(), Rational::one());
        assert!(r.correction_trace().is_empty());
        assert_eq!(r.alpha.coeff(&[("lam", 0), ("y", 0)]).unwrap(), Rational::zero());
    }

    #[test]
    fn c2_leading_coefficient() {
        let c = c2(6).unwrap();
        // λ⁰ coefficient at y1² y2²: 1!·1!·⟨τ₀τ₀⟩_{0;1}
        assert_eq!(c.coeff(&[("lam", 0), ("y1", 2), ("y2", 2)]).unwrap(), Rational::one());
        // ⟨τ₁τ₁⟩_{0;2} = 1/2 times 2!·2!
        assert_eq!(c.coeff(&[("lam", 0), ("y1", 3), ("y2", 3)]).unwrap(), int(2));
        // genus one arrives with λ²
        let o = StationaryOracle::new();
        let v = o.correlator(&StationaryKey::new(1, 1, vec![0, 2])).unwrap() * int(6);
        assert_eq!(c.coeff(&[("lam", 2), ("y1", 2), ("y2", 4)]).unwrap(), v);
    }

    #[test]
    fn c3_lowest_term() {
        let r = ResolventMatrix::new(4);
        let c = c_n_coefficient(&r, &[2, 2, 2]).unwrap();
        assert_eq!(c, BTreeMap::from([(1, Rational::one())]));
        assert!(c_n_coefficient(&r, &[1, 2, 3]).unwrap().is_empty());
    }

    #[test]
    fn c2_and_c3_against_op() {
        let o = StationaryOracle::new();
        let (c, fit) = dy_vs_op_report(&o, 2, 8).unwrap();
        assert!(c.passed(), "{:?}", c.mismatches);
        assert_eq!(fit.offset, 0);
        let (c, fit) = dy_vs_op_report(&o, 3, 8).unwrap();
        assert!(c.passed(), "{:?}", c.mismatches);
        assert_eq!(fit.offset, 1);
    }

    #[test]
    fn denominator_counts() {
        // 1/(x1−x2) = Σ_r y1^{r+1} y2^{−r}
        let f = [Factor { big: 0, small: 1, sign: 1 }];
        assert_eq!(denominator_coeff(&f, &[1, 0]), 1);
        assert_eq!(denominator_coeff(&f, &[3, -2]), 1);
        assert_eq!(denominator_coeff(&f, &[0, 1]), 0);
    }

    #[test]
    fn single_keys() {
        let o = StationaryOracle::new();
        for (g, levels) in [(0, vec![0, 0]), (0, vec![2, 2]), (1, vec![1, 1]), (0, vec![0, 0, 0]), (1, vec![1, 1, 2])] {
            let key = StationaryKey::from_levels(g, levels).unwrap();
            assert_eq!(dy_correlator(&key).unwrap(), o.correlator(&key).unwrap(), "{key:?}");
        }
    }
}
