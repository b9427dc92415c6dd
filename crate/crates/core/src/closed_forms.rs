//! Closed-form expansions of stationary one- and two-point functions and the
//! genus-zero spectral curve identities, each computed independently of the
//! OP recursion so the two can be compared coefficient by coefficient.

use num_traits::{One, Zero};

use crate::algebra::{
    bernoulli, binomial, factorial, int, rat, BernoulliCache, MultiSeries, Rational, UniSeries,
};
use crate::error::{Error, Result};
use crate::report::Check;
use crate::stationary::{s_series, zeta_in, StationaryKey, StationaryOracle};

fn fact(n: i64) -> Rational {
    int(factorial(n as u64))
}

fn binom(n: i64, k: i64) -> Rational {
    int(binomial(n, k))
}

/// ⟨τ_{2g−2+2d}(Q)⟩_{g,1;d} = [z^{2g}] S(z)^{2d−1}/d!².
pub fn one_point_series(g: u32, d: u32) -> Result<Rational> {
    if g == 0 && d == 0 {
        return Err(Error::InvalidArgument("⟨τ_{-2}⟩ is not defined".into()));
    }
    let order = 2 * g as i64 + 1;
    let s = s_series(order).pow(2 * d as i64 - 1)?;
    let df = fact(d as i64);
    Ok(s.coeff(2 * g as i64)? / (&df * &df))
}

/// The same one-point numbers from the expansion of S(w)^{2d−1} in exponentials
/// (d ≥ 1) or from Bernoulli numbers (d = 0).
pub fn one_point_double_sum(g: u32, d: u32) -> Result<Rational> {
    let (g, d) = (g as i64, d as i64);
    if d == 0 {
        if g == 0 {
            return Err(Error::InvalidArgument("⟨τ_{-2}⟩ is not defined".into()));
        }
        // [w^{2g}] S(w)^{-1} = B_{2g}/(2g)!·(2^{1−2g} − 1)
        let two_pow = Rational::new(1.into(), num_bigint::BigInt::one() << (2 * g - 1));
        return Ok(bernoulli(2 * g as usize) / fact(2 * g) * (two_pow - Rational::one()));
    }
    let j = g + d - 1;
    let mut acc = Rational::zero();
    for l in 0..d {
        let base = int(2 * d - 1 - 2 * l);
        let term = binom(2 * d - 1, l) * num_traits::pow(base, (2 * j + 1) as usize);
        if l % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let denom = int(num_bigint::BigInt::one() << (2 * j)) * fact(2 * j + 1) * fact(d) * fact(d);
    Ok(acc / denom)
}

/// Σ_m B_{2m}/(2m)!·(2^{1−2m} − 1)·w^{2m}, known below `order`.
pub fn s_inverse_bernoulli(order: i64, cache: &BernoulliCache) -> UniSeries {
    UniSeries::from_fn("w", 0, order, |e| {
        if e % 2 != 0 {
            return Rational::zero();
        }
        let m = e / 2;
        let two_pow = if m == 0 {
            int(2)
        } else {
            Rational::new(1.into(), num_bigint::BigInt::one() << (2 * m - 1))
        };
        cache.get(e as usize) / fact(e) * (two_pow - Rational::one())
    })
}

/// Compares the Bernoulli form of S(w)^{-1} with direct series inversion through w^{max_power}.
pub fn bernoulli_check(max_power: i64) -> Result<Check> {
    let mut check = Check::new("bernoulli expansion of S(w)^-1");
    let order = max_power + 1;
    let direct = s_series(order).inv()?;
    let cache = BernoulliCache::new();
    let closed = s_inverse_bernoulli(order, &cache);
    for e in 0..order {
        check.compare(|| format!("[w^{e}]"), &direct.coeff(e)?, &closed.coeff(e)?);
    }
    Ok(check)
}

/// c(u) = (1 + sqrt(1 − 4u))/2 as a power series in u.
fn catalan_root(order: i64) -> Result<UniSeries> {
    let inner = UniSeries::new("u", 0, vec![int(1), int(-4)], order);
    let sq = inner.sqrt()?;
    Ok(sq.add(&UniSeries::one("u", order))?.scale(&rat(1, 2)))
}

/// −ln((1 + sqrt(1 − 4u))/2) = Σ_{d≥1} (2d−1)!/d!²·u^d with u = q/x².
pub fn genus0_one_point_u(order: i64) -> Result<UniSeries> {
    Ok(catalan_root(order)?.log()?.neg())
}

/// Rewrites a series in u = q/x² as a series in q and x (x exponents negative).
pub fn u_to_qx(f: &UniSeries, x_shift: i64, q_order: i64) -> MultiSeries {
    let mut out = MultiSeries::zero(&["q", "x"], &[Some(q_order), None]);
    for (d, c) in f.terms() {
        if d < q_order {
            out.add_term(vec![d, -2 * d + x_shift], c.clone());
        }
    }
    out
}

/// ln x − ln((x + sqrt(x² − 4q))/2) in q and x, with q^d for d < q_order.
pub fn genus0_one_point_generating(q_order: i64) -> Result<MultiSeries> {
    let f = genus0_one_point_u(q_order)?;
    Ok(u_to_qx(&f, 0, q_order))
}

/// Terms keyed by exponent vectors in the given variable order.
pub(crate) fn reorder(s: &MultiSeries, vars: &[&str]) -> Result<std::collections::BTreeMap<Vec<i64>, Rational>> {
    let idx: Vec<Option<usize>> = vars.iter().map(|v| s.index(v).ok()).collect();
    for (i, v) in s.vars().iter().enumerate() {
        if !idx.contains(&Some(i)) && s.terms().any(|(e, _)| e[i] != 0) {
            return Err(Error::UnknownVariable(v.clone()));
        }
    }
    Ok(s.terms()
        .map(|(e, c)| (idx.iter().map(|i| i.map_or(0, |i| e[i])).collect(), c.clone()))
        .collect())
}

/// Closed forms of Σ_d (2g−1+2d)!·⟨τ_{2g−2+2d}(Q)⟩_{g,1;d}·u^d (the x^{−2g} prefactor removed).
pub fn one_point_genus_expansion(g: u32, order: i64) -> Result<UniSeries> {
    let poly = |coeffs: &[i64], denom: i64| {
        UniSeries::new("u", 0, coeffs.iter().map(|&c| rat(c, denom)).collect(), order)
    };
    let (numer, power) = match g {
        0 => return genus0_one_point_u(order),
        1 => (poly(&[-1, 16], 24), rat(-5, 2)),
        2 => (poly(&[7, -94, 8256, 18432], 960), rat(-11, 2)),
        3 => (
            poly(&[-31, 1180, 134886, 5419360, 23229440, 13271040], 8064),
            rat(-17, 2),
        ),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "no closed form available for genus {g}; use the defining sum"
            )))
        }
    };
    let base = UniSeries::new("u", 0, vec![int(1), int(-4)], order).pow_rational(&power)?;
    numer.mul(&base)
}

/// The defining sum Σ_d (2g−1+2d)!·⟨τ_{2g−2+2d}(Q)⟩_{g,1;d}·u^d from the OP one-point law.
pub fn one_point_genus_defining(g: u32, order: i64) -> Result<UniSeries> {
    let mut coeffs = Vec::new();
    for d in 0..order {
        if g == 0 && d == 0 {
            coeffs.push(Rational::zero());
            continue;
        }
        coeffs.push(fact(2 * g as i64 - 1 + 2 * d) * one_point_series(g, d as u32)?);
    }
    Ok(UniSeries::new("u", 0, coeffs, order))
}

/// Σ_d (2g−1+2d)!/d!²·t^d against (2g−1)!·Σ_j (2g−1)!/((2g−1−2j)! j!²) t^j / (1−4t)^{(4g−1)/2}.
pub fn a089627_resummation_check(g: u32, order: i64) -> Result<Check> {
    let g = g as i64;
    let mut check = Check::new(format!("A089627 resummation, genus {g}"));
    let lhs = UniSeries::from_fn("t", 0, order, |d| fact(2 * g - 1 + 2 * d) / (fact(d) * fact(d)));
    let poly = UniSeries::from_fn("t", 0, order, |j| {
        if j < g {
            fact(2 * g - 1) / (fact(2 * g - 1 - 2 * j) * fact(j) * fact(j))
        } else {
            Rational::zero()
        }
    });
    let base = UniSeries::new("t", 0, vec![int(1), int(-4)], order).pow_rational(&rat(-(4 * g - 1), 2))?;
    let rhs = poly.mul(&base)?.scale(&fact(2 * g - 1));
    for d in 0..order {
        check.compare(|| format!("[t^{d}]"), &lhs.coeff(d)?, &rhs.coeff(d)?);
    }
    Ok(check)
}

/// Coefficientwise comparison of the closed form for genus g with its defining sum.
pub fn one_point_genus_check(g: u32, order: i64) -> Result<Check> {
    let mut check = Check::new(format!("one-point genus {g} closed form"));
    let closed = one_point_genus_expansion(g, order)?;
    let defining = one_point_genus_defining(g, order)?;
    for d in 0..order {
        check.compare(|| format!("g={g} [u^{d}]"), &defining.coeff(d)?, &closed.coeff(d)?);
    }
    Ok(check)
}

/// F°_{(1^m),(1^m)}(z₁,z₂) from the two-point closed form, exponents below `orders`.
pub fn two_point_closed(m: u32, orders: [i64; 2]) -> Result<MultiSeries> {
    if m == 0 {
        return Err(Error::InvalidArgument("two-point closed form needs m ≥ 1".into()));
    }
    let [o1, o2] = orders;
    // every factor carries at least one power of its variables, so a slack of
    // the full degree keeps intermediate truncation harmless
    let slack = o1 + o2 + 2;
    let z1 = MultiSeries::from_uni(&zeta_in("z1", slack));
    let z2 = MultiSeries::from_uni(&zeta_in("z2", slack));
    let sum = MultiSeries::from_terms(&["z1", "z2"], [(vec![1, 0], int(1)), (vec![0, 1], int(1))])
        .truncate("z1", o1)?
        .truncate("z2", o2)?;
    let z12 = MultiSeries::compose_univariate(&zeta_in("t", slack), &sum, (slack + 2) as usize)?;
    let z12_sq = z12.mul(&z12);
    let (z1_sq, z2_sq) = (z1.mul(&z1), z2.mul(&z2));
    let m = m as i64;
    let mut total = MultiSeries::zero(&["z1", "z2"], &[Some(o1), Some(o2)]);
    for k in 0..m {
        let mut inner = MultiSeries::zero(&["z1", "z2"], &[Some(o1), Some(o2)]);
        for j in 0..=k {
            let c = binom(k, j) * binom(k, j);
            inner = inner.add(&z1_sq.pow(j as u32).mul(&z2_sq.pow((k - j) as u32)).scale(&c));
        }
        total = total.add(&z12_sq.pow((m - 1 - k) as u32).mul(&inner));
    }
    let mf = fact(m);
    let out = z1.mul(&z2).mul(&total).scale(&(Rational::one() / (&mf * &mf)));
    out.truncate("z1", o1)?.truncate("z2", o2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// ⟨τ_{2n₁}τ_{2n₂}⟩_{0,2;n₁+n₂+1}
    Even,
    /// ⟨τ_{2n₁−1}τ_{2n₂−1}⟩_{0,2;n₁+n₂}
    Odd,
}

/// Genus-zero two-point closed forms. The factorials enter squared; with single
/// factorials the forms already fail at ⟨τ₀τ₄⟩_{0,2;3} = 1/12.
pub fn genus0_two_point(n1: u32, n2: u32, parity: Parity) -> Result<Rational> {
    let (a, b) = (n1 as i64, n2 as i64);
    match parity {
        Parity::Even => Ok(Rational::one() / (int(a + b + 1) * fact(a) * fact(a) * fact(b) * fact(b))),
        Parity::Odd => {
            if a == 0 || b == 0 {
                return Err(Error::InvalidArgument("odd two-point form needs n₁, n₂ ≥ 1".into()));
            }
            Ok(int(a * b) / (int(a + b) * fact(a) * fact(a) * fact(b) * fact(b)))
        }
    }
}

/// Both sides of the two binomial identities behind the genus-zero two-point forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialIdentities {
    pub even_lhs: Rational,
    pub even_rhs: Rational,
    /// `None` unless n₁, n₂ ≥ 1.
    pub odd: Option<OddIdentity>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddIdentity {
    /// Double sum with binomial top 2n₁+2n₂−2−2k, the value coming from the extraction.
    pub lhs: Rational,
    pub rhs: Rational,
    /// The same sum with binomial top 2n₁+2n₂−2k, as it is usually printed.
    pub lhs_printed_top: Rational,
}

pub fn combinatorial_identities(n1: u32, n2: u32) -> CombinatorialIdentities {
    let (a, b) = (n1 as i64, n2 as i64);
    let double_sum = |kmax: i64, top: &dyn Fn(i64) -> i64, bottom: &dyn Fn(i64) -> i64| {
        let mut acc = Rational::zero();
        for k in 0..=kmax {
            for j in 0..=k {
                acc += binom(top(k), bottom(j)) * binom(k, j) * binom(k, j);
            }
        }
        acc
    };
    let f = fact(a + b + 1);
    let even_lhs = double_sum(a + b, &|k| 2 * a + 2 * b - 2 * k, &|j| 2 * a - 2 * j) / (&f * &f);
    let even_rhs = genus0_two_point(n1, n2, Parity::Even).unwrap();
    let odd = (a >= 1 && b >= 1).then(|| {
        let f = fact(a + b);
        let bottom = |j: i64| 2 * a - 2 * j - 1;
        OddIdentity {
            lhs: double_sum(a + b - 1, &|k| 2 * a + 2 * b - 2 - 2 * k, &bottom) / (&f * &f),
            rhs: genus0_two_point(n1, n2, Parity::Odd).unwrap(),
            lhs_printed_top: double_sum(a + b - 1, &|k| 2 * a + 2 * b - 2 * k, &bottom) / (&f * &f),
        }
    });
    CombinatorialIdentities { even_lhs, even_rhs, odd }
}

/// Σ_n Σ_j n!/((n−2j)! j!²)·x^n y^j = 1/sqrt((1−x)² − 4x²y) and its odd part
/// ½f(x) − ½f(−x), through x^{x_order−1}, y^{y_order−1}.
///
/// The form without the factor 1/(1−x) (summing Σ_m (m+2j)!/m!·x^m as
/// (2j)!/(1−x)^{2j} instead of (2j)!/(1−x)^{2j+1}) is also expanded and its
/// disagreements are recorded as a note.
pub fn a089627_gf(x_order: i64, y_order: i64) -> Result<Check> {
    let mut check = Check::new("A089627 generating function");
    let bounds = [Some(x_order), Some(y_order)];
    let lhs_all = {
        let mut s = MultiSeries::zero(&["x", "y"], &bounds);
        for n in 0..x_order {
            for j in 0..=(n / 2).min(y_order - 1) {
                s.add_term(vec![n, j], fact(n) / (fact(n - 2 * j) * fact(j) * fact(j)));
            }
        }
        s
    };
    let inv_sqrt = UniSeries::new("t", 0, vec![int(1), int(-1)], x_order + 1).pow_rational(&rat(-1, 2))?;
    // (1 − 4x²y/(1 − sign·x)²)^{−1/2}, optionally times 1/(1 − sign·x)
    let side = |sign: i64, with_pole: bool| -> Result<MultiSeries> {
        let geo = UniSeries::new("x", 0, vec![int(1), int(-sign)], x_order).pow(-2)?;
        let g = MultiSeries::from_uni(&geo)
            .mul(&MultiSeries::from_terms(&["x", "y"], [(vec![2, 1], int(4))]))
            .truncate("y", y_order)?;
        let f = MultiSeries::compose_univariate(&inv_sqrt, &g, (x_order + 2) as usize)?;
        Ok(if with_pole {
            let pole = UniSeries::new("x", 0, vec![int(1), int(-sign)], x_order).inv()?;
            f.mul(&MultiSeries::from_uni(&pole))
        } else {
            f
        })
    };
    let mut printed_misses = 0;
    for with_pole in [true, false] {
        let plus = side(1, with_pole)?;
        let odd_rhs = plus.sub(&side(-1, with_pole)?).scale(&rat(1, 2));
        for n in 0..x_order {
            for j in 0..y_order {
                let m = [("x", n), ("y", j)];
                let lhs = lhs_all.coeff(&m)?;
                let odd_lhs = if n % 2 == 1 { lhs.clone() } else { Rational::zero() };
                if with_pole {
                    check.compare(|| format!("[x^{n} y^{j}]"), &lhs, &plus.coeff(&m)?);
                    check.compare(|| format!("odd part [x^{n} y^{j}]"), &odd_lhs, &odd_rhs.coeff(&m)?);
                } else {
                    printed_misses += usize::from(lhs != plus.coeff(&m)?) + usize::from(odd_lhs != odd_rhs.coeff(&m)?);
                }
            }
        }
    }
    check.note(format!(
        "without the factor 1/(1−x): {printed_misses} of {} coefficients disagree",
        check.checked
    ));
    Ok(check)
}

/// W₀,₂ in the inverse variables y_i = 1/x_i, q^d for d < q_order:
/// ((1 − 4q y₁y₂)(1 − 4q y₁²)^{−1/2}(1 − 4q y₂²)^{−1/2} − 1)·y₁²y₂²/(2(y₁ − y₂)²).
pub fn w02_inverse_vars(q_order: i64) -> Result<MultiSeries> {
    let inv_sqrt = UniSeries::new("t", 0, vec![int(1), int(-4)], q_order + 1).pow_rational(&rat(-1, 2))?;
    let factor = |var: &str| -> Result<MultiSeries> {
        let g = MultiSeries::from_terms(&["q", var], [(vec![1, 2], int(1))]).truncate("q", q_order)?;
        MultiSeries::compose_univariate(&inv_sqrt, &g, (q_order + 2) as usize)
    };
    let lin = MultiSeries::from_terms(&["q", "y1", "y2"], [(vec![0, 0, 0], int(1)), (vec![1, 1, 1], int(-4))]);
    let numer = lin.mul(&factor("y1")?).mul(&factor("y2")?).sub(&MultiSeries::one());
    let numer = numer.mul(&MultiSeries::from_terms(&["y1", "y2"], [(vec![2, 2], rat(1, 2))]));
    numer.div_by_difference("y1", "y2")?.div_by_difference("y1", "y2")
}

/// Replaces inverse variables `yi` by x-exponents (y^e → x^{−e}).
fn inverse_to_x(s: &MultiSeries, pairs: &[(&str, &str)]) -> Result<MultiSeries> {
    let mut out = s.clone();
    for (y, x) in pairs {
        out = out.rename(y, x)?;
    }
    let idx: Vec<usize> = pairs.iter().map(|(_, x)| out.index(x)).collect::<Result<_>>()?;
    let vars: Vec<&str> = out.vars().iter().map(String::as_str).collect();
    let mut flipped = MultiSeries::zero(&vars, out.bounds());
    for (e, c) in out.terms() {
        let mut f = e.clone();
        for &i in &idx {
            f[i] = -f[i];
        }
        flipped.add_term(f, c.clone());
    }
    Ok(flipped)
}

/// W₀,₂(x₁,x₂) as a series in q with Laurent coefficients in x₁, x₂.
pub fn w02_closed_form(q_order: i64) -> Result<MultiSeries> {
    inverse_to_x(&w02_inverse_vars(q_order)?, &[("y1", "x1"), ("y2", "x2")])
}

/// The same series assembled from genus-zero two-point invariants.
pub fn w02_from_correlators(oracle: &StationaryOracle, q_order: i64) -> Result<MultiSeries> {
    let mut out = MultiSeries::zero(&["q", "x1", "x2"], &[Some(q_order), None, None]);
    for d in 1..q_order {
        for k1 in 0..=(2 * d - 2) {
            let k2 = 2 * d - 2 - k1;
            let key = StationaryKey::new(0, d as u32, vec![k1 as u32, k2 as u32]);
            let v = oracle.correlator(&key)? * fact(k1 + 1) * fact(k2 + 1);
            out.add_term(vec![d, -(k1 + 2), -(k2 + 2)], v);
        }
    }
    Ok(out)
}

/// Checks w02_closed_form against the correlators and its diagonal against q/(x² − 4q)².
pub fn w02_check(oracle: &StationaryOracle, q_order: i64) -> Result<Check> {
    let mut check = Check::new("W(0,2) closed form");
    let vars = ["q", "x1", "x2"];
    let closed = reorder(&w02_closed_form(q_order)?, &vars)?;
    let from_op = reorder(&w02_from_correlators(oracle, q_order)?, &vars)?;
    let monomials: std::collections::BTreeSet<&Vec<i64>> = closed.keys().chain(from_op.keys()).collect();
    let zero = Rational::zero();
    for e in monomials {
        check.compare(
            || format!("[q^{} x1^{} x2^{}]", e[0], e[1], e[2]),
            from_op.get(e).unwrap_or(&zero),
            closed.get(e).unwrap_or(&zero),
        );
    }
    // diagonal: q y⁴/(1 − 4q y²)² in y = 1/x
    let diag = w02_inverse_vars(q_order)?.identify("y1", "y2")?;
    let expected = {
        let inv_sq = UniSeries::new("t", 0, vec![int(1), int(-4)], q_order + 1).pow(-2)?;
        let g = MultiSeries::from_terms(&["q", "y1"], [(vec![1, 2], int(1))]).truncate("q", q_order)?;
        MultiSeries::compose_univariate(&inv_sq, &g, (q_order + 2) as usize)?
            .mul(&MultiSeries::from_terms(&["q", "y1"], [(vec![1, 4], int(1))]))
            .truncate("q", q_order)?
    };
    let diff = diag.sub(&expected);
    check.checked += 1;
    if !diff.is_empty() {
        check.fail("diagonal x1 = x2", format!("W(0,2)(x,x) − q/(x²−4q)² = {diff}"));
    }
    Ok(check)
}

/// e^y + q e^{−y} = x with y = W₀,₁(x) − ln x + ln q, and e^y = (x − sqrt(x² − 4q))/2,
/// as identities in u = q/x² through u^{order−1}.
pub fn spectral_curve_check(order: i64) -> Result<Check> {
    let mut check = Check::new("spectral curve x = e^y + q e^-y");
    // W₀,₁ = −ln c(u); exp(W₀,₁) = 1/c(u); e^y = (q/x)·exp(W₀,₁) = x·u/c(u)
    let w01 = genus0_one_point_u(order + 1)?;
    let e = w01.exp()?;
    let u = UniSeries::monomial("u", int(1), 1, order + 1);
    // e^y/x and q e^{−y}/x
    let ey_over_x = u.mul(&e)?;
    let q_emy_over_x = e.inv()?;
    let sum = ey_over_x.add(&q_emy_over_x)?;
    for k in 0..order {
        let expected = if k == 0 { int(1) } else { int(0) };
        check.compare(|| format!("(e^y + q e^-y)/x [u^{k}]"), &expected, &sum.coeff(k)?);
    }
    // (x − sqrt(x² − 4q))/(2x) = (1 − sqrt(1 − 4u))/2
    let z_over_x = UniSeries::one("u", order + 1)
        .sub(&UniSeries::new("u", 0, vec![int(1), int(-4)], order + 1).sqrt()?)?
        .scale(&rat(1, 2));
    for k in 0..order {
        check.compare(|| format!("e^y/x vs (x − sqrt(x²−4q))/(2x) [u^{k}]"), &z_over_x.coeff(k)?, &ey_over_x.coeff(k)?);
    }
    check.note("e^y = z requires y = W(0,1) − ln x + ln q; with −ln q one gets e^y = z/q²");
    Ok(check)
}

/// Bergman kernel: with x_i = z_i + q/z_i and w_i = 1/z_i,
/// W₀,₂(x₁,x₂)·(1 − q w₁²)(1 − q w₂²) = q w₁²w₂²/(1 − q w₁w₂)², which is
/// dx₁dx₂/(x₁−x₂)² + W₀,₂ dx₁dx₂ = dz₁dz₂/(z₁−z₂)² after clearing the common pole.
/// Compared for all exponents of w₁, w₂ below `order`.
pub fn bergman_check(order: i64) -> Result<Check> {
    let mut check = Check::new("Bergman kernel in z coordinates");
    let q_order = order;
    let w02 = w02_inverse_vars(q_order)?;
    // y_i = 1/x_i = w_i/(1 + q w_i²)
    let y_of_w = |w: &str| -> Result<MultiSeries> {
        let geo = UniSeries::new("t", 0, vec![int(1), int(1)], q_order + 1).inv()?;
        let g = MultiSeries::from_terms(&["q", w], [(vec![1, 2], int(1))]).truncate("q", q_order)?;
        Ok(MultiSeries::compose_univariate(&geo, &g, (q_order + 2) as usize)?
            .mul(&MultiSeries::from_terms(&[w], [(vec![1], int(1))])))
    };
    let sub = w02.substitute("y1", &y_of_w("w1")?)?.substitute("y2", &y_of_w("w2")?)?;
    let jac = MultiSeries::from_terms(&["q", "w1"], [(vec![0, 0], int(1)), (vec![1, 2], int(-1))])
        .mul(&MultiSeries::from_terms(&["q", "w2"], [(vec![0, 0], int(1)), (vec![1, 2], int(-1))]));
    let lhs = sub.mul(&jac).truncate("q", q_order)?;
    let rhs = {
        let inv_sq = UniSeries::new("t", 0, vec![int(1), int(-1)], q_order + 1).pow(-2)?;
        let g = MultiSeries::from_terms(&["q", "w1", "w2"], [(vec![1, 1, 1], int(1))]).truncate("q", q_order)?;
        MultiSeries::compose_univariate(&inv_sq, &g, (q_order + 2) as usize)?
            .mul(&MultiSeries::from_terms(&["q", "w1", "w2"], [(vec![1, 2, 2], int(1))]))
            .truncate("q", q_order)?
    };
    let vars = ["q", "w1", "w2"];
    for d in 0..q_order {
        for a in 0..order {
            for b in 0..order {
                let m = [(vars[0], d), (vars[1], a), (vars[2], b)];
                check.compare(|| format!("[q^{d} w1^{a} w2^{b}]"), &rhs.coeff(&m)?, &lhs.coeff(&m)?);
            }
        }
    }
    // q → 0: both sides vanish, leaving dz₁dz₂/(z₁−z₂)² = dx₁dx₂/(x₁−x₂)²
    let (lhs, rhs) = (reorder(&lhs, &vars)?, reorder(&rhs, &vars)?);
    for (e, c) in lhs.iter().chain(rhs.iter()) {
        if e[0] == 0 {
            check.fail(format!("q^0 term {e:?}"), c.to_string());
        }
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_values() {
        assert_eq!(one_point_series(0, 1).unwrap(), int(1));
        assert_eq!(one_point_series(1, 1).unwrap(), rat(1, 24));
        assert_eq!(one_point_series(1, 2).unwrap(), rat(1, 32));
        assert_eq!(one_point_series(1, 0).unwrap(), rat(-1, 24));
        for g in 0..5 {
            for d in 0..6 {
                if g == 0 && d == 0 {
                    continue;
                }
                assert_eq!(one_point_series(g, d).unwrap(), one_point_double_sum(g, d).unwrap(), "g={g} d={d}");
            }
        }
    }

    #[test]
    fn genus0_generating_coefficients() {
        let f = genus0_one_point_generating(6).unwrap();
        assert_eq!(f.coeff(&[("q", 1), ("x", -2)]).unwrap(), int(1));
        assert_eq!(f.coeff(&[("q", 2), ("x", -4)]).unwrap(), rat(3, 2));
        assert_eq!(f.coeff(&[("q", 0), ("x", 0)]).unwrap(), int(0));
    }

    #[test]
    fn two_point_forms() {
        assert_eq!(genus0_two_point(0, 0, Parity::Even).unwrap(), int(1));
        assert_eq!(genus0_two_point(1, 1, Parity::Odd).unwrap(), rat(1, 2));
        assert_eq!(genus0_two_point(2, 1, Parity::Even).unwrap(), rat(1, 16));
        let id = combinatorial_identities(1, 1);
        assert_eq!(id.even_lhs, id.even_rhs);
        let odd = id.odd.unwrap();
        assert_eq!(odd.lhs, odd.rhs);
        assert_eq!(odd.lhs_printed_top, rat(3, 2));
    }

    #[test]
    fn genus_one_closed_form_constant() {
        let f = one_point_genus_expansion(1, 4).unwrap();
        assert_eq!(f.coeff(0).unwrap(), rat(-1, 24));
        assert!(one_point_genus_expansion(4, 4).is_err());
    }

    #[test]
    fn w02_leading() {
        let w = w02_closed_form(4).unwrap();
        assert_eq!(w.coeff(&[("q", 1), ("x1", -2), ("x2", -2)]).unwrap(), int(1));
        assert!(w.terms().all(|(e, _)| e[0] >= 1));
    }
}
