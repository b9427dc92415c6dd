use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rational::{int, rat, Rational};

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// C(n, k) for integer n, k; zero outside 0 ≤ k ≤ n.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Memoized harmonic numbers H_n = Σ_{r=1}^n 1/r.
#[derive(Debug, Default)]
pub struct HarmonicCache {
    values: RwLock<Vec<Rational>>,
}

impl HarmonicCache {
    pub fn new() -> Self {
        Self { values: RwLock::new(vec![Rational::zero()]) }
    }

    pub fn get(&self, n: usize) -> Rational {
        if let Some(v) = self.values.read().unwrap().get(n) {
            return v.clone();
        }
        let mut values = self.values.write().unwrap();
        if values.is_empty() {
            values.push(Rational::zero());
        }
        while values.len() <= n {
            let r = values.len() as i64;
            let next = values.last().unwrap() + rat(1, r);
            values.push(next);
        }
        values[n].clone()
    }
}

static HARMONIC: std::sync::LazyLock<HarmonicCache> = std::sync::LazyLock::new(HarmonicCache::new);

pub fn harmonic(n: usize) -> Rational {
    HARMONIC.get(n)
}

/// Bernoulli numbers B_n (B_1 = −1/2) from Σ_{j<m+1} C(m+1, j) B_j = 0.
#[derive(Debug, Default)]
pub struct BernoulliCache {
    values: RwLock<Vec<Rational>>,
}

impl BernoulliCache {
    pub fn new() -> Self {
        Self { values: RwLock::new(Vec::new()) }
    }

    pub fn get(&self, n: usize) -> Rational {
        if let Some(v) = self.values.read().unwrap().get(n) {
            return v.clone();
        }
        let mut values = self.values.write().unwrap();
        while values.len() <= n {
            let m = values.len();
            if m == 0 {
                values.push(Rational::one());
                continue;
            }
            let mut acc = Rational::zero();
            for (j, b) in values.iter().enumerate() {
                acc += int(binomial(m as i64 + 1, j as i64)) * b;
            }
            values.push(-acc / int(m as i64 + 1));
        }
        values[n].clone()
    }
}

static BERNOULLI: std::sync::LazyLock<BernoulliCache> = std::sync::LazyLock::new(BernoulliCache::new);

pub fn bernoulli(n: usize) -> Rational {
    BERNOULLI.get(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(5, 7), BigInt::zero());
        assert_eq!(binomial(4, -1), BigInt::zero());
        assert_eq!(harmonic(0), Rational::zero());
        assert_eq!(harmonic(3), rat(11, 6));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), Rational::zero());
        assert_eq!(bernoulli(12), rat(-691, 2730));
    }

    #[test]
    fn harmonic_step() {
        for n in 1..40 {
            assert_eq!(harmonic(n) - harmonic(n - 1), rat(1, n as i64));
        }
    }
}
