//! Exact rational arithmetic, truncated series and rational functions.

mod combinat;
mod multi;
mod poly;
mod rational;
mod uni;

pub use combinat::{bernoulli, binomial, factorial, harmonic, BernoulliCache, HarmonicCache};
pub use multi::MultiSeries;
pub use poly::{Poly, RationalFunction};
pub use rational::{format_fraction, int, parse_fraction, rat, Rational};
pub use uni::UniSeries;
