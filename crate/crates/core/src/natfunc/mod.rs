//! Finite combinations of dilated floor functions, `φ(x) = Σ α_a ⌊x/a⌋`.
//!
//! Every denominator is a positive integer, so `φ` is right-continuous and
//! constant on each `[m, m+1)`, vanishes on `[0, 1)`, and jumps only at
//! integers. When `Σ α_a / a = 0` the function is a *natural function*:
//! `φ(x) = -Σ α_a {x/a}` is then bounded by `Σ |α_a|` and periodic with
//! period `lcm(a)`.

mod integrate;

pub use integrate::{
    integral_to_infinity_many, integrate_weighted_many, InfiniteIntegral, NormExponent,
    DEFAULT_CUTOFF,
};

use std::collections::BTreeMap;

use rug::Rational;

use crate::error::{Error, Result};
use crate::numtheory::checked_lcm;
use crate::real::LogCombination;

/// Sparse, canonical `Σ α_a ⌊x/a⌋`: one nonzero coefficient per denominator,
/// sorted by denominator. Equality is equality of coefficient maps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NaturalFunction {
    terms: Vec<(u64, Rational)>,
    zero_sum: bool,
}

impl NaturalFunction {
    /// The zero function (empty map, trivially zero-sum).
    pub fn zero() -> Self {
        NaturalFunction {
            terms: Vec::new(),
            zero_sum: true,
        }
    }

    /// Merges duplicate denominators, drops zero coefficients and certifies
    /// the zero-sum condition exactly.
    pub fn from_terms<I, C>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, C)>,
        Rational: From<C>,
    {
        let mut merged: BTreeMap<u64, Rational> = BTreeMap::new();
        for (a, c) in terms {
            if a == 0 {
                return Err(Error::domain("denominator", "a positive integer", 0));
            }
            *merged.entry(a).or_default() += Rational::from(c);
        }
        Ok(Self::from_merged(
            merged.into_iter().filter(|(_, c)| *c != 0).collect(),
        ))
    }

    fn from_merged(terms: Vec<(u64, Rational)>) -> Self {
        let mut weight = Rational::new();
        for (a, c) in &terms {
            weight += Rational::from(c / *a);
        }
        NaturalFunction {
            terms,
            zero_sum: weight == 0,
        }
    }

    pub fn terms(&self) -> &[(u64, Rational)] {
        &self.terms
    }

    /// Coefficient of `⌊x/a⌋`, zero when absent.
    pub fn coefficient(&self, a: u64) -> Rational {
        self.terms
            .binary_search_by_key(&a, |(d, _)| *d)
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether `Σ α_a / a = 0` holds exactly.
    pub fn is_zero_sum(&self) -> bool {
        self.zero_sum
    }

    pub fn max_denominator(&self) -> Option<u64> {
        self.terms.last().map(|(a, _)| *a)
    }

    /// `Σ |α_a|`, a uniform bound on `|φ|` for zero-sum functions.
    pub fn sup_bound(&self) -> Rational {
        let mut s = Rational::new();
        for (_, c) in &self.terms {
            s += Rational::from(c.abs_ref());
        }
        s
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        if *factor == 0 {
            return Self::zero();
        }
        NaturalFunction {
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (*a, Rational::from(c * factor)))
                .collect(),
            zero_sum: self.zero_sum,
        }
    }

    /// `self + factor * other`, merged in one pass over both sorted maps.
    pub fn add_scaled(&self, other: &NaturalFunction, factor: &Rational) -> Self {
        if *factor == 0 || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let left = self.terms.get(i);
            let right = other.terms.get(j);
            match (left, right) {
                (Some((a, c)), Some((b, _))) if a < b => {
                    out.push((*a, c.clone()));
                    i += 1;
                }
                (Some((a, _)), Some((b, d))) if b < a => {
                    out.push((*b, Rational::from(d * factor)));
                    j += 1;
                }
                (Some((a, c)), Some((_, d))) => {
                    let sum = Rational::from(d * factor) + c;
                    if sum != 0 {
                        out.push((*a, sum));
                    }
                    i += 1;
                    j += 1;
                }
                (Some((a, c)), None) => {
                    out.push((*a, c.clone()));
                    i += 1;
                }
                (None, Some((b, d))) => {
                    out.push((*b, Rational::from(d * factor)));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Self::from_merged(out)
    }

    /// `φ(x)` for rational `x >= 0`, with exact floors.
    pub fn evaluate(&self, x: &Rational) -> Result<Rational> {
        if *x < 0 {
            return Err(Error::domain("evaluation point", "nonnegative", x));
        }
        let mut acc = Rational::new();
        for (a, c) in &self.terms {
            let (q, _) = Rational::from(x / *a).floor().into_numer_denom();
            if q != 0 {
                acc += Rational::from(c * &q);
            }
        }
        Ok(acc)
    }

    /// The constant value on `[m, m+1)`.
    pub fn value_at(&self, m: u64) -> Rational {
        let mut acc = Rational::new();
        for (a, c) in &self.terms {
            let q = m / a;
            if q != 0 {
                acc += Rational::from(c * q);
            }
        }
        acc
    }

    /// `φ(m) - φ(m-)`, i.e. `Σ_{a | m} α_a`.
    pub fn jump_at(&self, m: u64) -> Result<Rational> {
        if m == 0 {
            return Err(Error::domain("jump position", "a positive integer", 0));
        }
        let mut acc = Rational::new();
        for (a, c) in &self.terms {
            if m % a == 0 {
                acc += c;
            }
        }
        Ok(acc)
    }

    /// `lcm` of the denominators; the integer-interval values repeat with
    /// this period. Only defined for zero-sum functions.
    pub fn period(&self) -> Result<u64> {
        if !self.zero_sum {
            return Err(Error::NotZeroSum);
        }
        self.terms.iter().try_fold(1u64, |acc, (a, _)| {
            checked_lcm(acc, *a).ok_or(Error::Overflow("period"))
        })
    }

    /// Nonzero jumps at the integers strictly between `lo` and `hi`, sorted.
    pub fn jumps_between(&self, lo: u64, hi: u64) -> Vec<(u64, Rational)> {
        let mut hits: Vec<(u64, usize)> = Vec::new();
        for (idx, (a, _)) in self.terms.iter().enumerate() {
            let mut m = (lo / a + 1) * a;
            while m < hi {
                hits.push((m, idx));
                m += a;
            }
        }
        hits.sort_unstable();
        let mut out: Vec<(u64, Rational)> = Vec::new();
        for (m, idx) in hits {
            let c = &self.terms[idx].1;
            match out.last_mut() {
                Some((last, acc)) if *last == m => *acc += c,
                _ => out.push((m, c.clone())),
            }
        }
        out.retain(|(_, j)| *j != 0);
        out
    }

    /// Values on `[m, m+1)` for `0 <= m < horizon`.
    pub fn profile(&self, horizon: u64) -> StepProfile {
        let mut values = Vec::with_capacity(horizon as usize);
        let mut current = Rational::new();
        let mut jumps = self.jumps_between(0, horizon).into_iter().peekable();
        for m in 0..horizon {
            if let Some((_, j)) = jumps.next_if(|(b, _)| *b == m) {
                current += j;
            }
            values.push(current.clone());
        }
        StepProfile {
            values,
            horizon,
            period: self.period().ok(),
        }
    }

    /// Maximal runs `(start, value)` of constant value over `[0, horizon)`;
    /// each run extends to the next start (or `horizon`).
    pub fn runs(&self, horizon: u64) -> Vec<(u64, Rational)> {
        let mut out = vec![(0, Rational::new())];
        let mut current = Rational::new();
        for (m, j) in self.jumps_between(0, horizon) {
            current += j;
            out.push((m, current.clone()));
        }
        out
    }

    /// Symbolic `∫_1^∞ φ(x) x⁻² dx = -Σ α_a ln(a) / a` (zero-sum only).
    pub fn closed_form_integral(&self) -> Result<LogCombination> {
        if !self.zero_sum {
            return Err(Error::NotZeroSum);
        }
        let mut acc = LogCombination::zero();
        for (a, c) in &self.terms {
            if *a > 1 {
                let w = -Rational::from(c / *a);
                acc = acc + LogCombination::ln(*a)?.scaled(&w);
            }
        }
        Ok(acc)
    }
}

/// Values of a step function on the unit intervals `[m, m+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepProfile {
    values: Vec<Rational>,
    horizon: u64,
    period: Option<u64>,
}

impl StepProfile {
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Period of the underlying zero-sum function, when it fits in `u64`.
    pub fn period(&self) -> Option<u64> {
        self.period
    }

    pub fn get(&self, m: u64) -> Option<&Rational> {
        self.values.get(m as usize)
    }
}
