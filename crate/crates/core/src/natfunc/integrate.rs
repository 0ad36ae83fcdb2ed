//! Exact integration against `x⁻² dx`.
//!
//! For a single dilated floor function,
//!
//! ```text
//! ∫_A^B ⌊x/a⌋ x⁻² dx = Σ_{k : ka < B} (1/max(A, ka) - 1/B)
//!                    = K0 (1/A - 1/B) + (H(K1) - H(K0)) / a - (K1 - K0) / B
//! ```
//!
//! with `K0 = ⌊A/a⌋`, `K1 = ⌈B/a⌉ - 1` and `H` the harmonic numbers. Integrals
//! of natural functions are linear combinations of these, so the expensive
//! part is a handful of harmonic differences. They are computed once per call
//! (shared across a batch of functions) and expressed over the common
//! denominator `L = lcm(1..=K_max)`, which turns the final combination into
//! integer arithmetic followed by a single reduction.
//!
//! Norms `∫ |φ - r|^p x⁻² dx` are not linear in the coefficients; they are
//! summed over the breakpoints of `φ` instead.

use std::collections::{BTreeMap, BTreeSet};

use rug::{Float, Integer, Rational};

use super::NaturalFunction;
use crate::error::{Error, Result};
use crate::numtheory::primes_up_to;
use crate::real::{LogCombination, Precision};

/// Default truncation point for infinite windows.
pub const DEFAULT_CUTOFF: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormExponent {
    One,
    Two,
}

impl NormExponent {
    fn apply(self, v: &Rational) -> Rational {
        match self {
            NormExponent::One => Rational::from(v.abs_ref()),
            NormExponent::Two => Rational::from(v.square_ref()),
        }
    }
}

impl TryFrom<u32> for NormExponent {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        match p {
            1 => Ok(NormExponent::One),
            2 => Ok(NormExponent::Two),
            _ => Err(Error::domain("norm exponent", "1 or 2", p)),
        }
    }
}

/// `∫_1^∞ φ(x) x⁻² dx` as a symbolic closed form next to an exact truncation
/// over `[1, cutoff]` and a rigorous bound on the omitted tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfiniteIntegral {
    closed_form: LogCombination,
    truncated: Rational,
    tail_bound: Rational,
    cutoff: u64,
}

impl InfiniteIntegral {
    pub fn closed_form(&self) -> &LogCombination {
        &self.closed_form
    }

    pub fn truncated(&self) -> &Rational {
        &self.truncated
    }

    pub fn tail_bound(&self) -> &Rational {
        &self.tail_bound
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// `|closed_form - truncated|` at the given precision.
    pub fn discrepancy(&self, precision: Precision) -> Float {
        let diff = self.closed_form.value(precision) - precision.float(&self.truncated);
        diff.abs()
    }

    /// Whether `|closed_form - truncated| <= tail_bound`, allowing one unit of
    /// the rendering resolution for the rounding of the logarithms.
    pub fn within_tail_bound(&self, precision: Precision) -> bool {
        let allowance = Rational::from(&self.tail_bound + &precision.resolution());
        self.discrepancy(precision) <= precision.float(&allowance)
    }
}

impl NaturalFunction {
    /// Exact `∫_lower^upper φ(x) x⁻² dx` for `0 <= lower <= upper`.
    ///
    /// `φ` vanishes on `[0, 1)`, so a window starting at 0 is fine.
    pub fn integrate_weighted(&self, lower: &Rational, upper: &Rational) -> Result<Rational> {
        let mut out = integrate_weighted_many(std::slice::from_ref(self), lower, upper)?;
        Ok(out.pop().expect("one function in, one integral out"))
    }

    /// Closed form, truncation at `cutoff` and tail bound `Σ|α_a| / cutoff`.
    pub fn integral_to_infinity(&self, cutoff: u64) -> Result<InfiniteIntegral> {
        let mut out = integral_to_infinity_many(std::slice::from_ref(self), cutoff)?;
        Ok(out.pop().expect("one function in, one integral out"))
    }

    /// Exact `∫_lower^upper |φ(x) - reference|^p x⁻² dx` for `1 <= lower <= upper`.
    pub fn norm_weighted(
        &self,
        reference: &Rational,
        exponent: NormExponent,
        lower: &Rational,
        upper: &Rational,
    ) -> Result<Rational> {
        if *lower < 1 {
            return Err(Error::domain("norm window start", "at least 1", lower));
        }
        check_window(lower, upper)?;
        if lower == upper {
            return Ok(Rational::new());
        }
        let lo = to_u64(Rational::from(lower.floor_ref()), "window start")?;
        let hi = to_u64(Rational::from(upper.ceil_ref()), "window end")?;

        let weight = |v: &Rational| exponent.apply(&Rational::from(v - reference));
        let mut value = self.evaluate(lower)?;
        let mut w = weight(&value);
        let mut total = Rational::from(&w / lower);
        let mut steps = Vec::new();
        for (b, jump) in self.jumps_between(lo, hi) {
            value += jump;
            let next = weight(&value);
            let dw = Rational::from(&next - &w);
            if dw != 0 {
                steps.push((dw, b));
            }
            w = next;
        }
        total -= Rational::from(&w / upper);
        total += sum_fractions(&steps);
        Ok(total)
    }
}

fn check_window(lower: &Rational, upper: &Rational) -> Result<()> {
    if lower > upper {
        return Err(Error::EmptyWindow {
            lower: lower.to_string(),
            upper: upper.to_string(),
        });
    }
    Ok(())
}

fn to_u64(q: Rational, what: &'static str) -> Result<u64> {
    let (num, _) = q.into_numer_denom();
    num.to_u64().ok_or(Error::Overflow(what))
}

/// `∫_lower^upper φ x⁻² dx` for every function, sharing the harmonic sums.
pub fn integrate_weighted_many(
    fns: &[NaturalFunction],
    lower: &Rational,
    upper: &Rational,
) -> Result<Vec<Rational>> {
    if *lower < 0 {
        return Err(Error::domain("integration window start", "nonnegative", lower));
    }
    check_window(lower, upper)?;
    if lower == upper {
        return Ok(vec![Rational::new(); fns.len()]);
    }

    // (K0, K1) per term of every function.
    let mut ranges: Vec<Vec<(u64, u64)>> = Vec::with_capacity(fns.len());
    let mut points = BTreeSet::from([0u64]);
    for f in fns {
        let mut per_fn = Vec::with_capacity(f.terms().len());
        for (a, _) in f.terms() {
            let k0 = to_u64(Rational::from(lower / *a).floor(), "harmonic index")?;
            let k1 = to_u64(Rational::from(upper / *a).ceil() - 1u32, "harmonic index")?;
            points.insert(k0);
            points.insert(k1);
            per_fn.push((k0, k1));
        }
        ranges.push(per_fn);
    }
    let harmonic = HarmonicSums::new(&points);

    let inv_upper = Rational::from(upper.recip_ref());
    let inv_lower = if *lower > 0 {
        Rational::from(lower.recip_ref())
    } else {
        Rational::new()
    };
    let boundary = Rational::from(&inv_lower - &inv_upper);

    let mut out = Vec::with_capacity(fns.len());
    for (f, per_fn) in fns.iter().zip(&ranges) {
        // Boundary terms are small rationals.
        let mut small = Rational::new();
        for ((_, c), &(k0, k1)) in f.terms().iter().zip(per_fn) {
            let mut piece = Rational::from(&boundary * k0);
            piece -= Rational::from(&inv_upper * (k1 - k0));
            small += Rational::from(c * &piece);
        }

        // Harmonic terms Σ (α_a/a)(H(K1) - H(K0)) over the common denominator.
        let weights: Vec<Rational> = f.terms().iter().map(|(a, c)| Rational::from(c / *a)).collect();
        let mut common = Integer::from(1);
        for w in &weights {
            common.lcm_mut(w.denom());
        }
        let mut numer = Integer::new();
        for (w, &(k0, k1)) in weights.iter().zip(per_fn) {
            if k1 > k0 {
                let factor = Integer::from(&common / w.denom()) * w.numer();
                numer += factor * harmonic.scaled_difference(k0, k1);
            }
        }
        let big = Rational::from((numer, common * harmonic.scale()));
        out.push(small + big);
    }
    Ok(out)
}

/// [`NaturalFunction::integral_to_infinity`] over a batch of functions.
pub fn integral_to_infinity_many(
    fns: &[NaturalFunction],
    cutoff: u64,
) -> Result<Vec<InfiniteIntegral>> {
    if cutoff == 0 {
        return Err(Error::domain("cutoff", "a positive integer", 0));
    }
    if fns.iter().any(|f| !f.is_zero_sum()) {
        return Err(Error::NotZeroSum);
    }
    let truncated = integrate_weighted_many(fns, &Rational::from(1), &Rational::from(cutoff))?;
    fns.iter()
        .zip(truncated)
        .map(|(f, truncated)| {
            Ok(InfiniteIntegral {
                closed_form: f.closed_form_integral()?,
                truncated,
                tail_bound: f.sup_bound() / cutoff,
                cutoff,
            })
        })
        .collect()
}

/// `L · H(K)` at a fixed set of indices `K`, with `L = lcm(1..=max K)`.
struct HarmonicSums {
    scale: Integer,
    prefix: BTreeMap<u64, Integer>,
}

impl HarmonicSums {
    fn new(points: &BTreeSet<u64>) -> Self {
        let kmax = points.last().copied().unwrap_or(0);
        let scale = lcm_up_to(kmax);
        let mut prefix = BTreeMap::new();
        let mut acc = Integer::new();
        let mut prev = 0u64;
        prefix.insert(0, Integer::new());
        for &k in points.iter().filter(|&&k| k > 0) {
            let (p, q) = reciprocal_sum(prev + 1, k);
            acc += (p * &scale).div_exact(&q);
            prefix.insert(k, acc.clone());
            prev = k;
        }
        HarmonicSums { scale, prefix }
    }

    fn scale(&self) -> &Integer {
        &self.scale
    }

    /// `L · (H(k1) - H(k0))`.
    fn scaled_difference(&self, k0: u64, k1: u64) -> Integer {
        Integer::from(&self.prefix[&k1] - &self.prefix[&k0])
    }
}

/// `Σ_{k=lo}^{hi} 1/k` as an unreduced fraction `(P, Q)`, `Q = Π k`.
fn reciprocal_sum(lo: u64, hi: u64) -> (Integer, Integer) {
    if hi - lo < 16 {
        let mut q = Integer::from(1);
        let mut p = Integer::new();
        for k in lo..=hi {
            // p/q + 1/k = (p k + q) / (q k)
            p *= k;
            p += &q;
            q *= k;
        }
        return (p, q);
    }
    let mid = lo + (hi - lo) / 2;
    let (p1, q1) = reciprocal_sum(lo, mid);
    let (p2, q2) = reciprocal_sum(mid + 1, hi);
    let p = p1 * &q2 + p2 * &q1;
    (p, q1 * q2)
}

/// `lcm(1, ..., k)` as the product of maximal prime powers `p^e <= k`.
pub(crate) fn lcm_up_to(k: u64) -> Integer {
    let powers: Vec<Integer> = primes_up_to(k)
        .into_iter()
        .map(|p| {
            let mut pe = p;
            while let Some(next) = pe.checked_mul(p).filter(|&n| n <= k) {
                pe = next;
            }
            Integer::from(pe)
        })
        .collect();
    product_tree(&powers)
}

fn product_tree(xs: &[Integer]) -> Integer {
    match xs.len() {
        0 => Integer::from(1),
        1 => xs[0].clone(),
        n => {
            let (l, r) = xs.split_at(n / 2);
            product_tree(l) * product_tree(r)
        }
    }
}

/// `Σ c_i / b_i` by pairwise splitting, so additions meet operands of similar size.
fn sum_fractions(terms: &[(Rational, u64)]) -> Rational {
    if terms.len() <= 8 {
        let mut s = Rational::new();
        for (c, b) in terms {
            s += Rational::from(c / *b);
        }
        return s;
    }
    let (l, r) = terms.split_at(terms.len() / 2);
    sum_fractions(l) + sum_fractions(r)
}
