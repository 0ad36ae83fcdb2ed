//! Arithmetic functions on the positive integers.
//!
//! Sequences are dense and 1-based: an [`ArithSeq`] of length `N` carries
//! `a(1), ..., a(N)`. Convolution and inversion work on full prefixes, which
//! is how the correction coefficients are consumed.

use rug::Rational;

use crate::error::{Error, Result};

fn require_positive(what: &'static str, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(what, "a positive integer", n));
    }
    Ok(())
}

/// Möbius function by trial division.
pub fn mobius(n: u64) -> Result<i32> {
    require_positive("mobius argument", n)?;
    let mut rest = n;
    let mut sign = 1;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            rest /= p;
            if rest % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Indicator of the powers of two, `2^0 = 1` included.
pub fn psi_pow2(n: u64) -> Result<i32> {
    require_positive("psi argument", n)?;
    Ok(i32::from(n.is_power_of_two()))
}

/// Splits `k = 2^r * m` with `m` odd.
pub fn split_pow2(k: u64) -> Result<(u32, u64)> {
    require_positive("split argument", k)?;
    let r = k.trailing_zeros();
    Ok((r, k >> r))
}

/// Closed form of the first-family correction coefficients:
/// `c(2^r m) = 2^max(r-1, 0) μ(m)` for odd `m`.
pub fn coeff_closed(k: u64) -> Result<i64> {
    let (r, m) = split_pow2(k)?;
    let scale = 1i64 << r.saturating_sub(1);
    Ok(scale * i64::from(mobius(m)?))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least common multiple; `None` on overflow.
pub fn checked_lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    out
}

/// Primes up to and including `limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i.saturating_mul(i);
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// A dense arithmetic sequence `a(1), ..., a(N)` of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithSeq {
    values: Vec<Rational>,
}

impl ArithSeq {
    /// Wraps `values`, where `values[0]` is `a(1)`.
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("sequence length", "at least 1", 0));
        }
        Ok(ArithSeq { values })
    }

    pub fn from_fn<F, T>(len: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(u64) -> T,
        Rational: From<T>,
    {
        Self::new((1..=len as u64).map(|m| Rational::from(f(m))).collect())
    }

    /// `δ(1) = 1`, `δ(m) = 0` otherwise; the convolution identity.
    pub fn delta(len: usize) -> Result<Self> {
        Self::from_fn(len, |m| i32::from(m == 1))
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::from_fn(len, |_| 1)
    }

    pub fn mobius(len: usize) -> Result<Self> {
        Self::from_fn(len, |m| mobius(m).expect("m >= 1"))
    }

    pub fn psi(len: usize) -> Result<Self> {
        Self::from_fn(len, |m| psi_pow2(m).expect("m >= 1"))
    }

    /// `m` at powers of two, 0 elsewhere: the coefficients of
    /// `Σ_h 2^h / (2^h)^s = 1 / (1 - 2^(1-s))`. Convolved with μ this gives
    /// the closed-form correction coefficients; the plain indicator
    /// [`ArithSeq::psi`] does not.
    pub fn psi_weighted(len: usize) -> Result<Self> {
        Self::from_fn(len, |m| if m.is_power_of_two() { m } else { 0 })
    }

    /// `(-1)^(m+1)`.
    pub fn alternating(len: usize) -> Result<Self> {
        Self::from_fn(len, |m| if m % 2 == 1 { 1 } else { -1 })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a(m)` for `1 <= m <= N`.
    pub fn get(&self, m: u64) -> Option<&Rational> {
        if m == 0 {
            return None;
        }
        self.values.get(m as usize - 1)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }
}

impl std::ops::Index<u64> for ArithSeq {
    type Output = Rational;

    fn index(&self, m: u64) -> &Rational {
        self.get(m)
            .unwrap_or_else(|| panic!("index {m} outside 1..={}", self.values.len()))
    }
}

/// `h(m) = Σ_{d | m} f(d) g(m/d)` for `m <= N`.
pub fn dirichlet_convolve(f: &ArithSeq, g: &ArithSeq) -> Result<ArithSeq> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let n = f.len();
    let mut h = vec![Rational::new(); n];
    for d in 1..=n {
        let fd = &f.values[d - 1];
        if *fd == 0 {
            continue;
        }
        for q in 1..=n / d {
            let gq = &g.values[q - 1];
            if *gq != 0 {
                h[d * q - 1] += Rational::from(fd * gq);
            }
        }
    }
    ArithSeq::new(h)
}

/// Dirichlet inverse on the prefix `1..=N`.
///
/// `g(1) = 1/f(1)` and `g(m) = -(1/f(1)) Σ_{d | m, d > 1} f(d) g(m/d)`. The
/// divisor sums are accumulated forward: once `g(q)` is final it is pushed to
/// every multiple `q d` with `d >= 2`.
pub fn dirichlet_inverse(f: &ArithSeq) -> Result<ArithSeq> {
    let n = f.len();
    let f1 = &f.values[0];
    if *f1 == 0 {
        return Err(Error::NotInvertible);
    }
    let inv_f1 = Rational::from(f1.recip_ref());
    let mut acc = vec![Rational::new(); n];
    let mut g = vec![Rational::new(); n];
    for q in 1..=n {
        let gq = if q == 1 {
            inv_f1.clone()
        } else {
            -Rational::from(&acc[q - 1] * &inv_f1)
        };
        if gq != 0 {
            for d in 2..=n / q {
                let fd = &f.values[d - 1];
                if *fd != 0 {
                    acc[q * d - 1] += Rational::from(fd * &gq);
                }
            }
        }
        g[q - 1] = gq;
    }
    ArithSeq::new(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Möbius from a factorization found by the most naive trial division.
    fn mobius_oracle(n: u64) -> i32 {
        let mut primes = Vec::new();
        let mut rest = n;
        for p in 2..=n {
            while rest % p == 0 {
                primes.push(p);
                rest /= p;
            }
        }
        let mut distinct = primes.clone();
        distinct.dedup();
        if distinct.len() != primes.len() {
            0
        } else if primes.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn convolve_oracle(f: &[Rational], g: &[Rational], m: usize) -> Rational {
        let mut s = Rational::new();
        for d in 1..=m {
            if m % d == 0 {
                s += Rational::from(&f[d - 1] * &g[m / d - 1]);
            }
        }
        s
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(mobius_oracle(12), 0);
        assert_eq!(mobius_oracle(30), -1);
        assert!(mobius(0).is_err());
    }

    #[test]
    fn mobius_matches_oracle() {
        for n in 1..=2000 {
            assert_eq!(mobius(n).unwrap(), mobius_oracle(n), "n = {n}");
        }
    }

    #[test]
    fn mobius_is_multiplicative_on_coprime_pairs() {
        for a in 1..=1000u64 {
            for b in (1..=1000u64).step_by(7) {
                if gcd(a, b) == 1 {
                    assert_eq!(
                        mobius(a * b).unwrap(),
                        mobius(a).unwrap() * mobius(b).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_pow2(1).unwrap(), 1);
        assert_eq!(psi_pow2(8).unwrap(), 1);
        assert_eq!(psi_pow2(12).unwrap(), 0);
        assert!(psi_pow2(0).is_err());
    }

    #[test]
    fn coeff_closed_examples() {
        assert_eq!(coeff_closed(1).unwrap(), 1);
        assert_eq!(coeff_closed(8).unwrap(), 4);
        assert_eq!(coeff_closed(9).unwrap(), 0);
        assert!(coeff_closed(0).is_err());
    }

    #[test]
    fn coeff_closed_doubling() {
        for k in (2..=2000u64).step_by(2) {
            assert_eq!(coeff_closed(2 * k).unwrap(), 2 * coeff_closed(k).unwrap());
        }
        for m in (3..=1000u64).step_by(2) {
            if mobius(m).unwrap() != 0 {
                assert_eq!(coeff_closed(2 * m).unwrap(), -i64::from(mobius(2 * m).unwrap()));
            }
        }
    }

    #[test]
    fn convolve_mobius_with_ones_is_delta() {
        let mu = ArithSeq::mobius(12).unwrap();
        let one = ArithSeq::ones(12).unwrap();
        let h = dirichlet_convolve(&mu, &one).unwrap();
        for m in 1..=12 {
            assert_eq!(h[m], convolve_oracle(mu.values(), one.values(), m as usize));
        }
        assert_eq!(h, ArithSeq::delta(12).unwrap());
    }

    #[test]
    fn convolve_with_delta_is_identity() {
        let g = ArithSeq::new(ints(&[3, -1, 4, 1, -5, 9, 2, -6])).unwrap();
        let d = ArithSeq::delta(8).unwrap();
        assert_eq!(dirichlet_convolve(&d, &g).unwrap(), g);
    }

    #[test]
    fn convolve_psi_mobius_at_twelve() {
        let psi = ArithSeq::psi_weighted(12).unwrap();
        let mu = ArithSeq::mobius(12).unwrap();
        // 1·μ(12) + 2·μ(6) + 4·μ(3)
        assert_eq!(convolve_oracle(psi.values(), mu.values(), 12), -2);
        assert_eq!(dirichlet_convolve(&psi, &mu).unwrap()[12], -2);
        // the unweighted indicator gives μ(12) + μ(6) + μ(3) = 0
        let indicator = ArithSeq::psi(12).unwrap();
        assert_eq!(dirichlet_convolve(&indicator, &mu).unwrap()[12], 0);
    }

    #[test]
    fn weighted_psi_convolved_with_mobius_is_closed_form() {
        let n = 3000;
        let h = dirichlet_convolve(&ArithSeq::psi_weighted(n).unwrap(), &ArithSeq::mobius(n).unwrap())
            .unwrap();
        for k in 1..=n as u64 {
            assert_eq!(h[k], coeff_closed(k).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn convolve_rejects_length_mismatch() {
        let a = ArithSeq::ones(3).unwrap();
        let b = ArithSeq::ones(4).unwrap();
        assert_eq!(
            dirichlet_convolve(&a, &b),
            Err(Error::LengthMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn inverse_examples() {
        let d = ArithSeq::delta(10).unwrap();
        assert_eq!(dirichlet_inverse(&d).unwrap(), d);

        let alt = ArithSeq::alternating(12).unwrap();
        let inv = dirichlet_inverse(&alt).unwrap();
        let expected = ints(&[1, 1, -1, 2, -1, -1, -1, 4, 0, -1, -1, -2]);
        assert_eq!(inv.values(), expected.as_slice());
        for m in 1..=12 {
            let want = Rational::from(i32::from(m == 1));
            assert_eq!(convolve_oracle(alt.values(), &expected, m), want);
        }

        let one = ArithSeq::ones(50).unwrap();
        assert_eq!(dirichlet_inverse(&one).unwrap(), ArithSeq::mobius(50).unwrap());
    }

    #[test]
    fn inverse_requires_nonzero_head() {
        let f = ArithSeq::new(ints(&[0, 1, 1])).unwrap();
        assert_eq!(dirichlet_inverse(&f), Err(Error::NotInvertible));
    }

    #[test]
    fn inverse_of_rational_head() {
        let f = ArithSeq::new(vec![Rational::from((2, 3)), Rational::from(1), Rational::from((-1, 5))])
            .unwrap();
        let g = dirichlet_inverse(&f).unwrap();
        assert_eq!(dirichlet_convolve(&f, &g).unwrap(), ArithSeq::delta(3).unwrap());
    }

    #[test]
    fn empty_sequence_rejected() {
        assert!(ArithSeq::new(Vec::new()).is_err());
    }

    fn rational_seq(len: usize) -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::vec((-20i64..=20, 1i64..=6), len)
            .prop_map(|v| v.into_iter().map(|(p, q)| Rational::from((p, q))).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn convolution_commutes_and_associates(
            (f, g, h) in (1usize..=64).prop_flat_map(|n| (rational_seq(n), rational_seq(n), rational_seq(n)))
        ) {
            let f = ArithSeq::new(f).unwrap();
            let g = ArithSeq::new(g).unwrap();
            let h = ArithSeq::new(h).unwrap();
            let fg = dirichlet_convolve(&f, &g).unwrap();
            prop_assert_eq!(&fg, &dirichlet_convolve(&g, &f).unwrap());
            let left = dirichlet_convolve(&fg, &h).unwrap();
            let right = dirichlet_convolve(&f, &dirichlet_convolve(&g, &h).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn inverse_convolves_to_delta(f in rational_seq(40)) {
            prop_assume!(f[0] != 0);
            let f = ArithSeq::new(f).unwrap();
            let g = dirichlet_inverse(&f).unwrap();
            prop_assert_eq!(dirichlet_convolve(&f, &g).unwrap(), ArithSeq::delta(40).unwrap());
        }
    }
}
