//! Seed families and Vasyunin corrections.
//!
//! A correction is `φ_n = Σ_{k<=n} c_k s_k` where `s_k` is the k-th seed of a
//! family and the coefficients follow `c_n = 1 - Σ_{k<n} c_k s_k(n)`. Each
//! seed vanishes on `[0, k)` and equals 1 on `[k, k+1)`, which is what makes
//! `φ_n ≡ 1` on `[1, n+1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::natfunc::NaturalFunction;
use crate::numtheory::mobius;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedFamily {
    /// `⌊x/n⌋ - 2⌊x/2n⌋`
    First,
    /// `⌊x/n⌋ - ⌊x/(n+1)⌋ - ⌊x/n(n+1)⌋`
    Second,
    /// `⌊x/n⌋ - ⌊x/(n+1)⌋ - ⌊x/2n⌋ + ⌊x/2(n+1)⌋ - ⌊x/2n(n+1)⌋`
    Third,
}

impl SeedFamily {
    pub const ALL: [SeedFamily; 3] = [SeedFamily::First, SeedFamily::Second, SeedFamily::Third];

    pub fn name(self) -> &'static str {
        match self {
            SeedFamily::First => "first",
            SeedFamily::Second => "second",
            SeedFamily::Third => "third",
        }
    }

    /// The n-th seed, merged into canonical form.
    pub fn seed(self, n: u64) -> Result<NaturalFunction> {
        if n == 0 {
            return Err(Error::domain("seed index", "a positive integer", 0));
        }
        let next = n.checked_add(1).ok_or(Error::Overflow("seed denominator"))?;
        let prod = n.checked_mul(next).ok_or(Error::Overflow("seed denominator"))?;
        let double = |x: u64| x.checked_mul(2).ok_or(Error::Overflow("seed denominator"));
        let terms: Vec<(u64, i64)> = match self {
            SeedFamily::First => vec![(n, 1), (double(n)?, -2)],
            SeedFamily::Second => vec![(n, 1), (next, -1), (prod, -1)],
            SeedFamily::Third => vec![
                (n, 1),
                (next, -1),
                (double(n)?, -1),
                (double(next)?, 1),
                (double(prod)?, -1),
            ],
        };
        let seed = NaturalFunction::from_terms(terms)?;
        debug_assert!(seed.is_zero_sum());
        Ok(seed)
    }
}

impl fmt::Display for SeedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeedFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "first" | "1" => Ok(SeedFamily::First),
            "second" | "2" => Ok(SeedFamily::Second),
            "third" | "3" => Ok(SeedFamily::Third),
            _ => Err(Error::Parse(format!("unknown seed family {s:?}"))),
        }
    }
}

/// `φ_n = Σ_{k=1}^n c_k s_k` with its coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correction {
    family: SeedFamily,
    coeffs: Vec<Rational>,
    phi: NaturalFunction,
}

impl Correction {
    pub fn family(&self) -> SeedFamily {
        self.family
    }

    pub fn n(&self) -> u64 {
        self.coeffs.len() as u64
    }

    /// `c_1, ..., c_n`.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `c_k`, 1-based.
    pub fn coeff(&self, k: u64) -> Option<&Rational> {
        k.checked_sub(1).and_then(|i| self.coeffs.get(i as usize))
    }

    pub fn phi(&self) -> &NaturalFunction {
        &self.phi
    }
}

/// Builds `φ_1, φ_2, ...` one step at a time.
#[derive(Debug, Clone)]
pub struct CorrectionSequence {
    family: SeedFamily,
    seeds: Vec<NaturalFunction>,
    coeffs: Vec<Rational>,
    phi: BTreeMap<u64, Rational>,
}

impl CorrectionSequence {
    pub fn new(family: SeedFamily) -> Self {
        CorrectionSequence {
            family,
            seeds: Vec::new(),
            coeffs: Vec::new(),
            phi: BTreeMap::new(),
        }
    }

    pub fn family(&self) -> SeedFamily {
        self.family
    }

    /// Index of the last correction built, 0 before the first step.
    pub fn n(&self) -> u64 {
        self.coeffs.len() as u64
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// The k-th seed, for `k <= n`.
    pub fn seed(&self, k: u64) -> Option<&NaturalFunction> {
        k.checked_sub(1).and_then(|i| self.seeds.get(i as usize))
    }

    /// Computes `c_{n+1}` by the recurrence and folds `c_{n+1} s_{n+1}` into φ.
    pub fn advance(&mut self) -> Result<&Rational> {
        let n = self.n() + 1;
        let seed = self.family.seed(n)?;
        let at_n = seed.value_at(n);
        if at_n != 1 {
            return Err(Error::IllPosedSeed {
                family: self.family.name(),
                n,
                value: at_n.to_string(),
            });
        }

        let mut sum = Rational::new();
        for (c, s) in self.coeffs.iter().zip(&self.seeds) {
            if *c == 0 {
                continue;
            }
            let v = s.value_at(n);
            if v != 0 {
                sum += Rational::from(c * &v);
            }
        }
        let c_n = Rational::from(1) - sum;
        if self.family == SeedFamily::First {
            assert!(c_n.denom() == &1, "first-family coefficient c_{n} = {c_n} is not integral");
        }

        if c_n != 0 {
            for (a, alpha) in seed.terms() {
                let slot = self.phi.entry(*a).or_default();
                *slot += Rational::from(alpha * &c_n);
                if *slot == 0 {
                    self.phi.remove(a);
                }
            }
        }
        self.seeds.push(seed);
        self.coeffs.push(c_n);
        Ok(self.coeffs.last().expect("just pushed"))
    }

    pub fn advance_to(&mut self, n: u64) -> Result<()> {
        while self.n() < n {
            self.advance()?;
        }
        Ok(())
    }

    /// The current `φ_n`.
    pub fn phi(&self) -> NaturalFunction {
        NaturalFunction::from_terms(self.phi.iter().map(|(a, c)| (*a, c.clone())))
            .expect("denominators are positive")
    }

    pub fn snapshot(&self) -> Correction {
        Correction {
            family: self.family,
            coeffs: self.coeffs.clone(),
            phi: self.phi(),
        }
    }
}

/// The n-th correction of a family.
pub fn build_correction(family: SeedFamily, n: u64) -> Result<Correction> {
    if n == 0 {
        return Err(Error::domain("correction index", "a positive integer", 0));
    }
    let mut seq = CorrectionSequence::new(family);
    seq.advance_to(n)?;
    Ok(seq.snapshot())
}

/// Outcome of the plateau check `φ_n = 0` on `[0,1)` and `φ_n = 1` on `[1, n+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlateauWitness {
    Pass { n: u64 },
    Fail { index: u64, value: Rational },
}

impl PlateauWitness {
    pub fn passed(&self) -> bool {
        matches!(self, PlateauWitness::Pass { .. })
    }
}

pub fn verify_plateau(corr: &Correction) -> PlateauWitness {
    let n = corr.n();
    let profile = corr.phi().profile(n + 1);
    for (m, v) in profile.values().iter().enumerate() {
        let expected = i32::from(m > 0);
        if *v != expected {
            return PlateauWitness::Fail {
                index: m as u64,
                value: v.clone(),
            };
        }
    }
    PlateauWitness::Pass { n }
}

/// Canonical form of a first-family correction:
/// `Σ_{k<=n} μ(k) ⌊x/k⌋ - 2 Σ_{n/2<k<=n} c_k ⌊x/2k⌋`.
pub fn to_canonical(corr: &Correction) -> Result<NaturalFunction> {
    if corr.family() != SeedFamily::First {
        return Err(Error::UnsupportedFamily(corr.family().name()));
    }
    let n = corr.n();
    let mut terms: Vec<(u64, Rational)> = Vec::with_capacity(n as usize * 2);
    for k in 1..=n {
        terms.push((k, Rational::from(mobius(k)?)));
    }
    for k in (n / 2 + 1)..=n {
        let c = corr.coeff(k).expect("k <= n");
        terms.push((2 * k, Rational::from(c * -2)));
    }
    NaturalFunction::from_terms(terms)
}

/// Outcome of comparing the canonical coefficients at `k <= n` against `μ(k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoefficientWitness {
    Pass { checked: u64 },
    Mismatch {
        denominator: u64,
        expected: i32,
        found: Rational,
    },
}

impl CoefficientWitness {
    pub fn passed(&self) -> bool {
        matches!(self, CoefficientWitness::Pass { .. })
    }
}

pub fn leading_coefficients_check(corr: &Correction) -> CoefficientWitness {
    let n = corr.n();
    for k in 1..=n {
        let expected = mobius(k).expect("k >= 1");
        let found = corr.phi().coefficient(k);
        if found != expected {
            return CoefficientWitness::Mismatch {
                denominator: k,
                expected,
                found,
            };
        }
    }
    CoefficientWitness::Pass { checked: n }
}
