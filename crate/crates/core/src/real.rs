//! High-precision reals and decimal rendering.
//!
//! Closed forms of weighted integrals are rational combinations of
//! logarithms of primes. They are kept symbolic in [`LogCombination`] so that
//! identities such as "this difference is exactly `½ ln 2`" are checked
//! exactly, and only turned into MPFR floats for rendering and for comparison
//! against truncated integrals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numtheory::factorize;

/// Decimal precision used for closed forms and renderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Precision {
    digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            digits: Self::DEFAULT_DIGITS,
        }
    }
}

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 50;

    pub fn new(digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(Error::domain("precision", "at least one digit", digits));
        }
        Ok(Precision { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Working precision in bits, with guard bits on top of the decimal digits.
    pub fn bits(&self) -> u32 {
        (f64::from(self.digits) * std::f64::consts::LOG2_10).ceil() as u32 + 64
    }

    pub fn float(&self, q: &Rational) -> Float {
        Float::with_val(self.bits(), q)
    }

    /// `10^-digits`, the resolution of a rendering.
    pub fn resolution(&self) -> Rational {
        Rational::from((1, Integer::from(Integer::u_pow_u(10, self.digits))))
    }

    /// Fixed-point rendering with `digits` fractional digits, rounded half
    /// away from zero. Exact: no floating point is involved.
    pub fn render(&self, q: &Rational) -> String {
        let scale = Integer::from(Integer::u_pow_u(10, self.digits));
        let scaled = Rational::from(q * &scale).round();
        let (mut num, _) = scaled.into_numer_denom();
        let negative = num < 0;
        num.abs_mut();
        let mut text = num.to_string();
        let width = self.digits as usize + 1;
        if text.len() < width {
            text = format!("{}{}", "0".repeat(width - text.len()), text);
        }
        let split = text.len() - self.digits as usize;
        let mut out = String::with_capacity(text.len() + 2);
        if negative {
            out.push('-');
        }
        out.push_str(&text[..split]);
        if self.digits > 0 {
            out.push('.');
            out.push_str(&text[split..]);
        }
        out
    }

    /// Renders a float by exact conversion to a rational first.
    pub fn render_float(&self, x: &Float) -> String {
        match x.to_rational() {
            Some(q) => self.render(&q),
            None => x.to_string(),
        }
    }
}

/// `constant + Σ_p coeff_p ln p` over primes `p`, with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogCombination {
    constant: Rational,
    logs: BTreeMap<u64, Rational>,
}

impl LogCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: Rational) -> Self {
        LogCombination {
            constant: value,
            logs: BTreeMap::new(),
        }
    }

    /// `ln n`, expanded over the prime factorization of `n`.
    pub fn ln(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("logarithm argument", "a positive integer", 0));
        }
        let logs = factorize(n)
            .into_iter()
            .map(|(p, e)| (p, Rational::from(e)))
            .collect();
        Ok(LogCombination {
            constant: Rational::new(),
            logs,
        })
    }

    pub fn rational_part(&self) -> &Rational {
        &self.constant
    }

    /// Coefficient of `ln p`; zero if absent.
    pub fn log_coefficient(&self, p: u64) -> Rational {
        self.logs.get(&p).cloned().unwrap_or_default()
    }

    pub fn log_terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.logs.iter().map(|(&p, c)| (p, c))
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        if *factor == 0 {
            return Self::zero();
        }
        LogCombination {
            constant: Rational::from(&self.constant * factor),
            logs: self
                .logs
                .iter()
                .map(|(&p, c)| (p, Rational::from(c * factor)))
                .collect(),
        }
    }

    fn add_assign_ref(&mut self, other: &LogCombination) {
        self.constant += &other.constant;
        for (&p, c) in &other.logs {
            let slot = self.logs.entry(p).or_default();
            *slot += c;
            if *slot == 0 {
                self.logs.remove(&p);
            }
        }
    }

    pub fn value(&self, precision: Precision) -> Float {
        let bits = precision.bits();
        let mut acc = Float::with_val(bits, &self.constant);
        for (&p, c) in &self.logs {
            let ln_p = Float::with_val(bits, p).ln();
            acc += Float::with_val(bits, &ln_p * c);
        }
        acc
    }

    pub fn render(&self, precision: Precision) -> String {
        precision.render_float(&self.value(precision))
    }
}

impl Add for LogCombination {
    type Output = LogCombination;

    fn add(mut self, rhs: LogCombination) -> LogCombination {
        self.add_assign_ref(&rhs);
        self
    }
}

impl Neg for LogCombination {
    type Output = LogCombination;

    fn neg(self) -> LogCombination {
        self.scaled(&Rational::from(-1))
    }
}

impl Sub for LogCombination {
    type Output = LogCombination;

    fn sub(self, rhs: LogCombination) -> LogCombination {
        self + (-rhs)
    }
}

impl fmt::Display for LogCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, c) in &self.logs {
            let sign = if *c < 0 { "-" } else { "+" };
            let magnitude = Rational::from(c.abs_ref());
            match (first, magnitude == 1) {
                (true, true) if *c < 0 => write!(f, "-ln({p})")?,
                (true, true) => write!(f, "ln({p})")?,
                (true, false) => write!(f, "{c}*ln({p})")?,
                (false, true) => write!(f, " {sign} ln({p})")?,
                (false, false) => write!(f, " {sign} {magnitude}*ln({p})")?,
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant < 0 {
            write!(f, " - {}", Rational::from(-&self.constant))
        } else if self.constant > 0 {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}
