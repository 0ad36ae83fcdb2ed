//! Divergence measurements for correction sequences.
//!
//! Every infinite-window quantity is reported as an exact truncation over
//! `[1, X]` plus a rigorous bound on the omitted tail, so the true value lies
//! in `[truncated - tail, truncated + tail]`. For the first family,
//! `‖φ_n - φ_{n-1}‖₁ = |c_n| ∫ f_n x⁻² dx = |c_n| ln 2 / n`, and at powers of
//! two `c_n = n/2` pins that at `ln 2 / 2`, so the sequence is not Cauchy.

use rayon::prelude::*;
use rug::Rational;

use crate::corrections::{CorrectionSequence, SeedFamily};
use crate::error::{Error, Result};
use crate::natfunc::{NaturalFunction, NormExponent};
use crate::numtheory::coeff_closed;
use crate::real::{LogCombination, Precision};

/// Default truncation is `n · 2^12` for row `n`.
pub const DEFAULT_CUTOFF_SHIFT: u32 = 12;

/// Rows at powers of two must clear this lower bound for the first family to
/// be flagged non-Cauchy.
pub fn non_cauchy_threshold() -> Rational {
    Rational::from((3, 10))
}

/// A truncated integral with a rigorous tail bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormEstimate {
    truncated: Rational,
    cutoff: u64,
    tail_bound: Rational,
}

impl NormEstimate {
    pub fn new(truncated: Rational, cutoff: u64, tail_bound: Rational) -> Self {
        NormEstimate {
            truncated,
            cutoff,
            tail_bound,
        }
    }

    pub fn truncated(&self) -> &Rational {
        &self.truncated
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn tail_bound(&self) -> &Rational {
        &self.tail_bound
    }

    pub fn lower_bound(&self) -> Rational {
        Rational::from(&self.truncated - &self.tail_bound)
    }

    pub fn upper_bound(&self) -> Rational {
        Rational::from(&self.truncated + &self.tail_bound)
    }

    /// Whether `value` (a closed form) lies within the tail bound of the
    /// truncation, up to the rendering resolution.
    pub fn encloses(&self, value: &LogCombination, precision: Precision) -> bool {
        let diff = (value.value(precision) - precision.float(&self.truncated)).abs();
        let allowance = Rational::from(&self.tail_bound + &precision.resolution());
        diff <= precision.float(&allowance)
    }
}

/// `I_n = ∫_1^∞ (φ_n - 1) x⁻² dx`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralDiagnostic {
    closed_form: Option<LogCombination>,
    estimate: NormEstimate,
}

impl IntegralDiagnostic {
    /// Only available for the first family.
    pub fn closed_form(&self) -> Option<&LogCombination> {
        self.closed_form.as_ref()
    }

    pub fn estimate(&self) -> &NormEstimate {
        &self.estimate
    }
}

fn check_cutoff(n: u64, cutoff: u64) -> Result<()> {
    if cutoff < n {
        return Err(Error::domain(
            "truncation point",
            "at least the correction index",
            cutoff,
        ));
    }
    Ok(())
}

/// `‖c_n s_n‖₁` on `[1, cutoff]` with tail `|c_n| Σ|α| / cutoff`.
fn delta_estimate(c_n: &Rational, seed: &NaturalFunction, cutoff: u64) -> Result<NormEstimate> {
    let diff = seed.scaled(c_n);
    let truncated = diff.norm_weighted(
        &Rational::new(),
        NormExponent::One,
        &Rational::from(1),
        &Rational::from(cutoff),
    )?;
    let tail = Rational::from(c_n.abs_ref()) * seed.sup_bound() / cutoff;
    Ok(NormEstimate::new(truncated, cutoff, tail))
}

/// `‖φ_n - φ_{n-1}‖₁` in `L₁((1, ∞), x⁻² dx)`, truncated at `cutoff`.
pub fn delta_norm(family: SeedFamily, n: u64, cutoff: u64) -> Result<NormEstimate> {
    if n < 2 {
        return Err(Error::domain("delta index", "at least 2", n));
    }
    check_cutoff(n, cutoff)?;
    let mut seq = CorrectionSequence::new(family);
    seq.advance_to(n)?;
    let c_n = &seq.coeffs()[n as usize - 1];
    delta_estimate(c_n, seq.seed(n).expect("advanced to n"), cutoff)
}

/// `ln 2 · Σ_{k<=n} c_k / k - 1`, using `∫_1^∞ f_k x⁻² dx = ln 2 / k`.
pub fn first_family_integral_closed_form(coeffs: &[Rational]) -> LogCombination {
    let mut weight = Rational::new();
    for (i, c) in coeffs.iter().enumerate() {
        weight += Rational::from(c / (i as u64 + 1));
    }
    LogCombination::ln(2).expect("2 > 0").scaled(&weight)
        + LogCombination::constant(Rational::from(-1))
}

fn integral_estimate(
    family: SeedFamily,
    coeffs: &[Rational],
    phi: &NaturalFunction,
    cutoff: u64,
) -> Result<IntegralDiagnostic> {
    let x = Rational::from(cutoff);
    let mut truncated = phi.integrate_weighted(&Rational::from(1), &x)?;
    // ∫_1^X x⁻² dx = 1 - 1/X
    truncated -= Rational::from(1) - Rational::from((1, cutoff));
    let tail = (phi.sup_bound() + 1u32) / cutoff;
    let closed_form = match family {
        SeedFamily::First => Some(first_family_integral_closed_form(coeffs)),
        _ => None,
    };
    Ok(IntegralDiagnostic {
        closed_form,
        estimate: NormEstimate::new(truncated, cutoff, tail),
    })
}

/// `∫_1^∞ (φ_n - 1) x⁻² dx`, truncated at `cutoff`.
pub fn integral_diagnostic(family: SeedFamily, n: u64, cutoff: u64) -> Result<IntegralDiagnostic> {
    if n == 0 {
        return Err(Error::domain("correction index", "a positive integer", 0));
    }
    check_cutoff(n, cutoff)?;
    let mut seq = CorrectionSequence::new(family);
    seq.advance_to(n)?;
    integral_estimate(family, seq.coeffs(), &seq.phi(), cutoff)
}

/// How the truncation point is chosen per row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffPolicy {
    /// `X = n · 2^12`.
    Scaled,
    Fixed(u64),
}

impl CutoffPolicy {
    pub fn cutoff(self, n: u64) -> u64 {
        match self {
            CutoffPolicy::Scaled => n << DEFAULT_CUTOFF_SHIFT,
            CutoffPolicy::Fixed(x) => x,
        }
    }

    pub fn describe(self) -> String {
        match self {
            CutoffPolicy::Scaled => format!("n*2^{DEFAULT_CUTOFF_SHIFT}"),
            CutoffPolicy::Fixed(x) => format!("fixed {x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergenceRow {
    pub n: u64,
    pub c_n: Rational,
    pub delta_l1: NormEstimate,
    pub integral: IntegralDiagnostic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergenceReport {
    pub family: SeedFamily,
    /// Rows for `n = 2, ..., n_max`, in order.
    pub rows: Vec<DivergenceRow>,
    /// `I_1`; the delta is undefined at `n = 1`.
    pub initial_integral: IntegralDiagnostic,
    /// First family only: every power-of-two row has a delta lower bound of
    /// at least [`non_cauchy_threshold`]. `None` for the other families.
    pub non_cauchy: Option<bool>,
    pub policy: CutoffPolicy,
    pub precision: Precision,
    pub timestamp: Option<String>,
}

struct RowInput {
    n: u64,
    c_n: Rational,
    seed: NaturalFunction,
    coeffs: Vec<Rational>,
    phi: NaturalFunction,
}

pub fn divergence_report(
    family: SeedFamily,
    n_max: u64,
    policy: CutoffPolicy,
    precision: Precision,
) -> Result<DivergenceReport> {
    if n_max < 2 {
        return Err(Error::domain("n_max", "at least 2", n_max));
    }
    for n in 1..=n_max {
        check_cutoff(n, policy.cutoff(n))?;
    }

    let mut seq = CorrectionSequence::new(family);
    let mut inputs = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let c_n = seq.advance()?.clone();
        inputs.push(RowInput {
            n,
            c_n,
            seed: seq.seed(n).expect("just advanced").clone(),
            coeffs: seq.coeffs().to_vec(),
            phi: seq.phi(),
        });
    }

    let first = &inputs[0];
    let initial_integral = integral_estimate(family, &first.coeffs, &first.phi, policy.cutoff(1))?;

    // Rows are independent; `collect` keeps them ordered by n.
    let rows = inputs[1..]
        .par_iter()
        .map(|row| {
            let cutoff = policy.cutoff(row.n);
            Ok(DivergenceRow {
                n: row.n,
                c_n: row.c_n.clone(),
                delta_l1: delta_estimate(&row.c_n, &row.seed, cutoff)?,
                integral: integral_estimate(family, &row.coeffs, &row.phi, cutoff)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let non_cauchy = (family == SeedFamily::First).then(|| {
        let threshold = non_cauchy_threshold();
        rows.iter()
            .filter(|r| r.n.is_power_of_two())
            .all(|r| r.delta_l1.lower_bound() >= threshold)
    });

    Ok(DivergenceReport {
        family,
        rows,
        initial_integral,
        non_cauchy,
        policy,
        precision,
        timestamp: None,
    })
}

/// Outcome of the Dirichlet identity `Σ_{k | m} c_k (-1)^{m/k + 1} = δ(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AuditWitness {
    Pass { checked: u64 },
    Fail { m: u64, residual: i128 },
}

impl AuditWitness {
    pub fn passed(&self) -> bool {
        matches!(self, AuditWitness::Pass { .. })
    }
}

/// Checks the identity for all `m <= limit` with the closed-form coefficients.
pub fn identity_audit(limit: u64) -> Result<AuditWitness> {
    identity_audit_with(limit, |k| coeff_closed(k).expect("k >= 1"))
}

/// Same audit with caller-supplied coefficients, e.g. a mutated table.
pub fn identity_audit_with<F>(limit: u64, coeff: F) -> Result<AuditWitness>
where
    F: Fn(u64) -> i64,
{
    if limit == 0 {
        return Err(Error::domain("audit limit", "a positive integer", 0));
    }
    let n = limit as usize;
    let mut sums = vec![0i128; n + 1];
    for k in 1..=n {
        let c = i128::from(coeff(k as u64));
        if c == 0 {
            continue;
        }
        for (q, m) in (k..=n).step_by(k).enumerate() {
            // m / k = q + 1
            sums[m] += if q % 2 == 0 { c } else { -c };
        }
    }
    for (m, s) in sums.iter().enumerate().skip(1) {
        let residual = s - i128::from(m == 1);
        if residual != 0 {
            return Ok(AuditWitness::Fail {
                m: m as u64,
                residual,
            });
        }
    }
    Ok(AuditWitness::Pass { checked: limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln2_over(d: i64) -> LogCombination {
        LogCombination::ln(2).unwrap().scaled(&Rational::from((1, d)))
    }

    #[test]
    fn delta_norm_at_two() {
        let p = Precision::default();
        let est = delta_norm(SeedFamily::First, 2, 1 << 13).unwrap();
        assert_eq!(est.tail_bound(), &Rational::from((3, 1 << 13)));
        assert!(est.encloses(&ln2_over(2), p));
        assert!(est.lower_bound() > Rational::from((34, 100)));
    }

    #[test]
    fn delta_norm_odd_squarefree_and_zero_coefficient() {
        let p = Precision::default();
        for n in [3u64, 5, 15] {
            let est = delta_norm(SeedFamily::First, n, n << 12).unwrap();
            assert!(est.encloses(&ln2_over(n as i64), p), "n = {n}");
        }
        for x in [9u64, 100, 5000] {
            let est = delta_norm(SeedFamily::First, 9, x).unwrap();
            assert_eq!(est.truncated(), &0);
            assert_eq!(est.tail_bound(), &0);
        }
    }

    #[test]
    fn delta_norm_preconditions() {
        assert!(delta_norm(SeedFamily::First, 1, 100).is_err());
        assert!(delta_norm(SeedFamily::First, 8, 7).is_err());
    }

    #[test]
    fn delta_norm_grows_with_window_for_nonnegative_coefficients() {
        let mut prev = Rational::new();
        for x in [4u64, 5, 8, 13, 64, 100, 1000] {
            let est = delta_norm(SeedFamily::First, 4, x).unwrap();
            assert!(*est.truncated() >= prev);
            prev = est.truncated().clone();
        }
    }

    #[test]
    fn integral_diagnostic_examples() {
        let p = Precision::default();
        let i1 = integral_diagnostic(SeedFamily::First, 1, 1 << 12).unwrap();
        let expected = LogCombination::ln(2).unwrap() + LogCombination::constant(Rational::from(-1));
        assert_eq!(i1.closed_form().unwrap(), &expected);
        assert!(i1.estimate().encloses(&expected, p));

        let i2 = integral_diagnostic(SeedFamily::First, 2, 1 << 13).unwrap();
        let expected = LogCombination::ln(2).unwrap().scaled(&Rational::from((3, 2)))
            + LogCombination::constant(Rational::from(-1));
        assert_eq!(i2.closed_form().unwrap(), &expected);
        assert!(i2.estimate().encloses(&expected, p));
        assert!(expected.render(p).starts_with("0.0397"));

        let second = integral_diagnostic(SeedFamily::Second, 3, 1 << 12).unwrap();
        assert!(second.closed_form().is_none());
    }

    #[test]
    fn closed_form_matches_symbolic_integral_of_phi() {
        let mut seq = CorrectionSequence::new(SeedFamily::First);
        for _ in 0..40 {
            seq.advance().unwrap();
            let via_phi = seq.phi().closed_form_integral().unwrap()
                + LogCombination::constant(Rational::from(-1));
            assert_eq!(first_family_integral_closed_form(seq.coeffs()), via_phi);
        }
    }

    #[test]
    fn report_first_family() {
        let report =
            divergence_report(SeedFamily::First, 16, CutoffPolicy::Scaled, Precision::default())
                .unwrap();
        assert_eq!(report.rows.len(), 15);
        assert_eq!(report.rows[0].n, 2);
        assert_eq!(report.non_cauchy, Some(true));
        for row in &report.rows {
            assert_eq!(row.delta_l1.cutoff(), row.n << 12);
            if row.n.is_power_of_two() {
                assert!(row.delta_l1.lower_bound() >= Rational::from((3, 10)));
            }
        }
        let row9 = &report.rows[7];
        assert_eq!(row9.n, 9);
        assert_eq!(row9.delta_l1.truncated(), &0);
    }

    #[test]
    fn report_second_family_is_unflagged() {
        let report =
            divergence_report(SeedFamily::Second, 16, CutoffPolicy::Scaled, Precision::default())
                .unwrap();
        assert_eq!(report.rows.len(), 15);
        assert_eq!(report.non_cauchy, None);
        assert!(report.rows.iter().all(|r| r.integral.closed_form().is_none()));
    }

    #[test]
    fn report_preconditions() {
        let p = Precision::default();
        assert!(divergence_report(SeedFamily::First, 1, CutoffPolicy::Scaled, p).is_err());
        assert!(divergence_report(SeedFamily::First, 8, CutoffPolicy::Fixed(4), p).is_err());
    }

    #[test]
    fn identity_audit_examples() {
        assert_eq!(identity_audit(1).unwrap(), AuditWitness::Pass { checked: 1 });
        assert!(identity_audit(2000).unwrap().passed());
        let mutated = identity_audit_with(100, |k| if k == 2 { 2 } else { coeff_closed(k).unwrap() });
        assert_eq!(mutated.unwrap(), AuditWitness::Fail { m: 2, residual: 1 });
        assert!(identity_audit(0).is_err());
    }
}
