//! Table-producing commands behind the `vasyunin` binary.
//!
//! Every command returns a [`Report`]: a `metadata` object and ordered `rows`.
//! Rationals are serialized as `"p/q"` strings in lowest terms (`"p"` for
//! integers), each next to a `*_decimal` rendering at the configured
//! precision. Output is deterministic for a fixed [`RunConfig`]; a timestamp
//! is only added on request.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rug::Rational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corrections::{
    build_correction, leading_coefficients_check, to_canonical, verify_plateau,
    CoefficientWitness, CorrectionSequence, PlateauWitness, SeedFamily,
};
use crate::diagnostics::{
    divergence_report, identity_audit_with, AuditWitness, CutoffPolicy, IntegralDiagnostic,
    NormEstimate,
};
use crate::error::{Error, Result};
use crate::numtheory::{coeff_closed, mobius};
use crate::real::Precision;

pub const MAX_N: u64 = 1 << 16;
pub const MAX_CUTOFF: u64 = 1 << 30;
pub const MIN_PRECISION: u32 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Coeffs,
    Profile,
    Canonical,
    Diverge,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::Profile => "profile",
            Command::Canonical => "canonical",
            Command::Diverge => "diverge",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Suites run by `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Identity,
    Plateau,
    Canonical,
    Idempotency,
}

impl Check {
    pub const ALL: [Check; 4] = [Check::Identity, Check::Plateau, Check::Canonical, Check::Idempotency];

    pub fn name(self) -> &'static str {
        match self {
            Check::Identity => "identity",
            Check::Plateau => "plateau",
            Check::Canonical => "canonical",
            Check::Idempotency => "idempotency",
        }
    }

    /// Comma-separated list; an empty string selects nothing.
    pub fn parse_list(s: &str) -> Result<Vec<Check>> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check {s:?}")))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Default limits of the `verify` suites.
pub const IDENTITY_LIMIT: u64 = 10_000;
pub const PLATEAU_LIMIT_FIRST: u64 = 512;
pub const PLATEAU_LIMIT_OTHER: u64 = 200;
pub const CANONICAL_LIMIT: u64 = 256;
pub const IDEMPOTENCY_LIMIT: u64 = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub family: SeedFamily,
    pub n: Option<u64>,
    pub n_max: Option<u64>,
    /// Fixed truncation point; `None` means the `n·2^12` policy.
    pub cutoff: Option<u64>,
    pub horizon: Option<u64>,
    pub precision: Precision,
    pub format: OutputFormat,
    /// `verify` only; `None` runs every suite.
    pub checks: Option<Vec<Check>>,
    /// `verify` only: replace `c_k` by a value in the identity audit.
    pub mutation: Option<(u64, i64)>,
    pub timestamp: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command, family: SeedFamily) -> Self {
        RunConfig {
            command,
            family,
            n: None,
            n_max: None,
            cutoff: None,
            horizon: None,
            precision: Precision::default(),
            format: OutputFormat::Json,
            checks: None,
            mutation: None,
            timestamp: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision.digits() < MIN_PRECISION {
            return Err(Error::domain("precision", "at least 15 digits", self.precision.digits()));
        }
        for (what, v) in [("n", self.n), ("n_max", self.n_max)] {
            if let Some(v) = v {
                if v == 0 || v > MAX_N {
                    return Err(Error::domain(what, "in 1..=65536", v));
                }
            }
        }
        if let Some(x) = self.cutoff {
            if x == 0 || x > MAX_CUTOFF {
                return Err(Error::domain("x", "in 1..=2^30", x));
            }
        }
        if let Some(h) = self.horizon {
            if h > MAX_CUTOFF {
                return Err(Error::domain("horizon", "at most 2^30", h));
            }
        }
        Ok(())
    }

    fn require_n(&self) -> Result<u64> {
        self.n.ok_or(Error::Parse(format!("{} needs --n", self.command.name())))
    }

    fn require_n_max(&self) -> Result<u64> {
        self.n_max
            .ok_or(Error::Parse(format!("{} needs --n-max", self.command.name())))
    }

    fn policy(&self) -> CutoffPolicy {
        self.cutoff.map_or(CutoffPolicy::Scaled, CutoffPolicy::Fixed)
    }

    fn metadata(&self, parameters: BTreeMap<String, Value>) -> Metadata {
        Metadata {
            command: self.command.name().to_string(),
            family: self.family.name().to_string(),
            parameters,
            precision: self.precision.digits(),
            note: None,
            summary: None,
            timestamp: self.timestamp.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub family: String,
    pub parameters: BTreeMap<String, Value>,
    pub precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<R> {
    pub metadata: Metadata,
    pub rows: Vec<R>,
}

/// Fixed CSV layout of a row type.
pub trait CsvRow {
    fn header() -> Vec<&'static str>;
    fn record(&self) -> Vec<String>;
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffRow {
    pub k: u64,
    pub c_recurrence: String,
    pub c_recurrence_decimal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_closed: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_closed_decimal: Option<String>,
    #[serde(rename = "match", default, skip_serializing_if = "Option::is_none")]
    pub matches: Option<bool>,
}

impl CsvRow for CoeffRow {
    fn header() -> Vec<&'static str> {
        vec!["k", "c_recurrence", "c_recurrence_decimal", "c_closed", "c_closed_decimal", "match"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.k.to_string(),
            self.c_recurrence.clone(),
            self.c_recurrence_decimal.clone(),
            opt(&self.c_closed),
            opt(&self.c_closed_decimal),
            opt(&self.matches),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub m: u64,
    pub v: String,
    pub v_decimal: String,
}

impl CsvRow for ProfileRow {
    fn header() -> Vec<&'static str> {
        vec!["m", "v", "v_decimal"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.m.to_string(), self.v.clone(), self.v_decimal.clone()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalRow {
    pub denominator: u64,
    pub coefficient: String,
    pub coefficient_decimal: String,
    /// Whether the coefficient equals `μ(denominator)`; `null` above `n`.
    pub mobius_match: Option<bool>,
}

impl CsvRow for CanonicalRow {
    fn header() -> Vec<&'static str> {
        vec!["denominator", "coefficient", "coefficient_decimal", "mobius_match"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.denominator.to_string(),
            self.coefficient.clone(),
            self.coefficient_decimal.clone(),
            opt(&self.mobius_match),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateOut {
    pub truncated: String,
    pub truncated_decimal: String,
    pub x: u64,
    pub tail_bound: String,
    pub tail_bound_decimal: String,
    pub lower_bound_decimal: String,
    pub upper_bound_decimal: String,
}

impl EstimateOut {
    fn new(e: &NormEstimate, p: Precision) -> Self {
        EstimateOut {
            truncated: e.truncated().to_string(),
            truncated_decimal: p.render(e.truncated()),
            x: e.cutoff(),
            tail_bound: e.tail_bound().to_string(),
            tail_bound_decimal: p.render(e.tail_bound()),
            lower_bound_decimal: p.render(&e.lower_bound()),
            upper_bound_decimal: p.render(&e.upper_bound()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralOut {
    pub closed_form: Option<String>,
    pub closed_form_decimal: Option<String>,
    #[serde(flatten)]
    pub estimate: EstimateOut,
}

impl IntegralOut {
    fn new(d: &IntegralDiagnostic, p: Precision) -> Self {
        IntegralOut {
            closed_form: d.closed_form().map(ToString::to_string),
            closed_form_decimal: d.closed_form().map(|c| c.render(p)),
            estimate: EstimateOut::new(d.estimate(), p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergeRow {
    pub n: u64,
    pub c_n: String,
    pub c_n_decimal: String,
    pub delta_l1: EstimateOut,
    #[serde(rename = "I_n")]
    pub integral: IntegralOut,
}

impl CsvRow for DivergeRow {
    fn header() -> Vec<&'static str> {
        vec![
            "n",
            "c_n",
            "delta_x",
            "delta_truncated_decimal",
            "delta_tail_bound",
            "delta_lower_bound_decimal",
            "delta_upper_bound_decimal",
            "I_x",
            "I_closed_form",
            "I_closed_form_decimal",
            "I_truncated_decimal",
            "I_tail_bound_decimal",
        ]
    }

    fn record(&self) -> Vec<String> {
        let d = &self.delta_l1;
        let i = &self.integral;
        vec![
            self.n.to_string(),
            self.c_n.clone(),
            d.x.to_string(),
            d.truncated_decimal.clone(),
            d.tail_bound.clone(),
            d.lower_bound_decimal.clone(),
            d.upper_bound_decimal.clone(),
            i.estimate.x.to_string(),
            opt(&i.closed_form),
            opt(&i.closed_form_decimal),
            i.estimate.truncated_decimal.clone(),
            i.estimate.tail_bound_decimal.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl CsvRow for VerifyRow {
    fn header() -> Vec<&'static str> {
        vec!["check", "passed", "detail"]
    }

    fn record(&self) -> Vec<String> {
        vec![self.check.clone(), self.passed.to_string(), self.detail.clone()]
    }
}

fn params<const N: usize>(pairs: [(&str, Value); N]) -> BTreeMap<String, Value> {
    pairs
        .into_iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

/// Recurrence coefficients, next to the closed form for the first family.
pub fn cmd_coeffs(cfg: &RunConfig) -> Result<Report<CoeffRow>> {
    let n_max = cfg.require_n_max()?;
    let p = cfg.precision;
    let corr = build_correction(cfg.family, n_max)?;
    let first = cfg.family == SeedFamily::First;
    let mut rows = Vec::with_capacity(n_max as usize);
    for (i, c) in corr.coeffs().iter().enumerate() {
        let k = i as u64 + 1;
        let closed = if first {
            Some(Rational::from(coeff_closed(k)?))
        } else {
            None
        };
        rows.push(CoeffRow {
            k,
            c_recurrence: c.to_string(),
            c_recurrence_decimal: p.render(c),
            c_closed: closed.as_ref().map(ToString::to_string),
            c_closed_decimal: closed.as_ref().map(|q| p.render(q)),
            matches: closed.as_ref().map(|q| q == c),
        });
    }
    let mut metadata = cfg.metadata(params([("n_max", n_max.into())]));
    if !first {
        metadata.note = Some("closed-form coefficients exist only for the first family".into());
    }
    Ok(Report { metadata, rows })
}

/// Values of `φ_n` on `[m, m+1)` for `m < horizon` (default `4n`).
pub fn cmd_profile(cfg: &RunConfig) -> Result<Report<ProfileRow>> {
    let n = cfg.require_n()?;
    let horizon = cfg.horizon.unwrap_or(4 * n);
    let p = cfg.precision;
    let corr = build_correction(cfg.family, n)?;
    let rows = if horizon == 0 {
        Vec::new()
    } else {
        corr.phi()
            .profile(horizon)
            .values()
            .iter()
            .enumerate()
            .map(|(m, v)| ProfileRow {
                m: m as u64,
                v: v.to_string(),
                v_decimal: p.render(v),
            })
            .collect()
    };
    let metadata = cfg.metadata(params([("n", n.into()), ("horizon", horizon.into())]));
    Ok(Report { metadata, rows })
}

/// Canonical coefficients of `φ_n`, flagged against `μ(k)` for `k <= n`.
pub fn cmd_canonical(cfg: &RunConfig) -> Result<Report<CanonicalRow>> {
    let n = cfg.require_n()?;
    let p = cfg.precision;
    let corr = build_correction(cfg.family, n)?;
    let mut metadata = cfg.metadata(params([("n", n.into())]));
    let canonical = match cfg.family {
        SeedFamily::First => to_canonical(&corr)?,
        _ => {
            metadata.note = Some("expanded directly from the seeds".into());
            corr.phi().clone()
        }
    };
    let rows = canonical
        .terms()
        .iter()
        .map(|(a, c)| {
            let mobius_match = (*a <= n).then(|| *c == mobius(*a).expect("a >= 1"));
            CanonicalRow {
                denominator: *a,
                coefficient: c.to_string(),
                coefficient_decimal: p.render(c),
                mobius_match,
            }
        })
        .collect();
    Ok(Report { metadata, rows })
}

/// The divergence report: one row per `2 <= n <= n_max`.
pub fn cmd_diverge(cfg: &RunConfig) -> Result<Report<DivergeRow>> {
    let n_max = cfg.require_n_max()?;
    let p = cfg.precision;
    let policy = cfg.policy();
    let mut report = divergence_report(cfg.family, n_max, policy, p)?;
    report.timestamp = cfg.timestamp.clone();
    let rows = report
        .rows
        .iter()
        .map(|r| DivergeRow {
            n: r.n,
            c_n: r.c_n.to_string(),
            c_n_decimal: p.render(&r.c_n),
            delta_l1: EstimateOut::new(&r.delta_l1, p),
            integral: IntegralOut::new(&r.integral, p),
        })
        .collect();
    let mut metadata = cfg.metadata(params([
        ("n_max", n_max.into()),
        ("x_policy", policy.describe().into()),
    ]));
    metadata.summary = Some(serde_json::json!({
        "non_cauchy": report.non_cauchy,
        "I_1": IntegralOut::new(&report.initial_integral, p),
    }));
    Ok(Report { metadata, rows })
}

fn pass_or(detail: Option<String>, ok: String) -> (bool, String) {
    match detail {
        Some(d) => (false, d),
        None => (true, ok),
    }
}

/// `Σ_{k|m} c_k (-1)^{m/k+1} = δ(m)` for `m <= limit`, optionally with `c_k`
/// replaced by a mutated value.
pub fn check_identity(limit: u64, mutation: Option<(u64, i64)>) -> Result<Option<String>> {
    let coeff = |k: u64| match mutation {
        Some((mk, v)) if mk == k => v,
        _ => coeff_closed(k).expect("k >= 1"),
    };
    Ok(match identity_audit_with(limit, coeff)? {
        AuditWitness::Pass { .. } => None,
        AuditWitness::Fail { m, residual } => Some(format!("fails at m = {m}, residual {residual}")),
    })
}

/// Plateau of every `φ_n`, `n <= limit`.
pub fn check_plateau(family: SeedFamily, limit: u64) -> Result<Option<String>> {
    let mut seq = CorrectionSequence::new(family);
    for _ in 0..limit {
        seq.advance()?;
        if let PlateauWitness::Fail { index, value } = verify_plateau(&seq.snapshot()) {
            return Ok(Some(format!(
                "{family} n = {}: value {value} on [{index}, {})",
                seq.n(),
                index + 1
            )));
        }
    }
    Ok(None)
}

/// First family: canonical form equals the expansion; all families: leading
/// coefficients are `μ(k)`.
pub fn check_canonical(family: SeedFamily, limit: u64) -> Result<Option<String>> {
    let mut seq = CorrectionSequence::new(family);
    for _ in 0..limit {
        seq.advance()?;
        let corr = seq.snapshot();
        if family == SeedFamily::First && &to_canonical(&corr)? != corr.phi() {
            return Ok(Some(format!("canonical form differs at n = {}", corr.n())));
        }
        if let CoefficientWitness::Mismatch {
            denominator,
            expected,
            found,
        } = leading_coefficients_check(&corr)
        {
            return Ok(Some(format!(
                "{family} n = {}: coefficient {found} at {denominator}, expected {expected}",
                corr.n()
            )));
        }
    }
    Ok(None)
}

/// Seeds are zero-sum and take only the values 0 and 1 over a full period.
pub fn check_idempotency(family: SeedFamily, limit: u64) -> Result<Option<String>> {
    for n in 1..=limit {
        let seed = family.seed(n)?;
        if !seed.is_zero_sum() {
            return Ok(Some(format!("{family} seed {n} is not zero-sum")));
        }
        let period = seed.period()?;
        for (start, v) in seed.runs(period) {
            if v != 0 && v != 1 {
                return Ok(Some(format!("{family} seed {n} takes value {v} at {start}")));
            }
        }
    }
    Ok(None)
}

/// Runs the selected suites. Limits default to the acceptance limits; `n_max`
/// overrides all of them.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Report<VerifyRow>> {
    let checks = cfg.checks.clone().unwrap_or_else(|| Check::ALL.to_vec());
    let limit = |default: u64| cfg.n_max.unwrap_or(default);
    let mut rows = Vec::new();
    for check in &checks {
        match check {
            Check::Identity => {
                let n = limit(IDENTITY_LIMIT);
                let (passed, detail) =
                    pass_or(check_identity(n, cfg.mutation)?, format!("m <= {n}"));
                rows.push(VerifyRow {
                    check: check.to_string(),
                    passed,
                    detail,
                });
            }
            Check::Plateau => {
                for family in SeedFamily::ALL {
                    let default = if family == SeedFamily::First {
                        PLATEAU_LIMIT_FIRST
                    } else {
                        PLATEAU_LIMIT_OTHER
                    };
                    let n = limit(default);
                    let (passed, detail) = pass_or(check_plateau(family, n)?, format!("{family}, n <= {n}"));
                    rows.push(VerifyRow {
                        check: check.to_string(),
                        passed,
                        detail,
                    });
                }
            }
            Check::Canonical => {
                for family in SeedFamily::ALL {
                    let default = if family == SeedFamily::First {
                        CANONICAL_LIMIT
                    } else {
                        PLATEAU_LIMIT_OTHER
                    };
                    let n = limit(default);
                    let (passed, detail) =
                        pass_or(check_canonical(family, n)?, format!("{family}, n <= {n}"));
                    rows.push(VerifyRow {
                        check: check.to_string(),
                        passed,
                        detail,
                    });
                }
            }
            Check::Idempotency => {
                for family in SeedFamily::ALL {
                    let n = limit(IDEMPOTENCY_LIMIT);
                    let (passed, detail) =
                        pass_or(check_idempotency(family, n)?, format!("{family}, n <= {n}"));
                    rows.push(VerifyRow {
                        check: check.to_string(),
                        passed,
                        detail,
                    });
                }
            }
        }
    }
    let names: Vec<Value> = checks.iter().map(|c| c.name().into()).collect();
    let mut metadata = cfg.metadata(params([
        ("checks", Value::Array(names)),
        (
            "mutation",
            cfg.mutation
                .map_or(Value::Null, |(k, v)| format!("c_{k}={v}").into()),
        ),
    ]));
    if checks.is_empty() {
        metadata.note = Some("no checks run".into());
    }
    Ok(Report { metadata, rows })
}

pub fn render<R: Serialize + CsvRow>(report: &Report<R>, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Parse(e.to_string());
            w.write_record(R::header()).map_err(io)?;
            for row in &report.rows {
                w.write_record(row.record()).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

/// Outcome of a run: the rendered table and whether every check passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub text: String,
    pub passed: bool,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let text_ok = |text| RunOutput { text, passed: true };
    Ok(match cfg.command {
        Command::Coeffs => text_ok(render(&cmd_coeffs(cfg)?, cfg.format)?),
        Command::Profile => text_ok(render(&cmd_profile(cfg)?, cfg.format)?),
        Command::Canonical => text_ok(render(&cmd_canonical(cfg)?, cfg.format)?),
        Command::Diverge => text_ok(render(&cmd_diverge(cfg)?, cfg.format)?),
        Command::Verify => {
            let report = cmd_verify(cfg)?;
            let passed = report.rows.iter().all(|r| r.passed);
            RunOutput {
                text: render(&report, cfg.format)?,
                passed,
            }
        }
    })
}
