//! Machine-readable output documents for the CLI.
//!
//! Every command emits one JSON document on standard output with the fixed
//! top-level keys `command`, `version`, `parameters`, `results`, `verdicts`,
//! and `elapsed_ms`. Exact rationals travel as `"numerator/denominator"`
//! strings that round-trip losslessly; the `decimal` fields beside them are
//! advisory approximations only. `pmf` and `dominance` can emit CSV instead,
//! carrying numerical content identical to the JSON `results`.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::Value;

use crate::dist::{DominanceReport, LonelyPmf};
use crate::mc::Estimate;
use crate::model::Configuration;
use crate::prob::{ratio_string, Probability};
use crate::verify::VerificationReport;

/// An exact rational plus its advisory decimal rendering.
#[derive(Debug, Clone, Serialize)]
pub struct RationalValue {
    pub rational: String,
    pub decimal: f64,
}

impl From<&Probability> for RationalValue {
    fn from(p: &Probability) -> Self {
        Self {
            rational: p.to_string(),
            decimal: p.to_f64(),
        }
    }
}

impl From<&BigRational> for RationalValue {
    fn from(q: &BigRational) -> Self {
        Self {
            rational: ratio_string(q),
            decimal: q.to_f64().unwrap_or(f64::NAN),
        }
    }
}

/// Pass/fail summary; `failed_claims` lists the offending claim names.
#[derive(Debug, Clone, Serialize)]
pub struct Verdicts {
    pub all_pass: bool,
    pub failed_claims: Vec<String>,
}

/// The envelope every command prints.
#[derive(Debug, Serialize)]
pub struct OutputDocument {
    pub command: String,
    pub version: &'static str,
    pub parameters: Value,
    pub results: Value,
    pub verdicts: Option<Verdicts>,
    pub elapsed_ms: f64,
}

impl OutputDocument {
    pub fn new(command: &str, parameters: Value, results: Value) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            parameters,
            results,
            verdicts: None,
            elapsed_ms: 0.0,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

#[derive(Debug, Serialize)]
pub struct PmfEntry {
    pub s: u32,
    pub probability: RationalValue,
}

#[derive(Debug, Serialize)]
pub struct PmfResults {
    pub pmf: Vec<PmfEntry>,
}

impl PmfResults {
    pub fn from_pmf(pmf: &LonelyPmf) -> Self {
        Self {
            pmf: pmf
                .masses()
                .iter()
                .enumerate()
                .map(|(s, p)| PmfEntry {
                    s: s as u32,
                    probability: p.into(),
                })
                .collect(),
        }
    }
}

/// CSV rendering of a PMF: fixed columns `s,probability,decimal`.
pub fn pmf_csv(pmf: &LonelyPmf) -> String {
    let mut out = String::from("s,probability,decimal\n");
    for (s, p) in pmf.masses().iter().enumerate() {
        out.push_str(&format!("{s},{p},{}\n", p.to_f64()));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct DominanceRowDto {
    pub k: u32,
    pub r: u32,
    pub tail_k: RationalValue,
    pub tail_k_plus_1: RationalValue,
    pub weak_holds: bool,
    pub strict: bool,
}

#[derive(Debug, Serialize)]
pub struct DominanceResults {
    pub rows: Vec<DominanceRowDto>,
    pub overall_pass: bool,
}

impl DominanceResults {
    pub fn from_report(report: &DominanceReport) -> Self {
        Self {
            rows: report
                .rows
                .iter()
                .map(|row| DominanceRowDto {
                    k: row.k,
                    r: row.r,
                    tail_k: (&row.tail_k).into(),
                    tail_k_plus_1: (&row.tail_k_plus_1).into(),
                    weak_holds: row.weak_holds,
                    strict: row.strict,
                })
                .collect(),
            overall_pass: report.overall_pass(),
        }
    }
}

/// CSV rendering of a dominance table: fixed columns
/// `n,k,r,tail_k,tail_k_decimal,tail_k_plus_1,tail_k_plus_1_decimal,weak_holds,strict`.
pub fn dominance_csv(report: &DominanceReport) -> String {
    let mut out =
        String::from("n,k,r,tail_k,tail_k_decimal,tail_k_plus_1,tail_k_plus_1_decimal,weak_holds,strict\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            report.n,
            row.k,
            row.r,
            row.tail_k,
            row.tail_k.to_f64(),
            row.tail_k_plus_1,
            row.tail_k_plus_1.to_f64(),
            row.weak_holds,
            row.strict,
        ));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct ConfigurationDto {
    pub assignment: Vec<u32>,
    pub targets: Vec<u32>,
}

impl From<&Configuration> for ConfigurationDto {
    fn from(c: &Configuration) -> Self {
        Self {
            assignment: c.assignment().to_vec(),
            targets: c.targets().to_vec(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClaimDto {
    pub name: String,
    pub lhs: RationalValue,
    pub relation: &'static str,
    pub rhs: RationalValue,
    pub holds: bool,
    pub counterexample: Option<ConfigurationDto>,
}

#[derive(Debug, Serialize)]
pub struct ReportDto {
    pub n: u32,
    pub k: u32,
    pub r: Option<u32>,
    pub truncation_max_m: u32,
    pub total_configurations: u64,
    pub expansions_single_leftover: u64,
    pub expansions_other_leftover: u64,
    pub all_pass: bool,
    pub claims: Vec<ClaimDto>,
}

impl ReportDto {
    pub fn from_report(report: &VerificationReport) -> Self {
        Self {
            n: report.n,
            k: report.k,
            r: report.r,
            truncation_max_m: report.truncation_max_m,
            total_configurations: report.total_configurations,
            expansions_single_leftover: report.expansions_single_leftover,
            expansions_other_leftover: report.expansions_other_leftover,
            all_pass: report.all_pass(),
            claims: report
                .claims
                .iter()
                .map(|claim| ClaimDto {
                    name: claim.name.clone(),
                    lhs: (&claim.lhs).into(),
                    relation: claim.relation.symbol(),
                    rhs: (&claim.rhs).into(),
                    holds: claim.holds,
                    counterexample: claim.counterexample.as_ref().map(Into::into),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyResults {
    pub theorem: u8,
    pub reports: Vec<ReportDto>,
}

#[derive(Debug, Serialize)]
pub struct SimulateResults {
    pub point: f64,
    /// Exact hit fraction as a rational string.
    pub rational: String,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: u64,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimulateResults {
    pub fn from_estimate(est: &Estimate) -> Self {
        Self {
            point: est.point,
            rational: format!("{}/{}", est.hits, est.trials),
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            hits: est.hits,
            trials: est.trials,
            seed: est.seed,
            workers: est.workers,
        }
    }
}
