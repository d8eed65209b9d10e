//! Command implementations: each returns a rendered report plus the
//! process exit code (0 pass, 1 violation, 2 input error, 3
//! inconclusive).

use crate::job::Job;
use crate::render::{csv_escape, Format};
use bsr_core::bsring::{build_presentation, Presentation, RingElement};
use bsr_core::groebner::{ci_koszul_certificate, reducedness_check, spair_reduce_all, CertReport};
use bsr_core::hodge::{
    find_ample, signature_transfer_check, verify_all, verify_hl, verify_hr, verify_pd,
    DegreeCheck, HodgeError, LefschetzVector, Verdict,
};
use bsr_core::tensor::oracle_mul_basis;
use serde::Serialize;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CmdError {
    #[error(transparent)]
    Bsring(#[from] bsr_core::bsring::BsringError),
    #[error(transparent)]
    Hodge(#[from] bsr_core::hodge::HodgeError),
    #[error(transparent)]
    Tensor(#[from] bsr_core::tensor::TensorError),
    #[error("{0}")]
    Input(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowVerdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub section: String,
    pub name: String,
    pub detail: String,
    pub verdict: RowVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub word: Vec<usize>,
    pub backend: String,
    pub lefschetz: Option<Vec<String>>,
    pub checks: Vec<CheckRow>,
    pub overall: RowVerdict,
}

impl From<Verdict> for RowVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => RowVerdict::Pass,
            Verdict::Fail => RowVerdict::Fail,
            Verdict::Inconclusive => RowVerdict::Inconclusive,
        }
    }
}

pub fn overall_of(checks: &[CheckRow]) -> RowVerdict {
    if checks.iter().any(|c| c.verdict == RowVerdict::Fail) {
        RowVerdict::Fail
    } else if checks.iter().any(|c| c.verdict == RowVerdict::Inconclusive) {
        RowVerdict::Inconclusive
    } else {
        RowVerdict::Pass
    }
}

pub fn exit_code(v: RowVerdict) -> i32 {
    match v {
        RowVerdict::Pass => EXIT_PASS,
        RowVerdict::Fail => EXIT_VIOLATION,
        RowVerdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn degree_rows(section: &str, checks: &[DegreeCheck]) -> Vec<CheckRow> {
    checks
        .iter()
        .map(|c| CheckRow {
            section: section.to_string(),
            name: format!("k={}", c.k),
            detail: c.detail.clone(),
            verdict: c.verdict.into(),
        })
        .collect()
}

fn cert_rows(section: &str, report: &CertReport) -> Vec<CheckRow> {
    report
        .checks
        .iter()
        .map(|c| CheckRow {
            section: section.to_string(),
            name: c.name.clone(),
            detail: c.witness.clone().unwrap_or_default(),
            verdict: if c.pass {
                RowVerdict::Pass
            } else {
                RowVerdict::Fail
            },
        })
        .collect()
}

fn oracle_rows(p: &Presentation) -> Result<Vec<CheckRow>, CmdError> {
    let n = p.n();
    if n > bsr_core::tensor::ORACLE_TABLE_MAX_LEN {
        return Err(CmdError::Input(format!(
            "oracle verification is capped at words of length {}",
            bsr_core::tensor::ORACLE_TABLE_MAX_LEN
        )));
    }
    let mut mismatches = Vec::new();
    let mut total = 0usize;
    for i in 0..(1u32 << n) {
        for j in i..(1u32 << n) {
            total += 1;
            let oracle = oracle_mul_basis(&p.word, i, j, p.backend)?;
            let ring = p.mul(
                &RingElement::monomial(n, i, p.backend),
                &RingElement::monomial(n, j, p.backend),
            )?;
            if !oracle.matches(&ring) {
                mismatches.push(format!("I={i:#b} J={j:#b}"));
            }
        }
    }
    let pass = mismatches.is_empty();
    Ok(vec![CheckRow {
        section: "oracle".to_string(),
        name: format!("{total} products against the tensor model"),
        detail: if pass {
            String::new()
        } else {
            mismatches.join("; ")
        },
        verdict: if pass {
            RowVerdict::Pass
        } else {
            RowVerdict::Fail
        },
    }])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Pd,
    Gb,
    Hl,
    Hr,
    Oracle,
    All,
}

/// The Lefschetz vector for hl/hr: explicit from the job, otherwise
/// found by the ample search.
fn lefschetz_for(job: &Job) -> Result<(LefschetzVector, bool), HodgeError> {
    match &job.lefschetz {
        Some(lv) => Ok((lv.clone(), false)),
        None => Ok((find_ample(&job.word, job.backend)?.vector, true)),
    }
}

pub fn cmd_verify(job: &Job, which: Which, format: Format) -> Result<(String, i32), CmdError> {
    let p = build_presentation(&job.word, job.backend)?;
    let mut checks = Vec::new();
    let mut lefschetz_used: Option<LefschetzVector> = None;
    if matches!(which, Which::Pd | Which::All) {
        checks.extend(degree_rows("poincare", &verify_pd(&p)?));
    }
    if matches!(which, Which::Gb | Which::All) {
        checks.extend(cert_rows("groebner", &spair_reduce_all(&p)?));
        checks.extend(cert_rows("reducedness", &reducedness_check(&p)));
        checks.extend(cert_rows("koszul", &ci_koszul_certificate(&p)?));
    }
    if matches!(which, Which::Oracle | Which::All) {
        checks.extend(oracle_rows(&p)?);
    }
    if matches!(which, Which::Hl | Which::Hr | Which::All) {
        match lefschetz_for(job) {
            Ok((lv, _searched)) => {
                if matches!(which, Which::Hl | Which::All) {
                    checks.extend(degree_rows("hard-lefschetz", &verify_hl(&p, &lv)?));
                }
                if matches!(which, Which::Hr | Which::All) {
                    checks.extend(degree_rows("hodge-riemann", &verify_hr(&p, &lv)?));
                }
                lefschetz_used = Some(lv);
            }
            Err(HodgeError::SearchExhausted { position, halvings }) => {
                checks.push(CheckRow {
                    section: "lefschetz-search".to_string(),
                    name: "ample vector".to_string(),
                    detail: format!(
                        "search exhausted at position {position} after {halvings} halvings"
                    ),
                    verdict: RowVerdict::Inconclusive,
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    let report = VerifyReport {
        word: job.word.letters.clone(),
        backend: job.backend.name().to_string(),
        lefschetz: lefschetz_used.map(|lv| lv.render()),
        overall: overall_of(&checks),
        checks,
    };
    let code = exit_code(report.overall);
    Ok((render_verify(&report, format), code))
}

fn render_verify(report: &VerifyReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("serializable"),
        Format::Csv => {
            let mut out = String::from("section,name,detail,verdict\n");
            for c in &report.checks {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    csv_escape(&c.section),
                    csv_escape(&c.name),
                    csv_escape(&c.detail),
                    verdict_str(c.verdict)
                ));
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "word {:?} over the {} backend\n",
                report.word, report.backend
            );
            if let Some(lv) = &report.lefschetz {
                out.push_str(&format!("lefschetz vector [{}]\n", lv.join(", ")));
            }
            for c in &report.checks {
                out.push_str(&format!(
                    "  [{}] {} {} {}\n",
                    verdict_str(c.verdict),
                    c.section,
                    c.name,
                    c.detail
                ));
            }
            out.push_str(&format!("overall: {}\n", verdict_str(report.overall)));
            out
        }
    }
}

pub fn verdict_str(v: RowVerdict) -> &'static str {
    match v {
        RowVerdict::Pass => "pass",
        RowVerdict::Fail => "fail",
        RowVerdict::Inconclusive => "inconclusive",
    }
}

pub fn cmd_present(job: &Job, format: Format) -> Result<(String, i32), CmdError> {
    let p = build_presentation(&job.word, job.backend)?;
    let report = p.report();
    let out = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("serializable"),
        Format::Csv => {
            let mut out = String::from("kind,index,value\n");
            for (k, r) in report.raw_relations.iter().enumerate() {
                out.push_str(&format!("raw,{},{}\n", k + 1, csv_escape(r)));
            }
            for (k, r) in report.reduced_relations.iter().enumerate() {
                out.push_str(&format!("reduced,{},{}\n", k + 1, csv_escape(r)));
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "word {:?} over the {} backend\n",
                job.word.letters, report.backend
            );
            out.push_str("M matrix:\n");
            for row in &report.word_m_matrix {
                out.push_str(&format!("  {}\n", row.join(" ")));
            }
            out.push_str("Q matrix:\n");
            for row in &report.q_matrix {
                out.push_str(&format!("  {}\n", row.join(" ")));
            }
            out.push_str("raw relations:\n");
            for r in &report.raw_relations {
                out.push_str(&format!("  {r}\n"));
            }
            out.push_str("reduced relations:\n");
            for r in &report.reduced_relations {
                out.push_str(&format!("  {r}\n"));
            }
            out.push_str(&format!("hilbert vector {:?}\n", report.hilbert_vector));
            out
        }
    };
    Ok((out, EXIT_PASS))
}

#[derive(Debug, Serialize)]
struct AmpleReport {
    word: Vec<usize>,
    backend: String,
    coefficients: Vec<String>,
    log: Vec<bsr_core::hodge::AmpleStep>,
    verification: bsr_core::hodge::HodgeReport,
    transfer_pass: bool,
}

pub fn cmd_find_ample(job: &Job, format: Format) -> Result<(String, i32), CmdError> {
    let search = match find_ample(&job.word, job.backend) {
        Ok(s) => s,
        Err(HodgeError::SearchExhausted { position, halvings }) => {
            let msg = format!(
                "ample search exhausted at position {position} after {halvings} halvings\n"
            );
            return Ok((msg, EXIT_INCONCLUSIVE));
        }
        Err(e) => return Err(e.into()),
    };
    let p = build_presentation(&job.word, job.backend)?;
    let verification = verify_all(&p, &search.vector)?;
    let transfer_pass = if job.word.is_empty() {
        true
    } else {
        signature_transfer_check(&job.word, &search.vector, job.backend)?.pass
    };
    let code = if !transfer_pass {
        EXIT_VIOLATION
    } else {
        exit_code(verification.overall.into())
    };
    let report = AmpleReport {
        word: job.word.letters.clone(),
        backend: job.backend.name().to_string(),
        coefficients: search.coefficients,
        log: search.log,
        verification,
        transfer_pass,
    };
    let out = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("serializable"),
        Format::Csv => {
            let mut out = String::from("position,halvings,coefficient,accepted\n");
            for s in &report.log {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    s.position,
                    s.halvings,
                    csv_escape(&s.coefficient),
                    s.accepted
                ));
            }
            out
        }
        Format::Text => {
            let mut out = format!("word {:?}\n", report.word);
            out.push_str(&format!(
                "ample vector [{}]\n",
                report.coefficients.join(", ")
            ));
            for s in &report.log {
                out.push_str(&format!(
                    "  position {} candidate {} ({} halvings): {}\n",
                    s.position,
                    s.coefficient,
                    s.halvings,
                    if s.accepted { "accepted" } else { "rejected" }
                ));
            }
            for c in &report.verification.hodge_riemann {
                out.push_str(&format!("  hodge-riemann k={}: {}\n", c.k, c.detail));
            }
            out.push_str(&format!(
                "signature transfer: {}\n",
                if report.transfer_pass { "pass" } else { "fail" }
            ));
            out
        }
    };
    Ok((out, code))
}
