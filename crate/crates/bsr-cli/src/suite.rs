//! Seeded random cross-validation suite: random Coxeter systems and
//! words, checked with every independent method available for the
//! sampled orders.

use crate::commands::{exit_code, overall_of, verdict_str, CheckRow, CmdError, RowVerdict};
use crate::render::{csv_escape, Format};
use bsr_core::bsring::{build_presentation, degree_basis, RingElement};
use bsr_core::coxeter::{CoxeterMatrix, CoxeterWord, Order};
use bsr_core::demazure::{q_entry_pathsum, q_matrix};
use bsr_core::groebner::{ci_koszul_certificate, reducedness_check, spair_reduce_all};
use bsr_core::hodge::{find_ample, signature_transfer_check, verify_all, Verdict};
use bsr_core::numeric::{Backend, Scalar};
use bsr_core::tensor::oracle_mul_basis;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const ORDER_POOL: [Order; 6] = [
    Order::Finite(2),
    Order::Finite(3),
    Order::Finite(4),
    Order::Finite(5),
    Order::Finite(6),
    Order::Infinity,
];

#[derive(Debug, Serialize)]
pub struct SuiteItem {
    pub index: usize,
    pub letters: Vec<usize>,
    pub orders: Vec<Vec<String>>,
    pub backend: String,
    pub checks: Vec<CheckRow>,
    pub verdict: RowVerdict,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: usize,
    pub max_len: usize,
    pub items: Vec<SuiteItem>,
    pub overall: RowVerdict,
}

fn sample_word(rng: &mut ChaCha8Rng, max_len: usize) -> CoxeterWord {
    let rank = rng.gen_range(1..=3usize);
    let mut orders = vec![Order::Finite(1); rank * rank];
    for s in 0..rank {
        for t in (s + 1)..rank {
            let m = ORDER_POOL[rng.gen_range(0..ORDER_POOL.len())];
            orders[s * rank + t] = m;
            orders[t * rank + s] = m;
        }
    }
    let cm = CoxeterMatrix::new(rank, orders).expect("sampled matrix is valid");
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len).map(|_| rng.gen_range(0..rank)).collect();
    CoxeterWord::new(cm, letters).expect("sampled letters are in range")
}

/// Orders relevant to the word all lie in the exact-cosine set
/// {1, 2, 3, inf}, so the rational backend applies.
fn rational_ok(w: &CoxeterWord) -> bool {
    (0..w.len()).all(|i| {
        (i + 1..w.len()).all(|j| {
            matches!(
                w.letter_order(i, j),
                Order::Finite(1) | Order::Finite(2) | Order::Finite(3) | Order::Infinity
            )
        })
    })
}

fn row(section: &str, name: impl Into<String>, pass: bool, detail: String) -> CheckRow {
    CheckRow {
        section: section.to_string(),
        name: name.into(),
        detail,
        verdict: if pass {
            RowVerdict::Pass
        } else {
            RowVerdict::Fail
        },
    }
}

fn run_item(index: usize, w: &CoxeterWord, eps: f64) -> Result<SuiteItem, CmdError> {
    let rational = rational_ok(w);
    let backend = if rational {
        Backend::Rational
    } else {
        Backend::Float { eps }
    };
    let n = w.len();
    let mut checks = Vec::new();

    // Path-sum formula against the matrix geometric series.
    let q = q_matrix(w, backend).map_err(bsr_core::bsring::BsringError::from)?;
    let mut path_ok = true;
    for l in 0..n {
        for m in (l + 1)..n {
            let p = q_entry_pathsum(w, l, m, backend)
                .map_err(bsr_core::bsring::BsringError::from)?;
            if !p.approx_eq(q.entry(l, m)) {
                path_ok = false;
            }
        }
    }
    checks.push(row("q-matrix", "path-sum equality", path_ok, String::new()));
    checks.push(row(
        "q-matrix",
        "coefficient bound",
        q.satisfies_bound(),
        String::new(),
    ));

    let p = build_presentation(w, backend)?;

    // Tensor oracle against presentation arithmetic, full table.
    if n <= 6 {
        let mut mismatch = None;
        for i in 0..(1u32 << n) {
            for j in i..(1u32 << n) {
                let oracle = oracle_mul_basis(w, i, j, backend)?;
                let ring = p.mul(
                    &RingElement::monomial(n, i, backend),
                    &RingElement::monomial(n, j, backend),
                )?;
                if !oracle.matches(&ring) {
                    mismatch = Some(format!("I={i:#b} J={j:#b}"));
                }
            }
        }
        checks.push(row(
            "oracle",
            "structure constants",
            mismatch.is_none(),
            mismatch.unwrap_or_default(),
        ));
    }

    // Poincare pairing is the complement permutation.
    let mut pd_ok = true;
    for k in 0..=n {
        let m = p.pairing_matrix(k)?;
        let rows = degree_basis(n, k);
        let cols = degree_basis(n, n - k);
        for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                let expect = if (i | j).count_ones() as usize == n && i & j == 0 {
                    Scalar::one(backend)
                } else {
                    Scalar::zero(backend)
                };
                if !m.get(ri, ci).approx_eq(&expect) {
                    pd_ok = false;
                }
            }
        }
    }
    checks.push(row(
        "poincare",
        "pairing is the complement permutation",
        pd_ok,
        String::new(),
    ));

    // Groebner certificates.
    checks.push(row(
        "groebner",
        "s-pairs reduce to zero",
        spair_reduce_all(&p)?.all_pass(),
        String::new(),
    ));
    checks.push(row(
        "groebner",
        "reduced basis",
        reducedness_check(&p).all_pass(),
        String::new(),
    ));
    checks.push(row(
        "koszul",
        "certificate",
        ci_koszul_certificate(&p)?.all_pass(),
        String::new(),
    ));

    // Kaehler package on the exact backend only.
    if rational {
        match find_ample(w, backend) {
            Ok(search) => {
                let report = verify_all(&p, &search.vector)?;
                checks.push(row(
                    "kaehler",
                    format!("ample vector [{}]", search.coefficients.join(", ")),
                    report.overall == Verdict::Pass,
                    String::new(),
                ));
                if n > 0 {
                    let transfer = signature_transfer_check(w, &search.vector, backend)?;
                    checks.push(row(
                        "kaehler",
                        "signature transfer",
                        transfer.pass,
                        String::new(),
                    ));
                }
            }
            Err(e) => {
                checks.push(row("kaehler", "ample search", false, e.to_string()));
            }
        }
    }

    let verdict = overall_of(&checks);
    Ok(SuiteItem {
        index,
        letters: w.letters.clone(),
        orders: w
            .word_m_matrix()
            .iter()
            .map(|r| r.iter().map(Order::to_string).collect())
            .collect(),
        backend: backend.name().to_string(),
        checks,
        verdict,
    })
}

pub fn cmd_random_suite(
    seed: u64,
    count: usize,
    max_len: usize,
    eps: f64,
    format: Format,
) -> Result<(String, i32), CmdError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(count);
    for index in 0..count {
        let w = sample_word(&mut rng, max_len);
        items.push(run_item(index, &w, eps)?);
    }
    let overall = items
        .iter()
        .map(|i| i.verdict)
        .fold(RowVerdict::Pass, |acc, v| match (acc, v) {
            (RowVerdict::Fail, _) | (_, RowVerdict::Fail) => RowVerdict::Fail,
            (RowVerdict::Inconclusive, _) | (_, RowVerdict::Inconclusive) => {
                RowVerdict::Inconclusive
            }
            _ => RowVerdict::Pass,
        });
    let report = SuiteReport {
        seed,
        count,
        max_len,
        items,
        overall,
    };
    let out = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("serializable"),
        Format::Csv => {
            let mut out = String::from("item,word,backend,section,check,verdict\n");
            for item in &report.items {
                for c in &item.checks {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        item.index,
                        csv_escape(&format!("{:?}", item.letters)),
                        item.backend,
                        csv_escape(&c.section),
                        csv_escape(&c.name),
                        verdict_str(c.verdict)
                    ));
                }
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "random suite: seed {} count {} max-len {}\n",
                report.seed, report.count, report.max_len
            );
            for item in &report.items {
                out.push_str(&format!(
                    "item {} word {:?} ({} backend): {}\n",
                    item.index,
                    item.letters,
                    item.backend,
                    verdict_str(item.verdict)
                ));
                for c in item.checks.iter().filter(|c| c.verdict != RowVerdict::Pass) {
                    out.push_str(&format!(
                        "    [{}] {} {} {}\n",
                        verdict_str(c.verdict),
                        c.section,
                        c.name,
                        c.detail
                    ));
                }
            }
            out.push_str(&format!("overall: {}\n", verdict_str(report.overall)));
            out
        }
    };
    Ok((out, exit_code(overall)))
}
