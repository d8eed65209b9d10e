//! Python bindings: a `Word` class wrapping a Coxeter word with a
//! scalar backend, exposing the presentation, the multiplication
//! oracle, the certification suites and the ample-vector search.
//! Structured reports are returned as JSON strings.

use bsr_core::bsring::{build_presentation, invariance_check, Presentation, RingElement};
use bsr_core::coxeter::{CoxeterMatrix, CoxeterWord, Order};
use bsr_core::groebner::{ci_koszul_certificate, reducedness_check, spair_reduce_all};
use bsr_core::hodge::{
    find_ample, signature_transfer_check, verify_all, LefschetzVector, Verdict,
};
use bsr_core::numeric::{Backend, Scalar, DEFAULT_EPS};
use bsr_core::tensor::oracle_mul_basis;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::collections::BTreeMap;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_backend(backend: &str, tolerance: Option<f64>) -> PyResult<Backend> {
    match backend {
        "rational" => Ok(Backend::Rational),
        "float" => Ok(Backend::Float {
            eps: tolerance.unwrap_or(DEFAULT_EPS),
        }),
        other => Err(err(format!(
            "backend must be \"rational\" or \"float\", got {other:?}"
        ))),
    }
}

fn parse_coeff(tok: &str, backend: Backend) -> PyResult<Scalar> {
    let bad = || err(format!("cannot parse coefficient {tok:?}"));
    if let Some((n, d)) = tok.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(match backend {
            Backend::Rational => Scalar::rational(n, d),
            Backend::Float { eps } => Scalar::float_eps(n as f64 / d as f64, eps),
        });
    }
    if let Ok(n) = tok.trim().parse::<i64>() {
        return Ok(Scalar::from_i64(n, backend));
    }
    match backend {
        Backend::Float { eps } => tok
            .trim()
            .parse::<f64>()
            .map(|v| Scalar::float_eps(v, eps))
            .map_err(|_| bad()),
        Backend::Rational => Err(bad()),
    }
}

/// A word in a Coxeter system together with a scalar backend.
///
/// `orders` is the Coxeter matrix as a list of rows; entries are the
/// pairwise orders m_st, with 0 standing for infinity.
#[pyclass]
struct Word {
    word: CoxeterWord,
    backend: Backend,
}

impl Word {
    fn presentation(&self) -> PyResult<Presentation> {
        build_presentation(&self.word, self.backend).map_err(err)
    }

    fn lefschetz(&self, coeffs: Vec<String>) -> PyResult<LefschetzVector> {
        let scalars = coeffs
            .iter()
            .map(|t| parse_coeff(t, self.backend))
            .collect::<PyResult<Vec<_>>>()?;
        LefschetzVector::new(scalars).map_err(err)
    }
}

#[pymethods]
impl Word {
    #[new]
    #[pyo3(signature = (orders, letters, backend = "rational", tolerance = None))]
    fn new(
        orders: Vec<Vec<i64>>,
        letters: Vec<usize>,
        backend: &str,
        tolerance: Option<f64>,
    ) -> PyResult<Self> {
        let size = orders.len();
        let mut entries = Vec::with_capacity(size * size);
        for row in &orders {
            if row.len() != size {
                return Err(err("orders must be a square matrix"));
            }
            for &m in row {
                entries.push(match m {
                    0 => Order::Infinity,
                    m if m > 0 => Order::Finite(m as u32),
                    _ => return Err(err(format!("invalid order {m}"))),
                });
            }
        }
        let cm = CoxeterMatrix::new(size, entries).map_err(err)?;
        Ok(Word {
            word: CoxeterWord::new(cm, letters).map_err(err)?,
            backend: parse_backend(backend, tolerance)?,
        })
    }

    /// Uniform system: every off-diagonal order equals `m` (0 = infinity).
    #[staticmethod]
    #[pyo3(signature = (rank, m, letters, backend = "rational", tolerance = None))]
    fn uniform(
        rank: usize,
        m: i64,
        letters: Vec<usize>,
        backend: &str,
        tolerance: Option<f64>,
    ) -> PyResult<Self> {
        let order = match m {
            0 => Order::Infinity,
            m if m > 0 => Order::Finite(m as u32),
            _ => return Err(err(format!("invalid order {m}"))),
        };
        let cm = CoxeterMatrix::uniform(rank, order).map_err(err)?;
        Ok(Word {
            word: CoxeterWord::new(cm, letters).map_err(err)?,
            backend: parse_backend(backend, tolerance)?,
        })
    }

    fn __len__(&self) -> usize {
        self.word.len()
    }

    fn letters(&self) -> Vec<usize> {
        self.word.letters.clone()
    }

    /// Presentation report (Q matrix, raw and reduced relations,
    /// Hilbert vector) as a JSON string.
    fn present(&self) -> PyResult<String> {
        let p = self.presentation()?;
        serde_json::to_string_pretty(&p.report()).map_err(err)
    }

    fn reduced_relations(&self) -> PyResult<Vec<String>> {
        let p = self.presentation()?;
        Ok((0..p.n()).map(|k| p.relation_string(k, true)).collect())
    }

    fn hilbert_vector(&self) -> PyResult<Vec<usize>> {
        Ok(self.presentation()?.hilbert_vector())
    }

    /// Product of two square-free basis monomials (subset bitmasks) in
    /// the presentation, as {mask: coefficient string}.
    fn multiply(&self, i: u32, j: u32) -> PyResult<BTreeMap<u32, String>> {
        let p = self.presentation()?;
        let n = p.n();
        let prod = p
            .mul(
                &RingElement::monomial(n, i, self.backend),
                &RingElement::monomial(n, j, self.backend),
            )
            .map_err(err)?;
        Ok(prod
            .terms
            .iter()
            .map(|(&m, c)| (m, c.render()))
            .collect())
    }

    /// The same product computed in the independent tensor model.
    fn oracle_multiply(&self, i: u32, j: u32) -> PyResult<BTreeMap<u32, String>> {
        let t = oracle_mul_basis(&self.word, i, j, self.backend).map_err(err)?;
        Ok(t.terms.iter().map(|(&m, c)| (m, c.render())).collect())
    }

    /// Groebner / reducedness / Koszul certification report as JSON;
    /// second return value is the overall pass flag.
    fn certify(&self) -> PyResult<(String, bool)> {
        let p = self.presentation()?;
        let spair = spair_reduce_all(&p).map_err(err)?;
        let reduced = reducedness_check(&p);
        let koszul = ci_koszul_certificate(&p).map_err(err)?;
        let pass = spair.all_pass() && reduced.all_pass() && koszul.all_pass();
        let json = serde_json::to_string_pretty(&serde_json::json!({
            "spairs": spair,
            "reducedness": reduced,
            "koszul": koszul,
        }))
        .map_err(err)?;
        Ok((json, pass))
    }

    /// Kaehler-package report for an explicit coefficient vector;
    /// returns (json, overall verdict string).
    fn verify(&self, coefficients: Vec<String>) -> PyResult<(String, String)> {
        let p = self.presentation()?;
        let lv = self.lefschetz(coefficients)?;
        let report = verify_all(&p, &lv).map_err(err)?;
        let verdict = match report.overall {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        };
        Ok((
            serde_json::to_string_pretty(&report).map_err(err)?,
            verdict.to_string(),
        ))
    }

    /// Search for an ample vector; returns the coefficient strings.
    fn find_ample(&self) -> PyResult<Vec<String>> {
        Ok(find_ample(&self.word, self.backend)
            .map_err(err)?
            .coefficients)
    }

    /// Signature-transfer consistency against the one-letter-shorter
    /// prefix, for the given certified coefficients.
    fn signature_transfer(&self, coefficients: Vec<String>) -> PyResult<bool> {
        let lv = self.lefschetz(coefficients)?;
        Ok(signature_transfer_check(&self.word, &lv, self.backend)
            .map_err(err)?
            .pass)
    }

    /// Positional order matrix M_w, with "inf" for infinite orders.
    fn m_matrix(&self) -> Vec<Vec<String>> {
        self.word
            .word_m_matrix()
            .iter()
            .map(|row| row.iter().map(Order::to_string).collect())
            .collect()
    }
}

/// Constructive combinatorial invariance: identical M matrices must
/// give identical presentations. Returns (m_equal, presentations_equal).
#[pyfunction]
fn invariance(w1: &Word, w2: &Word) -> PyResult<(bool, Option<bool>)> {
    let v = invariance_check(&w1.word, &w2.word, w1.backend).map_err(err)?;
    Ok((v.m_matrices_equal, v.presentations_equal))
}

#[pymodule]
fn bsr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Word>()?;
    m.add_function(wrap_pyfunction!(invariance, m)?)?;
    Ok(())
}
