//! The Kaehler package: Poincare duality, hard Lefschetz and
//! Hodge-Riemann checks for a choice of degree-1 Lefschetz element,
//! plus the automated search for an ample vector by coefficient
//! halving and the signature-transfer consistency check against the
//! one-letter-shorter word.

use crate::bsring::{
    build_presentation, degree_basis, BsringError, Presentation, RingElement,
};
use crate::coxeter::CoxeterWord;
use crate::numeric::{binomial, Backend, Matrix, NumericError, Scalar, Signature};
use serde::Serialize;

/// Halving budget of the ample search: candidates 1, 1/2, ..., 2^-60.
pub const AMPLE_MAX_HALVINGS: u32 = 60;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum HodgeError {
    #[error("lefschetz coefficient {index} is not positive")]
    CoefficientNotPositive { index: usize },
    #[error("lefschetz vector has {got} coefficients for word length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("degree {k} exceeds half the word length {n}")]
    DegreeOutOfRange { k: usize, n: usize },
    #[error("ample search exhausted at position {position} after {halvings} halvings")]
    SearchExhausted { position: usize, halvings: u32 },
    #[error(transparent)]
    Bsring(#[from] BsringError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Candidate Kaehler class: strictly positive coefficients on the
/// generators.
#[derive(Debug, Clone, PartialEq)]
pub struct LefschetzVector {
    pub coeffs: Vec<Scalar>,
}

impl LefschetzVector {
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self, HodgeError> {
        for (index, c) in coeffs.iter().enumerate() {
            if !c.is_positive() {
                return Err(HodgeError::CoefficientNotPositive { index });
            }
        }
        Ok(LefschetzVector { coeffs })
    }

    pub fn ones(n: usize, backend: Backend) -> Self {
        LefschetzVector {
            coeffs: vec![Scalar::one(backend); n],
        }
    }

    /// The element sum c_i x_i.
    pub fn element(&self, n: usize) -> Result<RingElement, HodgeError> {
        if self.coeffs.len() != n {
            return Err(HodgeError::LengthMismatch {
                expected: n,
                got: self.coeffs.len(),
            });
        }
        let mut e = RingElement::zero(n);
        for (i, c) in self.coeffs.iter().enumerate() {
            e.add_term(1u32 << i, c)?;
        }
        Ok(e)
    }

    pub fn truncate(&self, n: usize) -> LefschetzVector {
        LefschetzVector {
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    pub fn render(&self) -> Vec<String> {
        self.coeffs.iter().map(Scalar::render).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeCheck {
    pub k: usize,
    pub dim: usize,
    pub detail: String,
    pub verdict: Verdict,
}

/// Full Kaehler-package report for one word and one Lefschetz vector.
#[derive(Debug, Clone, Serialize)]
pub struct HodgeReport {
    pub word: Vec<usize>,
    pub backend: String,
    pub tolerance: Option<f64>,
    pub lefschetz: Vec<String>,
    pub poincare: Vec<DegreeCheck>,
    pub hard_lefschetz: Vec<DegreeCheck>,
    pub hodge_riemann: Vec<DegreeCheck>,
    pub overall: Verdict,
}

fn backend_tolerance(backend: Backend) -> Option<f64> {
    match backend {
        Backend::Rational => None,
        Backend::Float { eps } => Some(eps),
    }
}

/// Matrix of multiplication by ell^(d-k) from the degree-k to the
/// degree-d monomial basis, both in ascending-bitmask order.
pub fn lefschetz_power_matrix(
    p: &Presentation,
    ell: &RingElement,
    k: usize,
    d: usize,
) -> Result<Matrix, HodgeError> {
    let n = p.n();
    let pow = p.pow(ell, d - k)?;
    let rows = degree_basis(n, d);
    let cols = degree_basis(n, k);
    let mut m = Matrix::zeros(rows.len(), cols.len(), p.backend);
    for (ci, &src) in cols.iter().enumerate() {
        let img = p.mul(&pow, &RingElement::monomial(n, src, p.backend))?;
        for (ri, &dst) in rows.iter().enumerate() {
            if let Some(c) = img.coeff(dst) {
                m.set(ri, ci, c.clone());
            }
        }
    }
    Ok(m)
}

/// Verdict for a full-rank requirement: rational rank deficiency is a
/// failure, float rank deficiency only means the pivots fell below
/// tolerance.
fn rank_verdict(rank: usize, dim: usize, backend: Backend) -> Verdict {
    if rank == dim {
        Verdict::Pass
    } else if matches!(backend, Backend::Float { .. }) {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    }
}

/// Poincare duality: the degree pairing between complementary graded
/// pieces is nondegenerate.
pub fn verify_pd(p: &Presentation) -> Result<Vec<DegreeCheck>, HodgeError> {
    let n = p.n();
    let mut checks = Vec::new();
    for k in 0..=(n / 2) {
        let m = p.pairing_matrix(k)?;
        let dim = binomial(n, k);
        let rank = m.rank();
        checks.push(DegreeCheck {
            k,
            dim,
            detail: format!("pairing rank {rank} of {dim}"),
            verdict: rank_verdict(rank, dim, p.backend),
        });
    }
    Ok(checks)
}

/// Hard Lefschetz: ell^(n-2k) maps degree k isomorphically onto
/// degree n-k for every k up to the middle.
pub fn verify_hl(p: &Presentation, lv: &LefschetzVector) -> Result<Vec<DegreeCheck>, HodgeError> {
    let n = p.n();
    let ell = lv.element(n)?;
    let mut checks = Vec::new();
    for k in 0..=(n / 2) {
        let m = lefschetz_power_matrix(p, &ell, k, n - k)?;
        let dim = binomial(n, k);
        let rank = m.rank();
        checks.push(DegreeCheck {
            k,
            dim,
            detail: format!("ell^{} rank {rank} of {dim}", n - 2 * k),
            verdict: rank_verdict(rank, dim, p.backend),
        });
    }
    Ok(checks)
}

/// Basis of the primitive subspace P^k = ker(ell^(n-2k+1)) inside
/// degree k, as ring elements.
pub fn primitive_basis(
    p: &Presentation,
    ell: &RingElement,
    k: usize,
) -> Result<Vec<RingElement>, HodgeError> {
    let n = p.n();
    if 2 * k > n {
        return Err(HodgeError::DegreeOutOfRange { k, n });
    }
    let basis = degree_basis(n, k);
    let target = n - k + 1;
    if target > n {
        // k = 0: the power already lands above the top degree, so
        // everything is primitive.
        return Ok(basis
            .iter()
            .map(|&m| RingElement::monomial(n, m, p.backend))
            .collect());
    }
    let m = lefschetz_power_matrix(p, ell, k, target)?;
    let mut out = Vec::new();
    for v in m.kernel_basis() {
        let mut e = RingElement::zero(n);
        for (ci, c) in v.iter().enumerate() {
            e.add_term(basis[ci], c)?;
        }
        out.push(e);
    }
    Ok(out)
}

/// Gram matrix of (a, b) -> deg(ell^power a b) on the given elements.
fn lefschetz_gram(
    p: &Presentation,
    ell: &RingElement,
    power: usize,
    elems: &[RingElement],
) -> Result<Matrix, HodgeError> {
    let pow = p.pow(ell, power)?;
    let mut m = Matrix::zeros(elems.len(), elems.len(), p.backend);
    for (i, a) in elems.iter().enumerate() {
        for (j, b) in elems.iter().enumerate().skip(i) {
            let prod = p.mul(&p.mul(a, b)?, &pow)?;
            let v = p.degree_map(&prod);
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    Ok(m)
}

/// Verdict for positive definiteness from an inertia count.
fn definite_verdict(sig: &Signature, dim: usize, backend: Backend) -> Verdict {
    if sig.n_pos == dim && sig.n_neg == 0 && sig.n_zero == 0 {
        Verdict::Pass
    } else if sig.n_neg > 0 {
        Verdict::Fail
    } else if matches!(backend, Backend::Float { .. }) {
        // Zero pivots on floats: below tolerance, cannot certify.
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    }
}

/// Hodge-Riemann: (-1)^k deg(ell^(n-2k) a b) is positive definite on
/// the primitive subspace in each degree k up to the middle.
pub fn verify_hr(p: &Presentation, lv: &LefschetzVector) -> Result<Vec<DegreeCheck>, HodgeError> {
    let n = p.n();
    let ell = lv.element(n)?;
    let mut checks = Vec::new();
    for k in 0..=(n / 2) {
        let prims = primitive_basis(p, &ell, k)?;
        let mut gram = lefschetz_gram(p, &ell, n - 2 * k, &prims)?;
        if k % 2 == 1 {
            let minus_one = Scalar::from_i64(-1, p.backend);
            for i in 0..gram.rows() {
                for j in 0..gram.cols() {
                    gram.set(i, j, gram.get(i, j).checked_mul(&minus_one)?);
                }
            }
        }
        let sig = gram.ldlt_signature()?;
        checks.push(DegreeCheck {
            k,
            dim: prims.len(),
            detail: format!("signature {sig} on primitive dim {}", prims.len()),
            verdict: definite_verdict(&sig, prims.len(), p.backend),
        });
    }
    Ok(checks)
}

/// Run the whole package for one Lefschetz vector.
pub fn verify_all(p: &Presentation, lv: &LefschetzVector) -> Result<HodgeReport, HodgeError> {
    let poincare = verify_pd(p)?;
    let hard_lefschetz = verify_hl(p, lv)?;
    let hodge_riemann = verify_hr(p, lv)?;
    let overall = poincare
        .iter()
        .chain(&hard_lefschetz)
        .chain(&hodge_riemann)
        .fold(Verdict::Pass, |acc, c| acc.and(c.verdict));
    Ok(HodgeReport {
        word: p.word.letters.clone(),
        backend: p.backend.name().to_string(),
        tolerance: backend_tolerance(p.backend),
        lefschetz: lv.render(),
        poincare,
        hard_lefschetz,
        hodge_riemann,
        overall,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AmpleStep {
    pub position: usize,
    pub halvings: u32,
    pub coefficient: String,
    pub accepted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmpleSearch {
    pub coefficients: Vec<String>,
    pub log: Vec<AmpleStep>,
    #[serde(skip)]
    pub vector: LefschetzVector,
}

/// Greedy search for an ample vector: c_1 = 1, and each subsequent
/// coefficient is halved from 1 until the whole package holds on the
/// corresponding prefix word. Fails with the position and budget when
/// the halving schedule is exhausted.
pub fn find_ample(w: &CoxeterWord, backend: Backend) -> Result<AmpleSearch, HodgeError> {
    let n = w.len();
    let mut coeffs: Vec<Scalar> = Vec::with_capacity(n);
    let mut log = Vec::new();
    for j in 1..=n {
        let prefix = w.prefix(j);
        let p = build_presentation(&prefix, backend)?;
        let budget = if j == 1 { 0 } else { AMPLE_MAX_HALVINGS };
        let mut accepted = false;
        for t in 0..=budget {
            let c = match backend {
                Backend::Rational => Scalar::rational(1, 1i64 << t),
                Backend::Float { eps } => Scalar::float_eps(2f64.powi(-(t as i32)), eps),
            };
            let mut trial = coeffs.clone();
            trial.push(c.clone());
            let lv = LefschetzVector::new(trial)?;
            let report = verify_all(&p, &lv)?;
            let ok = report.overall == Verdict::Pass;
            log.push(AmpleStep {
                position: j,
                halvings: t,
                coefficient: c.render(),
                accepted: ok,
            });
            if ok {
                coeffs = lv.coeffs;
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(HodgeError::SearchExhausted {
                position: j,
                halvings: budget,
            });
        }
    }
    let vector = LefschetzVector::new(coeffs)?;
    Ok(AmpleSearch {
        coefficients: vector.render(),
        log,
        vector,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferCheck {
    pub k: usize,
    pub full_signature: Signature,
    pub primitive_signature: Signature,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferReport {
    pub checks: Vec<TransferCheck>,
    pub pass: bool,
}

/// Signature transfer against the one-letter-shorter word: for each k
/// up to the middle, the inertia index of deg(ell^(n-2k) a b) on all
/// of degree k equals the index of the same form for the truncated
/// word and vector on its primitive subspace.
pub fn signature_transfer_check(
    w: &CoxeterWord,
    lv: &LefschetzVector,
    backend: Backend,
) -> Result<TransferReport, HodgeError> {
    let n = w.len();
    if lv.coeffs.len() != n || n == 0 {
        return Err(HodgeError::LengthMismatch {
            expected: n.max(1),
            got: lv.coeffs.len(),
        });
    }
    let p = build_presentation(w, backend)?;
    let ell = lv.element(n)?;
    let short = w.prefix(n - 1);
    let p_short = build_presentation(&short, backend)?;
    let lv_short = lv.truncate(n - 1);
    let ell_short = lv_short.element(n - 1)?;
    let mut checks = Vec::new();
    for k in 0..=(n / 2) {
        let full_basis: Vec<RingElement> = degree_basis(n, k)
            .iter()
            .map(|&m| RingElement::monomial(n, m, backend))
            .collect();
        let full_gram = lefschetz_gram(&p, &ell, n - 2 * k, &full_basis)?;
        let full_signature = full_gram.ldlt_signature()?;
        let primitive_signature = if 2 * k > n - 1 {
            // Middle degree of an even-length word: the shorter word
            // has no primitive part there.
            Signature {
                n_pos: 0,
                n_neg: 0,
                n_zero: 0,
            }
        } else {
            let prims = primitive_basis(&p_short, &ell_short, k)?;
            let gram = lefschetz_gram(&p_short, &ell_short, (n - 1) - 2 * k, &prims)?;
            gram.ldlt_signature()?
        };
        let pass = full_signature.index() == primitive_signature.index();
        checks.push(TransferCheck {
            k,
            full_signature,
            primitive_signature,
            pass,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(TransferReport { checks, pass })
}
