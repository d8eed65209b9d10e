//! The presentation-based Bott-Samelson ring: relation tables, normal
//! forms, multiplication, degree map, Poincare pairing and the
//! combinatorial-invariance check.
//!
//! Basis elements are square-free monomials indexed by subset bitmasks
//! (bit i = variable x_{i+1}); within each degree the canonical order
//! is ascending bitmask value. The practical cap is n <= 16.

use crate::coxeter::{CoxeterWord, Order};
use crate::demazure::{q_matrix, DemazureError, QMatrix};
use crate::numeric::{Backend, Matrix, NumericError, Scalar};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum BsringError {
    #[error("word length {0} exceeds the subset-bitmask cap of 16")]
    WordTooLong(usize),
    #[error("ring elements over different word lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("degree {k} out of range 0..={n}")]
    DegreeOutOfRange { k: usize, n: usize },
    #[error(transparent)]
    Demazure(#[from] DemazureError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Sparse quadratic coefficient table keyed by variable pairs (i, j)
/// with i <= j, both 0-based.
pub type CoeffTable = BTreeMap<(usize, usize), Scalar>;

/// Relation tables of a word: the raw relations
/// `x_m^2 - sum c^m_{i,j} x_i x_j` (diagonal terms allowed) and the
/// square-free reduced relations `x_k^2 - sum d^k_{i,j} x_i x_j`.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub word: CoxeterWord,
    pub backend: Backend,
    pub q: QMatrix,
    pub raw: Vec<CoeffTable>,
    pub reduced: Vec<CoeffTable>,
}

/// Finitely supported combination of square-free monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct RingElement {
    pub n: usize,
    pub terms: BTreeMap<u32, Scalar>,
}

impl RingElement {
    pub fn zero(n: usize) -> Self {
        RingElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(n: usize, backend: Backend) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(0u32, Scalar::one(backend));
        RingElement { n, terms }
    }

    /// The basis monomial x^I for a subset bitmask.
    pub fn monomial(n: usize, mask: u32, backend: Backend) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(mask, Scalar::one(backend));
        RingElement { n, terms }
    }

    pub fn generator(n: usize, i: usize, backend: Backend) -> Self {
        RingElement::monomial(n, 1u32 << i, backend)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    pub fn coeff(&self, mask: u32) -> Option<&Scalar> {
        self.terms.get(&mask)
    }

    pub fn add_term(&mut self, mask: u32, c: &Scalar) -> Result<(), NumericError> {
        match self.terms.get(&mask) {
            Some(existing) => {
                let v = existing.checked_add(c)?;
                if v.is_zero() {
                    self.terms.remove(&mask);
                } else {
                    self.terms.insert(mask, v);
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(mask, c.clone());
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement, BsringError> {
        if self.n != other.n {
            return Err(BsringError::LengthMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Scalar) -> Result<RingElement, NumericError> {
        let mut out = RingElement::zero(self.n);
        for (&m, c) in &self.terms {
            out.add_term(m, &c.checked_mul(k)?)?;
        }
        Ok(out)
    }

    /// Component of homogeneous degree d.
    pub fn graded_piece(&self, d: usize) -> RingElement {
        let mut out = RingElement::zero(self.n);
        for (&m, c) in &self.terms {
            if m.count_ones() as usize == d {
                out.terms.insert(m, c.clone());
            }
        }
        out
    }

    /// Coefficientwise agreement: exact for rationals, within the zero
    /// tolerance for floats.
    pub fn approx_eq(&self, other: &RingElement) -> bool {
        if self.n != other.n {
            return false;
        }
        let masks: std::collections::BTreeSet<u32> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .collect();
        for m in masks {
            let backend = self
                .terms
                .values()
                .chain(other.terms.values())
                .next()
                .map(|s| s.backend())
                .unwrap_or(crate::numeric::Backend::Rational);
            let zero = Scalar::zero(backend);
            let a = self.terms.get(&m).unwrap_or(&zero);
            let b = other.terms.get(&m).unwrap_or(&zero);
            if !a.approx_eq(b) {
                return false;
            }
        }
        true
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (&m, c) in &self.terms {
            let vars: String = (0..self.n)
                .filter(|i| m & (1 << i) != 0)
                .map(|i| format!("x{}", i + 1))
                .collect();
            let vars = if vars.is_empty() { "1".to_string() } else { vars };
            parts.push(format!("{} {}", c.render(), vars));
        }
        parts.join(" + ")
    }
}

/// Ascending-bitmask basis of the degree-k piece.
pub fn degree_basis(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1u32 << n))
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}

impl Presentation {
    pub fn n(&self) -> usize {
        self.word.len()
    }

    /// Reduced relation rendered in relation notation, 1-based
    /// variables, e.g. `x4^2 - 3/8 x1x2 + 3/8 x1x3 + 3/4 x2x3`.
    pub fn relation_string(&self, k: usize, reduced: bool) -> String {
        let table = if reduced { &self.reduced[k] } else { &self.raw[k] };
        let mut s = format!("x{}^2", k + 1);
        for (&(i, j), d) in table {
            // Relation term is -d x_i x_j.
            let coeff = d.neg();
            let vars = if i == j {
                format!("x{}^2", i + 1)
            } else {
                format!("x{}x{}", i + 1, j + 1)
            };
            let mag = coeff.abs();
            let mag_str = if mag.approx_eq(&Scalar::one(self.backend)) {
                String::new()
            } else {
                format!("{} ", mag.render())
            };
            if coeff.is_negative() {
                s.push_str(&format!(" - {}{}", mag_str, vars));
            } else {
                s.push_str(&format!(" + {}{}", mag_str, vars));
            }
        }
        s
    }

    /// Rewrite an arbitrary exponent vector to its normal form on the
    /// square-free basis: the rightmost square x_k^2 is replaced by
    /// `sum d^k_{i,j} x_i x_j` until no squares remain.
    pub fn normal_form(&self, exponents: &[u8]) -> Result<RingElement, BsringError> {
        let n = self.n();
        if exponents.len() != n {
            return Err(BsringError::LengthMismatch(exponents.len(), n));
        }
        let mut out = RingElement::zero(n);
        let mut work: Vec<(Vec<u8>, Scalar)> =
            vec![(exponents.to_vec(), Scalar::one(self.backend))];
        while let Some((e, coeff)) = work.pop() {
            if coeff.is_zero() {
                continue;
            }
            let total: u32 = e.iter().map(|&x| x as u32).sum();
            if total as usize > n {
                // Monomials of degree > n rewrite to zero; the square-free
                // basis has no room for them.
                continue;
            }
            let square = (0..n).rev().find(|&k| e[k] >= 2);
            match square {
                None => {
                    let mut mask = 0u32;
                    for (k, &x) in e.iter().enumerate() {
                        if x == 1 {
                            mask |= 1 << k;
                        }
                    }
                    out.add_term(mask, &coeff)?;
                }
                Some(k) => {
                    for (&(i, j), d) in &self.reduced[k] {
                        let mut e2 = e.clone();
                        e2[k] -= 2;
                        e2[i] += 1;
                        e2[j] += 1;
                        work.push((e2, coeff.checked_mul(d)?));
                    }
                    // Empty table (k = 0 or all coefficients zero): the
                    // square term vanishes outright.
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement, BsringError> {
        let n = self.n();
        if a.n != n || b.n != n {
            return Err(BsringError::LengthMismatch(a.n.max(b.n), n));
        }
        let mut out = RingElement::zero(n);
        for (&ma, ca) in &a.terms {
            for (&mb, cb) in &b.terms {
                let c = ca.checked_mul(cb)?;
                if ma & mb == 0 {
                    // Disjoint supports multiply freely.
                    out.add_term(ma | mb, &c)?;
                    continue;
                }
                let e: Vec<u8> = (0..n)
                    .map(|k| ((ma >> k) & 1) as u8 + ((mb >> k) & 1) as u8)
                    .collect();
                let nf = self.normal_form(&e)?;
                for (&m, cc) in &nf.terms {
                    out.add_term(m, &cc.checked_mul(&c)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, a: &RingElement, t: usize) -> Result<RingElement, BsringError> {
        let mut out = RingElement::unit(self.n(), self.backend);
        for _ in 0..t {
            out = self.mul(&out, a)?;
        }
        Ok(out)
    }

    /// Coefficient of the top monomial x_1 x_2 ... x_n.
    pub fn degree_map(&self, a: &RingElement) -> Scalar {
        let full: u32 = if self.n() == 0 {
            0
        } else {
            (1u32 << self.n()) - 1
        };
        a.coeff(full)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.backend))
    }

    /// Gram matrix of (a, b) -> deg(ab) between the degree-k and
    /// degree-(n-k) bases, both in ascending-bitmask order.
    pub fn pairing_matrix(&self, k: usize) -> Result<Matrix, BsringError> {
        let n = self.n();
        if k > n {
            return Err(BsringError::DegreeOutOfRange { k, n });
        }
        let rows = degree_basis(n, k);
        let cols = degree_basis(n, n - k);
        let mut m = Matrix::zeros(rows.len(), cols.len(), self.backend);
        for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                let prod = self.mul(
                    &RingElement::monomial(n, i, self.backend),
                    &RingElement::monomial(n, j, self.backend),
                )?;
                m.set(ri, ci, self.degree_map(&prod));
            }
        }
        Ok(m)
    }

    /// Dimensions of the graded pieces: the square-free monomial counts.
    pub fn hilbert_vector(&self) -> Vec<usize> {
        let n = self.n();
        (0..=n).map(|k| degree_basis(n, k).len()).collect()
    }

    /// Serializable summary of the presentation.
    pub fn report(&self) -> PresentationReport {
        let n = self.n();
        PresentationReport {
            n,
            backend: self.backend.name().to_string(),
            q_matrix: self.q.q.to_render_rows(),
            raw_relations: (0..n).map(|k| self.relation_string(k, false)).collect(),
            reduced_relations: (0..n).map(|k| self.relation_string(k, true)).collect(),
            word_m_matrix: self
                .word
                .word_m_matrix()
                .iter()
                .map(|row| row.iter().map(|o| o.to_string()).collect())
                .collect(),
            hilbert_vector: self.hilbert_vector(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PresentationReport {
    pub n: usize,
    pub backend: String,
    pub q_matrix: Vec<Vec<String>>,
    pub raw_relations: Vec<String>,
    pub reduced_relations: Vec<String>,
    pub word_m_matrix: Vec<Vec<String>>,
    pub hilbert_vector: Vec<usize>,
}

/// Build the relation tables of a word: the Q matrix, the raw tables
/// `c^m_{i,j} = (2 - delta_ij) q_im q_jm`, and the reduced tables
/// obtained by eliminating earlier squares.
pub fn build_presentation(w: &CoxeterWord, backend: Backend) -> Result<Presentation, BsringError> {
    let n = w.len();
    if n > 16 {
        return Err(BsringError::WordTooLong(n));
    }
    let q = q_matrix(w, backend)?;
    let two = Scalar::from_i64(2, backend);
    let mut raw: Vec<CoeffTable> = Vec::with_capacity(n);
    for m in 0..n {
        let mut table = CoeffTable::new();
        for i in 0..m {
            for j in i..m {
                let mut c = q.entry(i, m).checked_mul(q.entry(j, m))?;
                if i != j {
                    c = c.checked_mul(&two)?;
                }
                if !c.is_zero() {
                    table.insert((i, j), c);
                }
            }
        }
        raw.push(table);
    }
    // Eliminate diagonal (square) terms from the largest index down,
    // substituting the already-reduced earlier relations. Reduced
    // tables have no diagonal entries, so one sweep suffices.
    let mut reduced: Vec<CoeffTable> = Vec::with_capacity(n);
    for m in 0..n {
        let mut table = raw[m].clone();
        for i in (0..m).rev() {
            if let Some(c) = table.remove(&(i, i)) {
                let lower = reduced[i].clone();
                for ((a, b), d) in lower {
                    let add = c.checked_mul(&d)?;
                    match table.get(&(a, b)) {
                        Some(existing) => {
                            let v = existing.checked_add(&add)?;
                            if v.is_zero() {
                                table.remove(&(a, b));
                            } else {
                                table.insert((a, b), v);
                            }
                        }
                        None => {
                            if !add.is_zero() {
                                table.insert((a, b), add);
                            }
                        }
                    }
                }
            }
        }
        reduced.push(table);
    }
    Ok(Presentation {
        word: w.clone(),
        backend,
        q,
        raw,
        reduced,
    })
}

/// Outcome of the constructive combinatorial-invariance check.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceVerdict {
    pub m_matrices_equal: bool,
    pub mismatch_positions: Vec<(usize, usize)>,
    /// Set only when the M matrices agree: whether the coefficient
    /// tables came out identical.
    pub presentations_equal: Option<bool>,
}

/// If the positional order matrices of the two words agree, their
/// presentations must be identical coefficient tables; report mismatch
/// positions otherwise.
pub fn invariance_check(
    w1: &CoxeterWord,
    w2: &CoxeterWord,
    backend: Backend,
) -> Result<InvarianceVerdict, BsringError> {
    if w1.len() != w2.len() {
        return Err(BsringError::LengthMismatch(w1.len(), w2.len()));
    }
    let m1 = w1.word_m_matrix();
    let m2 = w2.word_m_matrix();
    let mut mismatches = Vec::new();
    for i in 0..w1.len() {
        for j in 0..w1.len() {
            if m1[i][j] != m2[i][j] {
                mismatches.push((i, j));
            }
        }
    }
    if !mismatches.is_empty() {
        return Ok(InvarianceVerdict {
            m_matrices_equal: false,
            mismatch_positions: mismatches,
            presentations_equal: None,
        });
    }
    let p1 = build_presentation(w1, backend)?;
    let p2 = build_presentation(w2, backend)?;
    let equal = p1.raw == p2.raw && p1.reduced == p2.reduced;
    Ok(InvarianceVerdict {
        m_matrices_equal: true,
        mismatch_positions: Vec::new(),
        presentations_equal: Some(equal),
    })
}

/// Positional order matrix rendered for reports.
pub fn word_m_matrix_strings(w: &CoxeterWord) -> Vec<Vec<String>> {
    w.word_m_matrix()
        .iter()
        .map(|row| row.iter().map(Order::to_string).collect())
        .collect()
}
