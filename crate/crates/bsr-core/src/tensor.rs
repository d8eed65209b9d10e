//! Independent multiplication oracle built on the iterated
//! tensor-product model. Products of square-free basis monomials are
//! reduced by wall-crossing: a squared slot is rewritten through the
//! expansion of a single simple root carried leftward across the
//! walls, where each wall splits the carried degree-1 form into its
//! invariant part (which keeps moving) and a scalar that deposits one
//! root at the wall. Nothing here touches the Q matrix or the
//! presentation tables.

use crate::coxeter::{CoxeterError, CoxeterWord, LinearForm};
use crate::demazure::{demazure_apply, project};
use crate::numeric::{Backend, NumericError, Scalar};
use std::collections::BTreeMap;

/// Cap for the exhaustive structure-constant table (2^n basis).
pub const ORACLE_TABLE_MAX_LEN: usize = 10;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum TensorError {
    #[error("subset mask {mask:#b} out of range for word length {n}")]
    MaskOutOfRange { mask: u32, n: usize },
    #[error("word length {0} exceeds the structure-constant cap {ORACLE_TABLE_MAX_LEN}")]
    TableCapExceeded(usize),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Element of the tensor model on the square-free exponent basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorElement {
    pub n: usize,
    pub terms: BTreeMap<u32, Scalar>,
}

impl TensorElement {
    pub fn zero(n: usize) -> Self {
        TensorElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.is_zero())
    }

    fn add_term(&mut self, mask: u32, c: &Scalar) -> Result<(), NumericError> {
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

    /// Coefficientwise agreement with a presentation-side element.
    pub fn matches(&self, other: &crate::bsring::RingElement) -> bool {
        if self.n != other.n {
            return false;
        }
        let masks: std::collections::BTreeSet<u32> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .collect();
        let backend = self
            .terms
            .values()
            .chain(other.terms.values())
            .next()
            .map(|s| s.backend())
            .unwrap_or(Backend::Rational);
        let zero = Scalar::zero(backend);
        masks.iter().all(|m| {
            let a = self.terms.get(m).unwrap_or(&zero);
            let b = other.terms.get(m).unwrap_or(&zero);
            a.approx_eq(b)
        })
    }
}

/// Expansion of a single simple root of the letter at position `m`,
/// carried leftward from wall m-1: the coefficient on x_l is the
/// scalar that crossed walls m-1..l+1 invariantly and then deposited
/// at wall l. A form that survives past the leftmost wall has positive
/// degree and dies against the ground field.
fn carry_expansion(
    w: &CoxeterWord,
    m: usize,
    backend: Backend,
) -> Result<Vec<(usize, Scalar)>, TensorError> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, LinearForm, Scalar)> = Vec::new();
    if m > 0 {
        stack.push((
            m - 1,
            LinearForm::simple_root(w.letters[m], backend),
            Scalar::one(backend),
        ));
    }
    while let Some((j, f, coeff)) = stack.pop() {
        let s = w.letters[j];
        // Anti-invariant branch: a scalar crosses, one root stays at j.
        let half_d = demazure_apply(s, &f, &w.matrix)?
            .checked_div(&Scalar::from_i64(2, backend))?;
        let deposited = coeff.checked_mul(&half_d)?;
        if !deposited.is_zero() {
            out.push((j, deposited));
        }
        // Invariant branch keeps moving left.
        let inv = project(s, &f, &w.matrix)?;
        if !inv.is_zero() && j > 0 {
            stack.push((j - 1, inv, coeff));
        }
    }
    Ok(out)
}

/// Normal form of x^I * x^J in the tensor model.
///
/// Starting from the exponent vector 1_I + 1_J, the rightmost slot
/// with exponent >= 2 sheds a square: the squared root equals the
/// square of its carried expansion, so the term branches over ordered
/// pairs of deposit positions, both strictly to the left. The measure
/// sum_i e_i 4^i strictly decreases, so the reduction terminates.
pub fn oracle_mul_basis(
    w: &CoxeterWord,
    i_mask: u32,
    j_mask: u32,
    backend: Backend,
) -> Result<TensorElement, TensorError> {
    let n = w.len();
    let limit = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    for mask in [i_mask, j_mask] {
        if n < 32 && mask > limit {
            return Err(TensorError::MaskOutOfRange { mask, n });
        }
    }
    let mut expansions: Vec<Option<Vec<(usize, Scalar)>>> = vec![None; n];
    let mut out = TensorElement::zero(n);
    let start: Vec<u8> = (0..n)
        .map(|k| ((i_mask >> k) & 1) as u8 + ((j_mask >> k) & 1) as u8)
        .collect();
    let mut work: Vec<(Vec<u8>, Scalar)> = vec![(start, Scalar::one(backend))];
    while let Some((e, coeff)) = work.pop() {
        if coeff.is_zero() {
            continue;
        }
        match (0..n).rev().find(|&k| e[k] >= 2) {
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
                if expansions[k].is_none() {
                    expansions[k] = Some(carry_expansion(w, k, backend)?);
                }
                let exp = expansions[k].as_ref().unwrap();
                for (l1, c1) in exp {
                    for (l2, c2) in exp {
                        let mut e2 = e.clone();
                        e2[k] -= 2;
                        e2[*l1] += 1;
                        e2[*l2] += 1;
                        let c = coeff.checked_mul(c1)?.checked_mul(c2)?;
                        work.push((e2, c));
                    }
                }
                // Empty expansion (k = 0, or every deposit scalar
                // vanished): the squared slot annihilates the term.
            }
        }
    }
    Ok(out)
}

/// Full multiplication table of the tensor model on the 2^n basis.
pub fn oracle_structure_constants(
    w: &CoxeterWord,
    backend: Backend,
) -> Result<BTreeMap<(u32, u32), TensorElement>, TensorError> {
    let n = w.len();
    if n > ORACLE_TABLE_MAX_LEN {
        return Err(TensorError::TableCapExceeded(n));
    }
    let mut table = BTreeMap::new();
    for i in 0..(1u32 << n) {
        for j in 0..(1u32 << n) {
            table.insert((i, j), oracle_mul_basis(w, i, j, backend)?);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{CoxeterMatrix, CoxeterWord, Order};

    const B: Backend = Backend::Rational;

    fn s3_word(letters: &[usize]) -> CoxeterWord {
        let cm = CoxeterMatrix::uniform(2, Order::Finite(3)).unwrap();
        CoxeterWord::new(cm, letters.to_vec()).unwrap()
    }

    fn rat(n: i64, d: i64) -> Scalar {
        Scalar::rational(n, d)
    }

    #[test]
    fn first_generator_squares_to_zero() {
        for letters in [&[0usize][..], &[0, 1], &[0, 1, 0, 1]] {
            let w = s3_word(letters);
            let sq = oracle_mul_basis(&w, 1, 1, B).unwrap();
            assert!(sq.is_zero(), "letters {letters:?}");
        }
    }

    #[test]
    fn disjoint_supports_multiply_freely() {
        let w = s3_word(&[0, 1]);
        let prod = oracle_mul_basis(&w, 0b01, 0b10, B).unwrap();
        assert_eq!(prod.terms, BTreeMap::from([(0b11, rat(1, 1))]));
    }

    #[test]
    fn length_two_square_vanishes() {
        // BS(s1, s2) is R[x1,x2]/(x1^2, x2^2): x2^2 must reduce to 0,
        // through a genuine wall crossing (both deposits land on slot 1
        // and the resulting square dies at the leftmost wall).
        let w = s3_word(&[0, 1]);
        let sq = oracle_mul_basis(&w, 0b10, 0b10, B).unwrap();
        assert!(sq.is_zero());
    }

    #[test]
    fn example_x3_squared() {
        // w = (s1, s2, s1) with m = 3: x3^2 = -(3/4) x1 x2.
        let w = s3_word(&[0, 1, 0]);
        let sq = oracle_mul_basis(&w, 0b100, 0b100, B).unwrap();
        assert_eq!(sq.terms, BTreeMap::from([(0b011, rat(-3, 4))]));
    }

    #[test]
    fn commuting_word_is_exterior_like() {
        let cm = CoxeterMatrix::uniform(3, Order::Finite(2)).unwrap();
        let w = CoxeterWord::new(cm, vec![0, 1, 2]).unwrap();
        let table = oracle_structure_constants(&w, B).unwrap();
        for (&(i, j), elem) in &table {
            if i & j == 0 {
                assert_eq!(elem.terms, BTreeMap::from([(i | j, rat(1, 1))]));
            } else {
                assert!(elem.is_zero());
            }
        }
    }

    #[test]
    fn single_letter_is_dual_numbers() {
        let w = s3_word(&[0]);
        let table = oracle_structure_constants(&w, B).unwrap();
        assert_eq!(table[&(0, 0)].terms, BTreeMap::from([(0, rat(1, 1))]));
        assert_eq!(table[&(0, 1)].terms, BTreeMap::from([(1, rat(1, 1))]));
        assert!(table[&(1, 1)].is_zero());
    }

    #[test]
    fn commutativity() {
        let w = s3_word(&[0, 1, 0, 1]);
        for i in 0..(1u32 << 4) {
            for j in 0..(1u32 << 4) {
                let a = oracle_mul_basis(&w, i, j, B).unwrap();
                let b = oracle_mul_basis(&w, j, i, B).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn mask_out_of_range_rejected() {
        let w = s3_word(&[0, 1]);
        assert!(matches!(
            oracle_mul_basis(&w, 0b100, 0, B),
            Err(TensorError::MaskOutOfRange { .. })
        ));
    }

    #[test]
    fn table_cap_guard() {
        let cm = CoxeterMatrix::uniform(2, Order::Finite(3)).unwrap();
        let w = CoxeterWord::new(cm, vec![0; 11]).unwrap();
        assert!(matches!(
            oracle_structure_constants(&w, B),
            Err(TensorError::TableCapExceeded(11))
        ));
    }
}
