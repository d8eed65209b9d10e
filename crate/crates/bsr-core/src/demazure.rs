//! Degree-1 Demazure and projection operators, the strictly upper
//! triangular cosine matrix of a word, and the two independent routes
//! to its relation coefficients: the matrix geometric series and the
//! explicit path-sum over increasing chains.
//!
//! All positions are 0-based: `l < m < n` index letters of the word.

use crate::coxeter::{cosine, reflect, CoxeterError, CoxeterMatrix, CoxeterWord, LinearForm};
use crate::numeric::{Backend, Matrix, NumericError, Scalar};

/// Path-sum enumeration is exponential in the gap; words longer than
/// this are rejected for that route (it is the small-scale oracle).
pub const PATHSUM_MAX_LEN: usize = 12;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum DemazureError {
    #[error("positions out of range: l={l}, m={m}, word length {n}")]
    PositionOutOfRange { l: usize, m: usize, n: usize },
    #[error("word length {0} exceeds the path-sum enumeration cap {PATHSUM_MAX_LEN}")]
    PathsumCapExceeded(usize),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// The Demazure constant of a pair of generators: the value of the
/// divided-difference operator for s on the simple root of t, which is
/// -2 cos(pi/m_st). In particular it is 2 when s = t.
pub fn demazure_const(
    s: usize,
    t: usize,
    cm: &CoxeterMatrix,
    backend: Backend,
) -> Result<Scalar, NumericError> {
    let c = cosine(cm.order(s, t), backend)?;
    Ok(c.checked_mul(&Scalar::from_i64(-2, backend))?)
}

/// The divided-difference operator of s applied to a degree <= 1 form,
/// extended linearly; constants map to 0 and the result is a constant.
pub fn demazure_apply(
    s: usize,
    f: &LinearForm,
    cm: &CoxeterMatrix,
) -> Result<Scalar, NumericError> {
    let backend = f.backend();
    let mut acc = Scalar::zero(backend);
    for (&t, c) in &f.coeffs {
        acc = acc.checked_add(&c.checked_mul(&demazure_const(s, t, cm, backend)?)?)?;
    }
    Ok(acc)
}

/// The s-invariant component (f + s(f))/2 of a degree <= 1 form.
/// Constants pass through unchanged.
pub fn project(s: usize, f: &LinearForm, cm: &CoxeterMatrix) -> Result<LinearForm, CoxeterError> {
    let backend = f.backend();
    let mut linear = f.clone();
    linear.constant = Scalar::zero(backend);
    let reflected = reflect(s, &linear, cm)?;
    let half = Scalar::rational_or_float(1, 2, backend);
    let mut out = linear.add(&reflected)?.scale(&half)?;
    out.constant = f.constant.clone();
    Ok(out)
}

/// The strictly upper-triangular cosine matrix of a word and its
/// geometric series, whose entries are the relation coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    pub n: usize,
    pub rtilde: Matrix,
    pub q: Matrix,
}

impl QMatrix {
    pub fn entry(&self, l: usize, m: usize) -> &Scalar {
        self.q.get(l, m)
    }

    /// |q_lm| <= 2^(m-1-l) for every l < m.
    pub fn satisfies_bound(&self) -> bool {
        for l in 0..self.n {
            for m in (l + 1)..self.n {
                let bound = 2f64.powi((m - 1 - l) as i32);
                let v = self.entry(l, m).to_f64().abs();
                if v > bound + 1e-9 {
                    return false;
                }
            }
        }
        true
    }
}

/// Build the cosine matrix of the word and accumulate its powers.
/// The matrix is nilpotent, so the series is finite; accumulation
/// stops as soon as a power vanishes.
pub fn q_matrix(w: &CoxeterWord, backend: Backend) -> Result<QMatrix, DemazureError> {
    let n = w.len();
    let mut rtilde = Matrix::zeros(n, n, backend);
    for i in 0..n {
        for j in (i + 1)..n {
            rtilde.set(i, j, cosine(w.letter_order(i, j), backend)?);
        }
    }
    let mut q = Matrix::zeros(n, n, backend);
    let mut power = rtilde.clone();
    for _ in 0..n {
        let vanished = (0..n).all(|i| (0..n).all(|j| power.get(i, j).is_zero()));
        if vanished {
            break;
        }
        q = q.add(&power)?;
        power = power.matmul(&rtilde)?;
    }
    Ok(QMatrix { n, rtilde, q })
}

/// The (l, m) relation coefficient by direct summation over all
/// increasing chains l = j_0 < j_1 < ... < j_{s+1} = m of products of
/// pairwise cosines. Independent of `q_matrix`.
pub fn q_entry_pathsum(
    w: &CoxeterWord,
    l: usize,
    m: usize,
    backend: Backend,
) -> Result<Scalar, DemazureError> {
    let n = w.len();
    if l >= m || m >= n {
        return Err(DemazureError::PositionOutOfRange { l, m, n });
    }
    if n > PATHSUM_MAX_LEN {
        return Err(DemazureError::PathsumCapExceeded(n));
    }
    // r values between positions of the word.
    let r = |i: usize, j: usize| cosine(w.letter_order(i, j), backend);
    // DFS over chain extensions; `acc` is the product of r along the
    // chain so far, ending at `cur`.
    fn walk(
        cur: usize,
        m: usize,
        acc: &Scalar,
        total: &mut Scalar,
        r: &dyn Fn(usize, usize) -> Result<Scalar, NumericError>,
    ) -> Result<(), NumericError> {
        for next in (cur + 1)..=m {
            let step = acc.checked_mul(&r(cur, next)?)?;
            if next == m {
                *total = total.checked_add(&step)?;
            } else {
                walk(next, m, &step, total, r)?;
            }
        }
        Ok(())
    }
    let mut total = Scalar::zero(backend);
    walk(l, m, &Scalar::one(backend), &mut total, &|i, j| r(i, j))?;
    Ok(total)
}

/// Compose projections over positions m-1 down to l+1 applied to the
/// simple root of the letter at position m. The result is a degree-1
/// form in global simple-root coordinates.
pub fn p_chain(
    w: &CoxeterWord,
    l: usize,
    m: usize,
    backend: Backend,
) -> Result<LinearForm, DemazureError> {
    let n = w.len();
    if l >= m || m >= n {
        return Err(DemazureError::PositionOutOfRange { l, m, n });
    }
    let mut f = LinearForm::simple_root(w.letters[m], backend);
    for j in (l + 1..m).rev() {
        f = project(w.letters[j], &f, &w.matrix)?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{CoxeterMatrix, Order};

    fn s3_word(letters: &[usize]) -> CoxeterWord {
        let cm = CoxeterMatrix::uniform(2, Order::Finite(3)).unwrap();
        CoxeterWord::new(cm, letters.to_vec()).unwrap()
    }

    const B: Backend = Backend::Rational;

    #[test]
    fn demazure_const_values() {
        let cm = CoxeterMatrix::uniform(2, Order::Finite(3)).unwrap();
        assert_eq!(demazure_const(0, 0, &cm, B).unwrap(), Scalar::int(2));
        assert_eq!(demazure_const(0, 1, &cm, B).unwrap(), Scalar::int(-1));
        let c2 = CoxeterMatrix::uniform(2, Order::Finite(2)).unwrap();
        assert_eq!(demazure_const(0, 1, &c2, B).unwrap(), Scalar::int(0));
    }

    #[test]
    fn project_examples() {
        let cm = CoxeterMatrix::uniform(2, Order::Finite(3)).unwrap();
        let alpha_s = LinearForm::simple_root(0, B);
        let alpha_t = LinearForm::simple_root(1, B);

        assert!(project(0, &alpha_s, &cm).unwrap().is_zero());

        let p = project(0, &alpha_t, &cm).unwrap();
        assert_eq!(p.coeff(1), Scalar::int(1));
        assert_eq!(p.coeff(0), Scalar::rational(1, 2));

        let c = LinearForm::constant(Scalar::rational(7, 3));
        assert_eq!(project(0, &c, &cm).unwrap(), c);
    }

    #[test]
    fn decomposition_identity() {
        // f = project(s, f) + (demazure(f)/2) alpha_s for degree-1 f.
        let cm = CoxeterMatrix::uniform(3, Order::Finite(3)).unwrap();
        let mut f = LinearForm::simple_root(1, B).scale(&Scalar::rational(5, 3)).unwrap();
        f = f
            .add(&LinearForm::simple_root(2, B).scale(&Scalar::rational(-1, 4)).unwrap())
            .unwrap();
        for s in 0..3 {
            let inv = project(s, &f, &cm).unwrap();
            let half_d = demazure_apply(s, &f, &cm)
                .unwrap()
                .checked_div(&Scalar::int(2))
                .unwrap();
            let anti = LinearForm::simple_root(s, B).scale(&half_d).unwrap();
            assert_eq!(inv.add(&anti).unwrap(), f);
        }
    }

    #[test]
    fn q_matrix_trivial_cases() {
        let w = s3_word(&[0]);
        let qm = q_matrix(&w, B).unwrap();
        assert!(qm.q.get(0, 0).is_zero());

        // All orders 2: no interaction, Q = 0.
        let cm = CoxeterMatrix::uniform(3, Order::Finite(2)).unwrap();
        let w = CoxeterWord::new(cm, vec![0, 1, 2]).unwrap();
        let qm = q_matrix(&w, B).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(qm.q.get(i, j).is_zero());
            }
        }
    }

    #[test]
    fn q_matrix_alternating_s3() {
        // w = (s1, s2, s1, s2) with m = 3: q_14 = -3/8, q_24 = -3/4,
        // q_34 = 1/2 in 1-based positions.
        let w = s3_word(&[0, 1, 0, 1]);
        let qm = q_matrix(&w, B).unwrap();
        assert_eq!(qm.entry(0, 3), &Scalar::rational(-3, 8));
        assert_eq!(qm.entry(1, 3), &Scalar::rational(-3, 4));
        assert_eq!(qm.entry(2, 3), &Scalar::rational(1, 2));
        assert!(qm.satisfies_bound());
    }

    #[test]
    fn pathsum_matches_qmatrix_on_alternating_word() {
        let w = s3_word(&[0, 1, 0, 1]);
        let qm = q_matrix(&w, B).unwrap();
        for l in 0..4 {
            for m in (l + 1)..4 {
                assert_eq!(&q_entry_pathsum(&w, l, m, B).unwrap(), qm.entry(l, m));
            }
        }
    }

    #[test]
    fn pathsum_adjacent_is_single_cosine() {
        let w = s3_word(&[0, 1, 0]);
        // l = m-1: single chain, value r_{m-1,m}.
        assert_eq!(
            q_entry_pathsum(&w, 1, 2, B).unwrap(),
            cosine(w.letter_order(1, 2), B).unwrap()
        );
    }

    #[test]
    fn pathsum_vanishes_without_chains() {
        let cm = CoxeterMatrix::uniform(3, Order::Finite(2)).unwrap();
        let w = CoxeterWord::new(cm, vec![0, 1, 2]).unwrap();
        assert!(q_entry_pathsum(&w, 0, 2, B).unwrap().is_zero());
    }

    #[test]
    fn pathsum_range_checks() {
        let w = s3_word(&[0, 1]);
        assert!(matches!(
            q_entry_pathsum(&w, 1, 1, B),
            Err(DemazureError::PositionOutOfRange { .. })
        ));
        assert!(matches!(
            q_entry_pathsum(&w, 0, 5, B),
            Err(DemazureError::PositionOutOfRange { .. })
        ));
    }

    #[test]
    fn p_chain_base_case() {
        // l = m-2: alpha_{s_m} + r_{m-1,m} alpha_{s_{m-1}}.
        let w = s3_word(&[0, 1, 0]);
        let f = p_chain(&w, 0, 2, B).unwrap();
        // Letters: position 2 is s1 (index 0), position 1 is s2 (index 1).
        // r_{23} = cos(pi/3) = 1/2.
        assert_eq!(f.coeff(0), Scalar::int(1));
        assert_eq!(f.coeff(1), Scalar::rational(1, 2));
    }

    #[test]
    fn p_chain_all_commuting_is_root_itself() {
        let cm = CoxeterMatrix::uniform(4, Order::Finite(2)).unwrap();
        let w = CoxeterWord::new(cm, vec![0, 1, 2, 3]).unwrap();
        let f = p_chain(&w, 0, 3, B).unwrap();
        assert_eq!(f, LinearForm::simple_root(3, B));
    }

    #[test]
    fn p_chain_alternating_word() {
        // w = (s1,s2,s1,s2), l=1, m=4 (1-based): the projected form
        // has position coefficients 1, 1/2, -3/4 on positions 4, 3, 2.
        // Positions 2 and 4 share the letter s2, so in global root
        // coordinates: alpha_{s2} (1 - 3/4) + alpha_{s1} (1/2).
        let w = s3_word(&[0, 1, 0, 1]);
        let f = p_chain(&w, 0, 3, B).unwrap();
        assert_eq!(f.coeff(1), Scalar::rational(1, 4));
        assert_eq!(f.coeff(0), Scalar::rational(1, 2));
    }

    #[test]
    fn p_chain_then_demazure_matches_pathsum() {
        // q_lm = -(1/2) d_{s_l}(p_chain(l, m)): the path-sum identity
        // replayed through the operators.
        let w = s3_word(&[0, 1, 0, 1]);
        for l in 0..3 {
            for m in (l + 1)..4 {
                let f = p_chain(&w, l, m, B).unwrap();
                let d = demazure_apply(w.letters[l], &f, &w.matrix).unwrap();
                let q = d
                    .checked_div(&Scalar::int(-2))
                    .unwrap();
                assert_eq!(q, q_entry_pathsum(&w, l, m, B).unwrap());
            }
        }
    }
}
