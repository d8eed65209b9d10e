//! Coxeter matrices, words, cosine values, and the geometric
//! representation with its invariant bilinear form.

use crate::numeric::{Backend, Matrix, NumericError, Scalar, Signature};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum CoxeterError {
    #[error("invalid order m = {0}; orders are positive integers or infinity")]
    InvalidOrder(String),
    #[error("coxeter matrix must have m_ss = 1 on the diagonal (generator {0})")]
    BadDiagonal(usize),
    #[error("coxeter matrix must be symmetric at ({0},{1})")]
    NotSymmetricAt(usize, usize),
    #[error("off-diagonal order must be >= 2 or infinity at ({0},{1})")]
    BadOffDiagonal(usize, usize),
    #[error("letter {letter} out of range for a system with {size} generators")]
    LetterOutOfRange { letter: usize, size: usize },
    #[error("linear form must have zero constant part to be reflected")]
    NonzeroConstant,
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Order of a product of two simple reflections: a positive integer or
/// infinity. Serialized as an integer or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(u32),
    Infinity,
}

impl Order {
    pub fn from_u32(m: u32) -> Result<Self, CoxeterError> {
        if m == 0 {
            return Err(CoxeterError::InvalidOrder("0".into()));
        }
        Ok(Order::Finite(m))
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(m) => write!(f, "{}", m),
            Order::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Finite(m) => s.serialize_u32(*m),
            Order::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(m) => Order::from_u32(m).map_err(D::Error::custom),
            Raw::Str(s) if s == "inf" => Ok(Order::Infinity),
            Raw::Str(s) => Err(D::Error::custom(format!("invalid order {s:?}"))),
        }
    }
}

/// cos(pi/m), with the convention cos(pi/inf) = 1.
///
/// The rational backend only covers m in {1, 2, 3, inf}, where the
/// cosine is -1, 0, 1/2 or 1.
pub fn cosine(m: Order, backend: Backend) -> Result<Scalar, NumericError> {
    match backend {
        Backend::Rational => match m {
            Order::Finite(1) => Ok(Scalar::int(-1)),
            Order::Finite(2) => Ok(Scalar::int(0)),
            Order::Finite(3) => Ok(Scalar::rational(1, 2)),
            Order::Infinity => Ok(Scalar::int(1)),
            Order::Finite(k) => Err(NumericError::RationalOrderUnsupported(k.to_string())),
        },
        Backend::Float { eps } => {
            let v = match m {
                Order::Infinity => 1.0,
                Order::Finite(k) => (std::f64::consts::PI / k as f64).cos(),
            };
            Ok(Scalar::float_eps(v, eps))
        }
    }
}

/// Symmetric table of pairwise orders m_st over a named generator set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxeterMatrix {
    size: usize,
    orders: Vec<Order>, // row-major size x size
}

impl CoxeterMatrix {
    pub fn new(size: usize, orders: Vec<Order>) -> Result<Self, CoxeterError> {
        if orders.len() != size * size {
            return Err(CoxeterError::InvalidOrder(format!(
                "expected {} entries, got {}",
                size * size,
                orders.len()
            )));
        }
        let cm = CoxeterMatrix { size, orders };
        for s in 0..size {
            if cm.order(s, s) != Order::Finite(1) {
                return Err(CoxeterError::BadDiagonal(s));
            }
            for t in (s + 1)..size {
                if cm.order(s, t) != cm.order(t, s) {
                    return Err(CoxeterError::NotSymmetricAt(s, t));
                }
                if cm.order(s, t) == Order::Finite(1) {
                    return Err(CoxeterError::BadOffDiagonal(s, t));
                }
            }
        }
        Ok(cm)
    }

    /// All pairwise orders equal to `m` off the diagonal.
    pub fn uniform(size: usize, m: Order) -> Result<Self, CoxeterError> {
        let mut orders = vec![m; size * size];
        for s in 0..size {
            orders[s * size + s] = Order::Finite(1);
        }
        CoxeterMatrix::new(size, orders)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn order(&self, s: usize, t: usize) -> Order {
        self.orders[s * self.size + t]
    }

    /// Gram matrix of the geometric representation:
    /// (alpha_s, alpha_t) = -cos(pi/m_st), diagonal 1.
    pub fn geometric_form(&self, backend: Backend) -> Result<Matrix, NumericError> {
        let mut m = Matrix::zeros(self.size, self.size, backend);
        for s in 0..self.size {
            for t in 0..self.size {
                let v = if s == t {
                    Scalar::one(backend)
                } else {
                    cosine(self.order(s, t), backend)?.neg()
                };
                m.set(s, t, v);
            }
        }
        Ok(m)
    }

    /// Finiteness of W is equivalent to positive definiteness of the
    /// geometric form. Returns the verdict together with the inertia.
    pub fn finiteness_hint(&self, backend: Backend) -> Result<(bool, Signature), CoxeterError> {
        let form = self.geometric_form(backend)?;
        let sig = form.ldlt_signature()?;
        Ok((sig.n_pos == self.size, sig))
    }
}

/// A word in a Coxeter system: the matrix plus a sequence of generator
/// indices. Repeated letters are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxeterWord {
    pub matrix: CoxeterMatrix,
    pub letters: Vec<usize>,
}

impl CoxeterWord {
    pub fn new(matrix: CoxeterMatrix, letters: Vec<usize>) -> Result<Self, CoxeterError> {
        for &l in &letters {
            if l >= matrix.size() {
                return Err(CoxeterError::LetterOutOfRange {
                    letter: l,
                    size: matrix.size(),
                });
            }
        }
        Ok(CoxeterWord { matrix, letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Pairwise order of the letters at positions i and j (0-based).
    /// Equal letters give m = 1.
    pub fn letter_order(&self, i: usize, j: usize) -> Order {
        self.matrix.order(self.letters[i], self.letters[j])
    }

    /// The word restricted to its first k letters, in the same system.
    pub fn prefix(&self, k: usize) -> CoxeterWord {
        CoxeterWord {
            matrix: self.matrix.clone(),
            letters: self.letters[..k].to_vec(),
        }
    }

    /// Positional order matrix M_w = (m_{s_i s_j}), diagonal 1.
    pub fn word_m_matrix(&self) -> Vec<Vec<Order>> {
        let n = self.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.letter_order(i, j)).collect())
            .collect()
    }
}

/// Degree <= 1 element of the symmetric algebra: a constant plus a
/// finitely supported combination of simple roots.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub constant: Scalar,
    pub coeffs: BTreeMap<usize, Scalar>,
}

impl LinearForm {
    pub fn zero(backend: Backend) -> Self {
        LinearForm {
            constant: Scalar::zero(backend),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar) -> Self {
        LinearForm {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    /// The simple root alpha_s.
    pub fn simple_root(s: usize, backend: Backend) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(s, Scalar::one(backend));
        LinearForm {
            constant: Scalar::zero(backend),
            coeffs,
        }
    }

    pub fn backend(&self) -> Backend {
        self.constant.backend()
    }

    pub fn coeff(&self, s: usize) -> Scalar {
        self.coeffs
            .get(&s)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.backend()))
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.values().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &LinearForm) -> Result<LinearForm, NumericError> {
        let mut out = self.clone();
        out.constant = out.constant.checked_add(&other.constant)?;
        for (&s, c) in &other.coeffs {
            let v = out.coeff(s).checked_add(c)?;
            out.coeffs.insert(s, v);
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, k: &Scalar) -> Result<LinearForm, NumericError> {
        let mut out = LinearForm {
            constant: self.constant.checked_mul(k)?,
            coeffs: BTreeMap::new(),
        };
        for (&s, c) in &self.coeffs {
            out.coeffs.insert(s, c.checked_mul(k)?);
        }
        out.prune();
        Ok(out)
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| !c.is_zero());
    }

    /// Pairing of the degree-1 part with alpha_s under the geometric
    /// form: (lambda, alpha_s) = lambda_s - sum_t lambda_t cos(pi/m_ts).
    fn pair_with_root(
        &self,
        s: usize,
        cm: &CoxeterMatrix,
    ) -> Result<Scalar, CoxeterError> {
        let backend = self.backend();
        let mut acc = Scalar::zero(backend);
        for (&t, c) in &self.coeffs {
            let g = if t == s {
                Scalar::one(backend)
            } else {
                cosine(cm.order(t, s), backend)?.neg()
            };
            acc = acc.checked_add(&c.checked_mul(&g)?)?;
        }
        Ok(acc)
    }
}

/// s(lambda) = lambda - 2 (lambda, alpha_s) alpha_s. Only defined on
/// forms with zero constant part.
pub fn reflect(s: usize, lambda: &LinearForm, cm: &CoxeterMatrix) -> Result<LinearForm, CoxeterError> {
    if !lambda.constant.is_zero() {
        return Err(CoxeterError::NonzeroConstant);
    }
    let backend = lambda.backend();
    let pairing = lambda.pair_with_root(s, cm)?;
    let two = Scalar::from_i64(2, backend);
    let correction =
        LinearForm::simple_root(s, backend).scale(&two.checked_mul(&pairing)?.neg())?;
    Ok(lambda.add(&correction)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dihedral(m: Order) -> CoxeterMatrix {
        CoxeterMatrix::uniform(2, m).unwrap()
    }

    #[test]
    fn cosine_values() {
        let b = Backend::Rational;
        assert_eq!(cosine(Order::Finite(2), b).unwrap(), Scalar::int(0));
        assert_eq!(cosine(Order::Infinity, b).unwrap(), Scalar::int(1));
        assert_eq!(cosine(Order::Finite(1), b).unwrap(), Scalar::int(-1));
        assert_eq!(
            cosine(Order::Finite(3), b).unwrap(),
            Scalar::rational(1, 2)
        );
        assert!(cosine(Order::Finite(5), b).is_err());

        let f = Backend::float();
        let c5 = cosine(Order::Finite(5), f).unwrap().to_f64();
        assert!((c5 - (std::f64::consts::PI / 5.0).cos()).abs() < 1e-15);
    }

    #[test]
    fn order_zero_rejected() {
        assert!(Order::from_u32(0).is_err());
    }

    #[test]
    fn geometric_form_examples() {
        let rank1 = CoxeterMatrix::uniform(1, Order::Finite(2)).unwrap();
        let g = rank1.geometric_form(Backend::Rational).unwrap();
        assert_eq!(g.get(0, 0), &Scalar::int(1));

        let a2 = dihedral(Order::Finite(3));
        let g = a2.geometric_form(Backend::Rational).unwrap();
        assert_eq!(g.get(0, 1), &Scalar::rational(-1, 2));
        assert_eq!(g.get(1, 0), &Scalar::rational(-1, 2));

        let inf = dihedral(Order::Infinity);
        let g = inf.geometric_form(Backend::Rational).unwrap();
        assert_eq!(g.get(0, 1), &Scalar::int(-1));
    }

    #[test]
    fn finiteness_hints() {
        let single = CoxeterMatrix::uniform(1, Order::Finite(2)).unwrap();
        assert!(single.finiteness_hint(Backend::Rational).unwrap().0);

        let a2 = dihedral(Order::Finite(3));
        assert!(a2.finiteness_hint(Backend::Rational).unwrap().0);

        let inf = dihedral(Order::Infinity);
        let (finite, sig) = inf.finiteness_hint(Backend::Rational).unwrap();
        assert!(!finite);
        // Kernel contains alpha_s + alpha_t.
        assert_eq!(sig.n_zero, 1);
    }

    #[test]
    fn reflect_examples() {
        let b = Backend::Rational;
        let a2 = dihedral(Order::Finite(3));
        let alpha_s = LinearForm::simple_root(0, b);
        let alpha_t = LinearForm::simple_root(1, b);

        let r = reflect(0, &alpha_s, &a2).unwrap();
        assert_eq!(r.coeff(0), Scalar::int(-1));

        // m = 3: s(alpha_t) = alpha_t + alpha_s.
        let r = reflect(0, &alpha_t, &a2).unwrap();
        assert_eq!(r.coeff(0), Scalar::int(1));
        assert_eq!(r.coeff(1), Scalar::int(1));

        // m = 2: orthogonal roots are fixed.
        let c2 = dihedral(Order::Finite(2));
        let r = reflect(0, &alpha_t, &c2).unwrap();
        assert_eq!(r, alpha_t);
    }

    #[test]
    fn reflect_rejects_constant() {
        let a2 = dihedral(Order::Finite(3));
        let f = LinearForm::constant(Scalar::int(1));
        assert!(matches!(
            reflect(0, &f, &a2),
            Err(CoxeterError::NonzeroConstant)
        ));
    }

    #[test]
    fn reflect_is_involutive_and_isometric() {
        // Sampled over a few systems and forms; the proptest version
        // lives in tests/properties.rs.
        let b = Backend::Rational;
        for m in [Order::Finite(2), Order::Finite(3), Order::Infinity] {
            let cm = dihedral(m);
            let mut lambda = LinearForm::simple_root(0, b)
                .scale(&Scalar::rational(3, 2))
                .unwrap();
            lambda = lambda
                .add(&LinearForm::simple_root(1, b).scale(&Scalar::rational(-2, 5)).unwrap())
                .unwrap();
            for s in 0..2 {
                let twice = reflect(s, &reflect(s, &lambda, &cm).unwrap(), &cm).unwrap();
                assert_eq!(twice, lambda);
            }
        }
    }

    #[test]
    fn invalid_matrices_rejected() {
        // Diagonal must be 1.
        let bad = CoxeterMatrix::new(
            2,
            vec![
                Order::Finite(2),
                Order::Finite(3),
                Order::Finite(3),
                Order::Finite(1),
            ],
        );
        assert!(matches!(bad, Err(CoxeterError::BadDiagonal(0))));

        // Off-diagonal must not be 1.
        let bad = CoxeterMatrix::new(
            2,
            vec![
                Order::Finite(1),
                Order::Finite(1),
                Order::Finite(1),
                Order::Finite(1),
            ],
        );
        assert!(matches!(bad, Err(CoxeterError::BadOffDiagonal(0, 1))));

        // Symmetry.
        let bad = CoxeterMatrix::new(
            2,
            vec![
                Order::Finite(1),
                Order::Finite(3),
                Order::Finite(4),
                Order::Finite(1),
            ],
        );
        assert!(matches!(bad, Err(CoxeterError::NotSymmetricAt(0, 1))));
    }

    #[test]
    fn word_validation() {
        let cm = dihedral(Order::Finite(3));
        assert!(CoxeterWord::new(cm.clone(), vec![0, 1, 0, 1]).is_ok());
        assert!(matches!(
            CoxeterWord::new(cm, vec![0, 2]),
            Err(CoxeterError::LetterOutOfRange { .. })
        ));
    }

    #[test]
    fn word_m_matrix_reads_pairs() {
        let cm = dihedral(Order::Finite(3));
        let w = CoxeterWord::new(cm, vec![0, 1, 0, 1]).unwrap();
        let m = w.word_m_matrix();
        assert_eq!(m[0][1], Order::Finite(3));
        assert_eq!(m[0][2], Order::Finite(1));
        assert_eq!(m[0][0], Order::Finite(1));
        assert_eq!(m[1][3], Order::Finite(1));
    }
}
