//! Scalar backends and the small linear-algebra kernel (rank, kernel,
//! determinant, LDL^T inertia) shared by every other module.
//!
//! Two backends are supported: exact rationals with arbitrary-precision
//! integers, and double-precision floats with a configurable zero
//! tolerance. Mixing backends in one operation is an error, never a
//! coercion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default zero tolerance for the float backend.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum NumericError {
    #[error("mixed scalar backends: {0} vs {1}")]
    MixedBackend(&'static str, &'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is not rectangular: expected {expected} entries, got {got}")]
    NotRectangular { expected: usize, got: usize },
    #[error("matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rational backend cannot represent cos(pi/m) for m = {0}; use the float backend")]
    RationalOrderUnsupported(String),
}

/// Backend tag. The float variant carries its zero tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Backend {
    Rational,
    Float { eps: f64 },
}

impl Backend {
    pub fn float() -> Self {
        Backend::Float { eps: DEFAULT_EPS }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Rational => "rational",
            Backend::Float { .. } => "float",
        }
    }

    pub fn same_kind(&self, other: &Backend) -> bool {
        matches!(
            (self, other),
            (Backend::Rational, Backend::Rational) | (Backend::Float { .. }, Backend::Float { .. })
        )
    }
}

/// A single field element in one of the two backends.
///
/// Rationals are kept in lowest terms with positive denominator (the
/// `BigRational` invariant). Floats carry the zero tolerance used for
/// all sign/zero decisions on them; combining two floats keeps the
/// larger tolerance.
#[derive(Debug, Clone)]
pub enum Scalar {
    Rat(BigRational),
    Fl { v: f64, eps: f64 },
}

impl Scalar {
    pub fn rational(n: i64, d: i64) -> Self {
        Scalar::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn int(n: i64) -> Self {
        Scalar::rational(n, 1)
    }

    pub fn float(v: f64) -> Self {
        Scalar::Fl {
            v,
            eps: DEFAULT_EPS,
        }
    }

    pub fn float_eps(v: f64, eps: f64) -> Self {
        Scalar::Fl { v, eps }
    }

    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Rational => Scalar::Rat(BigRational::zero()),
            Backend::Float { eps } => Scalar::Fl { v: 0.0, eps },
        }
    }

    pub fn one(backend: Backend) -> Self {
        match backend {
            Backend::Rational => Scalar::Rat(BigRational::one()),
            Backend::Float { eps } => Scalar::Fl { v: 1.0, eps },
        }
    }

    /// n/d in the given backend.
    pub fn rational_or_float(n: i64, d: i64, backend: Backend) -> Scalar {
        match backend {
            Backend::Rational => Scalar::rational(n, d),
            Backend::Float { eps } => Scalar::float_eps(n as f64 / d as f64, eps),
        }
    }

    pub fn from_i64(n: i64, backend: Backend) -> Self {
        match backend {
            Backend::Rational => Scalar::int(n),
            Backend::Float { eps } => Scalar::Fl { v: n as f64, eps },
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Rat(_) => Backend::Rational,
            Scalar::Fl { eps, .. } => Backend::Float { eps: *eps },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fl { v, eps } => v.abs() < *eps,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_positive(),
            Scalar::Fl { v, eps } => *v >= *eps,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_negative(),
            Scalar::Fl { v, eps } => *v <= -*eps,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Fl { v, .. } => *v,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(r.abs()),
            Scalar::Fl { v, eps } => Scalar::Fl {
                v: v.abs(),
                eps: *eps,
            },
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Fl { v, eps } => Scalar::Fl { v: -v, eps: *eps },
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a + b)),
            (Scalar::Fl { v: a, eps: e1 }, Scalar::Fl { v: b, eps: e2 }) => Ok(Scalar::Fl {
                v: a + b,
                eps: e1.max(*e2),
            }),
            _ => Err(NumericError::MixedBackend(
                self.backend().name(),
                other.backend().name(),
            )),
        }
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Fl { v: a, eps: e1 }, Scalar::Fl { v: b, eps: e2 }) => Ok(Scalar::Fl {
                v: a * b,
                eps: e1.max(*e2),
            }),
            _ => Err(NumericError::MixedBackend(
                self.backend().name(),
                other.backend().name(),
            )),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, NumericError> {
        if other.is_zero() {
            return Err(NumericError::DivisionByZero);
        }
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a / b)),
            (Scalar::Fl { v: a, eps: e1 }, Scalar::Fl { v: b, eps: e2 }) => Ok(Scalar::Fl {
                v: a / b,
                eps: e1.max(*e2),
            }),
            _ => Err(NumericError::MixedBackend(
                self.backend().name(),
                other.backend().name(),
            )),
        }
    }

    /// Exact rational equality, or agreement within the zero tolerance
    /// for floats.
    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match self.checked_sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }

    /// Coefficient rendering: `p/q` for rationals, shortest roundtrip
    /// decimal for floats.
    pub fn render(&self) -> String {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    format!("{}", r.numer())
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fl { v, .. } => format!("{}", v),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a == b,
            (Scalar::Fl { v: a, .. }, Scalar::Fl { v: b, .. }) => a == b,
            _ => false,
        }
    }
}

// Operator impls for code paths where backend uniformity has already
// been established (matrix and ring internals validate at construction).
// Mixing backends here is a logic error and panics.
macro_rules! scalar_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("uniform backend required")
            }
        }
        impl std::ops::$trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}
scalar_op!(Add, add, checked_add);
scalar_op!(Sub, sub, checked_sub);
scalar_op!(Mul, mul, checked_mul);
scalar_op!(Div, div, checked_div);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

/// Inertia of a symmetric bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
}

impl Signature {
    pub fn dim(&self) -> usize {
        self.n_pos + self.n_neg + self.n_zero
    }

    /// Classical signature: positive count minus negative count.
    pub fn index(&self) -> i64 {
        self.n_pos as i64 - self.n_neg as i64
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n_pos, self.n_neg, self.n_zero)
    }
}

/// Dense row-major matrix over one scalar backend.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self, NumericError> {
        if data.len() != rows * cols {
            return Err(NumericError::NotRectangular {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(first) = data.first() {
            let b = first.backend();
            for (idx, s) in data.iter().enumerate() {
                if !b.same_kind(&s.backend()) {
                    let _ = idx;
                    return Err(NumericError::MixedBackend(
                        b.name(),
                        s.backend().name(),
                    ));
                }
            }
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize, backend: Backend) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(backend); rows * cols],
        }
    }

    pub fn identity(n: usize, backend: Backend) -> Self {
        let mut m = Matrix::zeros(n, n, backend);
        for i in 0..n {
            m.set(i, i, Scalar::one(backend));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn backend(&self) -> Backend {
        self.data
            .first()
            .map(|s| s.backend())
            .unwrap_or(Backend::Rational)
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if !self.get(i, j).approx_eq(self.get(j, i)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows, self.backend());
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, NumericError> {
        if self.cols != other.rows {
            return Err(NumericError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let backend = if self.data.is_empty() {
            other.backend()
        } else {
            self.backend()
        };
        let mut out = Matrix::zeros(self.rows, other.cols, backend);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Scalar::zero(backend);
                for k in 0..self.cols {
                    acc = acc.checked_add(&self.get(i, k).checked_mul(other.get(k, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, NumericError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(NumericError::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = Vec::with_capacity(self.data.len());
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            data.push(a.checked_add(b)?);
        }
        Matrix::new(self.rows, self.cols, data)
    }

    /// Largest absolute entry as f64; used to scale float pivot thresholds.
    fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|s| s.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Pivot threshold: exact zero test for rationals, `eps * max(1, |M|_max)`
    /// for floats.
    fn zero_thresh(&self) -> Option<f64> {
        match self.backend() {
            Backend::Rational => None,
            Backend::Float { eps } => Some(eps * self.max_abs().max(1.0)),
        }
    }

    fn entry_is_zero(&self, s: &Scalar, thresh: Option<f64>) -> bool {
        match thresh {
            None => s.is_zero(),
            Some(t) => s.to_f64().abs() <= t,
        }
    }

    /// Row echelon reduction in place. Returns pivot columns.
    fn row_reduce(&mut self) -> Vec<usize> {
        let thresh = self.zero_thresh();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            // Partial pivoting by magnitude (only matters for floats).
            let mut best = None;
            let mut best_abs = 0.0f64;
            for r in row..self.rows {
                let v = self.get(r, col);
                if !self.entry_is_zero(v, thresh) {
                    let a = v.to_f64().abs();
                    if best.is_none() || a > best_abs {
                        best = Some(r);
                        best_abs = a;
                    }
                    if matches!(self.backend(), Backend::Rational) {
                        break;
                    }
                }
            }
            let Some(p) = best else { continue };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(row * self.cols + c, p * self.cols + c);
                }
            }
            let pivot = self.get(row, col).clone();
            for c in col..self.cols {
                let v = self.get(row, c) / &pivot;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col).clone();
                if self.entry_is_zero(&factor, thresh) {
                    continue;
                }
                for c in col..self.cols {
                    let v = self.get(r, c) - &(&factor * self.get(row, c));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().len()
    }

    pub fn det(&self) -> Result<Scalar, NumericError> {
        if self.rows != self.cols {
            return Err(NumericError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let backend = self.backend();
        if self.rows == 0 {
            return Ok(Scalar::one(backend));
        }
        let thresh = self.zero_thresh();
        let mut m = self.clone();
        let mut det = Scalar::one(backend);
        for col in 0..m.cols {
            let mut p = None;
            let mut best_abs = 0.0f64;
            for r in col..m.rows {
                let v = m.get(r, col);
                if !m.entry_is_zero(v, thresh) {
                    let a = v.to_f64().abs();
                    if p.is_none() || a > best_abs {
                        p = Some(r);
                        best_abs = a;
                    }
                    if matches!(backend, Backend::Rational) {
                        break;
                    }
                }
            }
            let Some(p) = p else {
                return Ok(Scalar::zero(backend));
            };
            if p != col {
                for c in 0..m.cols {
                    m.data.swap(col * m.cols + c, p * m.cols + c);
                }
                det = det.neg();
            }
            let pivot = m.get(col, col).clone();
            det = det.checked_mul(&pivot)?;
            for r in (col + 1)..m.rows {
                let factor = m.get(r, col).checked_div(&pivot)?;
                for c in col..m.cols {
                    let v = m.get(r, c).checked_sub(&factor.checked_mul(m.get(col, c))?)?;
                    m.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    /// Basis of the right kernel as column vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let backend = self.backend();
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(backend); self.cols];
            v[free] = Scalar::one(backend);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = m.get(row, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Inertia of a symmetric matrix by symmetric Gaussian elimination,
    /// using 2x2 antidiagonal pivots when every remaining diagonal entry
    /// vanishes. Congruence-invariant by Sylvester's law.
    pub fn ldlt_signature(&self) -> Result<Signature, NumericError> {
        if self.rows != self.cols {
            return Err(NumericError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if !self.get(i, j).approx_eq(self.get(j, i)) {
                    return Err(NumericError::NotSymmetric { i, j });
                }
            }
        }
        let backend = self.backend();
        let thresh = self.zero_thresh();
        // `active` holds the indices of the not-yet-eliminated block.
        let mut m = self.clone();
        let mut active: Vec<usize> = (0..self.rows).collect();
        let mut sig = Signature {
            n_pos: 0,
            n_neg: 0,
            n_zero: 0,
        };
        while !active.is_empty() {
            // Best 1x1 pivot on the diagonal.
            let mut diag_pivot = None;
            let mut best_abs = 0.0f64;
            for (ai, &i) in active.iter().enumerate() {
                let v = m.get(i, i);
                if !m.entry_is_zero(v, thresh) {
                    let a = v.to_f64().abs();
                    if diag_pivot.is_none() || a > best_abs {
                        diag_pivot = Some(ai);
                        best_abs = a;
                    }
                    if matches!(backend, Backend::Rational) {
                        break;
                    }
                }
            }
            if let Some(ai) = diag_pivot {
                let i = active[ai];
                let d = m.get(i, i).clone();
                if d.is_positive() {
                    sig.n_pos += 1;
                } else {
                    sig.n_neg += 1;
                }
                active.remove(ai);
                for (r_idx, &r) in active.iter().enumerate() {
                    for &c in &active[r_idx..] {
                        let v = m.get(r, c)
                            - &(&(m.get(r, i) * m.get(c, i)) / &d);
                        m.set(r, c, v.clone());
                        m.set(c, r, v);
                    }
                }
                continue;
            }
            // All active diagonal entries are (numerically) zero: look for
            // an off-diagonal entry to use as a hyperbolic 2x2 pivot.
            let mut off = None;
            let mut best_abs = 0.0f64;
            for (pi, &p) in active.iter().enumerate() {
                for (qi, &q) in active.iter().enumerate().skip(pi + 1) {
                    let v = m.get(p, q);
                    if !m.entry_is_zero(v, thresh) {
                        let a = v.to_f64().abs();
                        if off.is_none() || a > best_abs {
                            off = Some((pi, qi));
                            best_abs = a;
                        }
                    }
                }
            }
            let Some((pi, qi)) = off else {
                // Remaining block is zero.
                sig.n_zero += active.len();
                break;
            };
            let (p, q) = (active[pi], active[qi]);
            let a = m.get(p, q).clone();
            sig.n_pos += 1;
            sig.n_neg += 1;
            // Remove q first so pi stays valid.
            active.remove(qi);
            active.remove(pi);
            // Schur complement against the block [[0, a], [a, 0]].
            for (r_idx, &r) in active.iter().enumerate() {
                for &c in &active[r_idx..] {
                    let cross = &(m.get(r, p) * m.get(c, q)) + &(m.get(r, q) * m.get(c, p));
                    let v = m.get(r, c) - &(&cross / &a);
                    m.set(r, c, v.clone());
                    m.set(c, r, v);
                }
            }
        }
        Ok(sig)
    }

    /// Matrix-of-rows view for reports.
    pub fn to_render_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).render()).collect())
            .collect()
    }
}

/// n choose k as usize; exact for the small sizes used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1usize;
    for i in 0..k {
        num = num * (n - i) / (i + 1);
    }
    num
}
