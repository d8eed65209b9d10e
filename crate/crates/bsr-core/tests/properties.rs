//! Randomized cross-checks between independent code paths: the
//! path-sum formula against the matrix recurrence, the tensor-model
//! oracle against presentation arithmetic, and the LDL^T inertia
//! against a Sturm-sequence root count of the characteristic
//! polynomial.

use bsr_core::bsring::{build_presentation, RingElement};
use bsr_core::coxeter::{reflect, CoxeterMatrix, CoxeterWord, LinearForm, Order};
use bsr_core::demazure::{q_entry_pathsum, q_matrix};
use bsr_core::numeric::{Backend, Matrix, Scalar, Signature};
use bsr_core::tensor::oracle_mul_basis;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

const B: Backend = Backend::Rational;

fn rat(n: i64, d: i64) -> Scalar {
    Scalar::rational(n, d)
}

/// Orders representable on the rational backend.
fn order_strategy() -> impl Strategy<Value = Order> {
    prop_oneof![
        Just(Order::Finite(2)),
        Just(Order::Finite(3)),
        Just(Order::Infinity),
    ]
}

/// A rank-`rank` Coxeter matrix with random off-diagonal orders.
fn matrix_strategy(rank: usize) -> impl Strategy<Value = CoxeterMatrix> {
    proptest::collection::vec(order_strategy(), rank * (rank - 1) / 2).prop_map(move |offdiag| {
        let mut entries = vec![Order::Finite(1); rank * rank];
        let mut it = offdiag.into_iter();
        for i in 0..rank {
            for j in (i + 1)..rank {
                let m = it.next().unwrap();
                entries[i * rank + j] = m;
                entries[j * rank + i] = m;
            }
        }
        CoxeterMatrix::new(rank, entries).unwrap()
    })
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = CoxeterWord> {
    (2usize..=3)
        .prop_flat_map(move |rank| {
            (
                matrix_strategy(rank),
                proptest::collection::vec(0..rank, 0..=max_len),
            )
        })
        .prop_map(|(cm, letters)| CoxeterWord::new(cm, letters).unwrap())
}

proptest! {
    #[test]
    fn pathsum_matches_matrix_recurrence(w in word_strategy(8)) {
        let q = q_matrix(&w, B).unwrap();
        for l in 0..w.len() {
            for m in (l + 1)..w.len() {
                let path = q_entry_pathsum(&w, l, m, B).unwrap();
                prop_assert!(path.approx_eq(q.entry(l, m)), "l={l} m={m}");
            }
        }
    }

    #[test]
    fn q_entries_respect_bound(w in word_strategy(8)) {
        let q = q_matrix(&w, B).unwrap();
        prop_assert!(q.satisfies_bound());
    }

    #[test]
    fn oracle_matches_presentation(w in word_strategy(6)) {
        let p = build_presentation(&w, B).unwrap();
        let n = w.len();
        for i in 0..(1u32 << n) {
            for j in i..(1u32 << n) {
                let oracle = oracle_mul_basis(&w, i, j, B).unwrap();
                let ring = p.mul(
                    &RingElement::monomial(n, i, B),
                    &RingElement::monomial(n, j, B),
                ).unwrap();
                prop_assert!(oracle.matches(&ring), "I={i:b} J={j:b}");
            }
        }
    }

    #[test]
    fn reflection_is_involutive(
        cm in matrix_strategy(3),
        coeffs in proptest::collection::vec((-6i64..=6, 1i64..=4), 3),
        s in 0usize..3,
    ) {
        let mut f = LinearForm::zero(B);
        for (i, (n, d)) in coeffs.iter().enumerate() {
            f = f.add(&LinearForm::simple_root(i, B).scale(&rat(*n, *d)).unwrap()).unwrap();
        }
        let twice = reflect(s, &reflect(s, &f, &cm).unwrap(), &cm).unwrap();
        prop_assert_eq!(twice, f);
    }

    #[test]
    fn reflection_preserves_geometric_form(
        cm in matrix_strategy(3),
        a in proptest::collection::vec((-4i64..=4, 1i64..=3), 3),
        b in proptest::collection::vec((-4i64..=4, 1i64..=3), 3),
        s in 0usize..3,
    ) {
        // (f, g) evaluated through the Gram matrix of the simple roots.
        let gram = cm.geometric_form(B).unwrap();
        let pair = |f: &LinearForm, g: &LinearForm| {
            let mut acc = Scalar::zero(B);
            for i in 0..3 {
                for j in 0..3 {
                    acc = acc
                        .checked_add(
                            &f.coeff(i)
                                .checked_mul(&g.coeff(j)).unwrap()
                                .checked_mul(gram.get(i, j)).unwrap(),
                        )
                        .unwrap();
                }
            }
            acc
        };
        let mut f = LinearForm::zero(B);
        let mut g = LinearForm::zero(B);
        for i in 0..3 {
            let (n, d) = a[i];
            f = f.add(&LinearForm::simple_root(i, B).scale(&rat(n, d)).unwrap()).unwrap();
            let (n, d) = b[i];
            g = g.add(&LinearForm::simple_root(i, B).scale(&rat(n, d)).unwrap()).unwrap();
        }
        let rf = reflect(s, &f, &cm).unwrap();
        let rg = reflect(s, &g, &cm).unwrap();
        prop_assert!(pair(&rf, &rg).approx_eq(&pair(&f, &g)));
    }

    #[test]
    fn normal_form_is_idempotent(
        w in word_strategy(5),
        seed in proptest::collection::vec(0u8..=2, 5),
    ) {
        let n = w.len();
        let p = build_presentation(&w, B).unwrap();
        let e: Vec<u8> = seed.into_iter().take(n).collect();
        if e.len() < n {
            return Ok(());
        }
        let nf = p.normal_form(&e).unwrap();
        // Every output monomial is square-free and fixed by rewriting.
        let mut rebuilt = RingElement::zero(n);
        for (&mask, c) in &nf.terms {
            let back: Vec<u8> = (0..n).map(|k| ((mask >> k) & 1) as u8).collect();
            let again = p.normal_form(&back).unwrap();
            prop_assert_eq!(again.terms.len(), 1);
            for (&m2, c2) in &again.terms {
                prop_assert_eq!(m2, mask);
                rebuilt.add_term(m2, &c2.checked_mul(c).unwrap()).unwrap();
            }
        }
        prop_assert!(rebuilt.approx_eq(&nf));
    }

    #[test]
    fn hilbert_vector_is_symmetric(w in word_strategy(8)) {
        let p = build_presentation(&w, B).unwrap();
        let h = p.hilbert_vector();
        let mut rev = h.clone();
        rev.reverse();
        prop_assert_eq!(h, rev);
    }

    #[test]
    fn signature_matches_sturm_oracle(entries in proptest::collection::vec((-5i64..=5, 1i64..=3), 10)) {
        // Random symmetric 4x4 rational matrix from 10 packed entries.
        let n = 4;
        let mut m = Matrix::zeros(n, n, B);
        let mut it = entries.iter();
        for i in 0..n {
            for j in i..n {
                let (p, q) = it.next().unwrap();
                let v = rat(*p, *q);
                m.set(i, j, v.clone());
                m.set(j, i, v);
            }
        }
        let sig = m.ldlt_signature().unwrap();
        prop_assert_eq!(sig, sturm_signature(&m));
    }

    #[test]
    fn signature_is_congruence_invariant(
        entries in proptest::collection::vec((-4i64..=4, 1i64..=2), 6),
        change in proptest::collection::vec(-3i64..=3, 3),
    ) {
        let n = 3;
        let mut m = Matrix::zeros(n, n, B);
        let mut it = entries.iter();
        for i in 0..n {
            for j in i..n {
                let (p, q) = it.next().unwrap();
                let v = rat(*p, *q);
                m.set(i, j, v.clone());
                m.set(j, i, v);
            }
        }
        // Unit upper-triangular change of basis: always invertible.
        let mut s = Matrix::identity(n, B);
        s.set(0, 1, rat(change[0], 1));
        s.set(0, 2, rat(change[1], 1));
        s.set(1, 2, rat(change[2], 1));
        let congruent = s.transpose().matmul(&m).unwrap().matmul(&s).unwrap();
        prop_assert_eq!(
            m.ldlt_signature().unwrap(),
            congruent.ldlt_signature().unwrap()
        );
    }
}

/// Eigenvalue sign count through the characteristic polynomial: the
/// zero eigenvalue multiplicity is the trailing-zero count, and the
/// signed counts come from Sturm sign variations, recursing into the
/// gcd of p and p' so repeated eigenvalues are counted with
/// multiplicity.
fn sturm_signature(m: &Matrix) -> Signature {
    let n = m.rows();
    let charpoly = char_poly(m);
    let n_zero = charpoly
        .iter()
        .take_while(|c| c.is_zero())
        .count();
    let reduced: Vec<BigRational> = charpoly[n_zero..].to_vec();
    let (n_pos, n_neg) = signed_root_counts(&reduced);
    Signature {
        n_pos,
        n_neg,
        n_zero: n_zero.min(n),
    }
}

/// Positive and negative real root counts of a polynomial with no
/// zero root, with multiplicity.
fn signed_root_counts(p: &[BigRational]) -> (usize, usize) {
    let mut p = p.to_vec();
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    if p.len() <= 1 {
        return (0, 0);
    }
    let chain = sturm_chain(&p);
    let at_zero = variations(&chain, At::Zero);
    let pos = at_zero - variations(&chain, At::PlusInf);
    let neg = variations(&chain, At::MinusInf) - at_zero;
    // A last chain element of positive degree is (up to sign) the gcd
    // of p and p'; its roots are the repeated roots of p.
    let (rep_pos, rep_neg) = match chain.last() {
        Some(g) if g.len() >= 2 => signed_root_counts(g),
        _ => (0, 0),
    };
    (pos + rep_pos, neg + rep_neg)
}

/// Coefficients of det(tI - M), ascending degree, via Faddeev-LeVerrier.
fn char_poly(m: &Matrix) -> Vec<BigRational> {
    let n = m.rows();
    let to_big = |s: &Scalar| match s {
        Scalar::Rat(r) => r.clone(),
        _ => unreachable!("rational oracle"),
    };
    let mm: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| to_big(m.get(i, j))).collect())
        .collect();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut aux: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for k in 1..=n {
        // aux <- M * aux
        let mut prod = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    prod[i][j] += &mm[i][l] * &aux[l][j];
                }
            }
        }
        let trace: BigRational = (0..n).map(|i| prod[i][i].clone()).sum();
        let c = -trace / BigRational::from(BigInt::from(k as i64));
        coeffs[n - k] = c.clone();
        for (i, row) in prod.iter_mut().enumerate() {
            row[i] += &c;
        }
        aux = prod;
    }
    coeffs
}

fn poly_derivative(p: &[BigRational]) -> Vec<BigRational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from(BigInt::from(i as i64)))
        .collect()
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r: Vec<BigRational> = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db && r.iter().any(|c| !c.is_zero()) {
        while r.last().map(|c| c.is_zero()).unwrap_or(false) {
            r.pop();
        }
        if r.len() <= db {
            break;
        }
        let dr = r.len() - 1;
        let factor = &r[dr] / lead;
        for i in 0..=db {
            let v = &b[i] * &factor;
            r[dr - db + i] -= v;
        }
        while r.last().map(|c| c.is_zero()).unwrap_or(false) {
            r.pop();
        }
    }
    r
}

fn sturm_chain(p: &[BigRational]) -> Vec<Vec<BigRational>> {
    let mut chain = vec![p.to_vec(), poly_derivative(p)];
    loop {
        let len = chain.len();
        let last = &chain[len - 1];
        if last.iter().all(|c| c.is_zero()) || last.len() <= 1 {
            break;
        }
        let rem = poly_rem(&chain[len - 2], last);
        if rem.iter().all(|c| c.is_zero()) || rem.is_empty() {
            break;
        }
        chain.push(rem.iter().map(|c| -c).collect());
    }
    chain
}

enum At {
    Zero,
    PlusInf,
    MinusInf,
}

fn variations(chain: &[Vec<BigRational>], at: At) -> usize {
    let signs: Vec<i8> = chain
        .iter()
        .filter_map(|p| {
            let s = match at {
                // Sign just right of 0: the lowest nonzero coefficient.
                At::Zero => p
                    .iter()
                    .find(|c| !c.is_zero())
                    .map(|c| if c.is_positive() { 1 } else { -1 }),
                At::PlusInf => p
                    .iter()
                    .rposition(|c| !c.is_zero())
                    .map(|d| if p[d].is_positive() { 1 } else { -1 }),
                At::MinusInf => p.iter().rposition(|c| !c.is_zero()).map(|d| {
                    let lead = if p[d].is_positive() { 1 } else { -1 };
                    if d % 2 == 0 {
                        lead
                    } else {
                        -lead
                    }
                }),
            };
            s
        })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}
