//! Input resolution: the JSON job document, flag overrides, and the
//! conversion into core types.

use bsr_core::coxeter::{CoxeterMatrix, CoxeterWord, Order};
use bsr_core::hodge::LefschetzVector;
use bsr_core::numeric::{Backend, Scalar, DEFAULT_EPS};
use serde::Deserialize;
use std::path::Path;

/// Everything a command needs, after file and flag merging.
pub struct Job {
    pub word: CoxeterWord,
    pub backend: Backend,
    pub lefschetz: Option<LefschetzVector>,
}

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid job document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("word letter {0:?} does not resolve to a generator")]
    UnknownLetter(String),
    #[error("no word given; use --word or a job file with a \"word\" field")]
    MissingWord,
    #[error("backend must be \"rational\" or \"float\", got {0:?}")]
    BadBackend(String),
    #[error("cannot parse coefficient {0:?}")]
    BadCoefficient(String),
    #[error("coefficient count {got} does not match word length {expected}")]
    LefschetzLength { expected: usize, got: usize },
    #[error(transparent)]
    Coxeter(#[from] bsr_core::coxeter::CoxeterError),
    #[error(transparent)]
    Hodge(#[from] bsr_core::hodge::HodgeError),
}

/// On-disk job document. All fields optional; flags override.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub generators: Option<Vec<String>>,
    pub coxeter_matrix: Option<Vec<Vec<Order>>>,
    pub word: Option<Vec<String>>,
    pub backend: Option<String>,
    pub precision_bits: Option<u32>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub lefschetz: Option<Vec<String>>,
}

impl JobSpec {
    pub fn from_file(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Flag-level overrides collected by clap.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub word: Option<String>,
    pub backend: Option<String>,
    pub tolerance: Option<f64>,
    pub precision_bits: Option<u32>,
    pub lefschetz: Option<String>,
}

/// "p/q", integer, or decimal literal in the given backend.
pub fn parse_scalar(tok: &str, backend: Backend) -> Result<Scalar, InputError> {
    let tok = tok.trim();
    let bad = || InputError::BadCoefficient(tok.to_string());
    if let Some((num, den)) = tok.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| bad())?;
        let d: i64 = den.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(match backend {
            Backend::Rational => Scalar::rational(n, d),
            Backend::Float { eps } => Scalar::float_eps(n as f64 / d as f64, eps),
        });
    }
    if let Ok(n) = tok.parse::<i64>() {
        return Ok(Scalar::from_i64(n, backend));
    }
    match backend {
        Backend::Float { eps } => tok
            .parse::<f64>()
            .map(|v| Scalar::float_eps(v, eps))
            .map_err(|_| bad()),
        Backend::Rational => Err(bad()),
    }
}

fn resolve_backend(spec: &JobSpec, flags: &Overrides) -> Result<Backend, InputError> {
    let name = flags
        .backend
        .clone()
        .or_else(|| spec.backend.clone())
        .unwrap_or_else(|| "rational".to_string());
    match name.as_str() {
        "rational" => Ok(Backend::Rational),
        "float" => {
            let eps = flags.tolerance.or(spec.tolerance).unwrap_or(DEFAULT_EPS);
            if let Some(bits) = flags.precision_bits.or(spec.precision_bits) {
                if bits != 53 {
                    eprintln!(
                        "warning: float backend has a 53-bit mantissa; \
                         --precision-bits {bits} clamped to 53"
                    );
                }
            }
            Ok(Backend::Float { eps })
        }
        other => Err(InputError::BadBackend(other.to_string())),
    }
}

/// A letter token: a named generator from the job document, or `sK` /
/// `K` with 1-based K when no generator list is given.
fn resolve_letter(tok: &str, generators: &Option<Vec<String>>) -> Result<usize, InputError> {
    if let Some(names) = generators {
        return names
            .iter()
            .position(|g| g == tok)
            .ok_or_else(|| InputError::UnknownLetter(tok.to_string()));
    }
    let digits = tok.strip_prefix('s').unwrap_or(tok);
    let k: usize = digits
        .parse()
        .map_err(|_| InputError::UnknownLetter(tok.to_string()))?;
    if k == 0 {
        return Err(InputError::UnknownLetter(tok.to_string()));
    }
    Ok(k - 1)
}

pub fn resolve(spec: JobSpec, flags: Overrides) -> Result<Job, InputError> {
    let backend = resolve_backend(&spec, &flags)?;
    let tokens: Vec<String> = if let Some(raw) = &flags.word {
        raw.split([',', ' '])
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    } else if let Some(w) = &spec.word {
        w.clone()
    } else {
        return Err(InputError::MissingWord);
    };
    let letters: Vec<usize> = tokens
        .iter()
        .map(|t| resolve_letter(t, &spec.generators))
        .collect::<Result<_, _>>()?;
    let matrix = match (&spec.coxeter_matrix, &spec.generators) {
        (Some(rows), _) => {
            let size = rows.len();
            let mut entries = Vec::with_capacity(size * size);
            for row in rows {
                entries.extend(row.iter().copied());
            }
            CoxeterMatrix::new(size, entries)?
        }
        (None, Some(names)) => CoxeterMatrix::uniform(names.len().max(1), Order::Finite(3))?,
        (None, None) => {
            // Bare indices with no matrix: uniform order-3 system
            // spanning the letters used.
            let rank = letters.iter().copied().max().map_or(1, |m| m + 1);
            CoxeterMatrix::uniform(rank.max(1), Order::Finite(3))?
        }
    };
    let word = CoxeterWord::new(matrix, letters)?;
    let lefschetz = {
        let toks: Option<Vec<String>> = if let Some(raw) = &flags.lefschetz {
            Some(
                raw.split([',', ' '])
                    .filter(|t| !t.is_empty())
                    .map(str::to_string)
                    .collect(),
            )
        } else {
            spec.lefschetz.clone()
        };
        match toks {
            None => None,
            Some(toks) => {
                if toks.len() != word.len() {
                    return Err(InputError::LefschetzLength {
                        expected: word.len(),
                        got: toks.len(),
                    });
                }
                let coeffs = toks
                    .iter()
                    .map(|t| parse_scalar(t, backend))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(LefschetzVector::new(coeffs)?)
            }
        }
    };
    Ok(Job {
        word,
        backend,
        lefschetz,
    })
}
