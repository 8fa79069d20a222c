//! `--povm` argument syntax.
//!
//! Accepted forms:
//! - `computational`, `identity`
//! - `random:OUTCOMES:SEED` for a random rank-one POVM
//! - `vertex:T:PHI` for the vertex measurement anchored at `--theta`
//! - `informative:MU` for the informative vertex along coordinate `MU`
//! - inline JSON `{"basis": [...]}` or `{"elements": [...]}`
//! - `@FILE` with the same JSON
//!
//! In JSON, vectors are arrays of entries and matrices arrays of rows. An
//! entry is a real number or a `[re, im]` pair.

use std::path::Path;

use qgeo_core::vertex::{build_informative_vertex, build_vertex_povm};
use qgeo_core::{CMatrix, CVector, Complex64, ParamPoint, Povm, StateModel};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum PovmSpec {
    Computational,
    Identity,
    Random { outcomes: usize, seed: u64 },
    Vertex { t: f64, phi: f64 },
    Informative { mu: usize },
    Basis(Vec<CVector>),
    Elements(Vec<CMatrix>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(&self) -> Complex64 {
        match *self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    #[serde(default)]
    basis: Option<Vec<Vec<Entry>>>,
    #[serde(default)]
    elements: Option<Vec<Vec<Vec<Entry>>>>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Povm(msg.into())
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.trim().parse().map_err(|_| bad(format!("bad {what} `{s}`")))
}

fn from_json(text: &str) -> Result<PovmSpec, CliError> {
    let raw: Raw = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    match (raw.basis, raw.elements) {
        (Some(b), None) => Ok(PovmSpec::Basis(
            b.iter()
                .map(|v| CVector::from_iterator(v.len(), v.iter().map(Entry::value)))
                .collect(),
        )),
        (None, Some(es)) => es
            .iter()
            .map(|rows| {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(bad("POVM elements must be square"));
                }
                Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
            })
            .collect::<Result<_, _>>()
            .map(PovmSpec::Elements),
        _ => Err(bad("give exactly one of `basis` or `elements`")),
    }
}

pub fn parse(text: &str) -> Result<PovmSpec, CliError> {
    let text = text.trim();
    if let Some(path) = text.strip_prefix('@') {
        let body = std::fs::read_to_string(Path::new(path)).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })?;
        return from_json(&body);
    }
    if text.starts_with('{') {
        return from_json(text);
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["computational"] => Ok(PovmSpec::Computational),
        ["identity"] => Ok(PovmSpec::Identity),
        ["random", k, seed] => Ok(PovmSpec::Random {
            outcomes: number(k, "outcome count")?,
            seed: number(seed, "seed")?,
        }),
        ["vertex", t, phi] => Ok(PovmSpec::Vertex {
            t: number(t, "angle")?,
            phi: number(phi, "angle")?,
        }),
        ["informative", mu] => Ok(PovmSpec::Informative {
            mu: number(mu, "coordinate index")?,
        }),
        _ => Err(bad(format!("unrecognised form `{text}`"))),
    }
}

pub fn build(spec: &PovmSpec, model: &dyn StateModel, theta: &ParamPoint) -> Result<Povm, CliError> {
    let dim = model.dim();
    let povm = match spec {
        PovmSpec::Computational => Povm::computational(dim),
        PovmSpec::Identity => Povm::identity(dim),
        PovmSpec::Random { outcomes, seed } => Povm::random_rank_one(dim, *outcomes, *seed)?,
        PovmSpec::Vertex { t, phi } => build_vertex_povm(model, theta, *t, *phi)?.to_povm(),
        PovmSpec::Informative { mu } => build_informative_vertex(model, theta, *mu)?.to_povm(),
        PovmSpec::Basis(b) => Povm::projective(b)?,
        PovmSpec::Elements(e) => Povm::new(e.clone())?,
    };
    if povm.dim() != dim {
        return Err(qgeo_core::Error::Dimension {
            expected: dim,
            found: povm.dim(),
        }
        .into());
    }
    Ok(povm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyword_forms() {
        assert_eq!(parse("computational").unwrap(), PovmSpec::Computational);
        assert_eq!(parse("random:5:7").unwrap(), PovmSpec::Random { outcomes: 5, seed: 7 });
        assert!(parse("random:x:7").is_err());
        assert!(parse("nonsense").is_err());
    }

    #[test]
    fn json_basis_with_mixed_entries() {
        let s = parse(r#"{"basis": [[1, 0], [0, [0, 1]]]}"#).unwrap();
        match s {
            PovmSpec::Basis(b) => assert_eq!(b[1][1], Complex64::new(0.0, 1.0)),
            other => panic!("{other:?}"),
        }
        assert!(parse(r#"{"basis": [[1]], "elements": []}"#).is_err());
    }
}
