//! Lookup of built-in models by name.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Coherent, Cpn, Sphere, StateModel, Su11, Su3Euler, Submanifold};
use super::{COHERENT_DEFAULT_CUTOFF, SU11_DEFAULT_CUTOFF};
use crate::error::{Error, Result};

pub const MODEL_NAMES: [&str; 5] = ["su3", "cpn", "coherent", "su11", "sphere"];

/// Construction parameters shared by the registry.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOptions {
    /// `n` of `CP^n`.
    pub n: usize,
    /// Fock / level cutoff; the model default when `None`.
    pub cutoff: Option<usize>,
    /// Bargmann index of `su11`.
    pub k: f64,
    pub half_width: f64,
    pub r_max: f64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            n: 2,
            cutoff: None,
            k: 1.0,
            half_width: Coherent::DEFAULT_HALF_WIDTH,
            r_max: Su11::DEFAULT_R_MAX,
        }
    }
}

pub fn build_model(
    name: &str,
    opts: &ModelOptions,
    fixed: &[(String, f64)],
) -> Result<Box<dyn StateModel>> {
    let base: Box<dyn StateModel> = match name {
        "su3" => Box::new(Su3Euler),
        "cpn" => Box::new(Cpn::new(opts.n)?),
        "coherent" => Box::new(Coherent::new(
            opts.cutoff.unwrap_or(COHERENT_DEFAULT_CUTOFF),
            opts.half_width,
        )?),
        "su11" => Box::new(Su11::new(
            opts.k,
            opts.cutoff.unwrap_or(SU11_DEFAULT_CUTOFF),
            opts.r_max,
        )?),
        "sphere" => Box::new(Sphere),
        other => return Err(Error::Unknown(other.to_string())),
    };
    if fixed.is_empty() {
        return Ok(base);
    }
    Ok(Box::new(Submanifold::fix(base, fixed)?))
}

/// Parses `name=value` items.
pub fn parse_assignments<'a, I>(items: I) -> Result<Vec<(String, f64)>>
where
    I: IntoIterator<Item = &'a str>,
{
    items
        .into_iter()
        .flat_map(|s| s.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(alloc::format!("expected name=value, got `{item}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(alloc::format!("bad number in `{item}`")))?;
            Ok((name.trim().to_string(), value))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_every_name() {
        for name in MODEL_NAMES {
            assert!(build_model(name, &ModelOptions::default(), &[]).is_ok(), "{name}");
        }
        assert!(matches!(
            build_model("nope", &ModelOptions::default(), &[]),
            Err(Error::Unknown(_))
        ));
    }

    #[test]
    fn fixing_coordinates_reduces_dimension() {
        let fixed = parse_assignments(["gamma=0.1", "beta=0.3"]).unwrap();
        let m = build_model("su3", &ModelOptions::default(), &fixed).unwrap();
        assert_eq!(m.param_dim(), 2);
        assert_eq!(m.param_names(), ["alpha", "theta"]);
    }

    #[test]
    fn rejects_malformed_assignment() {
        assert!(parse_assignments(["beta"]).is_err());
        assert!(parse_assignments(["beta=x"]).is_err());
        assert!(build_model("su3", &ModelOptions::default(), &parse_assignments(["zeta=1"]).unwrap()).is_err());
    }
}
