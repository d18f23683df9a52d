//! Serialization of algebra descriptions.
//!
//! An algebra is described by a JSON document holding the dimension, the
//! Gram matrix, basis names, the generators of the group, and optional
//! commutation-exponent and cocycle-exponent matrices plus a module coset.
//! All rationals are serialized as `"p/q"` strings; floats never appear.
//!
//! Invariants:
//! * `parse_spec` followed by `to_json` followed by `parse_spec` is a
//!   fixed point;
//! * `build` validates every matrix dimension against `dim` before
//!   constructing anything.

use serde::{Deserialize, Serialize};

use crate::engine::AlgebraInstance;
use crate::error::{Error, Result};
use crate::lattice::{Cocycle, LatticeData, SpaceSpec, Subgroup};
use crate::linalg::Matrix;
use crate::modules::CosetModule;
use crate::rat::Rat;

/// Generators of the graded group, as coordinate rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpec {
    pub generators: Vec<Vec<Rat>>,
}

/// Optional module data: the representative of the module's charge coset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub coset_rep: Vec<Rat>,
}

/// A complete textual description of an algebra instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub dim: usize,
    pub gram: Vec<Vec<Rat>>,
    pub basis_names: Vec<String>,
    pub group: GroupSpec,
    /// Optional commutation-exponent matrix; defaults to the Gram matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<Vec<Rat>>>,
    /// Optional cocycle-exponent matrix; absent means untwisted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Vec<Vec<Rat>>>,
    /// Optional module coset appended to the algebra description.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleSpec>,
}

/// Parses a JSON algebra description.
pub fn parse_spec(text: &str) -> Result<AlgebraSpec> {
    serde_json::from_str(text)
        .map_err(|e| Error::InvalidSpec(format!("malformed algebra description: {e}")))
}

fn check_square(name: &str, m: &Matrix, dim: usize) -> Result<()> {
    if m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "{name} must be a {dim} x {dim} matrix"
        )));
    }
    Ok(())
}

impl AlgebraSpec {
    /// Serializes back to canonical JSON (two-space indentation).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }

    /// Builds the algebra instance (and the module, when present),
    /// validating all dimensions and structural laws.
    pub fn build(&self) -> Result<(AlgebraInstance, Option<CosetModule>)> {
        if self.dim == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        if self.basis_names.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "{} basis names given for dimension {}",
                self.basis_names.len(),
                self.dim
            )));
        }
        check_square("gram", &self.gram, self.dim)?;
        let space = SpaceSpec::new(self.basis_names.clone(), self.gram.clone())?;
        if self.group.generators.is_empty() {
            return Err(Error::InvalidSpec(
                "the group needs at least one generator".into(),
            ));
        }
        for (i, g) in self.group.generators.iter().enumerate() {
            if g.len() != self.dim {
                return Err(Error::DimensionMismatch(format!(
                    "generator {i} has {} coordinates in dimension {}",
                    g.len(),
                    self.dim
                )));
            }
        }
        let subgroup = Subgroup::from_generators(self.dim, self.group.generators.clone())?;
        if let Some(eta) = &self.eta {
            check_square("eta", eta, self.dim)?;
        }
        let lattice = LatticeData::new(space, subgroup, self.eta.clone())?;
        let instance = match &self.cocycle {
            Some(eps) => {
                check_square("cocycle", eps, self.dim)?;
                AlgebraInstance::with_cocycle(
                    lattice,
                    Cocycle {
                        exponents: eps.clone(),
                    },
                )?
            }
            None => AlgebraInstance::new(lattice),
        };
        let module = match &self.module {
            Some(m) => Some(CosetModule::new(instance.clone(), m.coset_rep.clone())?),
            None => None,
        };
        Ok((instance, module))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "dim": 1,
        "gram": [["1/2"]],
        "basis_names": ["a"],
        "group": {"generators": [["1"]]}
    }"#;

    #[test]
    fn parses_and_builds_a_minimal_description() {
        let spec = parse_spec(SAMPLE).unwrap();
        assert_eq!(spec.dim, 1);
        assert_eq!(spec.gram[0][0], Rat::new(1, 2));
        let (alg, module) = spec.build().unwrap();
        assert_eq!(alg.dim(), 1);
        assert!(module.is_none());
        assert!(alg.cocycle.is_none());
    }

    #[test]
    fn round_trips_through_json() {
        let spec = parse_spec(SAMPLE).unwrap();
        let text = spec.to_json();
        let again = parse_spec(&text).unwrap();
        assert_eq!(again.to_json(), text);
    }

    #[test]
    fn builds_modules_and_cocycles() {
        let text = r#"{
            "dim": 1,
            "gram": [["2"]],
            "basis_names": ["a"],
            "group": {"generators": [["1"]]},
            "cocycle": [["0"]],
            "module": {"coset_rep": ["1/2"]}
        }"#;
        let (alg, module) = parse_spec(text).unwrap().build().unwrap();
        assert!(alg.cocycle.is_some());
        let module = module.unwrap();
        assert_eq!(module.coset_rep, vec![Rat::new(1, 2)]);
    }

    #[test]
    fn rejects_dimension_mismatches() {
        let text = r#"{
            "dim": 2,
            "gram": [["1"]],
            "basis_names": ["a", "b"],
            "group": {"generators": [["1", "0"]]}
        }"#;
        assert!(matches!(
            parse_spec(text).unwrap().build(),
            Err(Error::DimensionMismatch(_))
        ));
        let bad = parse_spec("{\"dim\": 1}");
        assert!(matches!(bad, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn rejects_invalid_commutation_matrices() {
        let text = r#"{
            "dim": 1,
            "gram": [["1/2"]],
            "basis_names": ["a"],
            "group": {"generators": [["1"]]},
            "eta": [["0"]]
        }"#;
        assert!(matches!(
            parse_spec(text).unwrap().build(),
            Err(Error::InvalidSpec(_))
        ));
    }
}
