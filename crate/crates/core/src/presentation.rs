//! Free graded-commutative presentations.
//!
//! A presentation is an ordered list of named generators, each with a
//! non-negative cochain degree and a non-negative weight. Degree-0 generators
//! may be marked invertible (localization data). An optional weight
//! truncation kills every monomial of weight above the bound, which is how
//! finite square-zero test algebras such as `Q[eps]/eps^2` are expressed.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One generator of a free graded-commutative algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    /// Cochain degree, non-negative.
    pub degree: i64,
    /// Auxiliary grading making slices finite-dimensional; non-negative.
    pub weight: i64,
    /// Inverted in the localized degree-0 ring. Only allowed in degree 0.
    pub invertible: bool,
}

impl GeneratorSpec {
    pub fn new(name: &str, degree: i64, weight: i64) -> Self {
        GeneratorSpec {
            name: name.to_string(),
            degree,
            weight,
            invertible: false,
        }
    }

    pub fn invertible(name: &str, weight: i64) -> Self {
        GeneratorSpec {
            name: name.to_string(),
            degree: 0,
            weight,
            invertible: true,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

/// An ordered family of generators; the declared order fixes the canonical
/// monomial form and every Koszul sign in the kernel.
#[derive(Debug, Clone)]
pub struct Presentation {
    gens: Vec<GeneratorSpec>,
    index: HashMap<String, usize>,
    weight_truncation: Option<i64>,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.weight_truncation == other.weight_truncation
    }
}

impl Eq for Presentation {}

impl Presentation {
    pub fn new(gens: Vec<GeneratorSpec>) -> Result<Arc<Self>> {
        Self::build(gens, None)
    }

    /// Presentation in which every monomial of weight above `bound` is zero.
    pub fn truncated(gens: Vec<GeneratorSpec>, bound: i64) -> Result<Arc<Self>> {
        Self::build(gens, Some(bound))
    }

    /// The empty presentation, i.e. the base ring Q itself.
    pub fn base_ring() -> Arc<Self> {
        Self::new(Vec::new()).expect("empty presentation is always valid")
    }

    fn build(gens: Vec<GeneratorSpec>, weight_truncation: Option<i64>) -> Result<Arc<Self>> {
        let mut index = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if g.name.is_empty() || !g.name.chars().next().unwrap().is_ascii_alphabetic() {
                return Err(Error::InvalidGenerator {
                    name: g.name.clone(),
                    reason: "names must start with an ASCII letter".into(),
                });
            }
            if g.degree < 0 {
                return Err(Error::InvalidGenerator {
                    name: g.name.clone(),
                    reason: "cochain degree must be non-negative".into(),
                });
            }
            if g.weight < 0 {
                return Err(Error::InvalidGenerator {
                    name: g.name.clone(),
                    reason: "weight must be non-negative".into(),
                });
            }
            if g.invertible && g.degree != 0 {
                return Err(Error::InvalidGenerator {
                    name: g.name.clone(),
                    reason: "only degree-0 generators may be inverted".into(),
                });
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(Arc::new(Presentation {
            gens,
            index,
            weight_truncation,
        }))
    }

    pub fn gens(&self) -> &[GeneratorSpec] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gen_spec(&self, idx: usize) -> &GeneratorSpec {
        &self.gens[idx]
    }

    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn weight_truncation(&self) -> Option<i64> {
        self.weight_truncation
    }

    /// Shared-pointer or structural equality; Elements over equal
    /// presentations are compatible.
    pub fn same(a: &Arc<Presentation>, b: &Arc<Presentation>) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_inversions() {
        let dup = Presentation::new(vec![
            GeneratorSpec::new("x", 0, 1),
            GeneratorSpec::new("x", 1, 1),
        ]);
        assert!(matches!(dup, Err(Error::DuplicateGenerator(_))));

        let bad = Presentation::new(vec![GeneratorSpec {
            name: "xi".into(),
            degree: 1,
            weight: 0,
            invertible: true,
        }]);
        assert!(bad.is_err());
    }

    #[test]
    fn lookup_by_name() {
        let p = Presentation::new(vec![
            GeneratorSpec::invertible("t", 1),
            GeneratorSpec::new("ev", 1, 0),
        ])
        .unwrap();
        assert_eq!(p.lookup("t").unwrap(), 0);
        assert_eq!(p.lookup("ev").unwrap(), 1);
        assert!(p.lookup("zz").is_err());
    }
}
