//! JSON documents. Every top-level document carries `schema_version` and
//! `command`.

use santalo_core::continuation::SolutionSet;
use santalo_core::exact::Rational;
use santalo_core::numeric::Complex64;
use santalo_core::poly::SparsePoly;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};
use crate::format::parse_rational;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exp: Vec<u32>,
}

/// `{ "vars": n, "terms": [{ "coeff": "p/q", "exp": [..] }, ..] }` with terms
/// in descending lexicographic order of exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub vars: usize,
    pub terms: Vec<TermJson>,
}

impl From<&SparsePoly> for PolynomialJson {
    fn from(p: &SparsePoly) -> Self {
        let terms = p.terms().rev().map(|(e, c)| TermJson { coeff: c.to_string(), exp: e.clone() }).collect();
        Self { vars: p.num_vars(), terms }
    }
}

impl PolynomialJson {
    pub fn to_poly(&self) -> Result<SparsePoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.exp.len() != self.vars {
                return Err(CliError::Usage(format!("exponent {:?} does not have {} entries", t.exp, self.vars)));
            }
            terms.push((t.exp.clone(), parse_rational(&t.coeff)?));
        }
        Ok(SparsePoly::from_terms(self.vars, terms))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&[Complex64]> for ComplexVectorJson {
    fn from(v: &[Complex64]) -> Self {
        Self { re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() }
    }
}

impl ComplexVectorJson {
    pub fn to_complex(&self) -> Vec<Complex64> {
        self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionMetadata {
    pub count: usize,
    pub seed: u64,
    pub loops_tracked: usize,
    pub residual_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSetJson {
    pub metadata: SolutionMetadata,
    pub parameters: ComplexVectorJson,
    pub solutions: Vec<ComplexVectorJson>,
    pub regularity: Vec<f64>,
}

impl From<&SolutionSet> for SolutionSetJson {
    fn from(s: &SolutionSet) -> Self {
        Self {
            metadata: SolutionMetadata {
                count: s.len(),
                seed: s.seed,
                loops_tracked: s.loops_tracked,
                residual_max: s.residual_max,
            },
            parameters: s.parameters.as_slice().into(),
            solutions: s.solutions.iter().map(|x| x.as_slice().into()).collect(),
            regularity: s.regularity.clone(),
        }
    }
}

impl SolutionSetJson {
    pub fn to_solution_set(&self) -> SolutionSet {
        SolutionSet {
            parameters: self.parameters.to_complex(),
            solutions: self.solutions.iter().map(ComplexVectorJson::to_complex).collect(),
            regularity: self.regularity.clone(),
            seed: self.metadata.seed,
            loops_tracked: self.metadata.loops_tracked,
            residual_max: self.metadata.residual_max,
        }
    }
}

pub fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|q| Value::String(q.to_string())).collect())
}

/// Wraps a command's payload with the schema header.
pub fn document(command: &str, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    map.insert("command".into(), json!(command));
    if let Value::Object(fields) = body {
        map.extend(fields);
    }
    Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use santalo_core::exact::rat;

    #[test]
    fn polynomial_terms_descend() {
        let mut p = SparsePoly::zero(3);
        p.add_term(vec![0, 0, 1], rat(2, 3));
        p.add_term(vec![1, 0, 0], rat(-1, 1));
        p.add_term(vec![0, 1, 0], rat(5, 1));
        let j = PolynomialJson::from(&p);
        let exps: Vec<_> = j.terms.iter().map(|t| t.exp.clone()).collect();
        assert_eq!(exps, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(j.terms[2].coeff, "2/3");
        assert_eq!(j.to_poly().unwrap(), p);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(serde_json::from_str::<PolynomialJson>(&text).unwrap(), j);
    }

    #[test]
    fn solution_set_round_trip() {
        let set = SolutionSet {
            parameters: vec![Complex64::new(1.0, -0.5)],
            solutions: vec![vec![Complex64::new(0.25, 1.0), Complex64::new(-2.0, 0.0)]],
            regularity: vec![0.3],
            seed: 9,
            loops_tracked: 12,
            residual_max: 1e-15,
        };
        let j = SolutionSetJson::from(&set);
        let text = serde_json::to_string(&j).unwrap();
        let back: SolutionSetJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_solution_set(), set);
        assert_eq!(back.metadata.count, 1);
    }

    #[test]
    fn document_header() {
        let doc = document("volume", json!({"value": "3/2"}));
        assert_eq!(doc["schema_version"], 1);
        assert_eq!(doc["command"], "volume");
        assert_eq!(doc["value"], "3/2");
    }
}
