//! JSON schemas for algebras, couples, paths, grids, representations and
//! manifests. Indices are 0-based. Exact entries are written as `"p/q"`
//! strings; JSON numbers are read as the rational they denote exactly.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{shape, Error, Result};
use crate::extension::Couple;
use crate::liealg::{LieAlgebra, Representation};
use crate::linalg::Matrix;
use crate::paths::{APath, Grid, HomotopyGrid};
use crate::scalar::{format_rational, parse_rational, Rational};

/// A scalar literal: a number or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Text(String),
}

impl Num {
    pub fn rational(&self) -> Result<Rational> {
        match self {
            Num::Float(f) => crate::scalar::rational_from_f64(*f),
            Num::Text(s) => parse_rational(s),
        }
    }

    pub fn float(&self) -> Result<f64> {
        match self {
            Num::Float(f) => Ok(*f),
            Num::Text(s) => Ok(crate::scalar::Scalar::to_f64(&parse_rational(s)?)),
        }
    }

    pub fn exact(r: &Rational) -> Self {
        Num::Text(format_rational(r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub v: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    #[serde(default)]
    pub brackets: Vec<BracketJson>,
}

impl AlgebraJson {
    pub fn load(&self) -> Result<LieAlgebra<Rational>> {
        let basis = match &self.basis {
            Some(b) if b.len() != self.dim => {
                return Err(shape(format!("{} basis names for dimension {}", b.len(), self.dim)))
            }
            Some(b) => b.clone(),
            None => (0..self.dim).map(|i| format!("e{}", i + 1)).collect(),
        };
        let entries = self
            .brackets
            .iter()
            .map(|b| Ok((b.i, b.j, b.k, b.v.rational()?)))
            .collect::<Result<Vec<_>>>()?;
        LieAlgebra::from_brackets(basis, &entries)
    }

    /// Entries with `i < j` only.
    pub fn dump(alg: &LieAlgebra<Rational>) -> Self {
        let brackets = alg
            .bracket_entries()
            .into_iter()
            .filter(|(i, j, _, _)| i < j)
            .map(|(i, j, k, v)| BracketJson { i, j, k, v: Num::exact(&v) })
            .collect();
        Self { dim: alg.dim(), basis: Some(alg.basis_names().to_vec()), brackets }
    }
}

/// An algebra given by name or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Name(String),
    Inline(AlgebraJson),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaJson {
    pub i: usize,
    pub j: usize,
    pub v: Vec<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupleJson {
    pub base: AlgebraRef,
    pub kernel: AlgebraRef,
    #[serde(rename = "D")]
    pub d: Vec<Vec<Vec<Num>>>,
    #[serde(default)]
    pub omega: Vec<OmegaJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathJson {
    pub algebra: AlgebraRef,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: Vec<Vec<f64>>,
}

/// `a[j][i]` and `b[j][i]` hold the values at `(t_i, ε_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridJson {
    pub algebra: AlgebraRef,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub a: Vec<Vec<Vec<f64>>>,
    pub b: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepJson {
    pub dim: usize,
    pub rho: Vec<Vec<Vec<Num>>>,
}

impl RepJson {
    pub fn load(&self) -> Result<Representation<Rational>> {
        let rho = self.rho.iter().map(|m| matrix(m)).collect::<Result<Vec<_>>>()?;
        Representation::new(self.dim, rho)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default = "default_tol_ode")]
    pub tol_ode: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_tol_ode() -> f64 {
    crate::ode::DEFAULT_TOL_ODE
}

fn default_steps() -> usize {
    crate::ode::DEFAULT_STEPS
}

fn default_grid() -> usize {
    64
}

impl Default for Defaults {
    fn default() -> Self {
        Self { tol_ode: default_tol_ode(), steps: default_steps(), grid: default_grid() }
    }
}

/// Named entities sharing one file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default)]
    pub algebras: BTreeMap<String, AlgebraJson>,
    #[serde(default)]
    pub couples: BTreeMap<String, CoupleJson>,
    #[serde(default)]
    pub paths: BTreeMap<String, PathJson>,
    #[serde(default)]
    pub grids: BTreeMap<String, GridJson>,
    #[serde(default)]
    pub representations: BTreeMap<String, RepJson>,
}

fn matrix(rows: &[Vec<Num>]) -> Result<Matrix<Rational>> {
    let rows = rows.iter().map(|r| r.iter().map(Num::rational).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(shape("ragged matrix rows"));
    }
    Ok(Matrix::from_rows(rows))
}

fn unresolved(kind: &str, name: &str) -> Error {
    Error::Parse(format!("unknown {kind} '{name}'"))
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn algebra(&self, r: &AlgebraRef) -> Result<LieAlgebra<Rational>> {
        match r {
            AlgebraRef::Name(n) => self.algebras.get(n).ok_or_else(|| unresolved("algebra", n))?.load(),
            AlgebraRef::Inline(a) => a.load(),
        }
    }

    pub fn algebra_named(&self, name: &str) -> Result<LieAlgebra<Rational>> {
        self.algebra(&AlgebraRef::Name(name.to_string()))
    }

    /// Base, kernel, `D` and `ω` entries of a couple, before any check.
    #[allow(clippy::type_complexity)]
    pub fn couple_parts(
        &self,
        name: &str,
    ) -> Result<(LieAlgebra<Rational>, LieAlgebra<Rational>, Vec<Matrix<Rational>>, Vec<(usize, usize, Vec<Rational>)>)> {
        let c = self.couples.get(name).ok_or_else(|| unresolved("couple", name))?;
        let base = self.algebra(&c.base)?;
        let kernel = self.algebra(&c.kernel)?;
        let d = c.d.iter().map(|m| matrix(m)).collect::<Result<Vec<_>>>()?;
        let omega = c
            .omega
            .iter()
            .map(|w| Ok((w.i, w.j, w.v.iter().map(Num::rational).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok((base, kernel, d, omega))
    }

    pub fn couple(&self, name: &str) -> Result<Couple<Rational>> {
        let (base, kernel, d, omega) = self.couple_parts(name)?;
        Couple::new(base, kernel, d, &omega)
    }

    pub fn path(&self, name: &str) -> Result<APath> {
        let p = self.paths.get(name).ok_or_else(|| unresolved("path", name))?;
        if p.samples.len() != p.n + 1 {
            return Err(shape(format!("path '{name}' has N = {} but {} samples", p.n, p.samples.len())));
        }
        let alg = self.algebra(&p.algebra)?.to_f64();
        APath::new(alg, p.samples.iter().map(|s| DVector::from_column_slice(s)).collect())
    }

    pub fn grid(&self, name: &str) -> Result<HomotopyGrid> {
        let g = self.grids.get(name).ok_or_else(|| unresolved("grid", name))?;
        let alg = self.algebra(&g.algebra)?.to_f64();
        let load = |rows: &Vec<Vec<Vec<f64>>>| -> Result<Grid> {
            if rows.len() != g.m + 1 || rows.iter().any(|r| r.len() != g.n + 1) {
                return Err(shape(format!("grid '{name}' arrays must be (M+1) x (N+1)")));
            }
            Grid::from_rows(rows.iter().map(|r| r.iter().map(|v| DVector::from_column_slice(v)).collect()).collect())
        };
        HomotopyGrid::new(alg, load(&g.a)?, load(&g.b)?)
    }

    pub fn representation(&self, name: &str) -> Result<Representation<Rational>> {
        self.representations.get(name).ok_or_else(|| unresolved("representation", name))?.load()
    }
}

pub fn path_json(name: &str, p: &APath) -> PathJson {
    PathJson {
        algebra: AlgebraRef::Name(name.to_string()),
        n: p.intervals(),
        samples: p.samples().iter().map(|v| v.iter().copied().collect()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::so3;

    const MANIFEST: &str = r#"{
        "algebras": {
            "r2": {"dim": 2},
            "r1": {"dim": 1},
            "so3": {"dim": 3, "brackets": [
                {"i": 0, "j": 1, "k": 2, "v": 1},
                {"i": 1, "j": 2, "k": 0, "v": "1"},
                {"i": 2, "j": 0, "k": 1, "v": "2/2"}
            ]}
        },
        "couples": {
            "heis": {"base": "r2", "kernel": "r1", "D": [[[0]], [[0]]], "omega": [{"i": 0, "j": 1, "v": ["-1"]}]},
            "bad": {"base": "r2", "kernel": "nope", "D": []}
        },
        "paths": {"line": {"algebra": "r2", "N": 2, "samples": [[1, 0], [1, 0.5], [1, 1]]}},
        "representations": {"std": {"dim": 1, "rho": [[[0]]]}}
    }"#;

    #[test]
    fn loads_named_entities() {
        let m = Manifest::from_json(MANIFEST).unwrap();
        assert_eq!(m.algebra_named("so3").unwrap().bracket_entries(), so3().bracket_entries());
        let c = m.couple("heis").unwrap();
        assert_eq!(c.omega(1, 0), vec![Rational::from_integer(1.into())]);
        assert_eq!(m.path("line").unwrap().intervals(), 2);
        assert_eq!(m.defaults, Defaults::default());
        assert!(matches!(m.couple("bad"), Err(Error::Parse(_))));
        assert!(matches!(m.couple("missing"), Err(Error::Parse(_))));
    }

    #[test]
    fn algebra_roundtrip() {
        let j = AlgebraJson::dump(&so3());
        let text = serde_json::to_string(&j).unwrap();
        let back: AlgebraJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.load().unwrap(), so3());
    }

    #[test]
    fn rejects_unknown_fields_and_bad_literals() {
        assert!(Manifest::from_json(r#"{"algbras": {}}"#).is_err());
        let m = Manifest::from_json(r#"{"algebras": {"x": {"dim": 2, "brackets": [{"i":0,"j":1,"k":0,"v":"1/0"}]}}}"#).unwrap();
        assert!(matches!(m.algebra_named("x"), Err(Error::Parse(_))));
    }
}
