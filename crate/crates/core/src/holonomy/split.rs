use nalgebra::DMatrix;

use crate::error::{shape, Result};
use crate::extension::{build_extension, Couple};
use crate::paths::{concatenate, APath};

use super::transport::Connection;

/// An extension path `a` written as `(a_B, a_K)` with
/// `a_K(t) = Φ_{t,0}⁻¹ a_V(t)`, `a_V` the vertical part of `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPath {
    pub a_b: APath,
    pub a_k: APath,
}

fn inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().try_inverse().expect("transports are invertible")
}

/// Splits a path in the extension `K ⊕ g_B` (kernel coordinates first).
pub fn split_path(cpl: &Couple<f64>, a: &APath, steps: usize) -> Result<SplitPath> {
    let conn = Connection::new(cpl);
    let (nk, nb) = (conn.n_k, conn.n_b);
    if a.dim() != nk + nb {
        return Err(shape(format!("path has dimension {}, extension {}", a.dim(), nk + nb)));
    }
    let a_b = APath::new(cpl.base().clone(), a.samples().iter().map(|v| v.rows(nk, nb).into_owned()).collect())?;
    let phi = conn.nodes(&a_b, steps);
    let a_k = APath::new(
        cpl.kernel().clone(),
        a.samples().iter().zip(&phi).map(|(v, p)| inverse(p) * v.rows(0, nk)).collect(),
    )?;
    Ok(SplitPath { a_b, a_k })
}

/// Inverse of [`split_path`]: `a = (Φ_{t,0} a_K(t), a_B(t))`.
pub fn unsplit(cpl: &Couple<f64>, sp: &SplitPath, steps: usize) -> Result<APath> {
    let conn = Connection::new(cpl);
    conn.check_base_path(&sp.a_b)?;
    if sp.a_k.intervals() != sp.a_b.intervals() || sp.a_k.dim() != conn.n_k {
        return Err(shape("a_K must be a kernel path sampled like a_B"));
    }
    let phi = conn.nodes(&sp.a_b, steps);
    let total = build_extension(cpl).total().clone();
    let samples = sp
        .a_k
        .samples()
        .iter()
        .zip(sp.a_b.samples())
        .zip(&phi)
        .map(|((k, b), p)| {
            let v = p * k;
            nalgebra::DVector::from_iterator(conn.n_k + conn.n_b, v.iter().chain(b.iter()).copied())
        })
        .collect();
    APath::new(total, samples)
}

/// Concatenation of split paths, `sp1` first:
/// `(a²_B · a¹_B, Φ_{a¹_B}⁻¹(a²_K) · a¹_K)` with `Φ_{a¹_B}⁻¹` applied
/// pointwise as `Φ^{a¹_B}_{1,0}⁻¹`.
pub fn concat_split(cpl: &Couple<f64>, sp1: &SplitPath, sp2: &SplitPath, steps: usize) -> Result<SplitPath> {
    let conn = Connection::new(cpl);
    conn.check_base_path(&sp1.a_b)?;
    conn.check_base_path(&sp2.a_b)?;
    let phi1 = conn.nodes(&sp1.a_b, steps).pop().expect("at least two nodes");
    let inv = inverse(&phi1);
    let shifted = sp2.a_k.map_samples(cpl.kernel().clone(), |_, v| &inv * v)?;
    Ok(SplitPath { a_b: concatenate(&sp1.a_b, &sp2.a_b)?, a_k: concatenate(&sp1.a_k, &shifted)? })
}
