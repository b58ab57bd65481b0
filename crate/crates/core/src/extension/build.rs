use std::ops::Range;

use crate::error::{shape, Result};
use crate::liealg::LieAlgebra;
use crate::scalar::Scalar;

use super::couple::Couple;

/// The split Lie bracket on `K ⊕ g_B` defined by a couple.
///
/// Kernel basis vectors come first, horizontal lifts `h(e_i)` after them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedAlgebra<S> {
    total: LieAlgebra<S>,
    n_k: usize,
    n_b: usize,
}

impl<S: Scalar> ExtendedAlgebra<S> {
    pub fn total(&self) -> &LieAlgebra<S> {
        &self.total
    }

    pub fn kernel_dim(&self) -> usize {
        self.n_k
    }

    pub fn base_dim(&self) -> usize {
        self.n_b
    }

    pub fn kernel_range(&self) -> Range<usize> {
        0..self.n_k
    }

    pub fn horizontal_range(&self) -> Range<usize> {
        self.n_k..self.n_k + self.n_b
    }

    /// `π`: drops the kernel block.
    pub fn project(&self, v: &[S]) -> Result<Vec<S>> {
        self.check_len(v, self.n_k + self.n_b)?;
        Ok(v[self.n_k..].to_vec())
    }

    /// `ι`: kernel vector into the total space.
    pub fn inject(&self, kappa: &[S]) -> Result<Vec<S>> {
        self.check_len(kappa, self.n_k)?;
        let mut v = kappa.to_vec();
        v.resize(self.n_k + self.n_b, S::zero());
        Ok(v)
    }

    /// Horizontal lift `h`.
    pub fn lift(&self, alpha: &[S]) -> Result<Vec<S>> {
        self.check_len(alpha, self.n_b)?;
        let mut v = vec![S::zero(); self.n_k];
        v.extend(alpha.iter().cloned());
        Ok(v)
    }

    /// Kernel block of a total vector.
    pub fn vertical(&self, v: &[S]) -> Result<Vec<S>> {
        self.check_len(v, self.n_k + self.n_b)?;
        Ok(v[..self.n_k].to_vec())
    }

    fn check_len(&self, v: &[S], n: usize) -> Result<()> {
        if v.len() == n {
            Ok(())
        } else {
            Err(shape(format!("expected a vector of length {n}, got {}", v.len())))
        }
    }
}

/// Assembles the bracket
/// `[κ₁, κ₂] = [κ₁, κ₂]_K`, `[h(α), κ] = D_α κ`,
/// `[h(α), h(β)] = h([α, β]) + ω(α, β)`.
///
/// Works for any couple; the result satisfies Jacobi exactly when the couple
/// is admissible.
pub fn build_extension<S: Scalar>(cpl: &Couple<S>) -> ExtendedAlgebra<S> {
    let (base, kernel) = (cpl.base(), cpl.kernel());
    let (n_k, n_b) = (kernel.dim(), base.dim());
    let n = n_k + n_b;
    let mut c = vec![vec![vec![S::zero(); n]; n]; n];
    for a in 0..n_k {
        for b in 0..n_k {
            for k in 0..n_k {
                c[a][b][k] = kernel.constant(a, b, k).clone();
            }
        }
    }
    for i in 0..n_b {
        let d = &cpl.d()[i];
        for a in 0..n_k {
            for k in 0..n_k {
                let v = d[(k, a)].clone();
                c[a][n_k + i][k] = -v.clone();
                c[n_k + i][a][k] = v;
            }
        }
        for j in 0..n_b {
            for m in 0..n_b {
                c[n_k + i][n_k + j][n_k + m] = base.constant(i, j, m).clone();
            }
            for (k, w) in cpl.omega(i, j).into_iter().enumerate() {
                c[n_k + i][n_k + j][k] = w;
            }
        }
    }
    let mut names: Vec<String> = kernel.basis_names().to_vec();
    names.extend(base.basis_names().iter().map(|b| format!("h({b})")));
    let total = LieAlgebra::from_structure_constants(names, c).expect("square table");
    ExtendedAlgebra { total, n_k, n_b }
}
