use crate::error::{contract, shape, Error, Result};
use crate::exterior::{binomial, without, SubsetBasis};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

use super::algebra::LieAlgebra;

/// A linear action of a Lie algebra's basis on a coefficient space.
///
/// `rho[i]` is the `m x m` matrix of basis element `e_i`. A
/// [`Representation`] is only a homomorphism if `check` passes.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<S> {
    dim: usize,
    rho: Vec<Matrix<S>>,
}

impl<S: Scalar> Representation<S> {
    pub fn new(dim: usize, rho: Vec<Matrix<S>>) -> Result<Self> {
        if rho.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(shape(format!("representation matrices must be {dim}x{dim}")));
        }
        Ok(Self { dim, rho })
    }

    /// The trivial one-dimensional representation.
    pub fn trivial(alg: &LieAlgebra<S>) -> Self {
        Self { dim: 1, rho: vec![Matrix::zeros(1, 1); alg.dim()] }
    }

    pub fn adjoint(alg: &LieAlgebra<S>) -> Self {
        Self { dim: alg.dim(), rho: (0..alg.dim()).map(|i| alg.ad_basis(i).into_matrix()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_f64(&self) -> Representation<f64> {
        Representation { dim: self.dim, rho: self.rho.iter().map(Matrix::to_f64).collect() }
    }

    pub fn matrices(&self) -> &[Matrix<S>] {
        &self.rho
    }

    /// `ρ(x) = Σ x_i ρ(e_i)`
    pub fn of(&self, x: &[S]) -> Matrix<S> {
        x.iter()
            .zip(&self.rho)
            .filter(|(c, _)| !c.is_zero())
            .fold(Matrix::zeros(self.dim, self.dim), |acc, (c, m)| acc.add(&m.scale(c)))
    }

    /// Largest entry of `ρ[e_i,e_j] - [ρ e_i, ρ e_j]` over basis pairs.
    pub fn homomorphism_defect(&self, alg: &LieAlgebra<S>) -> Result<Vec<(usize, usize)>> {
        if self.rho.len() != alg.dim() {
            return Err(shape(format!("need {} representation matrices, got {}", alg.dim(), self.rho.len())));
        }
        let mut bad = Vec::new();
        for i in 0..alg.dim() {
            for j in i + 1..alg.dim() {
                let lhs = self.of(&alg.bracket_basis(i, j));
                let rhs = self.rho[i].commutator(&self.rho[j]);
                if !lhs.sub(&rhs).is_zero() {
                    bad.push((i, j));
                }
            }
        }
        Ok(bad)
    }

    pub fn check(&self, alg: &LieAlgebra<S>) -> Result<()> {
        let bad = self.homomorphism_defect(alg)?;
        if bad.is_empty() {
            Ok(())
        } else {
            Err(contract(format!("not a representation: bracket not preserved on pairs {bad:?}")))
        }
    }
}

/// An element of `Λ^k L* ⊗ V`, coefficients indexed subset-major,
/// coefficient-minor.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain<S> {
    pub degree: usize,
    pub coeff_dim: usize,
    pub coeffs: Vec<S>,
}

impl<S: Scalar> Cochain<S> {
    pub fn zero(n: usize, degree: usize, coeff_dim: usize) -> Self {
        Self { degree, coeff_dim, coeffs: vec![S::zero(); binomial(n, degree) * coeff_dim] }
    }

    /// Coefficient on the sorted subset at `subset_index`, component `a`.
    pub fn get(&self, subset_index: usize, a: usize) -> &S {
        &self.coeffs[subset_index * self.coeff_dim + a]
    }
}

/// Matrix of the Chevalley-Eilenberg differential `C^k → C^{k+1}` with
/// coefficients acted on by `action` (one `m x m` matrix per basis element).
///
/// The action is not required to be a representation, so this also
/// computes covariant differentials of connections with curvature.
pub(crate) fn ce_matrix<S: Scalar>(alg: &LieAlgebra<S>, m: usize, action: Option<&[Matrix<S>]>, k: usize) -> Matrix<S> {
    let n = alg.dim();
    let src = SubsetBasis::new(n, k);
    let dst = SubsetBasis::new(n, k + 1);
    let mut d = Matrix::<S>::zeros(dst.len() * m, src.len() * m);
    for (ti, t) in dst.subsets().iter().enumerate() {
        // action terms: Σ_i (-1)^i ρ(x_i) c(.., x̂_i, ..)
        if let Some(action) = action {
            for i in 0..t.len() {
                let rest = without(t, &[i]);
                let si = src.position(&rest).expect("subset of size k");
                let sign = if i % 2 == 0 { S::one() } else { -S::one() };
                let rho = &action[t[i]];
                for b in 0..m {
                    for a in 0..m {
                        let v = &rho[(b, a)];
                        if !v.is_zero() {
                            let (r, c) = (ti * m + b, si * m + a);
                            d[(r, c)] = d[(r, c)].clone() + sign.clone() * v.clone();
                        }
                    }
                }
            }
        }
        // bracket terms: Σ_{i<j} (-1)^{i+j} c([x_i, x_j], .., x̂_i, .., x̂_j, ..)
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                let rest = without(t, &[i, j]);
                let sign_ij = if (i + j) % 2 == 0 { S::one() } else { -S::one() };
                for mm in 0..n {
                    let c = alg.constant(t[i], t[j], mm);
                    if c.is_zero() || rest.contains(&mm) {
                        continue;
                    }
                    // e^S(e_mm, rest) = sign of sorting (mm, rest)
                    let mut args = vec![mm];
                    args.extend(rest.iter().copied());
                    let (sorted, sgn) = crate::exterior::sort_with_sign(&args).expect("distinct");
                    let si = src.position(&sorted).expect("subset of size k");
                    let coef = if sgn > 0 { c.clone() } else { -c.clone() } * sign_ij.clone();
                    for a in 0..m {
                        let (r, col) = (ti * m + a, si * m + a);
                        d[(r, col)] = d[(r, col)].clone() + coef.clone();
                    }
                }
            }
        }
    }
    d
}

/// Matrix of `d : C^k → C^{k+1}` in the lexicographic subset basis,
/// with trivial scalar coefficients when `rep` is `None`.
pub fn ce_differential<S: Scalar>(
    alg: &LieAlgebra<S>,
    rep: Option<&Representation<S>>,
    k: usize,
) -> Result<Matrix<S>> {
    let n = alg.dim();
    if k > n {
        return Err(Error::Degree { degree: k, max: n });
    }
    match rep {
        None => Ok(ce_matrix(alg, 1, None, k)),
        Some(r) => {
            r.check(alg)?;
            Ok(ce_matrix(alg, r.dim(), Some(r.matrices()), k))
        }
    }
}

/// Betti numbers `b_0 ..= b_n` of the Chevalley-Eilenberg complex.
pub fn cohomology_dims<S: Scalar>(alg: &LieAlgebra<S>, rep: Option<&Representation<S>>) -> Result<Vec<usize>> {
    let n = alg.dim();
    let m = rep.map_or(1, Representation::dim);
    let ranks: Vec<usize> = (0..=n).map(|k| ce_differential(alg, rep, k).map(|d| d.rank())).collect::<Result<_>>()?;
    Ok((0..=n)
        .map(|k| {
            let dim = binomial(n, k) * m;
            let below = if k == 0 { 0 } else { ranks[k - 1] };
            dim - ranks[k] - below
        })
        .collect())
}
