use crate::error::{contract, shape, Result};
use crate::exterior::SubsetBasis;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

use super::build::build_extension;
use super::couple::{covariant_matrix, Couple};

/// A linear map `Δ : g_B → K`, stored as an `n_K x n_B` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransform<S> {
    pub delta: Matrix<S>,
}

impl<S: Scalar> GaugeTransform<S> {
    pub fn new(delta: Matrix<S>) -> Self {
        Self { delta }
    }

    pub fn zero(n_k: usize, n_b: usize) -> Self {
        Self { delta: Matrix::zeros(n_k, n_b) }
    }

    /// `Δ` as a `g_B* ⊗ K` cochain (base-index-major).
    fn cochain(&self) -> Vec<S> {
        (0..self.delta.cols()).flat_map(|i| self.delta.col(i)).collect()
    }

    fn from_cochain(n_k: usize, n_b: usize, v: &[S]) -> Self {
        let mut delta = Matrix::zeros(n_k, n_b);
        for i in 0..n_b {
            for a in 0..n_k {
                delta[(a, i)] = v[i * n_k + a].clone();
            }
        }
        Self { delta }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { delta: self.delta.add(&other.delta) }
    }
}

fn check_shape<S: Scalar>(cpl: &Couple<S>, g: &GaugeTransform<S>) -> Result<()> {
    let (nk, nb) = (cpl.kernel().dim(), cpl.base().dim());
    if g.delta.rows() != nk || g.delta.cols() != nb {
        return Err(shape(format!("gauge transform must be {nk}x{nb}")));
    }
    Ok(())
}

/// Gauge action: `D' = D + ad∘Δ`, `ω' = ω + ∂_H Δ + [Δ ∧ Δ]_K`,
/// where `∂_H` uses the original `D` and `[Δ∧Δ]_K(α, β) = [Δα, Δβ]_K`.
pub fn apply_gauge<S: Scalar>(cpl: &Couple<S>, g: &GaugeTransform<S>) -> Result<Couple<S>> {
    check_shape(cpl, g)?;
    let (k, b) = (cpl.kernel(), cpl.base());
    let (nk, nb) = (k.dim(), b.dim());
    let d: Vec<Matrix<S>> = (0..nb)
        .map(|i| cpl.d()[i].add(k.ad(&g.delta.col(i)).expect("kernel vector").matrix()))
        .collect();
    let dh = covariant_matrix(cpl, 1, 1)?.apply(&g.cochain());
    let mut omega = cpl.omega_cochain();
    for (p, s) in SubsetBasis::new(nb, 2).subsets().iter().enumerate() {
        let wedge = k.bracket(&g.delta.col(s[0]), &g.delta.col(s[1]))?;
        for a in 0..nk {
            let idx = p * nk + a;
            omega[idx] = omega[idx].clone() + dh[idx].clone() + wedge[a].clone();
        }
    }
    Couple::from_parts(b.clone(), k.clone(), d, omega)
}

/// Entries of `F[x, y]' − [F x, F y]` over basis pairs of the
/// extension built from `apply_gauge(cpl, g)`, where
/// `F(κ, α) = (κ + Δα, α)` maps it to the extension of `cpl`.
pub fn shift_isomorphism_residual<S: Scalar>(cpl: &Couple<S>, g: &GaugeTransform<S>) -> Result<Vec<S>> {
    let gauged = apply_gauge(cpl, g)?;
    let e = build_extension(cpl);
    let e2 = build_extension(&gauged);
    let (nk, nb) = (cpl.kernel().dim(), cpl.base().dim());
    let n = nk + nb;
    let mut f = Matrix::identity(n);
    for i in 0..nb {
        for a in 0..nk {
            f[(a, nk + i)] = g.delta[(a, i)].clone();
        }
    }
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let lhs = f.apply(&e2.total().bracket_basis(x, y));
            let rhs = e.total().bracket(&f.col(x), &f.col(y))?;
            out.extend(lhs.into_iter().zip(rhs).map(|(l, r)| l - r));
        }
    }
    Ok(out)
}

/// `true` iff `F` is an exact bracket isomorphism.
pub fn is_shift_isomorphism<S: Scalar>(cpl: &Couple<S>, g: &GaugeTransform<S>) -> Result<bool> {
    Ok(shift_isomorphism_residual(cpl, g)?.iter().all(S::is_negligible))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Equivalence<S> {
    /// `apply_gauge(cpl1, Δ) == cpl2`
    Equivalent(GaugeTransform<S>),
    NotEquivalent,
    /// Neither a witness nor an obstruction could be produced.
    Undecided(String),
}

/// Decides whether two couples on the same algebras are gauge equivalent.
///
/// A supplied candidate is verified exactly. Otherwise the question is
/// settled only for abelian kernels, where `D` is gauge invariant and the
/// problem reduces to solving `∂_H Δ = ω₂ − ω₁`.
pub fn are_equivalent<S: Scalar>(
    cpl1: &Couple<S>,
    cpl2: &Couple<S>,
    candidate: Option<&GaugeTransform<S>>,
) -> Result<Equivalence<S>> {
    if cpl1.base() != cpl2.base() || cpl1.kernel() != cpl2.kernel() {
        return Err(contract("couples live on different algebras"));
    }
    let (nk, nb) = (cpl1.kernel().dim(), cpl1.base().dim());
    if cpl1 == cpl2 && candidate.is_none() {
        return Ok(Equivalence::Equivalent(GaugeTransform::zero(nk, nb)));
    }
    if let Some(g) = candidate {
        if apply_gauge(cpl1, g)? == *cpl2 {
            return Ok(Equivalence::Equivalent(g.clone()));
        }
    }
    if !cpl1.kernel().is_abelian() {
        let why = if candidate.is_some() { "candidate rejected; " } else { "" };
        return Ok(Equivalence::Undecided(format!("{why}non-abelian kernel (verification-only mode)")));
    }
    if cpl1.d() != cpl2.d() {
        return Ok(Equivalence::NotEquivalent);
    }
    let rhs: Vec<S> = cpl2
        .omega_cochain()
        .into_iter()
        .zip(cpl1.omega_cochain())
        .map(|(a, b)| a - b)
        .collect();
    if nb < 2 {
        return Ok(Equivalence::Equivalent(GaugeTransform::zero(nk, nb)));
    }
    let dh = covariant_matrix(cpl1, 1, 1)?;
    Ok(match dh.solve(&rhs) {
        Some(x) => Equivalence::Equivalent(GaugeTransform::from_cochain(nk, nb, &x)),
        None => Equivalence::NotEquivalent,
    })
}
