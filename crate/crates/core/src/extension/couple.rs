use crate::error::{contract, shape, Error, Result};
use crate::exterior::{binomial, wedge_action, SubsetBasis};
use crate::liealg::{ce_matrix, LieAlgebra};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Connection data `(D, ω)` of an extension of `base` by `kernel`.
///
/// `D[i]` is the derivation of the kernel attached to the base vector
/// `e_i`; `ω` is a kernel-valued 2-form on the base. Admissibility is not
/// enforced here, see [`is_admissible`].
#[derive(Debug, Clone, PartialEq)]
pub struct Couple<S> {
    base: LieAlgebra<S>,
    kernel: LieAlgebra<S>,
    d: Vec<Matrix<S>>,
    /// One kernel vector per pair `i < j`, in lexicographic order.
    omega: Vec<Vec<S>>,
}

impl<S: Scalar> Couple<S> {
    /// `omega` lists `(i, j, ω(e_i, e_j))`; the opposite order is filled in
    /// by antisymmetry and unlisted pairs are zero.
    pub fn new(
        base: LieAlgebra<S>,
        kernel: LieAlgebra<S>,
        d: Vec<Matrix<S>>,
        omega: &[(usize, usize, Vec<S>)],
    ) -> Result<Self> {
        let (nb, nk) = (base.dim(), kernel.dim());
        if d.len() != nb {
            return Err(shape(format!("need {nb} derivation matrices, got {}", d.len())));
        }
        for (i, m) in d.iter().enumerate() {
            if m.rows() != nk || m.cols() != nk {
                return Err(shape(format!("D[{i}] must be {nk}x{nk}")));
            }
            if !kernel.is_derivation(m) {
                return Err(contract(format!("D[{i}] is not a derivation of the kernel")));
            }
        }
        let pairs = SubsetBasis::new(nb, 2);
        let mut om = vec![vec![S::zero(); nk]; pairs.len()];
        let mut set = vec![false; pairs.len()];
        for (i, j, v) in omega {
            let (i, j) = (*i, *j);
            if i >= nb || j >= nb {
                return Err(shape(format!("omega index ({i},{j}) out of range")));
            }
            if v.len() != nk {
                return Err(shape(format!("omega({i},{j}) must have length {nk}")));
            }
            if i == j {
                if v.iter().all(S::is_negligible) {
                    continue;
                }
                return Err(contract(format!("omega({i},{i}) must vanish")));
            }
            let (a, b, sign) = if i < j { (i, j, S::one()) } else { (j, i, -S::one()) };
            let p = pairs.position(&[a, b]).expect("pair");
            let val: Vec<S> = v.iter().map(|x| x.clone() * sign.clone()).collect();
            if set[p] && om[p] != val {
                return Err(contract(format!("conflicting omega entries for ({a},{b})")));
            }
            om[p] = val;
            set[p] = true;
        }
        Ok(Self { base, kernel, d, omega: om })
    }

    /// Builds a couple from `ω` given as a `Λ²g_B* ⊗ K` cochain (pair-major).
    pub fn from_parts(base: LieAlgebra<S>, kernel: LieAlgebra<S>, d: Vec<Matrix<S>>, omega: Vec<S>) -> Result<Self> {
        let (nb, nk) = (base.dim(), kernel.dim());
        if omega.len() != binomial(nb, 2) * nk {
            return Err(shape("omega cochain has the wrong length"));
        }
        let pairs = SubsetBasis::new(nb, 2);
        let entries: Vec<_> = pairs
            .subsets()
            .iter()
            .enumerate()
            .map(|(p, s)| (s[0], s[1], omega[p * nk..(p + 1) * nk].to_vec()))
            .collect();
        Self::new(base, kernel, d, &entries)
    }

    pub fn base(&self) -> &LieAlgebra<S> {
        &self.base
    }

    pub fn kernel(&self) -> &LieAlgebra<S> {
        &self.kernel
    }

    pub fn d(&self) -> &[Matrix<S>] {
        &self.d
    }

    /// `D_x = Σ x_i D_i`
    pub fn d_of(&self, x: &[S]) -> Matrix<S> {
        let nk = self.kernel.dim();
        x.iter()
            .zip(&self.d)
            .filter(|(c, _)| !c.is_zero())
            .fold(Matrix::zeros(nk, nk), |acc, (c, m)| acc.add(&m.scale(c)))
    }

    /// `ω(e_i, e_j)`
    pub fn omega(&self, i: usize, j: usize) -> Vec<S> {
        let nk = self.kernel.dim();
        if i == j {
            return vec![S::zero(); nk];
        }
        let pairs = SubsetBasis::new(self.base.dim(), 2);
        let (a, b) = (i.min(j), i.max(j));
        let v = &self.omega[pairs.position(&[a, b]).expect("pair")];
        if i < j {
            v.clone()
        } else {
            v.iter().map(|x| -x.clone()).collect()
        }
    }

    /// `ω(x, y)` for arbitrary base vectors.
    pub fn omega_of(&self, x: &[S], y: &[S]) -> Vec<S> {
        let nb = self.base.dim();
        let mut out = vec![S::zero(); self.kernel.dim()];
        for i in 0..nb {
            for j in i + 1..nb {
                let w = x[i].clone() * y[j].clone() - x[j].clone() * y[i].clone();
                if w.is_zero() {
                    continue;
                }
                for (o, v) in out.iter_mut().zip(self.omega(i, j)) {
                    *o = o.clone() + w.clone() * v;
                }
            }
        }
        out
    }

    /// `ω` as an element of `Λ²g_B* ⊗ K`, pair-major.
    pub fn omega_cochain(&self) -> Vec<S> {
        self.omega.iter().flatten().cloned().collect()
    }

    pub fn is_flat_omega(&self) -> bool {
        self.omega.iter().flatten().all(S::is_negligible)
    }

    pub fn with_d(&self, d: Vec<Matrix<S>>) -> Result<Self> {
        Self::from_parts(self.base.clone(), self.kernel.clone(), d, self.omega_cochain())
    }

    pub fn with_omega(&self, omega: Vec<S>) -> Result<Self> {
        Self::from_parts(self.base.clone(), self.kernel.clone(), self.d.clone(), omega)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Couple<T> {
        Couple {
            base: self.base.map(f),
            kernel: self.kernel.map(f),
            d: self.d.iter().map(|m| m.map(f)).collect(),
            omega: self.omega.iter().map(|v| v.iter().map(f).collect()).collect(),
        }
    }

    pub fn to_f64(&self) -> Couple<f64> {
        self.map(S::to_f64)
    }
}

/// `Curv_D(e_i, e_j) = [D_i, D_j] − D_{[e_i, e_j]}` for each pair `i < j`,
/// in lexicographic order.
pub fn curv_d<S: Scalar>(cpl: &Couple<S>) -> Vec<Matrix<S>> {
    SubsetBasis::new(cpl.base.dim(), 2)
        .subsets()
        .iter()
        .map(|s| {
            let (i, j) = (s[0], s[1]);
            cpl.d[i].commutator(&cpl.d[j]).sub(&cpl.d_of(&cpl.base.bracket_basis(i, j)))
        })
        .collect()
}

/// Matrix of the covariant differential
/// `∂_H : Λᵖg_B* ⊗ ΛˡK → Λᵖ⁺¹g_B* ⊗ ΛˡK`, with `D` acting on `ΛˡK` as a
/// derivation. Cochains are indexed base-subset-major.
pub fn covariant_matrix<S: Scalar>(cpl: &Couple<S>, p: usize, l: usize) -> Result<Matrix<S>> {
    let (nb, nk) = (cpl.base.dim(), cpl.kernel.dim());
    if p > nb {
        return Err(Error::Degree { degree: p, max: nb });
    }
    if l > nk {
        return Err(Error::Degree { degree: l, max: nk });
    }
    let action: Vec<Matrix<S>> = cpl.d.iter().map(|m| wedge_action(m, l)).collect();
    Ok(ce_matrix(&cpl.base, binomial(nk, l), Some(&action), p))
}

/// `∂_H θ` for `θ ∈ Λᵖg_B* ⊗ ΛˡK` given as a coefficient vector.
pub fn covariant_differential<S: Scalar>(cpl: &Couple<S>, theta: &[S], p: usize, l: usize) -> Result<Vec<S>> {
    let m = covariant_matrix(cpl, p, l)?;
    if theta.len() != m.cols() {
        return Err(shape(format!("cochain of bidegree ({p},{l}) needs {} coefficients", m.cols())));
    }
    Ok(m.apply(theta))
}

/// Outcome of one admissibility condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub pass: bool,
    /// Largest absolute entry of the residual.
    pub residual: f64,
}

impl Check {
    pub fn from_residual<S: Scalar>(r: impl IntoIterator<Item = S>) -> Self {
        let mut pass = true;
        let mut residual = 0.0_f64;
        for v in r {
            pass &= v.is_negligible();
            residual = residual.max(v.to_f64().abs());
        }
        Self { pass, residual }
    }

    /// Passes iff `residual <= tol`.
    pub fn within(residual: f64, tol: f64) -> Self {
        Self { pass: residual <= tol, residual }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// `∂_H ω = 0`
    pub closure: Check,
    /// `Curv_D = ad ∘ ω`
    pub curvature_identity: Check,
}

impl AdmissibilityReport {
    pub fn ok(&self) -> bool {
        self.closure.pass && self.curvature_identity.pass
    }
}

pub fn is_admissible<S: Scalar>(cpl: &Couple<S>) -> AdmissibilityReport {
    let nb = cpl.base.dim();
    let closure = if nb >= 3 {
        let dw = covariant_differential(cpl, &cpl.omega_cochain(), 2, 1).expect("degrees in range");
        Check::from_residual(dw)
    } else {
        Check { pass: true, residual: 0.0 }
    };
    let pairs = SubsetBasis::new(nb, 2);
    let curv = curv_d(cpl);
    let residual = pairs.subsets().iter().zip(&curv).flat_map(|(s, c)| {
        let ad = cpl.kernel.ad(&cpl.omega(s[0], s[1])).expect("kernel vector").into_matrix();
        let diff = c.sub(&ad);
        diff.to_rows().into_iter().flatten().collect::<Vec<_>>()
    });
    AdmissibilityReport { closure, curvature_identity: Check::from_residual(residual) }
}
