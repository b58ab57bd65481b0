use crate::error::{contract, shape, Error, Result};
use crate::exterior::{binomial, sort_with_sign, wedge_action, without, SubsetBasis};
use crate::extension::{build_extension, Check, Couple, ExtendedAlgebra};
use crate::liealg::{ce_differential, ce_matrix};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// An element of `Λᵖg_B* ⊗ Λ^qK*`, indexed base-subset-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BigradedCochain<S> {
    pub p: usize,
    pub q: usize,
    pub coeffs: Vec<S>,
}

impl<S: Scalar> BigradedCochain<S> {
    pub fn zero(n_b: usize, n_k: usize, p: usize, q: usize) -> Self {
        Self { p, q, coeffs: vec![S::zero(); binomial(n_b, p) * binomial(n_k, q)] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(S::is_negligible)
    }
}

fn sign<S: Scalar>(odd: bool) -> S {
    if odd {
        -S::one()
    } else {
        S::one()
    }
}

/// Signed permutation `C^k(A_E) → ⊕_{p+q=k} Λᵖg_B* ⊗ Λ^qK*`, rows ordered
/// by increasing `p`. The `(p, q)` component is
/// `θ(v_I; w_J) = Θ(h(v_I), w_J)`.
fn split_matrix<S: Scalar>(n_b: usize, n_k: usize, k: usize) -> Matrix<S> {
    let total = SubsetBasis::new(n_k + n_b, k);
    let mut m = Matrix::zeros(total.len(), total.len());
    let mut row = 0;
    for p in bidegrees(n_b, n_k, k) {
        let q = k - p;
        let (bs, ks) = (SubsetBasis::new(n_b, p), SubsetBasis::new(n_k, q));
        for i in bs.subsets() {
            for j in ks.subsets() {
                // Θ's coefficient lives on the sorted set J ∪ (n_K + I); moving the
                // p horizontal arguments past q kernel ones costs (−1)^{pq}.
                let mut s = j.clone();
                s.extend(i.iter().map(|x| x + n_k));
                let col = total.position(&s).expect("sorted");
                m[(row, col)] = sign((p * q) % 2 == 1);
                row += 1;
            }
        }
    }
    m
}

/// Base degrees `p` occurring in total degree `k`.
pub(crate) fn bidegrees(n_b: usize, n_k: usize, k: usize) -> std::ops::RangeInclusive<usize> {
    k.saturating_sub(n_k)..=k.min(n_b)
}

/// Splits a total `k`-cochain into its bigraded components.
pub fn decompose<S: Scalar>(ext: &ExtendedAlgebra<S>, theta: &[S], k: usize) -> Result<Vec<BigradedCochain<S>>> {
    let (n_b, n_k) = (ext.base_dim(), ext.kernel_dim());
    if k > n_b + n_k {
        return Err(Error::Degree { degree: k, max: n_b + n_k });
    }
    let m = split_matrix::<S>(n_b, n_k, k);
    if theta.len() != m.cols() {
        return Err(shape(format!("a {k}-cochain has {} coefficients", m.cols())));
    }
    let flat = m.apply(theta);
    let mut out = Vec::new();
    let mut at = 0;
    for p in bidegrees(n_b, n_k, k) {
        let len = binomial(n_b, p) * binomial(n_k, k - p);
        out.push(BigradedCochain { p, q: k - p, coeffs: flat[at..at + len].to_vec() });
        at += len;
    }
    Ok(out)
}

/// Inverse of [`decompose`]; missing bidegrees count as zero.
pub fn recompose<S: Scalar>(ext: &ExtendedAlgebra<S>, parts: &[BigradedCochain<S>], k: usize) -> Result<Vec<S>> {
    let (n_b, n_k) = (ext.base_dim(), ext.kernel_dim());
    if k > n_b + n_k {
        return Err(Error::Degree { degree: k, max: n_b + n_k });
    }
    let mut flat = Vec::new();
    for p in bidegrees(n_b, n_k, k) {
        let len = binomial(n_b, p) * binomial(n_k, k - p);
        match parts.iter().find(|c| c.p == p && c.q == k - p) {
            Some(c) if c.coeffs.len() == len => flat.extend(c.coeffs.iter().cloned()),
            Some(_) => return Err(shape(format!("component ({p},{}) has the wrong length", k - p))),
            None => flat.extend(std::iter::repeat_n(S::zero(), len)),
        }
    }
    // the split matrix is a signed permutation: its inverse is its transpose
    Ok(split_matrix::<S>(n_b, n_k, k).transpose().apply(&flat))
}

/// `δ₀,₁ = (−1)ᵖ id ⊗ d_K` on bidegree `(p, q)`.
pub fn delta01_matrix<S: Scalar>(cpl: &Couple<S>, p: usize, q: usize) -> Result<Matrix<S>> {
    let (n_b, n_k) = (cpl.base().dim(), cpl.kernel().dim());
    check_bidegree(n_b, n_k, p, q)?;
    let dk = if q < n_k { ce_differential(cpl.kernel(), None, q)? } else { Matrix::zeros(0, 1) };
    let blocks = binomial(n_b, p);
    let (r, c) = (dk.rows(), dk.cols());
    let s: S = sign(p % 2 == 1);
    let mut m = Matrix::zeros(blocks * r, blocks * c);
    for b in 0..blocks {
        for i in 0..r {
            for j in 0..c {
                m[(b * r + i, b * c + j)] = dk[(i, j)].clone() * s.clone();
            }
        }
    }
    Ok(m)
}

/// `δ₁,₀ = ∂_H` with `D` acting on `Λ^qK*` by the dual (contragredient)
/// derivation action.
pub fn delta10_matrix<S: Scalar>(cpl: &Couple<S>, p: usize, q: usize) -> Result<Matrix<S>> {
    let (n_b, n_k) = (cpl.base().dim(), cpl.kernel().dim());
    check_bidegree(n_b, n_k, p, q)?;
    let action: Vec<Matrix<S>> =
        cpl.d().iter().map(|d| wedge_action(d, q).transpose().scale(&-S::one())).collect();
    Ok(ce_matrix(cpl.base(), binomial(n_k, q), Some(&action), p))
}

/// `δ₂,₋₁`: insertion of the curvature,
/// `(δθ)(v_0 … v_{p+1}) = (−1)ᵖ Σ_{i<j} (−1)^{i+j} i_{ω(v_i, v_j)} θ(… v̂_i … v̂_j …)`.
pub fn delta21_matrix<S: Scalar>(cpl: &Couple<S>, p: usize, q: usize) -> Result<Matrix<S>> {
    let (n_b, n_k) = (cpl.base().dim(), cpl.kernel().dim());
    check_bidegree(n_b, n_k, p, q)?;
    if q == 0 {
        return Err(contract("δ₂,₋₁ lowers the kernel degree and needs q ≥ 1"));
    }
    let (src_b, src_k) = (SubsetBasis::new(n_b, p), SubsetBasis::new(n_k, q));
    let (dst_b, dst_k) = (SubsetBasis::new(n_b, p + 2), SubsetBasis::new(n_k, q - 1));
    let mut m = Matrix::<S>::zeros(dst_b.len() * dst_k.len(), src_b.len() * src_k.len());
    let outer: S = sign(p % 2 == 1);
    for (ti, t) in dst_b.subsets().iter().enumerate() {
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                let rest = without(t, &[i, j]);
                let si = src_b.position(&rest).expect("p-subset");
                let kappa = cpl.omega(t[i], t[j]);
                let s_ij = outer.clone() * sign((i + j) % 2 == 1);
                for (a, ka) in kappa.iter().enumerate() {
                    if ka.is_zero() {
                        continue;
                    }
                    for (ji, jset) in dst_k.subsets().iter().enumerate() {
                        let mut args = vec![a];
                        args.extend(jset.iter().copied());
                        let Some((sorted, sg)) = sort_with_sign(&args) else { continue };
                        let sj = src_k.position(&sorted).expect("q-subset");
                        let v = s_ij.clone() * ka.clone() * sign(sg < 0);
                        let (r, c) = (ti * dst_k.len() + ji, si * src_k.len() + sj);
                        m[(r, c)] = m[(r, c)].clone() + v;
                    }
                }
            }
        }
    }
    Ok(m)
}

fn check_bidegree(n_b: usize, n_k: usize, p: usize, q: usize) -> Result<()> {
    if p > n_b {
        return Err(Error::Degree { degree: p, max: n_b });
    }
    if q > n_k {
        return Err(Error::Degree { degree: q, max: n_k });
    }
    Ok(())
}

fn apply<S: Scalar>(m: Matrix<S>, theta: &BigradedCochain<S>, p: usize, q: usize) -> Result<BigradedCochain<S>> {
    if theta.coeffs.len() != m.cols() {
        return Err(shape(format!("cochain of bidegree ({},{}) has the wrong length", theta.p, theta.q)));
    }
    Ok(BigradedCochain { p, q, coeffs: m.apply(&theta.coeffs) })
}

pub fn delta01<S: Scalar>(cpl: &Couple<S>, theta: &BigradedCochain<S>) -> Result<BigradedCochain<S>> {
    apply(delta01_matrix(cpl, theta.p, theta.q)?, theta, theta.p, theta.q + 1)
}

pub fn delta10<S: Scalar>(cpl: &Couple<S>, theta: &BigradedCochain<S>) -> Result<BigradedCochain<S>> {
    apply(delta10_matrix(cpl, theta.p, theta.q)?, theta, theta.p + 1, theta.q)
}

pub fn delta21<S: Scalar>(cpl: &Couple<S>, theta: &BigradedCochain<S>) -> Result<BigradedCochain<S>> {
    if theta.q == 0 {
        return Err(contract("δ₂,₋₁ lowers the kernel degree and needs q ≥ 1"));
    }
    apply(delta21_matrix(cpl, theta.p, theta.q)?, theta, theta.p + 2, theta.q - 1)
}

/// Block matrix of `δ₀,₁ + δ₁,₀ + δ₂,₋₁ : C^k → C^{k+1}` in the bigraded
/// ordering used by [`decompose`].
fn delta_sum<S: Scalar>(cpl: &Couple<S>, k: usize) -> Result<Matrix<S>> {
    let (n_b, n_k) = (cpl.base().dim(), cpl.kernel().dim());
    let offsets = |deg: usize| {
        let mut off = Vec::new();
        let mut at = 0;
        for p in bidegrees(n_b, n_k, deg) {
            off.push((p, at));
            at += binomial(n_b, p) * binomial(n_k, deg - p);
        }
        (off, at)
    };
    let (src, ncols) = offsets(k);
    let (dst, nrows) = offsets(k + 1);
    let mut m = Matrix::<S>::zeros(nrows, ncols);
    let find = |p: usize| dst.iter().find(|(pp, _)| *pp == p).map(|(_, o)| *o);
    for &(p, col0) in &src {
        let q = k - p;
        let mut blocks = Vec::new();
        if q < n_k {
            blocks.push((p, delta01_matrix(cpl, p, q)?));
        }
        if p < n_b {
            blocks.push((p + 1, delta10_matrix(cpl, p, q)?));
        }
        if q >= 1 && p + 2 <= n_b {
            blocks.push((p + 2, delta21_matrix(cpl, p, q)?));
        }
        for (tp, b) in blocks {
            let row0 = find(tp).expect("target bidegree present");
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    m[(row0 + i, col0 + j)] = m[(row0 + i, col0 + j)].clone() + b[(i, j)].clone();
                }
            }
        }
    }
    Ok(m)
}

/// Compares `decompose(d_{A_E} Θ)` with `(δ₀,₁ + δ₁,₀ + δ₂,₋₁)(decompose Θ)`
/// for every basis `k`-cochain `Θ`.
pub fn verify_sum_decomposition<S: Scalar>(ext: &ExtendedAlgebra<S>, cpl: &Couple<S>, k: usize) -> Result<Check> {
    let (n_b, n_k) = (cpl.base().dim(), cpl.kernel().dim());
    if ext.base_dim() != n_b || ext.kernel_dim() != n_k {
        return Err(shape("extension and couple have different dimensions"));
    }
    let n = n_b + n_k;
    if k > n {
        return Err(Error::Degree { degree: k, max: n });
    }
    if k == n {
        return Ok(Check::from_residual(Vec::<S>::new()));
    }
    let d = ce_differential(ext.total(), None, k)?;
    let lhs = split_matrix::<S>(n_b, n_k, k + 1).mul(&d);
    let rhs = delta_sum(cpl, k)?.mul(&split_matrix(n_b, n_k, k));
    Ok(Check::from_residual(lhs.sub(&rhs).to_rows().into_iter().flatten()))
}

/// Residuals of
/// (i) `∂_K² = 0`, (ii) `∂_K∂_H + ∂_H∂_K = 0`,
/// (iii) `∂_K∂_ω + ∂_H² + ∂_ω∂_K = 0`, (iv) `∂_H∂_ω + ∂_ω∂_H = 0`,
/// (v) `∂_ω² = 0`, each over every bidegree.
pub fn verify_relations<S: Scalar>(cpl: &Couple<S>) -> Result<[Check; 5]> {
    let (n_b, n_k) = (cpl.base().dim(), cpl.kernel().dim());
    // operators by bidegree shift; None when the target is out of range
    let op = |shift: (i64, i64), p: usize, q: usize| -> Result<Option<Matrix<S>>> {
        let (tp, tq) = (p as i64 + shift.0, q as i64 + shift.1);
        if tp < 0 || tq < 0 || tp as usize > n_b || tq as usize > n_k {
            return Ok(None);
        }
        Ok(Some(match shift {
            (0, 1) => delta01_matrix(cpl, p, q)?,
            (1, 0) => delta10_matrix(cpl, p, q)?,
            _ => delta21_matrix(cpl, p, q)?,
        }))
    };
    let shifts = [(0i64, 1i64), (1, 0), (2, -1)];
    // each relation is a list of (first, second) operator pairs: second ∘ first
    let relations: [Vec<(usize, usize)>; 5] = [
        vec![(0, 0)],
        vec![(1, 0), (0, 1)],
        vec![(2, 0), (1, 1), (0, 2)],
        vec![(2, 1), (1, 2)],
        vec![(2, 2)],
    ];
    let mut out: Vec<Check> = Vec::new();
    for rel in &relations {
        let mut entries: Vec<S> = Vec::new();
        for p in 0..=n_b {
            for q in 0..=n_k {
                let mut sum: Option<Matrix<S>> = None;
                for &(a, b) in rel {
                    let (sa, sb) = (shifts[a], shifts[b]);
                    let Some(first) = op(sa, p, q)? else { continue };
                    let (mp, mq) = ((p as i64 + sa.0) as usize, (q as i64 + sa.1) as usize);
                    let Some(second) = op(sb, mp, mq)? else { continue };
                    let prod = second.mul(&first);
                    sum = Some(match sum {
                        None => prod,
                        Some(s) => s.add(&prod),
                    });
                }
                if let Some(s) = sum {
                    entries.extend(s.to_rows().into_iter().flatten());
                }
            }
        }
        out.push(Check::from_residual(entries));
    }
    Ok(out.try_into().expect("five relations"))
}

/// Convenience: builds the extension and checks every degree.
pub fn verify_sum_decomposition_all<S: Scalar>(cpl: &Couple<S>) -> Result<Vec<Check>> {
    let ext = build_extension(cpl);
    (0..=ext.total().dim()).map(|k| verify_sum_decomposition(&ext, cpl, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{heisenberg_couple, so3_kernel_couple, so3_semidirect};
    use crate::liealg::{abelian, unit};
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn pure_kernel_cochain_has_one_component() {
        let cpl = so3_kernel_couple(true);
        let ext = build_extension(&cpl);
        // e^{0} ∧ e^{1} on kernel indices
        let basis = SubsetBasis::new(5, 2);
        let mut theta = vec![q(0); basis.len()];
        theta[basis.position(&[0, 1]).unwrap()] = q(1);
        let parts = decompose(&ext, &theta, 2).unwrap();
        let nonzero: Vec<_> = parts.iter().filter(|c| !c.is_zero()).map(|c| (c.p, c.q)).collect();
        assert_eq!(nonzero, vec![(0, 2)]);
    }

    #[test]
    fn horizontal_dual_is_pure_base() {
        let ext = build_extension(&heisenberg_couple());
        let parts = decompose(&ext, &unit::<Rational>(3, 1), 1).unwrap();
        let nonzero: Vec<_> = parts.iter().filter(|c| !c.is_zero()).map(|c| (c.p, c.q)).collect();
        assert_eq!(nonzero, vec![(1, 0)]);
    }

    #[test]
    fn roundtrip_in_degree_two() {
        let ext = build_extension(&heisenberg_couple());
        let theta = vec![q(3), q(-1), q(7)];
        let parts = decompose(&ext, &theta, 2).unwrap();
        assert_eq!(parts.iter().map(|c| (c.p, c.q)).collect::<Vec<_>>(), vec![(1, 1), (2, 0)]);
        assert_eq!(recompose(&ext, &parts, 2).unwrap(), theta);
    }

    #[test]
    fn heisenberg_delta_examples() {
        let cpl = heisenberg_couple();
        let z = BigradedCochain { p: 0, q: 1, coeffs: vec![q(1)] };
        assert!(delta01(&cpl, &z).unwrap().is_zero());
        assert!(delta10(&cpl, &z).unwrap().is_zero());
        // d z* = −x*∧y* in h₃, so the curvature insertion gives −x*∧y*
        assert_eq!(delta21(&cpl, &z).unwrap().coeffs, vec![q(-1)]);
        let base_form = BigradedCochain { p: 1, q: 0, coeffs: vec![q(1), q(0)] };
        assert!(delta21(&cpl, &base_form).is_err());
    }

    #[test]
    fn sum_decomposition_holds() {
        for cpl in [heisenberg_couple(), so3_kernel_couple(true), so3_semidirect()] {
            for (k, c) in verify_sum_decomposition_all(&cpl).unwrap().iter().enumerate() {
                assert!(c.pass, "degree {k}: residual {}", c.residual);
            }
        }
    }

    #[test]
    fn sum_decomposition_split_case() {
        let cpl = Couple::new(abelian(2), abelian(2), vec![Matrix::zeros(2, 2); 2], &[]).unwrap();
        assert!(delta21_matrix(&cpl, 0, 1).unwrap().is_zero());
        assert!(verify_sum_decomposition_all(&cpl).unwrap().iter().all(|c| c.pass));
    }

    #[test]
    fn five_relations() {
        for cpl in [heisenberg_couple(), so3_kernel_couple(true), so3_semidirect()] {
            for (i, c) in verify_relations(&cpl).unwrap().iter().enumerate() {
                assert!(c.pass, "relation {}: residual {}", i + 1, c.residual);
            }
        }
    }

    #[test]
    fn curvature_breaks_relation_three() {
        let r = verify_relations(&so3_kernel_couple(false)).unwrap();
        assert!(r[0].pass && r[1].pass);
        assert!(!r[2].pass);
    }
}
