use std::collections::BTreeMap;

use crate::error::{contract, Result};
use crate::exterior::SubsetBasis;
use crate::extension::{build_extension, is_admissible, Couple, ExtendedAlgebra};
use crate::liealg::{ce_differential, cohomology_dims};
use crate::linalg::{independent_subset, Matrix};
use crate::scalar::Scalar;

/// The Chevalley-Eilenberg complex of an extension filtered by the number
/// of horizontal arguments: `F_p C^k` is spanned by the basis cochains with
/// at least `p` horizontal indices.
#[derive(Debug, Clone)]
pub struct FilteredComplex<S> {
    ext: ExtendedAlgebra<S>,
    /// `d_k : C^k → C^{k+1}` for `k = 0..=n`
    d: Vec<Matrix<S>>,
    /// horizontal-index count of every basis cochain, per degree
    weight: Vec<Vec<usize>>,
}

/// One `E_r^{p,q}` entry with representatives in `C^{p+q}` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PageEntry<S> {
    pub dim: usize,
    pub reps: Vec<Vec<S>>,
}

/// Page `E_r` and its differential.
#[derive(Debug, Clone, PartialEq)]
pub struct Page<S> {
    pub r: usize,
    pub entries: BTreeMap<(usize, usize), PageEntry<S>>,
    /// `d_r : E_r^{p,q} → E_r^{p+r, q−r+1}` in the representative bases,
    /// keyed by the source bidegree; absent when source or target is zero.
    pub differentials: BTreeMap<(usize, usize), Matrix<S>>,
}

impl<S: Scalar> Page<S> {
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.entries.get(&(p, q)).map_or(0, |e| e.dim)
    }

    /// `(p, q, dim)` triples in lexicographic order.
    pub fn table(&self) -> Vec<(usize, usize, usize)> {
        self.entries.iter().map(|(&(p, q), e)| (p, q, e.dim)).collect()
    }

    /// Whether `d_r ∘ d_r` vanishes at every bidegree.
    pub fn d_squared_vanishes(&self) -> bool {
        self.differentials.iter().all(|(&(p, q), m)| {
            let (tp, tq) = (p + self.r, (q + 1).checked_sub(self.r));
            match tq.and_then(|tq| self.differentials.get(&(tp, tq))) {
                Some(next) => next.mul(m).is_zero(),
                None => true,
            }
        })
    }

    /// Dimensions of the cohomology of `(E_r, d_r)` at each bidegree.
    pub fn homology_dims(&self) -> BTreeMap<(usize, usize), usize> {
        let rank_out = |p: usize, q: usize| self.differentials.get(&(p, q)).map_or(0, Matrix::rank);
        self.entries
            .iter()
            .map(|(&(p, q), e)| {
                let incoming = match (p.checked_sub(self.r), (q + self.r).checked_sub(1)) {
                    (Some(sp), Some(sq)) => rank_out(sp, sq),
                    _ => 0,
                };
                ((p, q), e.dim - rank_out(p, q) - incoming)
            })
            .collect()
    }
}

impl<S: Scalar> FilteredComplex<S> {
    pub fn new(ext: ExtendedAlgebra<S>) -> Result<Self> {
        let n = ext.total().dim();
        let nk = ext.kernel_dim();
        let d: Vec<Matrix<S>> = (0..=n).map(|k| ce_differential(ext.total(), None, k)).collect::<Result<_>>()?;
        for k in 0..n {
            if !d[k + 1].mul(&d[k]).is_zero() {
                return Err(contract(format!("d∘d ≠ 0 in degree {k}: the bracket is not a Lie bracket")));
            }
        }
        let weight = (0..=n + 1)
            .map(|k| SubsetBasis::new(n, k).subsets().iter().map(|s| s.iter().filter(|&&i| i >= nk).count()).collect())
            .collect();
        Ok(Self { ext, d, weight })
    }

    pub fn extension(&self) -> &ExtendedAlgebra<S> {
        &self.ext
    }

    fn n(&self) -> usize {
        self.ext.total().dim()
    }

    /// Coordinates of `F_p C^k`.
    fn filtered(&self, k: usize, p: i64) -> Vec<usize> {
        self.weight[k].iter().enumerate().filter(|(_, &w)| w as i64 >= p).map(|(i, _)| i).collect()
    }

    /// Basis of `F_p C^k` (as full coordinate vectors).
    fn f_basis(&self, k: usize, p: i64) -> Vec<Vec<S>> {
        let len = self.weight[k].len();
        self.filtered(k, p)
            .into_iter()
            .map(|i| {
                let mut v = vec![S::zero(); len];
                v[i] = S::one();
                v
            })
            .collect()
    }

    /// `Z_r^p C^k = {x ∈ F_p C^k : dx ∈ F_{p+r} C^{k+1}}`, with `Z_{−1} = F_p`.
    fn z(&self, k: usize, p: i64, r: i64) -> Vec<Vec<S>> {
        if r < 0 || k >= self.n() {
            return self.f_basis(k, p);
        }
        let cols = self.filtered(k, p);
        let rows: Vec<usize> =
            self.weight[k + 1].iter().enumerate().filter(|(_, &w)| (w as i64) < p + r).map(|(i, _)| i).collect();
        let len = self.weight[k].len();
        let embed = |v: Vec<S>| {
            let mut full = vec![S::zero(); len];
            for (c, x) in cols.iter().zip(v) {
                full[*c] = x;
            }
            full
        };
        if rows.is_empty() {
            return self.f_basis(k, p);
        }
        let sub = self.d[k].select_rows(&rows).select_cols(&cols);
        sub.nullspace().into_iter().map(embed).collect()
    }

    /// Numerator basis and an independent basis of the denominator of
    /// `E_r^{p,q}`.
    fn quotient(&self, p: usize, q: usize, r: usize) -> (Vec<Vec<S>>, Vec<Vec<S>>) {
        let k = p + q;
        let (pi, ri) = (p as i64, r as i64);
        let num = self.z(k, pi, ri);
        let mut den = self.z(k, pi + 1, ri - 1);
        if k >= 1 {
            for y in self.z(k - 1, pi - ri + 1, ri - 1) {
                den.push(self.d[k - 1].apply(&y));
            }
        }
        let len = self.weight[k].len();
        (num, independent_subset(len, &den))
    }

    /// Representatives: numerator vectors independent modulo the denominator.
    fn entry(&self, p: usize, q: usize, r: usize) -> (PageEntry<S>, Vec<Vec<S>>) {
        let (num, den) = self.quotient(p, q, r);
        let len = self.weight[p + q].len();
        let mut span = den.clone();
        let mut reps = Vec::new();
        for v in num {
            span.push(v.clone());
            if independent_subset(len, &span).len() == span.len() {
                reps.push(v);
            } else {
                span.pop();
            }
        }
        (PageEntry { dim: reps.len(), reps }, den)
    }

    pub fn page(&self, r: usize) -> Page<S> {
        let (nb, nk) = (self.ext.base_dim(), self.ext.kernel_dim());
        let mut entries = BTreeMap::new();
        let mut dens = BTreeMap::new();
        for p in 0..=nb {
            for q in 0..=nk {
                let (e, den) = self.entry(p, q, r);
                entries.insert((p, q), e);
                dens.insert((p, q), den);
            }
        }
        let mut differentials = BTreeMap::new();
        for (&(p, q), e) in &entries {
            let Some(tq) = (q + 1).checked_sub(r) else { continue };
            let tp = p + r;
            let Some(target) = entries.get(&(tp, tq)) else { continue };
            if e.dim == 0 || target.dim == 0 {
                continue;
            }
            // solve dx = Σ a_i den_i + Σ b_j rep_j and keep b
            let den = &dens[&(tp, tq)];
            let len = self.weight[p + q + 1].len();
            let mut cols = den.clone();
            cols.extend(target.reps.iter().cloned());
            let basis = Matrix::from_cols(len, &cols);
            let mut m = Matrix::zeros(target.dim, e.dim);
            for (j, x) in e.reps.iter().enumerate() {
                let dx = self.d[p + q].apply(x);
                let coeffs = basis.solve(&dx).expect("d maps Z_r^p into Z_r^{p+r}");
                for i in 0..target.dim {
                    m[(i, j)] = coeffs[den.len() + i].clone();
                }
            }
            differentials.insert((p, q), m);
        }
        Page { r, entries, differentials }
    }
}

/// Page `E_r` of the spectral sequence of an admissible couple.
pub fn page<S: Scalar>(cpl: &Couple<S>, r: usize) -> Result<Page<S>> {
    Ok(filtered_complex(cpl)?.page(r))
}

fn filtered_complex<S: Scalar>(cpl: &Couple<S>) -> Result<FilteredComplex<S>> {
    let report = is_admissible(cpl);
    if !report.ok() {
        return Err(contract(format!(
            "couple is not admissible (closure residual {}, curvature residual {})",
            report.closure.residual, report.curvature_identity.residual
        )));
    }
    FilteredComplex::new(build_extension(cpl))
}

/// `Σ_{p+q=k} dim E_∞^{p,q}` next to the Betti numbers of the extension.
#[derive(Debug, Clone, PartialEq)]
pub struct Abutment {
    pub e_infinity: Vec<usize>,
    pub betti: Vec<usize>,
}

impl Abutment {
    pub fn ok(&self) -> bool {
        self.e_infinity == self.betti
    }
}

/// Compares `E_∞` (the page `r = n + 1` with `n` the total dimension)
/// against an independent rank computation on the total complex.
pub fn abutment<S: Scalar>(cpl: &Couple<S>) -> Result<Abutment> {
    let fc = filtered_complex(cpl)?;
    let n = fc.n();
    let einf = fc.page(n + 1);
    let mut e_infinity = vec![0; n + 1];
    for ((p, q), e) in &einf.entries {
        e_infinity[p + q] += e.dim;
    }
    let betti = cohomology_dims(fc.ext.total(), None)?;
    Ok(Abutment { e_infinity, betti })
}

/// Pages `E_0 ..= E_{n+1}`.
pub fn all_pages<S: Scalar>(cpl: &Couple<S>) -> Result<Vec<Page<S>>> {
    let fc = filtered_complex(cpl)?;
    Ok((0..=fc.n() + 1).map(|r| fc.page(r)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::binomial;
    use crate::extension::{central, heisenberg_couple, so3_kernel_couple, so3_semidirect};
    use crate::liealg::{abelian, so3};
    use crate::scalar::Rational;

    #[test]
    fn heisenberg_d2_kills_corner() {
        let cpl = heisenberg_couple();
        let e2 = page(&cpl, 2).unwrap();
        assert_eq!((e2.dim(0, 1), e2.dim(2, 0)), (1, 1));
        let d2 = &e2.differentials[&(0, 1)];
        assert_eq!(d2.rank(), 1);
        let e3 = page(&cpl, 3).unwrap();
        assert_eq!((e3.dim(0, 1), e3.dim(2, 0)), (0, 0));
        let ab = abutment(&cpl).unwrap();
        assert_eq!(ab.betti, vec![1, 2, 2, 1]);
        assert!(ab.ok());
    }

    #[test]
    fn split_abelian_degenerates_at_e2() {
        let cpl = Couple::new(abelian(2), abelian(1), vec![Matrix::zeros(1, 1); 2], &[]).unwrap();
        let pages = all_pages(&cpl).unwrap();
        for p in 0..=2 {
            for q in 0..=1 {
                assert_eq!(pages[2].dim(p, q), binomial(2, p) * binomial(1, q));
                assert_eq!(pages[2].dim(p, q), pages.last().unwrap().dim(p, q));
            }
        }
    }

    #[test]
    fn central_so3_abutment() {
        let cpl = central(so3(), 1, &[(0, 1, vec![Rational::from_i64(1)])]).unwrap();
        let ab = abutment(&cpl).unwrap();
        assert!(ab.ok(), "{ab:?}");
    }

    #[test]
    fn page_invariants() {
        for cpl in [heisenberg_couple(), so3_kernel_couple(true), so3_semidirect()] {
            let pages = all_pages(&cpl).unwrap();
            for w in pages.windows(2) {
                assert!(w[0].d_squared_vanishes());
                assert_eq!(w[0].homology_dims(), w[1].entries.iter().map(|(k, e)| (*k, e.dim)).collect());
                for (key, e) in &w[1].entries {
                    assert!(e.dim <= w[0].entries[key].dim);
                }
            }
            assert!(abutment(&cpl).unwrap().ok());
        }
    }

    #[test]
    fn e1_is_base_forms_with_kernel_cohomology() {
        let cpl = so3_kernel_couple(true);
        let bk = cohomology_dims(cpl.kernel(), None).unwrap();
        let e1 = page(&cpl, 1).unwrap();
        for p in 0..=2 {
            for q in 0..=3 {
                assert_eq!(e1.dim(p, q), binomial(2, p) * bk[q]);
            }
        }
    }

    #[test]
    fn rejects_non_admissible() {
        assert!(page(&so3_kernel_couple(false), 1).is_err());
    }
}
