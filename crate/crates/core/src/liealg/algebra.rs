use crate::error::{contract, shape, Result};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

/// A finite-dimensional Lie algebra given by structure constants
/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
///
/// Constructors do not enforce antisymmetry or the Jacobi identity; use
/// [`LieAlgebra::check_jacobi`] to validate.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra<S> {
    basis: Vec<String>,
    c: Vec<S>,
}

/// What went wrong for one index triple.
#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    /// `c[i][j][k] + c[j][i][k] ≠ 0`
    Antisymmetry,
    /// the cyclic Jacobi sum for `(i, j, k)` has a non-zero component
    Jacobi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation<S> {
    pub kind: ViolationKind,
    pub triple: (usize, usize, usize),
    /// Antisymmetry: a single entry. Jacobi: the full residual vector.
    pub residual: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiReport<S> {
    pub violations: Vec<Violation<S>>,
}

impl<S> JacobiReport<S> {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_triple(&self, triple: (usize, usize, usize)) -> bool {
        self.violations.iter().any(|v| v.triple == triple)
    }
}

impl<S: Scalar> LieAlgebra<S> {
    /// Raw structure constants `c[i][j][k]`.
    pub fn from_structure_constants(basis: Vec<String>, c: Vec<Vec<Vec<S>>>) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(shape("a Lie algebra needs at least one basis vector"));
        }
        if c.len() != n || c.iter().any(|r| r.len() != n || r.iter().any(|s| s.len() != n)) {
            return Err(shape(format!("structure constants must have shape {n}x{n}x{n}")));
        }
        Ok(Self { basis, c: c.into_iter().flatten().flatten().collect() })
    }

    /// Builds the algebra from bracket entries `[e_i, e_j] ∋ v e_k`.
    ///
    /// Omitted entries are zero and `c[j][i][k] = -c[i][j][k]` is filled in.
    /// Entries with `i == j`, or that contradict an explicitly given
    /// antisymmetric partner, are rejected.
    pub fn from_brackets(basis: Vec<String>, entries: &[(usize, usize, usize, S)]) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(shape("a Lie algebra needs at least one basis vector"));
        }
        let mut alg = Self { basis, c: vec![S::zero(); n * n * n] };
        let mut set = vec![false; n * n * n];
        for (i, j, k, v) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(shape(format!("bracket index ({i},{j},{k}) out of range for dim {n}")));
            }
            if i == j {
                if v.is_negligible() {
                    continue;
                }
                return Err(contract(format!("[e{i}, e{i}] must vanish")));
            }
            let a = alg.idx(i, j, k);
            let b = alg.idx(j, i, k);
            if (set[a] && alg.c[a] != *v) || (set[b] && alg.c[b] != -v.clone()) {
                return Err(contract(format!("conflicting bracket entries for ({i},{j},{k})")));
            }
            alg.c[a] = v.clone();
            alg.c[b] = -v.clone();
            set[a] = true;
            set[b] = true;
        }
        Ok(alg)
    }

    pub fn abelian(n: usize) -> Self {
        Self::from_brackets(default_names(n), &[]).expect("abelian algebra")
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.dim();
        (i * n + j) * n + k
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &S {
        &self.c[self.idx(i, j, k)]
    }

    pub fn set_constant(&mut self, i: usize, j: usize, k: usize, v: S) {
        let a = self.idx(i, j, k);
        self.c[a] = v;
    }

    /// `[e_i, e_j]` as a coefficient vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<S> {
        let n = self.dim();
        (0..n).map(|k| self.constant(i, j, k).clone()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(S::is_negligible)
    }

    /// Bilinear contraction with the structure constants.
    pub fn bracket(&self, x: &[S], y: &[S]) -> Result<Vec<S>> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(shape(format!("bracket expects vectors of length {n}")));
        }
        let mut out = vec![S::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        *o = o.clone() + xy.clone() * c.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Antisymmetry and Jacobi, checked on every basis triple.
    pub fn check_jacobi(&self) -> JacobiReport<S> {
        let n = self.dim();
        let mut violations = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let s = self.constant(i, j, k).clone() + self.constant(j, i, k).clone();
                    if !s.is_negligible() {
                        violations.push(Violation {
                            kind: ViolationKind::Antisymmetry,
                            triple: (i, j, k),
                            residual: vec![s],
                        });
                    }
                }
            }
        }
        let e = |i: usize| unit::<S>(n, i);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let term = |a: usize, b: usize, c: usize| {
                        let ab = self.bracket_basis(a, b);
                        self.bracket(&ab, &e(c)).expect("same dim")
                    };
                    let r: Vec<S> = term(i, j, k)
                        .into_iter()
                        .zip(term(j, k, i))
                        .zip(term(k, i, j))
                        .map(|((a, b), c)| a + b + c)
                        .collect();
                    if r.iter().any(|v| !v.is_negligible()) {
                        violations.push(Violation { kind: ViolationKind::Jacobi, triple: (i, j, k), residual: r });
                    }
                }
            }
        }
        JacobiReport { violations }
    }

    /// Matrix of `y ↦ [x, y]`.
    pub fn ad(&self, x: &[S]) -> Result<Derivation<S>> {
        let n = self.dim();
        if x.len() != n {
            return Err(shape(format!("ad expects a vector of length {n}")));
        }
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self.bracket(x, &unit(n, j))?;
            for (k, v) in col.into_iter().enumerate() {
                m[(k, j)] = v;
            }
        }
        Ok(Derivation(m))
    }

    pub fn ad_basis(&self, i: usize) -> Derivation<S> {
        self.ad(&unit(self.dim(), i)).expect("basis vector")
    }

    /// Leibniz residual `M[e_i, e_j] - [M e_i, e_j] - [e_i, M e_j]` over all
    /// basis pairs, as a flat list.
    pub fn leibniz_residual(&self, m: &Matrix<S>) -> Result<Vec<S>> {
        let n = self.dim();
        if m.rows() != n || m.cols() != n {
            return Err(shape(format!("derivation matrix must be {n}x{n}")));
        }
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                let lhs = m.apply(&self.bracket_basis(i, j));
                let a = self.bracket(&m.col(i), &unit(n, j))?;
                let b = self.bracket(&unit(n, i), &m.col(j))?;
                out.extend(lhs.into_iter().zip(a).zip(b).map(|((l, a), b)| l - a - b));
            }
        }
        Ok(out)
    }

    pub fn is_derivation(&self, m: &Matrix<S>) -> bool {
        self.leibniz_residual(m).is_ok_and(|r| r.iter().all(S::is_negligible))
    }

    /// Basis of the center: the common kernel of all `ad(e_i)`.
    pub fn center(&self) -> Vec<Vec<S>> {
        let n = self.dim();
        // x is central iff [e_i, x] = 0 for all i: stack the ad(e_i).
        let mut stacked = Matrix::zeros(0, n);
        for i in 0..n {
            stacked = stacked.vstack(self.ad_basis(i).matrix());
        }
        stacked.nullspace()
    }

    /// Basis of the derivation algebra `Der(L)` as `n x n` matrices.
    pub fn derivations(&self) -> Vec<Matrix<S>> {
        let n = self.dim();
        // Unknowns M[r][s], flattened row-major; one equation per (i, j, k).
        let mut sys = Matrix::<S>::zeros(n * n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let row = (i * n + j) * n + k;
                    // (M[e_i,e_j])_k = Σ_m c_ij^m M[k][m]
                    for m in 0..n {
                        let c = self.constant(i, j, m);
                        if !c.is_zero() {
                            sys[(row, k * n + m)] = sys[(row, k * n + m)].clone() + c.clone();
                        }
                    }
                    // [M e_i, e_j]_k = Σ_m M[m][i] c_mj^k
                    for m in 0..n {
                        let c = self.constant(m, j, k);
                        if !c.is_zero() {
                            sys[(row, m * n + i)] = sys[(row, m * n + i)].clone() - c.clone();
                        }
                    }
                    // [e_i, M e_j]_k = Σ_m M[m][j] c_im^k
                    for m in 0..n {
                        let c = self.constant(i, m, k);
                        if !c.is_zero() {
                            sys[(row, m * n + j)] = sys[(row, m * n + j)].clone() - c.clone();
                        }
                    }
                }
            }
        }
        sys.nullspace()
            .into_iter()
            .map(|v| Matrix::from_rows(v.chunks(n).map(<[S]>::to_vec).collect()))
            .collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LieAlgebra<T> {
        LieAlgebra { basis: self.basis.clone(), c: self.c.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> LieAlgebra<f64> {
        self.map(S::to_f64)
    }

    /// Nonzero structure constants with `i < j`.
    pub fn bracket_entries(&self) -> Vec<(usize, usize, usize, S)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.constant(i, j, k);
                    if !v.is_zero() {
                        out.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        out
    }

    /// Direct sum `self ⊕ other`, `self` first.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let a = self.dim();
        let mut basis = self.basis.clone();
        basis.extend(other.basis.iter().cloned());
        let mut entries: Vec<_> = self.bracket_entries();
        entries.extend(other.bracket_entries().into_iter().map(|(i, j, k, v)| (i + a, j + a, k + a, v)));
        Self::from_brackets(basis, &entries).expect("direct sum of valid tables")
    }
}

/// A derivation matrix (columns are images of basis vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation<S>(pub(crate) Matrix<S>);

impl<S: Scalar> Derivation<S> {
    /// Wraps `m` after checking the Leibniz rule on `alg`.
    pub fn new(alg: &LieAlgebra<S>, m: Matrix<S>) -> Result<Self> {
        if alg.is_derivation(&m) {
            Ok(Self(m))
        } else {
            Err(contract("matrix does not satisfy the Leibniz rule"))
        }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.0
    }
}

pub fn unit<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("e{i}")).collect()
}

fn named(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn q(n: i64) -> Rational {
    Rational::from_i64(n)
}

/// `so(3)`: `[e1,e2] = e3`, `[e2,e3] = e1`, `[e3,e1] = e2`.
pub fn so3() -> LieAlgebra<Rational> {
    LieAlgebra::from_brackets(
        named(&["e1", "e2", "e3"]),
        &[(0, 1, 2, q(1)), (1, 2, 0, q(1)), (2, 0, 1, q(1))],
    )
    .expect("so(3)")
}

/// Heisenberg `h3`: `[x, y] = z`.
pub fn heisenberg() -> LieAlgebra<Rational> {
    LieAlgebra::from_brackets(named(&["x", "y", "z"]), &[(0, 1, 2, q(1))]).expect("h3")
}

/// `sl(2)`: `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
pub fn sl2() -> LieAlgebra<Rational> {
    LieAlgebra::from_brackets(
        named(&["h", "e", "f"]),
        &[(0, 1, 1, q(2)), (0, 2, 2, q(-2)), (1, 2, 0, q(1))],
    )
    .expect("sl(2)")
}

/// Affine algebra of the line: `[x, y] = y`.
pub fn aff1() -> LieAlgebra<Rational> {
    LieAlgebra::from_brackets(named(&["x", "y"]), &[(0, 1, 1, q(1))]).expect("aff(1)")
}

/// Abelian algebra with rational constants.
pub fn abelian(n: usize) -> LieAlgebra<Rational> {
    LieAlgebra::abelian(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    /// Independent oracle: expand all 27 cyclic sums from raw constants.
    fn jacobi_brute(c: &dyn Fn(usize, usize, usize) -> i64, n: usize) -> Vec<(usize, usize, usize)> {
        let mut bad = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = 0;
                        for m in 0..n {
                            s += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l);
                        }
                        if s != 0 && !bad.contains(&(i, j, k)) {
                            bad.push((i, j, k));
                        }
                    }
                }
            }
        }
        bad
    }

    fn eps(i: usize, j: usize, k: usize) -> i64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
            (1, 0, 2) | (2, 1, 0) | (0, 2, 1) => -1,
            _ => 0,
        }
    }

    #[test]
    fn abelian_plane_passes() {
        assert!(abelian(2).check_jacobi().ok());
    }

    #[test]
    fn so3_passes_and_matches_brute_force() {
        assert!(jacobi_brute(&eps, 3).is_empty());
        assert!(so3().check_jacobi().ok());
        assert_eq!(so3().constant(0, 1, 2), &q(1));
        assert_eq!(so3().constant(1, 0, 2), &q(-1));
    }

    #[test]
    fn modified_so3_entry_is_reported() {
        // c[1][2][3] := 2 in raw storage, partner left at -1
        let mut alg = so3();
        alg.set_constant(0, 1, 2, q(2));
        let report = alg.check_jacobi();
        assert!(!report.ok());
        assert!(report.has_triple((0, 1, 2)));
        let raw = |i, j, k| if (i, j, k) == (0, 1, 2) { 2 } else { eps(i, j, k) };
        let brute = jacobi_brute(&raw, 3);
        assert!(!brute.is_empty());
        for t in brute {
            assert!(report.violations.iter().any(|v| v.kind == ViolationKind::Jacobi && v.triple == t));
        }
    }

    #[test]
    fn shape_errors() {
        assert!(LieAlgebra::<Rational>::from_structure_constants(named(&["a", "b"]), vec![vec![vec![q(0); 2]; 2]; 3])
            .is_err());
        let alg = so3();
        assert!(alg.bracket(&[q(1)], &[q(0), q(0), q(0)]).is_err());
        assert!(LieAlgebra::from_brackets(named(&["a"]), &[(0, 1, 0, q(1))]).is_err());
        assert!(LieAlgebra::from_brackets(named(&["a", "b"]), &[(0, 1, 0, q(1)), (1, 0, 0, q(1))]).is_err());
    }

    #[test]
    fn brackets_of_so3() {
        let alg = so3();
        assert_eq!(alg.bracket(&unit(3, 0), &unit(3, 1)).unwrap(), unit(3, 2));
        let x = vec![q(2), q(-1), q(3)];
        assert!(alg.bracket(&x, &x).unwrap().iter().all(|v| v.is_zero()));
        assert!(abelian(2).bracket(&unit(2, 0), &unit(2, 1)).unwrap().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn derivation_checks() {
        let alg = so3();
        assert!(alg.is_derivation(&Matrix::zeros(3, 3)));
        assert!(alg.is_derivation(alg.ad_basis(2).matrix()));
        assert!(!alg.is_derivation(&Matrix::identity(3)));
    }

    #[test]
    fn ad_e3_is_rotation_generator() {
        let ad = so3().ad_basis(2);
        let expected = Matrix::from_rows(vec![vec![q(0), q(-1), q(0)], vec![q(1), q(0), q(0)], vec![q(0); 3]]);
        assert_eq!(ad.matrix(), &expected);
        assert!(abelian(2).ad(&[q(3), q(4)]).unwrap().matrix().is_zero());
    }

    #[test]
    fn ad_is_a_homomorphism() {
        for alg in [so3(), heisenberg(), sl2()] {
            for i in 0..3 {
                for j in 0..3 {
                    let lhs = alg.ad(&alg.bracket_basis(i, j)).unwrap().into_matrix();
                    let rhs = alg.ad_basis(i).matrix().commutator(alg.ad_basis(j).matrix());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn centers() {
        assert_eq!(abelian(2).center().len(), 2);
        assert!(so3().center().is_empty());
        let z = heisenberg().center();
        assert_eq!(z.len(), 1);
        assert!(z[0][0].is_zero() && z[0][1].is_zero() && !z[0][2].is_zero());
    }

    #[test]
    fn derivation_algebra_dimensions() {
        // so(3): all derivations inner; h3: dim Der = 6; abelian R^2: gl(2).
        assert_eq!(so3().derivations().len(), 3);
        assert_eq!(heisenberg().derivations().len(), 6);
        assert_eq!(abelian(2).derivations().len(), 4);
        for d in sl2().derivations() {
            assert!(sl2().is_derivation(&d));
        }
    }
}
