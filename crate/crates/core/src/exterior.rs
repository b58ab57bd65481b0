//! Canonical bases of exterior powers: lexicographically ordered increasing
//! index subsets.

use std::collections::HashMap;

use itertools::Itertools;

use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// The `k`-subsets of `0..n` in lexicographic order, with reverse lookup.
#[derive(Debug, Clone)]
pub struct SubsetBasis {
    n: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl SubsetBasis {
    pub fn new(n: usize, k: usize) -> Self {
        let subsets: Vec<Vec<usize>> = if k > n { Vec::new() } else { (0..n).combinations(k).collect() };
        let index = subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self { n, k, subsets, index }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn subset(&self, i: usize) -> &[usize] {
        &self.subsets[i]
    }

    /// Position of a sorted subset.
    pub fn position(&self, subset: &[usize]) -> Option<usize> {
        self.index.get(subset).copied()
    }
}

/// Sorts `indices` and returns the permutation sign, or `None` if an index
/// repeats.
pub fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    // insertion sort counts transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// `subset` with the entries at positions `skip` removed.
pub fn without(subset: &[usize], skip: &[usize]) -> Vec<usize> {
    subset
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, &v)| v)
        .collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Matrix of the derivation extension of `m` to `Λ^l V`:
/// `m(v_1 ∧ … ∧ v_l) = Σ_i v_1 ∧ … ∧ m v_i ∧ … ∧ v_l`.
pub fn wedge_action<S: Scalar>(m: &Matrix<S>, l: usize) -> Matrix<S> {
    let n = m.rows();
    let basis = SubsetBasis::new(n, l);
    let mut out = Matrix::<S>::zeros(basis.len(), basis.len());
    for (col, s) in basis.subsets().iter().enumerate() {
        for (pos, &a) in s.iter().enumerate() {
            for c in 0..n {
                let v = &m[(c, a)];
                if v.is_zero() {
                    continue;
                }
                let mut t = s.clone();
                t[pos] = c;
                if let Some((sorted, sign)) = sort_with_sign(&t) {
                    let row = basis.position(&sorted).expect("sorted subset");
                    let v = if sign > 0 { v.clone() } else { -v.clone() };
                    out[(row, col)] = out[(row, col)].clone() + v;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn lexicographic_order() {
        let b = SubsetBasis::new(4, 2);
        assert_eq!(b.len(), 6);
        assert_eq!(b.subset(0), &[0, 1]);
        assert_eq!(b.subset(5), &[2, 3]);
        assert_eq!(b.position(&[1, 3]), Some(4));
        assert!(SubsetBasis::new(2, 3).is_empty());
        assert_eq!(SubsetBasis::new(3, 0).len(), 1);
    }

    #[test]
    fn sorting_sign() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn wedge_action_on_top_degree_is_trace() {
        let q = |v: i64| Rational::from_i64(v);
        let m = Matrix::from_rows(vec![vec![q(1), q(2), q(0)], vec![q(3), q(4), q(5)], vec![q(0), q(1), q(-2)]]);
        assert_eq!(wedge_action(&m, 3), Matrix::from_rows(vec![vec![q(3)]]));
        assert_eq!(wedge_action(&m, 1), m);
        // m e0 ∧ e1 + e0 ∧ m e1 = 5 e0∧e1 + e0∧e2
        let w = wedge_action(&m, 2);
        assert_eq!(w[(0, 0)], q(5));
        assert_eq!(w[(1, 0)], q(1));
        assert_eq!(w[(2, 0)], q(0));
    }
}
