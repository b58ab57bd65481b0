//! Seeded generators of small couples over exact rationals.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::SubsetBasis;
use crate::liealg::{abelian, aff1, heisenberg, sl2, so3, LieAlgebra};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

use super::couple::{covariant_matrix, Couple};
use super::gauge::{apply_gauge, GaugeTransform};

fn bases() -> Vec<LieAlgebra<Rational>> {
    vec![abelian(1), abelian(2), abelian(3), aff1(), aff1().direct_sum(&abelian(1)), heisenberg(), so3(), sl2()]
}

fn kernels() -> Vec<LieAlgebra<Rational>> {
    vec![
        abelian(1),
        abelian(2),
        abelian(3),
        abelian(4),
        aff1(),
        heisenberg(),
        so3(),
        sl2(),
        so3().direct_sum(&abelian(1)),
        heisenberg().direct_sum(&abelian(1)),
        aff1().direct_sum(&aff1()),
    ]
}

fn small(rng: &mut ChaCha8Rng) -> Rational {
    Rational::from_i64(rng.random_range(-2..=2))
}

fn nonzero(rng: &mut ChaCha8Rng) -> Rational {
    let v = rng.random_range(1..=2);
    Rational::from_i64(if rng.random_bool(0.5) { v } else { -v })
}

fn combination(rng: &mut ChaCha8Rng, basis: &[Matrix<Rational>], n: usize) -> Matrix<Rational> {
    basis.iter().fold(Matrix::zeros(n, n), |acc, m| acc.add(&m.scale(&small(rng))))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<Rational> {
    Matrix::from_rows((0..rows).map(|_| (0..cols).map(|_| small(rng)).collect()).collect())
}

/// Abelian kernel carrying a representation of the base, with `ω` drawn
/// from the closed cochains.
fn module_couple(rng: &mut ChaCha8Rng, base: LieAlgebra<Rational>) -> Couple<Rational> {
    let nb = base.dim();
    let d: Vec<Matrix<Rational>> = match rng.random_range(0..3) {
        0 => {
            let m = rng.random_range(1..=3);
            vec![Matrix::zeros(m, m); nb]
        }
        1 => {
            // adjoint, padded with a trivial summand when it fits
            let pad = if nb < 4 && rng.random_bool(0.5) { 1 } else { 0 };
            (0..nb)
                .map(|i| {
                    let ad = base.ad_basis(i).into_matrix();
                    let mut m = Matrix::zeros(nb + pad, nb + pad);
                    for r in 0..nb {
                        for c in 0..nb {
                            m[(r, c)] = ad[(r, c)].clone();
                        }
                    }
                    m
                })
                .collect()
        }
        _ => {
            // commuting multiples of one matrix; only flat over an abelian base
            let m = rng.random_range(1..=3);
            let a = random_matrix(rng, m, m);
            (0..nb)
                .map(|_| if base.is_abelian() { a.scale(&small(rng)) } else { Matrix::zeros(m, m) })
                .collect()
        }
    };
    let nk = d[0].rows();
    let kernel = abelian(nk);
    let flat = Couple::new(base, kernel, d, &[]).expect("matrices are derivations of an abelian kernel");
    if nb < 2 {
        return flat;
    }
    let closed = covariant_matrix(&flat, 2, 1).expect("degrees").nullspace();
    let omega = closed.iter().fold(vec![Rational::from_i64(0); flat.omega_cochain().len()], |acc, v| {
        let c = small(rng);
        acc.into_iter().zip(v).map(|(a, b)| a + c.clone() * b.clone()).collect()
    });
    flat.with_omega(omega).expect("shape")
}

/// `D` spanned by a single derivation over an abelian base, `ω` central.
fn flat_derivation_couple(rng: &mut ChaCha8Rng, kernel: LieAlgebra<Rational>) -> Couple<Rational> {
    let nb = rng.random_range(1..=2);
    let nk = kernel.dim();
    let m = combination(rng, &kernel.derivations(), nk);
    let d = (0..nb).map(|_| m.scale(&small(rng))).collect();
    let center = kernel.center();
    let mut omega = Vec::new();
    if nb == 2 && !center.is_empty() {
        let z = center.iter().fold(vec![Rational::from_i64(0); nk], |acc, v| {
            let c = small(rng);
            acc.into_iter().zip(v).map(|(a, b)| a + c.clone() * b.clone()).collect()
        });
        omega.push((0, 1, z));
    }
    Couple::new(abelian(nb), kernel, d, &omega).expect("derivations")
}

/// A couple that is admissible by construction; `seed` fixes every choice.
pub fn random_admissible(seed: u64) -> Couple<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    admissible_with(&mut rng)
}

fn admissible_with(rng: &mut ChaCha8Rng) -> Couple<Rational> {
    let bases = bases();
    let kernels = kernels();
    let seed_couple = match rng.random_range(0..3) {
        0 => {
            let b = bases[rng.random_range(0..bases.len())].clone();
            module_couple(rng, b)
        }
        1 => {
            let k = kernels[rng.random_range(0..kernels.len())].clone();
            flat_derivation_couple(rng, k)
        }
        _ => {
            let b = bases[rng.random_range(0..bases.len())].clone();
            let k = kernels[rng.random_range(0..kernels.len())].clone();
            let (nb, nk) = (b.dim(), k.dim());
            Couple::new(b, k, vec![Matrix::zeros(nk, nk); nb], &[]).expect("zero derivations")
        }
    };
    if rng.random_bool(0.6) {
        let (nk, nb) = (seed_couple.kernel().dim(), seed_couple.base().dim());
        let g = GaugeTransform::new(random_matrix(rng, nk, nb));
        apply_gauge(&seed_couple, &g).expect("shapes match")
    } else {
        seed_couple
    }
}

/// An admissible couple with either one `ω` entry shifted or a random
/// derivation added to one `D_i`. The result is usually, but not always,
/// non-admissible.
pub fn random_perturbed(seed: u64) -> Couple<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cpl = admissible_with(&mut rng);
    let (nb, nk) = (cpl.base().dim(), cpl.kernel().dim());
    if nb >= 2 && rng.random_bool(0.5) {
        let mut omega = cpl.omega_cochain();
        let idx = rng.random_range(0..SubsetBasis::new(nb, 2).len() * nk);
        omega[idx] = omega[idx].clone() + nonzero(&mut rng);
        cpl.with_omega(omega).expect("shape")
    } else {
        let ders = cpl.kernel().derivations();
        let mut extra = combination(&mut rng, &ders, nk);
        if extra.is_zero() {
            extra = ders[rng.random_range(0..ders.len())].clone();
        }
        let i = rng.random_range(0..nb);
        let mut d = cpl.d().to_vec();
        d[i] = d[i].add(&extra);
        cpl.with_d(d).expect("sum of derivations")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::couple::is_admissible;

    #[test]
    fn generated_admissible_couples_are_admissible() {
        for seed in 0..60 {
            let cpl = random_admissible(seed);
            assert!(is_admissible(&cpl).ok(), "seed {seed}: {cpl:?}");
            assert!(cpl.base().dim() <= 3 && cpl.kernel().dim() <= 4);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(random_perturbed(7), random_perturbed(7));
        assert_eq!(random_admissible(11), random_admissible(11));
    }

    #[test]
    fn perturbations_mostly_break_admissibility() {
        let broken = (0..60).filter(|&s| !is_admissible(&random_perturbed(s)).ok()).count();
        assert!(broken >= 30, "only {broken} of 60 perturbed couples failed");
    }
}
