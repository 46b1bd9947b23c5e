#![allow(dead_code)]

use fano_decay::LatticeSpec;
use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian-ish complex matrix (Box-Muller), entries of unit variance.
pub fn random_complex(rng: &mut impl Rng, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        Complex64::new(r * t.cos(), r * t.sin()) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<Complex64> {
    let qr = random_complex(rng, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Σ over all n! permutations of Π M[i][σ(i)].
pub fn naive_permanent(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    (0..n)
        .permutations(n)
        .map(|p| p.iter().enumerate().map(|(i, &j)| m[(i, j)]).product::<Complex64>())
        .sum()
}

/// Lattice parameters spanning weak and strong coupling, in and out of band.
pub fn random_spec(rng: &mut impl Rng, max_dim: usize) -> LatticeSpec {
    let kappa = rng.gen_range(0.1..2.0);
    LatticeSpec {
        eps1: rng.gen_range(-2.5..2.5) * kappa,
        eps2: rng.gen_range(-2.5..2.5) * kappa,
        kappa1: rng.gen_range(0.0..1.2) * kappa,
        kappa2: rng.gen_range(0.0..1.2) * kappa,
        kappa,
        n_chain: rng.gen_range(1..=max_dim - 2),
        chain_energy: rng.gen_range(-0.5..0.5),
    }
}

pub fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}
