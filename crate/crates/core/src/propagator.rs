//! Single-particle propagation, `S(z) = exp(−iHz)`.
//!
//! Amplitudes obey `i·da/dz = H·a`, so `S[n][j]` is the amplitude on mode `n`
//! at distance `z` for unit amplitude on mode `j` at `z = 0`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::Hamiltonian;

const EIGEN_MAX_ITER: usize = 100_000;

/// Eigendecomposition `H = V·Λ·Vᵀ` of a real symmetric Hamiltonian, sorted by
/// ascending energy. Computed once and reused for any number of distances.
#[derive(Debug, Clone)]
pub struct Spectrum {
    energies: Vec<f64>,
    // rows[n][k] = V[n][k], stored row-wise for contiguous amplitude sums
    rows: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        let dim = h.dim();
        let eig = SymmetricEigen::try_new(h.matrix().clone(), f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or(Error::Eigendecomposition { dim })?;

        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let rows = (0..dim)
            .map(|n| order.iter().map(|&k| eig.eigenvectors[(n, k)]).collect())
            .collect();
        Ok(Spectrum { energies, rows })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Component `n` of eigenvector `k`.
    pub fn vector_component(&self, n: usize, k: usize) -> f64 {
        self.rows[n][k]
    }

    /// Eigenvector `k` as a column.
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|row| row[k]).collect()
    }

    /// `e^{−iλₖz}` for every eigenvalue.
    pub fn phases(&self, z: f64) -> Vec<Complex64> {
        self.energies
            .iter()
            .map(|&e| {
                let (s, c) = (e * z).sin_cos();
                Complex64::new(c, -s)
            })
            .collect()
    }

    /// `S[n][j] = Σₖ V[n][k]·V[j][k]·e^{−iλₖz}`. Symmetric in `(n, j)` bit for bit.
    pub fn amplitude(&self, n: usize, j: usize, phases: &[Complex64]) -> Complex64 {
        let (rn, rj) = (&self.rows[n], &self.rows[j]);
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..phases.len() {
            let w = rn[k] * rj[k];
            re += w * phases[k].re;
            im += w * phases[k].im;
        }
        Complex64::new(re, im)
    }

    pub fn propagate(&self, z: f64) -> Result<Propagator> {
        check_distance(z)?;
        let dim = self.dim();
        if z == 0.0 {
            return Ok(Propagator {
                z,
                matrix: DMatrix::identity(dim, dim),
            });
        }
        let phases = self.phases(z);
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for n in 0..dim {
            for j in n..dim {
                let a = self.amplitude(n, j, &phases);
                matrix[(n, j)] = a;
                matrix[(j, n)] = a;
            }
        }
        Ok(Propagator { z, matrix })
    }
}

/// Scattering matrix `S(z)` of the lattice at one propagation distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub z: f64,
    pub matrix: DMatrix<Complex64>,
}

impl Propagator {
    /// Wraps an arbitrary square matrix, e.g. a test unitary.
    pub fn from_matrix(z: f64, matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        Ok(Propagator { z, matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, n: usize, j: usize) -> Complex64 {
        self.matrix[(n, j)]
    }

    /// `‖S†S − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.matrix.adjoint() * &self.matrix;
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Largest entrywise modulus difference from `other`.
    pub fn max_abs_diff(&self, other: &Propagator) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_distance(z: f64) -> Result<()> {
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::invalid("z", format!("must be finite and >= 0, got {z}")));
    }
    Ok(())
}

/// Spectral propagator `V·exp(−iΛz)·Vᵀ`.
pub fn propagator(h: &Hamiltonian, z: f64) -> Result<Propagator> {
    check_distance(z)?;
    Spectrum::new(h)?.propagate(z)
}

/// Integrates `dS/dz = −iHS` from `S(0) = I` with classical fixed-step RK4.
///
/// Independent of the eigendecomposition; meant as a cross-check. The step
/// is shrunk so an integer number of steps lands exactly on `z`; keep it at
/// or below `0.01/κ`.
pub fn propagator_ode(h: &Hamiltonian, z: f64, step: f64) -> Result<Propagator> {
    check_distance(z)?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid("step", format!("must be > 0, got {step}")));
    }
    let n = h.dim();
    let nonzeros = h.nonzeros();
    let steps = (z / step).ceil() as usize;
    let dz = if steps == 0 { 0.0 } else { z / steps as f64 };

    // column-major n×n state
    let mut s = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        s[j * n + j] = Complex64::new(1.0, 0.0);
    }
    let mut k1 = vec![Complex64::default(); n * n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();

    // out = −i·H·x
    let rhs = |x: &[Complex64], out: &mut [Complex64]| {
        out.iter_mut().for_each(|v| *v = Complex64::default());
        for col in 0..n {
            let base = col * n;
            for &(i, j, v) in &nonzeros {
                let a = x[base + j] * v;
                out[base + i] += Complex64::new(a.im, -a.re);
            }
        }
    };

    for step_idx in 0..steps {
        rhs(&s, &mut k1);
        for i in 0..s.len() {
            tmp[i] = s[i] + k1[i] * (0.5 * dz);
        }
        rhs(&tmp, &mut k2);
        for i in 0..s.len() {
            tmp[i] = s[i] + k2[i] * (0.5 * dz);
        }
        rhs(&tmp, &mut k3);
        for i in 0..s.len() {
            tmp[i] = s[i] + k3[i] * dz;
        }
        rhs(&tmp, &mut k4);
        for i in 0..s.len() {
            s[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dz / 6.0);
        }
        if s.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite {
                z: dz * (step_idx + 1) as f64,
                step: step_idx + 1,
            });
        }
    }

    Ok(Propagator {
        z,
        matrix: DMatrix::from_vec(n, n, s),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::lattice::{build_hamiltonian, LatticeSpec};

    #[test]
    fn identity_at_zero() {
        let h = build_hamiltonian(&LatticeSpec::experiment()).unwrap();
        let s = propagator(&h, 0.0).unwrap();
        assert_eq!(s.matrix, DMatrix::identity(27, 27));
        let s = propagator_ode(&h, 0.0, 1e-3).unwrap();
        assert_eq!(s.matrix, DMatrix::identity(27, 27));
    }

    #[test]
    fn decoupled_site_only_picks_up_phase() {
        let spec = LatticeSpec::new(0.8, -0.3, 0.0, 0.0, 0.5, 12);
        let h = build_hamiltonian(&spec).unwrap();
        for z in [0.5, 7.0, 31.0] {
            let s = propagator(&h, z).unwrap();
            let expect = Complex64::new(0.0, -0.8 * z).exp();
            assert!((s.get(0, 0) - expect).norm() < 1e-12);
            assert!((s.get(0, 0).norm() - 1.0).abs() < 1e-12);
            assert!((s.get(1, 1).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_site_scalar_exponential() {
        let h = Hamiltonian::from_symmetric(DMatrix::from_element(1, 1, 1.0)).unwrap();
        let s = propagator_ode(&h, PI, 1e-3).unwrap();
        assert!((s.get(0, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-8);
        let s = propagator(&h, PI).unwrap();
        assert!((s.get(0, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phase_convention_first_order() {
        // S ≈ I − iHz for small z
        let h = build_hamiltonian(&LatticeSpec::experiment()).unwrap();
        let z = 1e-6;
        let s = propagator(&h, z).unwrap();
        let expect = Complex64::new(0.0, -0.2 * z);
        assert!((s.get(0, 2) - expect).norm() < 1e-11);
    }

    #[test]
    fn spectral_matches_ode_on_converged_lattice() {
        let h = build_hamiltonian(&LatticeSpec::experiment().with_n_chain(100)).unwrap();
        let spectral = propagator(&h, 20.0).unwrap();
        let ode = propagator_ode(&h, 20.0, 2e-3).unwrap();
        assert!(spectral.max_abs_diff(&ode) <= 1e-6);
    }

    #[test]
    fn rejects_negative_distance_and_step() {
        let h = build_hamiltonian(&LatticeSpec::experiment()).unwrap();
        assert!(propagator(&h, -1.0).is_err());
        assert!(propagator_ode(&h, 1.0, 0.0).is_err());
        assert!(propagator_ode(&h, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn ode_reports_blowup() {
        let h = Hamiltonian::from_symmetric(DMatrix::from_element(1, 1, 1e300)).unwrap();
        assert!(matches!(propagator_ode(&h, 1.0, 0.5), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn symmetric_sites_are_interchangeable() {
        let h = build_hamiltonian(&LatticeSpec::experiment()).unwrap();
        let s = propagator(&h, 13.0).unwrap();
        assert!((s.get(0, 0) - s.get(1, 1)).norm() < 1e-12);
        assert!((s.get(0, 2) - s.get(1, 2)).norm() < 1e-12);
    }
}
