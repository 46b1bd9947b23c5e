//! Lattice parameters and the single-particle Hamiltonian.
//!
//! Mode indices are zero-based: `SITE_1` and `SITE_2` are the two side-coupled
//! waveguides, and the chain occupies indices `CHAIN_HEAD..dim` starting from
//! the waveguide both sites couple to. All rates are in mm⁻¹, distances in mm.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SITE_1: usize = 0;
pub const SITE_2: usize = 1;
pub const CHAIN_HEAD: usize = 2;

/// Number of waveguides in the fabricated array.
pub const EXPERIMENT_CHAIN_LEN: usize = 25;

/// Physical parameters of two sites side-coupled to a truncated tight-binding chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub eps1: f64,
    pub eps2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa: f64,
    pub n_chain: usize,
    #[serde(default)]
    pub chain_energy: f64,
}

impl LatticeSpec {
    pub fn new(eps1: f64, eps2: f64, kappa1: f64, kappa2: f64, kappa: f64, n_chain: usize) -> Self {
        LatticeSpec {
            eps1,
            eps2,
            kappa1,
            kappa2,
            kappa,
            n_chain,
            chain_energy: 0.0,
        }
    }

    /// The fabricated structure: κ₁ = κ₂ = 0.2, κ = 0.5, ε₁ = ε₂ = 0.5 mm⁻¹, 25 chain sites.
    pub fn experiment() -> Self {
        LatticeSpec::new(0.5, 0.5, 0.2, 0.2, 0.5, EXPERIMENT_CHAIN_LEN)
    }

    pub fn with_eps2(self, eps2: f64) -> Self {
        LatticeSpec { eps2, ..self }
    }

    pub fn with_n_chain(self, n_chain: usize) -> Self {
        LatticeSpec { n_chain, ..self }
    }

    pub fn dim(&self) -> usize {
        self.n_chain + 2
    }

    /// Hard constraints. Violations are errors naming the offending parameter.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("kappa", self.kappa),
            ("chain_energy", self.chain_energy),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {value}")));
            }
        }
        if self.kappa <= 0.0 {
            return Err(Error::invalid("kappa", format!("must be > 0, got {}", self.kappa)));
        }
        if self.kappa1 < 0.0 {
            return Err(Error::invalid("kappa1", format!("must be >= 0, got {}", self.kappa1)));
        }
        if self.kappa2 < 0.0 {
            return Err(Error::invalid("kappa2", format!("must be >= 0, got {}", self.kappa2)));
        }
        if self.n_chain < 1 {
            return Err(Error::invalid("n_chain", "must be >= 1"));
        }
        Ok(())
    }

    /// Soft constraints: weak coupling (κ₁,₂ < κ) and site energies inside the band.
    /// Returned as messages rather than errors so off-regime parameters stay usable.
    pub fn advisories(&self) -> Vec<String> {
        let mut notes = Vec::new();
        for (name, k) in [("kappa1", self.kappa1), ("kappa2", self.kappa2)] {
            if k >= self.kappa {
                notes.push(format!(
                    "{name} = {k} is not weak relative to kappa = {}",
                    self.kappa
                ));
            }
        }
        let half_width = 2.0 * self.kappa;
        for (name, e) in [("eps1", self.eps1), ("eps2", self.eps2)] {
            if (e - self.chain_energy).abs() >= half_width {
                notes.push(format!(
                    "{name} = {e} lies outside the chain band ({}, {})",
                    self.chain_energy - half_width,
                    self.chain_energy + half_width
                ));
            }
        }
        notes
    }
}

/// The continuum band of the chain, `center ± half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub center: f64,
    pub half_width: f64,
}

impl Band {
    /// Strictly inside the band, excluding a margin at each edge.
    pub fn contains(&self, energy: f64, margin: f64) -> bool {
        (energy - self.center).abs() < self.half_width - margin
    }
}

/// Real symmetric coupling matrix in the site basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: DMatrix<f64>,
    band: Option<Band>,
    chain_start: usize,
}

impl Hamiltonian {
    /// Wraps an arbitrary real symmetric matrix. Such a Hamiltonian has no
    /// associated continuum band and treats every index as a discrete site.
    pub fn from_symmetric(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("hamiltonian", "entries must be finite"));
        }
        if matrix != matrix.transpose() {
            return Err(Error::invalid("hamiltonian", "matrix is not symmetric"));
        }
        let dim = matrix.nrows();
        Ok(Hamiltonian {
            matrix,
            band: None,
            chain_start: dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn band(&self) -> Option<Band> {
        self.band
    }

    /// Indices `chain_start()..dim()` belong to the chain.
    pub fn chain_start(&self) -> usize {
        self.chain_start
    }

    /// Nonzero entries as `(row, col, value)`, row-major.
    pub fn nonzeros(&self) -> Vec<(usize, usize, f64)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = self.matrix[(i, j)];
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// Assembles the coupled-mode matrix: diagonal (ε₁, ε₂, ε, ε, …), κ₁ and κ₂
/// between each site and the chain head, κ between neighbouring chain sites.
pub fn build_hamiltonian(spec: &LatticeSpec) -> Result<Hamiltonian> {
    spec.validate()?;
    for note in spec.advisories() {
        log::warn!("{note}");
    }

    let dim = spec.dim();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    h[(SITE_1, SITE_1)] = spec.eps1;
    h[(SITE_2, SITE_2)] = spec.eps2;
    h[(SITE_1, CHAIN_HEAD)] = spec.kappa1;
    h[(CHAIN_HEAD, SITE_1)] = spec.kappa1;
    h[(SITE_2, CHAIN_HEAD)] = spec.kappa2;
    h[(CHAIN_HEAD, SITE_2)] = spec.kappa2;
    for j in CHAIN_HEAD..dim {
        h[(j, j)] = spec.chain_energy;
        if j + 1 < dim {
            h[(j, j + 1)] = spec.kappa;
            h[(j + 1, j)] = spec.kappa;
        }
    }

    Ok(Hamiltonian {
        matrix: h,
        band: Some(Band {
            center: spec.chain_energy,
            half_width: 2.0 * spec.kappa,
        }),
        chain_start: CHAIN_HEAD,
    })
}

/// Chain length for which the fastest wavefront (2κ sites per mm) cannot
/// reach the truncated end and come back before `z_max`:
/// `ceil(2·κ·z_max·safety) + 2`.
pub fn chain_length_for(z_max: f64, kappa: f64, safety: f64) -> usize {
    (2.0 * kappa * z_max * safety).ceil().max(0.0) as usize + 2
}
