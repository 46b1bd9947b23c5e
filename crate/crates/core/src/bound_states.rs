//! Bound states in the continuum and the long-distance survival they leave behind.
//!
//! With ε₁ = ε₂ the combination `a†₁/κ₁ − a†₂/κ₂` has zero amplitude on the
//! chain head and never leaks into the chain, so any initial population
//! projected onto it survives forever. Detection here does not rely on that
//! closed form: every eigenvector of the truncated lattice whose energy lies
//! inside the band and whose weight on the chain is negligible is reported.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, Hamiltonian, LatticeSpec, SITE_1, SITE_2};
use crate::propagator::Spectrum;
use crate::statistics::{
    boson_amplitude, classical_amplitudes, entangled_amplitude, fermion_amplitude,
    SurvivalRecord, TwoModeBlock,
};

pub const DEFAULT_THRESHOLD: f64 = 1e-8;

/// Band edges are excluded by this fraction of κ.
const BAND_MARGIN: f64 = 1e-6;

/// Relative spacing below which eigenvalues are treated as one degenerate level.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BoundStateKind {
    /// A superposition of coupled sites whose chain amplitudes cancel.
    Dressed,
    /// A site with zero coupling to the chain; bound for trivial reasons.
    DecoupledSite { site: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundState {
    pub energy: f64,
    /// Unit-norm real eigenvector, sign fixed so its first significant entry is positive.
    pub vector: Vec<f64>,
    pub chain_weight: f64,
    #[serde(flatten)]
    pub kind: BoundStateKind,
}

impl BoundState {
    /// `‖H·v − E·v‖₂`
    pub fn residual(&self, h: &Hamiltonian) -> f64 {
        eigen_residual(h, &self.vector, self.energy)
    }
}

pub fn eigen_residual(h: &Hamiltonian, v: &[f64], energy: f64) -> f64 {
    let m = h.matrix();
    (0..h.dim())
        .map(|i| {
            let hv: f64 = (0..h.dim()).map(|j| m[(i, j)] * v[j]).sum();
            (hv - energy * v[i]).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// The closed-form dressed state `(1/κ₁, −1/κ₂, 0, …)`, normalized.
pub fn analytic_dressed_state(spec: &LatticeSpec) -> Result<Vec<f64>> {
    if spec.kappa1 <= 0.0 || spec.kappa2 <= 0.0 {
        return Err(Error::invalid(
            "kappa1",
            "the dressed state needs both side couplings to be positive",
        ));
    }
    let (a, b) = (1.0 / spec.kappa1, -1.0 / spec.kappa2);
    let norm = a.hypot(b);
    let mut v = vec![0.0; spec.dim()];
    v[SITE_1] = a / norm;
    v[SITE_2] = b / norm;
    Ok(v)
}

fn fix_sign(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-8) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn chain_weight(v: &[f64], chain_start: usize) -> f64 {
    v[chain_start..].iter().map(|x| x * x).sum()
}

fn classify(v: &[f64]) -> BoundStateKind {
    match v.iter().position(|x| x * x > 1.0 - 1e-12) {
        Some(site) => BoundStateKind::DecoupledSite { site },
        None => BoundStateKind::Dressed,
    }
}

/// Eigenstates with in-band energy and chain weight at most `threshold`, sorted by energy.
///
/// Degenerate levels are searched as a whole subspace: the chain-weight
/// quadratic form is diagonalized within the level, so a bound state is
/// found even when the eigensolver returns it mixed with a degenerate
/// chain mode.
pub fn detect_bics(h: &Hamiltonian, threshold: f64) -> Result<Vec<BoundState>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(
            "threshold",
            format!("must lie in (0, 1), got {threshold}"),
        ));
    }
    let Some(band) = h.band() else {
        return Ok(Vec::new());
    };
    let spectrum = Spectrum::new(h)?;
    let energies = spectrum.energies();
    let dim = spectrum.dim();
    let chain_start = h.chain_start();
    let scale = h.matrix().amax().max(f64::MIN_POSITIVE);
    let margin = BAND_MARGIN * band.half_width / 2.0;

    let mut found = Vec::new();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && energies[end] - energies[end - 1] <= DEGENERACY_TOL * scale {
            end += 1;
        }
        let level = start..end;
        start = end;

        let mean_energy = energies[level.clone()].iter().sum::<f64>() / level.len() as f64;
        if !band.contains(mean_energy, margin) {
            continue;
        }

        if level.len() == 1 {
            let k = level.start;
            let mut v = spectrum.vector(k);
            let w = chain_weight(&v, chain_start);
            if w <= threshold {
                fix_sign(&mut v);
                found.push(BoundState {
                    energy: energies[k],
                    kind: classify(&v),
                    vector: v,
                    chain_weight: w,
                });
            }
            continue;
        }

        // chain-weight Gram matrix restricted to the degenerate level
        let m = level.len();
        let gram = DMatrix::from_fn(m, m, |a, b| {
            (chain_start..dim)
                .map(|n| {
                    spectrum.vector_component(n, level.start + a)
                        * spectrum.vector_component(n, level.start + b)
                })
                .sum::<f64>()
        });
        let eig = SymmetricEigen::new(gram);
        for (idx, &w) in eig.eigenvalues.iter().enumerate() {
            if w > threshold {
                continue;
            }
            let coeffs = eig.eigenvectors.column(idx);
            let mut v: Vec<f64> = (0..dim)
                .map(|n| {
                    (0..m)
                        .map(|a| spectrum.vector_component(n, level.start + a) * coeffs[a])
                        .sum()
                })
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            fix_sign(&mut v);
            let m_h = h.matrix();
            let energy: f64 = (0..dim)
                .map(|i| v[i] * (0..dim).map(|j| m_h[(i, j)] * v[j]).sum::<f64>())
                .sum();
            found.push(BoundState {
                energy,
                chain_weight: chain_weight(&v, chain_start),
                kind: classify(&v),
                vector: v,
            });
        }
    }
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(found)
}

/// Projector of a bound state onto the two input sites: `⟨i|b⟩⟨b|j⟩`.
fn site_projector(state: &BoundState) -> TwoModeBlock {
    use num_complex::Complex64;
    let v = [state.vector[SITE_1], state.vector[SITE_2]];
    let mut b = TwoModeBlock::zeros();
    for i in 0..2 {
        for j in 0..2 {
            b.0[i][j] = Complex64::new(v[i] * v[j], 0.0);
        }
    }
    b
}

/// Long-distance limit of `|f(B(z), B(z))|²` for a bilinear amplitude `f`,
/// where `B(z) = Σ_b e^{−iE_b z}·P_b`. Pairs of bound states with equal total
/// energy interfere; distinct total energies average out.
fn asymptotic_probability<F>(states: &[BoundState], projectors: &[TwoModeBlock], f: F) -> f64
where
    F: Fn(&TwoModeBlock, &TwoModeBlock) -> num_complex::Complex64,
{
    let mut groups: Vec<(f64, num_complex::Complex64)> = Vec::new();
    let scale = states.iter().map(|s| s.energy.abs()).fold(1.0, f64::max);
    for (b, sb) in states.iter().enumerate() {
        for (c, sc) in states.iter().enumerate() {
            let total = sb.energy + sc.energy;
            let amp = f(&projectors[b], &projectors[c]);
            match groups
                .iter_mut()
                .find(|(e, _)| (e - total).abs() <= DEGENERACY_TOL * scale)
            {
                Some((_, acc)) => *acc += amp,
                None => groups.push((total, amp)),
            }
        }
    }
    groups.iter().fold(0.0, |acc, (_, a)| acc + a.norm_sqr())
}

/// Survival as `z → ∞`, from the projection of the two input sites onto the
/// bound states in the continuum. `z` of the returned record is `+∞`.
pub fn asymptotic_survival(spec: &LatticeSpec) -> Result<SurvivalRecord> {
    let h = build_hamiltonian(spec)?;
    let states = detect_bics(&h, DEFAULT_THRESHOLD)?;
    Ok(asymptotic_from_states(&states))
}

pub fn asymptotic_from_states(states: &[BoundState]) -> SurvivalRecord {
    let projectors: Vec<TwoModeBlock> = states.iter().map(site_projector).collect();
    let direct = asymptotic_probability(states, &projectors, |x, y| classical_amplitudes(x, y).0);
    let exchange = asymptotic_probability(states, &projectors, |x, y| classical_amplitudes(x, y).1);
    SurvivalRecord {
        z: f64::INFINITY,
        p_boson: asymptotic_probability(states, &projectors, boson_amplitude),
        p_fermion: asymptotic_probability(states, &projectors, fermion_amplitude),
        p_classical: direct + exchange,
        p_entangled: asymptotic_probability(states, &projectors, entangled_amplitude),
    }
}
