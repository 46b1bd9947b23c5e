//! Parameter sweeps, survival maps and coincidence-count normalization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, chain_length_for, LatticeSpec, EXPERIMENT_CHAIN_LEN};
use crate::output::ResultRow;
use crate::propagator::Spectrum;
use crate::statistics::{ModePair, SurvivalRecord, TwoModeBlock};

pub const DEFAULT_SAFETY: f64 = 1.5;

/// How the chain is truncated for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainPolicy {
    /// The fabricated array: 25 sites.
    Faithful,
    /// `chain_length_for(z_max, κ, safety)`, long enough that nothing returns
    /// from the truncated end within the run.
    ReflectionSafe { safety: f64 },
    /// Use `base.n_chain` as given.
    Explicit,
}

impl Default for ChainPolicy {
    fn default() -> Self {
        ChainPolicy::ReflectionSafe {
            safety: DEFAULT_SAFETY,
        }
    }
}

impl ChainPolicy {
    pub fn n_chain(&self, base: &LatticeSpec, z_max: f64) -> Result<usize> {
        match *self {
            ChainPolicy::Faithful => Ok(EXPERIMENT_CHAIN_LEN),
            ChainPolicy::Explicit => Ok(base.n_chain),
            ChainPolicy::ReflectionSafe { safety } => {
                if !(safety >= 1.0 && safety.is_finite()) {
                    return Err(Error::invalid("safety", format!("must be >= 1, got {safety}")));
                }
                Ok(chain_length_for(z_max.max(0.0), base.kappa, safety))
            }
        }
    }

    /// `base` with its chain length replaced according to the policy.
    pub fn apply(&self, base: &LatticeSpec, z_max: f64) -> Result<LatticeSpec> {
        Ok(base.with_n_chain(self.n_chain(base, z_max)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: LatticeSpec,
    pub z_values: Vec<f64>,
    pub eps2_values: Option<Vec<f64>>,
    pub chain: ChainPolicy,
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.z_values.is_empty() {
            return Err(Error::invalid("z_values", "must not be empty"));
        }
        if self.z_values.iter().any(|z| !(z.is_finite() && *z >= 0.0)) {
            return Err(Error::invalid("z_values", "must be finite and >= 0"));
        }
        if !strictly_increasing(&self.z_values) {
            return Err(Error::invalid("z_values", "must be strictly increasing"));
        }
        if let Some(eps2) = &self.eps2_values {
            if eps2.is_empty() || eps2.iter().any(|e| !e.is_finite()) {
                return Err(Error::invalid("eps2_values", "must be nonempty and finite"));
            }
            if !strictly_increasing(eps2) {
                return Err(Error::invalid("eps2_values", "must be strictly increasing"));
            }
        }
        Ok(())
    }

    pub fn z_max(&self) -> f64 {
        self.z_values.last().copied().unwrap_or(0.0)
    }

    /// The lattice actually simulated, chain length resolved for `z_max()`.
    pub fn resolved_base(&self) -> Result<LatticeSpec> {
        self.chain.apply(&self.base, self.z_max())
    }
}

/// `n` evenly spaced points from `start` to `end` inclusive; `[start]` when `n == 1`.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    end
                } else {
                    start + (end - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn records_along_z(spec: &LatticeSpec, z_values: &[f64]) -> Result<Vec<SurvivalRecord>> {
    let h = build_hamiltonian(spec)?;
    let spectrum = Spectrum::new(&h)?;
    let modes = ModePair::default();
    Ok(z_values
        .iter()
        .map(|&z| SurvivalRecord::from_block(z, &TwoModeBlock::from_spectrum(&spectrum, modes, z)))
        .collect())
}

/// Survival versus propagation distance, one eigendecomposition for the whole grid.
pub fn sweep_z(cfg: &SweepConfig) -> Result<Vec<SurvivalRecord>> {
    cfg.validate()?;
    if cfg.eps2_values.is_some() {
        return Err(Error::invalid(
            "eps2_values",
            "a distance sweep takes no detuning grid; use survival_map",
        ));
    }
    records_along_z(&cfg.resolved_base()?, &cfg.z_values)
}

/// Survival versus ε₂ at fixed distance. Grid points run in parallel; output
/// order follows `eps2_values`.
pub fn sweep_detuning(cfg: &SweepConfig, z_fixed: f64) -> Result<Vec<SurvivalRecord>> {
    cfg.base.validate()?;
    if !(z_fixed.is_finite() && z_fixed > 0.0) {
        return Err(Error::invalid("z", format!("must be > 0, got {z_fixed}")));
    }
    let eps2_values = cfg
        .eps2_values
        .as_ref()
        .ok_or_else(|| Error::invalid("eps2_values", "a detuning sweep needs an eps2 grid"))?;
    let probe = SweepConfig {
        z_values: vec![z_fixed],
        ..cfg.clone()
    };
    probe.validate()?;
    let base = probe.resolved_base()?;
    eps2_values
        .par_iter()
        .map(|&eps2| Ok(records_along_z(&base.with_eps2(eps2), &[z_fixed])?[0]))
        .collect()
}

/// Dense survival grid over distance and ε₂.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalMap {
    /// Lattice with the resolved chain length; `eps2` is overridden per column.
    pub base: LatticeSpec,
    pub z_values: Vec<f64>,
    pub eps2_values: Vec<f64>,
    /// `records[i][j]` is at `z_values[i]`, `eps2_values[j]`.
    pub records: Vec<Vec<SurvivalRecord>>,
}

impl SurvivalMap {
    pub fn kappa_z(&self) -> Vec<f64> {
        self.z_values.iter().map(|z| self.base.kappa * z).collect()
    }

    pub fn detuning_over_kappa(&self) -> Vec<f64> {
        self.eps2_values
            .iter()
            .map(|e| (e - self.base.eps1) / self.base.kappa)
            .collect()
    }

    /// All cells in row-major (z-major) order.
    pub fn rows(&self) -> Vec<ResultRow> {
        let mut out = Vec::with_capacity(self.z_values.len() * self.eps2_values.len());
        for row in &self.records {
            for (record, &eps2) in row.iter().zip(&self.eps2_values) {
                out.push(ResultRow::new(&self.base.with_eps2(eps2), record));
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<SurvivalRecord> {
        self.records.iter().map(|row| row[j]).collect()
    }
}

pub fn survival_map(cfg: &SweepConfig) -> Result<SurvivalMap> {
    cfg.validate()?;
    let eps2_values = cfg
        .eps2_values
        .clone()
        .ok_or_else(|| Error::invalid("eps2_values", "a survival map needs an eps2 grid"))?;
    let base = cfg.resolved_base()?;
    let columns: Vec<Vec<SurvivalRecord>> = eps2_values
        .par_iter()
        .map(|&eps2| records_along_z(&base.with_eps2(eps2), &cfg.z_values))
        .collect::<Result<_>>()?;
    let records = (0..cfg.z_values.len())
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect();
    Ok(SurvivalMap {
        base,
        z_values: cfg.z_values.clone(),
        eps2_values,
        records,
    })
}

/// Map grid in normalized units: κ·z from 0 to `kz_max` and (ε₂ − ε₁)/κ over
/// `[detuning_min, detuning_max]`.
pub fn normalized_map_config(
    base: LatticeSpec,
    kz_max: f64,
    kz_points: usize,
    detuning: (f64, f64),
    detuning_points: usize,
) -> SweepConfig {
    let k = base.kappa;
    SweepConfig {
        base,
        z_values: linspace(0.0, kz_max, kz_points).into_iter().map(|kz| kz / k).collect(),
        eps2_values: Some(
            linspace(detuning.0, detuning.1, detuning_points)
                .into_iter()
                .map(|d| base.eps1 + d * k)
                .collect(),
        ),
        chain: ChainPolicy::default(),
    }
}

/// The survival-map parameters in units of κ: κ₁ = κ₂ = 0.4κ, ε₁ = κ, with
/// κz ∈ [0, 15] (151 points) and (ε₂ − ε₁)/κ ∈ [−2, 2] (161 points).
pub fn default_map_config() -> SweepConfig {
    let base = LatticeSpec::new(1.0, 1.0, 0.4, 0.4, 1.0, 1);
    normalized_map_config(base, 15.0, 151, (-2.0, 2.0), 161)
}

/// Coincidence counts for the four launch configurations, plus the classical
/// survival measured from single-particle runs.
///
/// Counts are real so that expected (noise-free) counts can be fed in directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountsRecord {
    /// Identically polarized pair.
    pub c_vv: f64,
    /// Same, with one photon delayed.
    pub c_vv_dist: f64,
    /// Antisymmetric polarization-entangled pair.
    pub c_ent: f64,
    /// Orthogonally polarized pair with one photon delayed.
    pub c_vh_dist: f64,
    pub p_clas: f64,
}

impl CountsRecord {
    pub fn new(c_vv: f64, c_vv_dist: f64, c_ent: f64, c_vh_dist: f64, p_clas: f64) -> Result<Self> {
        let fields = [
            ("c_vv", c_vv),
            ("c_vv_dist", c_vv_dist),
            ("c_ent", c_ent),
            ("c_vh_dist", c_vh_dist),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be a count >= 0, got {v}")));
            }
        }
        if c_vv_dist == 0.0 {
            return Err(Error::invalid("c_vv_dist", "denominator count must be > 0"));
        }
        if c_vh_dist == 0.0 {
            return Err(Error::invalid("c_vh_dist", "denominator count must be > 0"));
        }
        if !(p_clas.is_finite() && (0.0..=1.0).contains(&p_clas)) {
            return Err(Error::invalid("p_clas", format!("must lie in [0, 1], got {p_clas}")));
        }
        Ok(CountsRecord {
            c_vv,
            c_vv_dist,
            c_ent,
            c_vh_dist,
            p_clas,
        })
    }
}

/// `(C_VV / C_VV,dist · P_clas, C_ent / C_VH,dist · P_clas)`.
///
/// Estimates above 1 are returned as is; they indicate miscalibrated counts.
pub fn normalize_counts(counts: &CountsRecord) -> (f64, f64) {
    (
        counts.c_vv / counts.c_vv_dist * counts.p_clas,
        counts.c_ent / counts.c_vh_dist * counts.p_clas,
    )
}

/// Noise-free counts for `shots` launched pairs: bosonic and entangled pairs
/// register `shots·p_boson` and `shots·p_fermion` coincidences, delayed
/// (distinguishable) pairs `shots·p_classical`.
pub fn ideal_counts(record: &SurvivalRecord, shots: f64) -> Result<CountsRecord> {
    CountsRecord::new(
        shots * record.p_boson,
        shots * record.p_classical,
        shots * record.p_fermion,
        shots * record.p_classical,
        record.p_classical,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_cfg(base: LatticeSpec, z_values: Vec<f64>) -> SweepConfig {
        SweepConfig {
            base,
            z_values,
            eps2_values: None,
            chain: ChainPolicy::default(),
        }
    }

    #[test]
    fn z_zero_is_all_ones() {
        let r = sweep_z(&z_cfg(LatticeSpec::experiment(), vec![0.0])).unwrap();
        assert_eq!(r.len(), 1);
        let r = r[0];
        assert_eq!((r.p_boson, r.p_fermion, r.p_classical, r.p_entangled), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn decoupled_sites_stay_flat() {
        let base = LatticeSpec::new(0.5, 0.7, 0.0, 0.0, 0.5, 1);
        for r in sweep_z(&z_cfg(base, linspace(0.0, 30.0, 31))).unwrap() {
            for p in [r.p_boson, r.p_fermion, r.p_classical, r.p_entangled] {
                assert!((p - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn detuning_point_matches_distance_sweep() {
        let base = LatticeSpec::experiment();
        let along_z = sweep_z(&z_cfg(base, vec![5.0, 20.0])).unwrap();
        let cfg = SweepConfig {
            eps2_values: Some(vec![base.eps1]),
            ..z_cfg(base, vec![20.0])
        };
        let det = sweep_detuning(&cfg, 20.0).unwrap();
        assert_eq!(det[0], along_z[1]);
    }

    #[test]
    fn map_column_matches_distance_sweep() {
        let base = LatticeSpec::experiment();
        let z = linspace(0.0, 10.0, 11);
        let cfg = SweepConfig {
            eps2_values: Some(vec![0.3, 0.5, 0.7]),
            ..z_cfg(base, z.clone())
        };
        let map = survival_map(&cfg).unwrap();
        assert_eq!(map.column(1), sweep_z(&z_cfg(base, z)).unwrap());
        assert!(map.records[0].iter().all(|r| r.p_boson == 1.0 && r.p_fermion == 1.0));
        assert_eq!(map.rows().len(), 33);
    }

    #[test]
    fn rejects_malformed_grids() {
        let base = LatticeSpec::experiment();
        assert!(sweep_z(&z_cfg(base, vec![])).is_err());
        assert!(sweep_z(&z_cfg(base, vec![1.0, 1.0])).is_err());
        assert!(sweep_z(&z_cfg(base, vec![-1.0])).is_err());
        let cfg = SweepConfig {
            eps2_values: Some(vec![0.5, 0.4]),
            ..z_cfg(base, vec![1.0])
        };
        assert!(survival_map(&cfg).is_err());
        assert!(sweep_detuning(&z_cfg(base, vec![1.0]), 20.0).is_err());
    }

    #[test]
    fn chain_policies() {
        let base = LatticeSpec::experiment().with_n_chain(7);
        assert_eq!(ChainPolicy::Faithful.n_chain(&base, 30.0).unwrap(), 25);
        assert_eq!(ChainPolicy::Explicit.n_chain(&base, 30.0).unwrap(), 7);
        assert_eq!(ChainPolicy::default().n_chain(&base, 30.0).unwrap(), 47);
        assert!(ChainPolicy::ReflectionSafe { safety: 0.5 }.n_chain(&base, 1.0).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.1, 0.9, 41)[20], 0.5);
        assert_eq!(linspace(-2.0, 2.0, 161)[80], 0.0);
        assert_eq!(linspace(3.0, 5.0, 1), vec![3.0]);
        assert_eq!(*linspace(0.0, 30.0, 7).last().unwrap(), 30.0);
    }

    #[test]
    fn count_normalization() {
        let c = CountsRecord::new(50.0, 50.0, 70.0, 70.0, 0.3).unwrap();
        assert_eq!(normalize_counts(&c), (0.3, 0.3));
        let c = CountsRecord::new(200.0, 100.0, 0.0, 100.0, 0.125).unwrap();
        assert_eq!(normalize_counts(&c), (0.25, 0.0));
        // miscalibrated counts are reported, not clamped
        let c = CountsRecord::new(900.0, 100.0, 0.0, 100.0, 0.5).unwrap();
        assert_eq!(normalize_counts(&c).0, 4.5);
    }

    #[test]
    fn zero_denominators_rejected() {
        assert!(matches!(
            CountsRecord::new(1.0, 0.0, 1.0, 1.0, 0.1),
            Err(Error::InvalidParameter { name: "c_vv_dist", .. })
        ));
        assert!(matches!(
            CountsRecord::new(1.0, 1.0, 1.0, 0.0, 0.1),
            Err(Error::InvalidParameter { name: "c_vh_dist", .. })
        ));
        assert!(CountsRecord::new(1.0, 1.0, 1.0, 1.0, 1.5).is_err());
    }
}
