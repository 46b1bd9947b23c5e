//! Two-particle survival probabilities from a single-particle scattering matrix.
//!
//! One particle starts on each of two input modes (sites 1 and 2 by default).
//! The survival probability is the chance both are found there again: for
//! bosons `|perm|²` and for fermions `|det|²` of the 2×2 block of `S` on those
//! modes, and for distinguishable particles the incoherent sum of the direct
//! and exchange paths. The polarization-entangled route rebuilds the fermionic
//! result from bosonic photons in a polarization-independent device.
//!
//! The amplitude helpers are written as bilinear forms `f(X, Y)`: the photon
//! launched on the first input mode evolves with `X`, the second with `Y`.
//! Evaluated at `X = Y = S` they give the usual amplitudes; the bilinear form
//! lets asymptotics mix contributions from different bound states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{SITE_1, SITE_2};
use crate::propagator::{Propagator, Spectrum};

/// The two modes that are initially occupied and later post-selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModePair {
    pub first: usize,
    pub second: usize,
}

impl ModePair {
    pub fn new(first: usize, second: usize) -> Result<Self> {
        if first == second {
            return Err(Error::invalid("modes", "the two modes must differ"));
        }
        Ok(ModePair { first, second })
    }
}

impl Default for ModePair {
    fn default() -> Self {
        ModePair {
            first: SITE_1,
            second: SITE_2,
        }
    }
}

/// `block[a][b] = S[mode_a][mode_b]`: output mode first, input mode second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeBlock(pub [[Complex64; 2]; 2]);

impl TwoModeBlock {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        TwoModeBlock([[one, zero], [zero, one]])
    }

    pub fn zeros() -> Self {
        TwoModeBlock([[Complex64::new(0.0, 0.0); 2]; 2])
    }

    pub fn from_propagator(s: &Propagator, modes: ModePair) -> Result<Self> {
        let dim = s.dim();
        if modes.first >= dim || modes.second >= dim {
            return Err(Error::invalid(
                "modes",
                format!("mode index out of range for dimension {dim}"),
            ));
        }
        let m = [modes.first, modes.second];
        Ok(TwoModeBlock([
            [s.get(m[0], m[0]), s.get(m[0], m[1])],
            [s.get(m[1], m[0]), s.get(m[1], m[1])],
        ]))
    }

    /// Same values as `from_propagator(spectrum.propagate(z))`, bit for bit,
    /// without forming the full matrix.
    pub fn from_spectrum(spectrum: &Spectrum, modes: ModePair, z: f64) -> Self {
        if z == 0.0 {
            return TwoModeBlock::identity();
        }
        let phases = spectrum.phases(z);
        let (a, b) = (modes.first, modes.second);
        let off = spectrum.amplitude(a, b, &phases);
        TwoModeBlock([
            [spectrum.amplitude(a, a, &phases), off],
            [off, spectrum.amplitude(b, b, &phases)],
        ])
    }

    pub fn get(&self, out: usize, input: usize) -> Complex64 {
        self.0[out][input]
    }
}

/// Both particles stay: each on its own input mode.
fn direct(x: &TwoModeBlock, y: &TwoModeBlock) -> Complex64 {
    x.get(0, 0) * y.get(1, 1)
}

/// Both particles stay, having swapped modes.
fn exchange(x: &TwoModeBlock, y: &TwoModeBlock) -> Complex64 {
    x.get(1, 0) * y.get(0, 1)
}

pub fn boson_amplitude(x: &TwoModeBlock, y: &TwoModeBlock) -> Complex64 {
    direct(x, y) + exchange(x, y)
}

pub fn fermion_amplitude(x: &TwoModeBlock, y: &TwoModeBlock) -> Complex64 {
    direct(x, y) - exchange(x, y)
}

/// Direct and exchange amplitudes, which add incoherently for distinguishable particles.
pub fn classical_amplitudes(x: &TwoModeBlock, y: &TwoModeBlock) -> (Complex64, Complex64) {
    (direct(x, y), exchange(x, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

/// A spatial mode of the two-mode block (0 or 1) carrying a polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PolarizedMode {
    pub site: usize,
    pub pol: Polarization,
}

const fn pm(site: usize, pol: Polarization) -> PolarizedMode {
    PolarizedMode { site, pol }
}

/// Polarized modes of the two sites, in the order 1H, 1V, 2H, 2V.
pub const POLARIZED_MODES: [PolarizedMode; 4] = [
    pm(0, Polarization::H),
    pm(0, Polarization::V),
    pm(1, Polarization::H),
    pm(1, Polarization::V),
];

/// Polarization-independent scattering: `U[(a,p)][(b,q)] = B[a][b]·δ_pq`.
fn polarized_element(block: &TwoModeBlock, out: PolarizedMode, input: PolarizedMode) -> Complex64 {
    if out.pol == input.pol {
        block.get(out.site, input.site)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Amplitude of `a†_{o1} a†_{o2}|0⟩` (distinct modes) after evolving
/// `a†_{m1} a†_{m2}|0⟩`, the photon on `m1` with `x`, the one on `m2` with `y`.
fn photon_pair_amplitude(
    x: &TwoModeBlock,
    y: &TwoModeBlock,
    (o1, o2): (PolarizedMode, PolarizedMode),
    (m1, m2): (PolarizedMode, PolarizedMode),
) -> Complex64 {
    polarized_element(x, o1, m1) * polarized_element(y, o2, m2)
        + polarized_element(x, o2, m1) * polarized_element(y, o1, m2)
}

/// Components of `a†_{1H} a†_{2V} − a†_{1V} a†_{2H}`; the state carries an
/// overall factor `1/√2`.
fn antisymmetric_input() -> [(f64, (PolarizedMode, PolarizedMode)); 2] {
    let [h1, v1, h2, v2] = POLARIZED_MODES;
    [(1.0, (h1, v2)), (-1.0, (v1, h2))]
}

/// Output coefficients without the `1/√2` normalization.
fn unnormalized_output_terms(
    x: &TwoModeBlock,
    y: &TwoModeBlock,
) -> Vec<((PolarizedMode, PolarizedMode), Complex64)> {
    let input = antisymmetric_input();
    let mut terms = Vec::with_capacity(6);
    for (i, &o1) in POLARIZED_MODES.iter().enumerate() {
        for &o2 in &POLARIZED_MODES[i + 1..] {
            let coeff = input
                .iter()
                .map(|&(c, modes)| c * photon_pair_amplitude(x, y, (o1, o2), modes))
                .sum();
            terms.push(((o1, o2), coeff));
        }
    }
    terms
}

/// Coefficients of the evolved antisymmetric state on every pair of distinct
/// polarized modes of the two sites. Terms leaving the two sites are dropped.
pub fn entangled_output_terms(
    x: &TwoModeBlock,
    y: &TwoModeBlock,
) -> Vec<((PolarizedMode, PolarizedMode), Complex64)> {
    unnormalized_output_terms(x, y)
        .into_iter()
        .map(|(modes, c)| (modes, c * std::f64::consts::FRAC_1_SQRT_2))
        .collect()
}

/// `⟨Ψ(0)|Ψ(z)⟩` for the antisymmetric polarization-entangled input.
pub fn entangled_amplitude(x: &TwoModeBlock, y: &TwoModeBlock) -> Complex64 {
    let input = antisymmetric_input();
    let overlap: Complex64 = unnormalized_output_terms(x, y)
        .into_iter()
        .map(|(modes, coeff)| {
            input
                .iter()
                .filter(|(_, m)| *m == modes)
                .map(|(c, _)| coeff * *c)
                .sum::<Complex64>()
        })
        .sum();
    // both bra and ket carry 1/√2
    overlap * 0.5
}

/// Survival probabilities at one distance. `z` is `+∞` for asymptotic records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalRecord {
    #[serde(with = "distance_serde")]
    pub z: f64,
    pub p_boson: f64,
    pub p_fermion: f64,
    pub p_classical: f64,
    pub p_entangled: f64,
}

impl SurvivalRecord {
    pub fn from_block(z: f64, block: &TwoModeBlock) -> Self {
        let (d, e) = classical_amplitudes(block, block);
        SurvivalRecord {
            z,
            p_boson: boson_amplitude(block, block).norm_sqr(),
            p_fermion: fermion_amplitude(block, block).norm_sqr(),
            p_classical: d.norm_sqr() + e.norm_sqr(),
            p_entangled: entangled_amplitude(block, block).norm_sqr(),
        }
    }

    pub fn from_propagator(s: &Propagator) -> Result<Self> {
        Ok(Self::from_block(s.z, &TwoModeBlock::from_propagator(s, ModePair::default())?))
    }

    /// Probabilities clamped to `[0, 1]`, for display only.
    pub fn clamped(&self) -> Self {
        let c = |p: f64| p.clamp(0.0, 1.0);
        SurvivalRecord {
            z: self.z,
            p_boson: c(self.p_boson),
            p_fermion: c(self.p_fermion),
            p_classical: c(self.p_classical),
            p_entangled: c(self.p_entangled),
        }
    }
}

/// Non-finite distances are written as the strings `"inf"`, `"-inf"`, `"nan"`.
mod distance_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(z: &f64, s: S) -> Result<S::Ok, S::Error> {
        if z.is_finite() {
            s.serialize_f64(*z)
        } else if z.is_nan() {
            s.serialize_str("nan")
        } else if *z > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(z) => Ok(z),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad distance {other:?}"))),
            },
        }
    }
}

fn block_of(s: &Propagator, modes: ModePair) -> Result<TwoModeBlock> {
    TwoModeBlock::from_propagator(s, modes)
}

/// `|S₁₁S₂₂ + S₁₂S₂₁|²`
pub fn survival_boson(s: &Propagator) -> Result<f64> {
    survival_boson_modes(s, ModePair::default())
}

/// `|S₁₁S₂₂ − S₁₂S₂₁|²`
pub fn survival_fermion(s: &Propagator) -> Result<f64> {
    survival_fermion_modes(s, ModePair::default())
}

/// `|S₁₁S₂₂|² + |S₁₂S₂₁|²`
pub fn survival_classical(s: &Propagator) -> Result<f64> {
    survival_classical_modes(s, ModePair::default())
}

/// Survival of the antisymmetric polarization-entangled photon pair,
/// computed from the explicit polarization-doubled evolution.
pub fn survival_entangled(s: &Propagator) -> Result<f64> {
    survival_entangled_modes(s, ModePair::default())
}

pub fn survival_boson_modes(s: &Propagator, modes: ModePair) -> Result<f64> {
    let b = block_of(s, modes)?;
    Ok(boson_amplitude(&b, &b).norm_sqr())
}

pub fn survival_fermion_modes(s: &Propagator, modes: ModePair) -> Result<f64> {
    let b = block_of(s, modes)?;
    Ok(fermion_amplitude(&b, &b).norm_sqr())
}

pub fn survival_classical_modes(s: &Propagator, modes: ModePair) -> Result<f64> {
    let b = block_of(s, modes)?;
    let (d, e) = classical_amplitudes(&b, &b);
    Ok(d.norm_sqr() + e.norm_sqr())
}

pub fn survival_entangled_modes(s: &Propagator, modes: ModePair) -> Result<f64> {
    let b = block_of(s, modes)?;
    Ok(entangled_amplitude(&b, &b).norm_sqr())
}

/// Matrix permanent by Ryser's formula, visiting column subsets in Gray-code
/// order so each step updates the row sums by a single column.
pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    if n == 0 {
        return Err(Error::invalid("matrix", "dimension must be >= 1"));
    }
    if n >= 64 {
        return Err(Error::invalid("matrix", format!("dimension {n} too large for Ryser")));
    }

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut included = 0usize;
    for k in 1u64..(1u64 << n) {
        let col = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        if gray & (1 << col) != 0 {
            included += 1;
            for i in 0..n {
                row_sums[i] += m[(i, col)];
            }
        } else {
            included -= 1;
            for i in 0..n {
                row_sums[i] -= m[(i, col)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if included.is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(n: usize, vals: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_row_iterator(n, n, vals.iter().map(|&v| c(v, 0.0)))
    }

    #[test]
    fn permanent_small_cases() {
        assert_eq!(permanent(&real(2, &[1.0, 2.0, 3.0, 4.0])).unwrap(), c(10.0, 0.0));
        assert_eq!(permanent(&real(3, &[1.0; 9])).unwrap(), c(6.0, 0.0));
        for n in 1..7 {
            let p = permanent(&DMatrix::identity(n, n)).unwrap();
            assert_eq!(p, c(1.0, 0.0), "n = {n}");
        }
        assert_eq!(permanent(&real(1, &[-2.5])).unwrap(), c(-2.5, 0.0));
    }

    #[test]
    fn permanent_rejects_bad_shapes() {
        assert!(matches!(
            permanent(&DMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        assert!(permanent(&DMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn identity_survives_for_all_statistics() {
        let s = Propagator::from_matrix(0.0, DMatrix::identity(5, 5)).unwrap();
        let r = SurvivalRecord::from_propagator(&s).unwrap();
        assert_eq!((r.p_boson, r.p_fermion, r.p_classical, r.p_entangled), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn diagonal_block() {
        let a = c(0.6, 0.8);
        let d = c(0.0, -1.0);
        let b = TwoModeBlock([[a, c(0.0, 0.0)], [c(0.0, 0.0), d]]);
        let r = SurvivalRecord::from_block(1.0, &b);
        assert!((r.p_boson - 1.0).abs() < 1e-15);
        assert!((r.p_fermion - 1.0).abs() < 1e-15);

        let b = TwoModeBlock([[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.3)]]);
        let r = SurvivalRecord::from_block(1.0, &b);
        assert!((r.p_boson - 0.0225).abs() < 1e-15);
    }

    #[test]
    fn rank_one_block_has_no_fermionic_survival() {
        let u = [c(0.3, 0.1), c(-0.2, 0.4)];
        let v = [c(0.7, -0.5), c(0.1, 0.9)];
        let b = TwoModeBlock([[u[0] * v[0], u[0] * v[1]], [u[1] * v[0], u[1] * v[1]]]);
        let r = SurvivalRecord::from_block(1.0, &b);
        assert!(r.p_fermion < 1e-30);
        assert!(r.p_entangled < 1e-30);
    }

    #[test]
    fn classical_is_product_of_single_particle_probabilities() {
        let b = TwoModeBlock([[c(0.3, 0.2), c(-0.1, 0.5)], [c(0.4, -0.4), c(0.2, 0.6)]]);
        let r = SurvivalRecord::from_block(1.0, &b);
        let p = |o: usize, i: usize| b.get(o, i).norm_sqr();
        let product = p(0, 0) * p(1, 1) + p(1, 0) * p(0, 1);
        assert!((r.p_classical - product).abs() < 1e-15);
    }

    #[test]
    fn entangled_expansion_terms() {
        let b = TwoModeBlock([[c(0.3, 0.2), c(-0.1, 0.5)], [c(0.4, -0.4), c(0.2, 0.6)]]);
        let det = b.get(0, 0) * b.get(1, 1) - b.get(1, 0) * b.get(0, 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let [h1, v1, h2, v2] = POLARIZED_MODES;
        for ((o1, o2), coeff) in entangled_output_terms(&b, &b) {
            let expect = match (o1, o2) {
                (a, b) if (a, b) == (h1, v2) => det * s,
                (a, b) if (a, b) == (v1, h2) => -det * s,
                _ => c(0.0, 0.0),
            };
            assert!((coeff - expect).norm() < 1e-15, "{o1:?} {o2:?}");
        }
        let amp = entangled_amplitude(&b, &b);
        assert!((amp - det).norm() < 1e-15);
    }

    #[test]
    fn other_mode_pairs() {
        let s = Propagator::from_matrix(0.0, DMatrix::identity(4, 4)).unwrap();
        let pair = ModePair::new(2, 3).unwrap();
        assert_eq!(survival_boson_modes(&s, pair).unwrap(), 1.0);
        assert!(ModePair::new(1, 1).is_err());
        let out_of_range = ModePair::new(0, 9).unwrap();
        assert!(survival_fermion_modes(&s, out_of_range).is_err());
    }

    #[test]
    fn asymptotic_marker_serializes() {
        let r = SurvivalRecord {
            z: f64::INFINITY,
            p_boson: 0.25,
            p_fermion: 0.0,
            p_classical: 0.125,
            p_entangled: 0.0,
        };
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"z\":\"inf\""));
        let back: SurvivalRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
