//! Two-photon survival for bosons, fermions, distinguishable particles and the
//! polarization-entangled pair, plus the permanent behind the bosonic case.
//!
//! ```bash
//! cargo run --example statistics
//! ```

use fano_decay::statistics::{boson_amplitude, fermion_amplitude, TwoModeBlock};
use fano_decay::{build_hamiltonian, permanent, LatticeSpec, ModePair, Spectrum, SurvivalRecord};
use nalgebra::DMatrix;

fn main() -> fano_decay::Result<()> {
    let h = build_hamiltonian(&LatticeSpec::experiment())?;
    let spectrum = Spectrum::new(&h)?;

    println!("    z   boson  fermion  classical  entangled");
    for z in [0.0, 2.0, 5.0, 10.0, 20.0] {
        let block = TwoModeBlock::from_spectrum(&spectrum, ModePair::default(), z);
        let r = SurvivalRecord::from_block(z, &block);
        println!(
            "{z:5.1}  {:.4}   {:.4}     {:.4}     {:.4}",
            r.p_boson, r.p_fermion, r.p_classical, r.p_entangled
        );
    }

    // The bosonic amplitude is the permanent of the 2x2 block, the fermionic one its determinant.
    let block = TwoModeBlock::from_spectrum(&spectrum, ModePair::default(), 3.0);
    let m = DMatrix::from_fn(2, 2, |i, j| block.get(i, j));
    println!("perm = {:.6}, boson amplitude = {:.6}", permanent(&m)?, boson_amplitude(&block, &block));
    println!("det  = {:.6}, fermion amplitude = {:.6}", m.determinant(), fermion_amplitude(&block, &block));
    Ok(())
}
