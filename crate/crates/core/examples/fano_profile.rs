//! Survival at fixed distance as site 2 is tuned through resonance with site 1.
//!
//! ```bash
//! cargo run --example fano_profile
//! ```

use fano_decay::experiments::linspace;
use fano_decay::{sweep_detuning, ChainPolicy, LatticeSpec, SweepConfig};

fn main() -> fano_decay::Result<()> {
    let eps2 = linspace(0.1, 0.9, 41);
    let cfg = SweepConfig {
        base: LatticeSpec::experiment(),
        z_values: vec![20.0],
        eps2_values: Some(eps2.clone()),
        chain: ChainPolicy::default(),
    };
    let records = sweep_detuning(&cfg, 20.0)?;

    println!(" eps2   boson   fermion");
    for (e, r) in eps2.iter().zip(&records) {
        let bar = "#".repeat((r.p_boson * 100.0).round() as usize);
        println!("{e:.2}  {:.4}  {:.4}  {bar}", r.p_boson, r.p_fermion);
    }
    Ok(())
}
