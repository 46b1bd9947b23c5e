//! Turns coincidence counts into survival estimates, first from noise-free
//! counts generated by the model, then from a hand-entered record.
//!
//! ```bash
//! cargo run --example count_normalization
//! ```

use fano_decay::experiments::{ideal_counts, linspace};
use fano_decay::{normalize_counts, sweep_z, ChainPolicy, CountsRecord, LatticeSpec, SweepConfig};

fn main() -> fano_decay::Result<()> {
    let cfg = SweepConfig {
        base: LatticeSpec::experiment(),
        z_values: linspace(5.0, 30.0, 6),
        eps2_values: None,
        chain: ChainPolicy::default(),
    };
    for r in sweep_z(&cfg)? {
        let counts = ideal_counts(&r, 10_000.0)?;
        let (pb, pf) = normalize_counts(&counts);
        println!(
            "z = {:4.1}  C_VV = {:7.1}  C_ent = {:6.1}  ->  boson {:.4} (model {:.4}), fermion {:.4} (model {:.4})",
            r.z, counts.c_vv, counts.c_ent, pb, r.p_boson, pf, r.p_fermion
        );
    }

    let measured = CountsRecord::new(412.0, 1630.0, 31.0, 1580.0, 0.13)?;
    let (pb, pf) = normalize_counts(&measured);
    println!("measured: boson {pb:.4}, fermion {pf:.4}");
    Ok(())
}
