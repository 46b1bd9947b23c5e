//! Builds the device lattice, propagates it and cross-checks the spectral
//! propagator against direct RK4 integration.
//!
//! ```bash
//! cargo run --example propagation
//! ```

use fano_decay::{build_hamiltonian, propagator, propagator_ode, LatticeSpec, Spectrum};

fn main() -> fano_decay::Result<()> {
    let spec = LatticeSpec::experiment();
    let h = build_hamiltonian(&spec)?;
    let band = h.band().expect("chain present");
    println!(
        "{} modes, band [{:.3}, {:.3}] 1/mm",
        h.dim(),
        band.center - band.half_width,
        band.center + band.half_width
    );

    let spectrum = Spectrum::new(&h)?;
    for z in [0.0, 5.0, 10.0, 20.0, 30.0] {
        let s = spectrum.propagate(z)?;
        println!(
            "z = {z:5.1} mm  |S11|^2 = {:.4}  |S21|^2 = {:.4}  unitarity defect {:.1e}",
            s.get(0, 0).norm_sqr(),
            s.get(1, 0).norm_sqr(),
            s.unitarity_defect()
        );
    }

    let spectral = propagator(&h, 20.0)?;
    let ode = propagator_ode(&h, 20.0, 1e-3)?;
    println!("spectral vs RK4 at z = 20 mm: {:.2e}", spectral.max_abs_diff(&ode));
    Ok(())
}
