//! Finds the bound state in the continuum formed by two resonant side sites and
//! the fraction of a photon pair it traps.
//!
//! ```bash
//! cargo run --example bound_state
//! ```

use fano_decay::bound_states::{analytic_dressed_state, DEFAULT_THRESHOLD};
use fano_decay::{asymptotic_survival, build_hamiltonian, detect_bics, LatticeSpec};

fn report(label: &str, spec: &LatticeSpec) -> fano_decay::Result<()> {
    let h = build_hamiltonian(spec)?;
    let bics = detect_bics(&h, DEFAULT_THRESHOLD)?;
    println!("{label}: {} bound state(s) in the continuum", bics.len());
    for b in &bics {
        println!(
            "  E = {:.6}  (v1, v2) = ({:+.4}, {:+.4})  chain weight {:.1e}  residual {:.1e}  {:?}",
            b.energy,
            b.vector[0],
            b.vector[1],
            b.chain_weight,
            b.residual(&h),
            b.kind
        );
    }
    let a = asymptotic_survival(spec)?;
    println!(
        "  z -> inf: boson {:.4}, fermion {:.4}, classical {:.4}",
        a.p_boson, a.p_fermion, a.p_classical
    );
    Ok(())
}

fn main() -> fano_decay::Result<()> {
    let resonant = LatticeSpec::experiment();
    report("eps1 = eps2", &resonant)?;
    let v = analytic_dressed_state(&resonant)?;
    println!("  closed form (v1, v2) = ({:+.4}, {:+.4})", v[0], v[1]);

    report("unequal couplings", &LatticeSpec::new(0.5, 0.5, 0.3, 0.1, 0.5, 25))?;
    report("detuned by 0.1", &resonant.with_eps2(0.6))?;
    report("site 1 decoupled", &LatticeSpec::new(0.5, 0.5, 0.0, 0.2, 0.5, 25))?;
    Ok(())
}
