//! Bosonic and fermionic survival over normalized distance κz and detuning
//! (ε₂ − ε₁)/κ, rendered as SVG heatmaps in the given directory (default: the
//! system temp directory).
//!
//! ```bash
//! cargo run --release --example survival_map -- out/
//! ```

use std::path::PathBuf;

use fano_decay::experiments::default_map_config;
use fano_decay::plot::{heatmap, Axes};
use fano_decay::survival_map;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir: PathBuf = std::env::args().nth(1).map(Into::into).unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&dir)?;

    let map = survival_map(&default_map_config())?;
    let kz = map.kappa_z();
    let det = map.detuning_over_kappa();

    for (name, pick) in [
        ("bosons", (|r: &fano_decay::SurvivalRecord| r.p_boson) as fn(&_) -> f64),
        ("fermions", |r| r.p_fermion),
    ] {
        let values: Vec<Vec<f64>> = (0..det.len()).map(|j| map.column(j).iter().map(pick).collect()).collect();
        let svg = heatmap(
            &Axes {
                title: &format!("Survival probability, {name}"),
                x_label: "kappa z",
                y_label: "(eps2 - eps1) / kappa",
            },
            &kz,
            &det,
            &values,
            &[],
        );
        let path = dir.join(format!("map_{name}.svg"));
        std::fs::write(&path, svg)?;
        println!("wrote {}", path.display());
    }

    let j0 = det.iter().position(|&d| d == 0.0).unwrap();
    let last = map.records.last().unwrap()[j0];
    println!(
        "kz = {}, zero detuning: boson {:.4}, fermion {:.2e}",
        kz.last().unwrap(),
        last.p_boson,
        last.p_fermion
    );
    Ok(())
}
