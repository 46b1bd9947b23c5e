//! The `fano-decay` command line.
//!
//! Settings come from, in increasing priority: built-in defaults, a flat
//! `key = value` file given with `--config`, and flags. Keys are the long
//! flag names (`n-chain` and `n_chain` are both accepted). Every file written
//! starts with the effective settings as `#` comment lines.
//!
//! Exit codes: 0 success, 1 I/O or numerical failure, 2 usage or validation error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bound_states::{asymptotic_from_states, detect_bics, BoundStateKind, DEFAULT_THRESHOLD};
use crate::error::Error;
use crate::experiments::{
    linspace, normalize_counts, normalized_map_config, survival_map, sweep_detuning, sweep_z,
    ChainPolicy, CountsRecord, SweepConfig, DEFAULT_SAFETY,
};
use crate::lattice::{build_hamiltonian, LatticeSpec, EXPERIMENT_CHAIN_LEN};
use crate::output::{emit_results_with_comments, Format, ResultRow};
use crate::plot::{heatmap, line_plot, Axes, Series};

#[derive(Debug, Parser)]
#[command(name = "fano-decay", version, about = "Two-particle decay in a Fano-Anderson waveguide lattice")]
pub struct Cli {
    /// Flat `key = value` settings file; flags take precedence over it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Survival probabilities at a single distance, printed as JSON.
    Simulate(SimulateArgs),
    /// Survival versus distance or versus ε₂, written as CSV/JSON (+ optional SVG).
    Sweep(SweepArgs),
    /// Survival over a normalized (κz, (ε₂−ε₁)/κ) grid.
    Map(MapArgs),
    /// Bound states in the continuum and the asymptotic survival they imply.
    Bic(BicArgs),
    /// Survival estimates from coincidence counts.
    Normalize(NormalizeArgs),
}

/// Lattice flags. Rates in mm⁻¹.
#[derive(Debug, Args, Default)]
pub struct LatticeArgs {
    /// Site 1 energy [default: 0.5; map: 1.0]
    #[arg(long, allow_hyphen_values = true)]
    pub eps1: Option<f64>,
    /// Site 2 energy [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    pub eps2: Option<f64>,
    /// Site 1 to chain-head coupling [default: 0.2; map: 0.4]
    #[arg(long, allow_hyphen_values = true)]
    pub kappa1: Option<f64>,
    /// Site 2 to chain-head coupling [default: 0.2; map: 0.4]
    #[arg(long, allow_hyphen_values = true)]
    pub kappa2: Option<f64>,
    /// Chain hopping [default: 0.5; map: 1.0]
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// On-site energy of the chain [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub chain_energy: Option<f64>,
    /// Explicit chain length [default: reflection-safe for the largest z; bic: 25]
    #[arg(long, conflicts_with = "faithful")]
    pub n_chain: Option<usize>,
    /// Use the 25-site chain of the fabricated device
    #[arg(long)]
    pub faithful: bool,
    /// Safety factor of the reflection-safe chain length [default: 1.5]
    #[arg(long)]
    pub safety: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Propagation distance in mm [default: 20]
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepMode {
    Z,
    Detuning,
}

impl Display for SweepMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepMode::Z => "z",
            SweepMode::Detuning => "detuning",
        })
    }
}

impl FromStr for SweepMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <SweepMode as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Swept quantity [default: z]
    #[arg(long, value_enum)]
    pub mode: Option<SweepMode>,
    /// First distance of a z sweep, mm [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub z_min: Option<f64>,
    /// Last distance of a z sweep, mm [default: 30]
    #[arg(long, allow_hyphen_values = true)]
    pub z_max: Option<f64>,
    /// Fixed distance of a detuning sweep, mm [default: 20]
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
    /// First ε₂ of a detuning sweep [default: 0.1]
    #[arg(long, allow_hyphen_values = true)]
    pub eps2_min: Option<f64>,
    /// Last ε₂ of a detuning sweep [default: 0.9]
    #[arg(long, allow_hyphen_values = true)]
    pub eps2_max: Option<f64>,
    /// Grid points along the swept axis [default: z 301, detuning 41]
    #[arg(long)]
    pub points: Option<usize>,
    /// Output file
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write a line plot here
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    Boson,
    Fermion,
}

impl Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Statistic::Boson => "boson",
            Statistic::Fermion => "fermion",
        })
    }
}

impl FromStr for Statistic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Statistic as ValueEnum>::from_str(s, true)
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

impl Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Statistics shown in the heatmap [default: boson]
    #[arg(long, value_enum)]
    pub stat: Option<Statistic>,
    /// Smallest κz [default: 0]
    #[arg(long)]
    pub kz_min: Option<f64>,
    /// Largest κz [default: 15]
    #[arg(long)]
    pub kz_max: Option<f64>,
    /// Points along κz [default: 151]
    #[arg(long)]
    pub kz_points: Option<usize>,
    /// Smallest (ε₂−ε₁)/κ [default: -2]
    #[arg(long, allow_hyphen_values = true)]
    pub detuning_min: Option<f64>,
    /// Largest (ε₂−ε₁)/κ [default: 2]
    #[arg(long, allow_hyphen_values = true)]
    pub detuning_max: Option<f64>,
    /// Points along the detuning axis [default: 161]
    #[arg(long)]
    pub detuning_points: Option<usize>,
    /// Output file (long format, one row per cell)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write a heatmap here
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BicArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Largest chain weight of a bound state [default: 1e-8]
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Coincidences, identically polarized pair
    #[arg(long)]
    pub c_vv: Option<f64>,
    /// Coincidences, identically polarized pair with one photon delayed
    #[arg(long)]
    pub c_vv_dist: Option<f64>,
    /// Coincidences, antisymmetric entangled pair
    #[arg(long)]
    pub c_ent: Option<f64>,
    /// Coincidences, orthogonally polarized pair with one photon delayed
    #[arg(long)]
    pub c_vh_dist: Option<f64>,
    /// Classical survival probability from single-particle runs
    #[arg(long)]
    pub p_clas: Option<f64>,
}

/// A failed command: exit code and diagnostic.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

fn flag_name(key: &str) -> String {
    format!("--{}", key.replace('_', "-"))
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { name, reason } => {
                CliError::usage(format!("{}: {reason}", flag_name(name)))
            }
            Error::NotSquare { .. } => CliError::usage(e.to_string()),
            other => CliError {
                code: 1,
                message: other.to_string(),
            },
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> CliError {
    CliError {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

/// Parsed `key = value` settings file.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            entries.insert(k.trim().replace('-', "_"), v.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
        Self::parse(&text).map_err(|m| CliError::usage(format!("{}: {m}", path.display())))
    }
}

/// Merges flags, file and defaults, recording the effective settings.
struct Settings {
    file: ConfigFile,
    echo: Vec<String>,
}

impl Settings {
    fn new(command: &str, file: ConfigFile) -> Self {
        Settings {
            file,
            echo: vec![format!("fano-decay {command} {}", env!("CARGO_PKG_VERSION"))],
        }
    }

    fn lookup<T: FromStr>(&self, key: &'static str) -> Result<Option<T>, CliError> {
        match self.file.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::usage(format!("{}: cannot parse {raw:?} from config", flag_name(key)))),
        }
    }

    fn get<T: FromStr + Display>(&mut self, key: &'static str, flag: Option<T>, default: T) -> Result<T, CliError> {
        let value = match flag {
            Some(v) => v,
            None => self.lookup(key)?.unwrap_or(default),
        };
        self.echo.push(format!("{key} = {value}"));
        Ok(value)
    }

    fn get_opt<T: FromStr + Display>(&mut self, key: &'static str, flag: Option<T>) -> Result<Option<T>, CliError> {
        let value = match flag {
            Some(v) => Some(v),
            None => self.lookup(key)?,
        };
        if let Some(v) = &value {
            self.echo.push(format!("{key} = {v}"));
        }
        Ok(value)
    }

    fn require<T: FromStr + Display>(&mut self, key: &'static str, flag: Option<T>) -> Result<T, CliError> {
        self.get_opt(key, flag)?
            .ok_or_else(|| CliError::usage(format!("{} is required", flag_name(key))))
    }

    fn flag(&mut self, key: &'static str, flag: bool) -> Result<bool, CliError> {
        let value = flag || self.lookup::<bool>(key)?.unwrap_or(false);
        self.echo.push(format!("{key} = {value}"));
        Ok(value)
    }
}

#[derive(Debug, Clone, Copy)]
struct LatticeDefaults {
    eps1: f64,
    eps2: f64,
    kappa1: f64,
    kappa2: f64,
    kappa: f64,
}

const EXPERIMENT_DEFAULTS: LatticeDefaults = LatticeDefaults {
    eps1: 0.5,
    eps2: 0.5,
    kappa1: 0.2,
    kappa2: 0.2,
    kappa: 0.5,
};

const MAP_DEFAULTS: LatticeDefaults = LatticeDefaults {
    eps1: 1.0,
    eps2: 1.0,
    kappa1: 0.4,
    kappa2: 0.4,
    kappa: 1.0,
};

/// Fully resolved lattice settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub lattice: LatticeSpec,
    pub chain: ChainPolicy,
}

fn resolve_lattice(
    s: &mut Settings,
    args: &LatticeArgs,
    d: LatticeDefaults,
    default_chain: Option<usize>,
) -> Result<RunConfig, CliError> {
    let eps1 = s.get("eps1", args.eps1, d.eps1)?;
    let eps2 = s.get("eps2", args.eps2, d.eps2)?;
    let kappa1 = s.get("kappa1", args.kappa1, d.kappa1)?;
    let kappa2 = s.get("kappa2", args.kappa2, d.kappa2)?;
    let kappa = s.get("kappa", args.kappa, d.kappa)?;
    let chain_energy = s.get("chain_energy", args.chain_energy, 0.0)?;
    let faithful = s.flag("faithful", args.faithful)?;
    let n_chain = if faithful {
        None
    } else {
        s.get_opt("n_chain", args.n_chain)?
    };
    let safety = s.get("safety", args.safety, DEFAULT_SAFETY)?;

    let chain = match (faithful, n_chain.or(default_chain)) {
        (true, _) => ChainPolicy::Faithful,
        (false, Some(_)) => ChainPolicy::Explicit,
        (false, None) => ChainPolicy::ReflectionSafe { safety },
    };
    let lattice = LatticeSpec {
        eps1,
        eps2,
        kappa1,
        kappa2,
        kappa,
        n_chain: n_chain.or(default_chain).unwrap_or(EXPERIMENT_CHAIN_LEN),
        chain_energy,
    };
    lattice.validate()?;
    if let ChainPolicy::ReflectionSafe { safety } = chain {
        if !(safety >= 1.0 && safety.is_finite()) {
            return Err(CliError::usage(format!("--safety: must be >= 1, got {safety}")));
        }
    }
    Ok(RunConfig { lattice, chain })
}

fn write_json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError {
        code: 1,
        message: e.to_string(),
    })?;
    writeln!(out, "{text}").map_err(|e| CliError {
        code: 1,
        message: format!("stdout: {e}"),
    })
}

fn write_svg(path: &Path, svg: &str) -> Result<(), CliError> {
    std::fs::write(path, svg).map_err(|e| io_failure(path, e))
}

/// Prints one survival record as JSON.
pub fn cmd_simulate(args: &SimulateArgs, file: ConfigFile, out: &mut dyn Write) -> Result<(), CliError> {
    let mut s = Settings::new("simulate", file);
    let run = resolve_lattice(&mut s, &args.lattice, EXPERIMENT_DEFAULTS, None)?;
    let z = s.get("z", args.z, 20.0)?;
    if !(z.is_finite() && z >= 0.0) {
        return Err(CliError::usage(format!("--z: must be finite and >= 0, got {z}")));
    }
    let cfg = SweepConfig {
        base: run.lattice,
        z_values: vec![z],
        eps2_values: None,
        chain: run.chain,
    };
    let record = sweep_z(&cfg)?[0];
    write_json_line(out, &record)
}

pub fn cmd_sweep(args: &SweepArgs, file: ConfigFile) -> Result<(), CliError> {
    let mut s = Settings::new("sweep", file);
    let run = resolve_lattice(&mut s, &args.lattice, EXPERIMENT_DEFAULTS, None)?;
    let mode = s.get("mode", args.mode, SweepMode::Z)?;
    let format = s.get("format", args.format, Format::Csv)?;
    let out_path: PathBuf = s.require("out", args.out.as_ref().map(|p| p.display().to_string()))?.into();
    let svg = s.get_opt("svg", args.svg.as_ref().map(|p| p.display().to_string()))?;

    let (x, rows, x_label, title) = match mode {
        SweepMode::Z => {
            let z_min = s.get("z_min", args.z_min, 0.0)?;
            let z_max = s.get("z_max", args.z_max, 30.0)?;
            let points = s.get("points", args.points, 301)?;
            if points == 0 {
                return Err(CliError::usage("--points: must be >= 1"));
            }
            let cfg = SweepConfig {
                base: run.lattice,
                z_values: linspace(z_min, z_max, points),
                eps2_values: None,
                chain: run.chain,
            };
            let base = cfg.resolved_base()?;
            let records = sweep_z(&cfg)?;
            let rows: Vec<ResultRow> = records.iter().map(|r| ResultRow::new(&base, r)).collect();
            (cfg.z_values, rows, "z (mm)", "Survival probability vs propagation distance")
        }
        SweepMode::Detuning => {
            let z = s.get("z", args.z, 20.0)?;
            let lo = s.get("eps2_min", args.eps2_min, 0.1)?;
            let hi = s.get("eps2_max", args.eps2_max, 0.9)?;
            let points = s.get("points", args.points, 41)?;
            if points == 0 {
                return Err(CliError::usage("--points: must be >= 1"));
            }
            let eps2 = linspace(lo, hi, points);
            let cfg = SweepConfig {
                base: run.lattice,
                z_values: vec![z],
                eps2_values: Some(eps2.clone()),
                chain: run.chain,
            };
            let base = cfg.resolved_base()?;
            let records = sweep_detuning(&cfg, z)?;
            let rows: Vec<ResultRow> = records
                .iter()
                .zip(&eps2)
                .map(|(r, &e)| ResultRow::new(&base.with_eps2(e), r))
                .collect();
            (eps2, rows, "eps2 (1/mm)", "Survival probability vs site-2 energy")
        }
    };

    emit_results_with_comments(&rows, format, &out_path, &s.echo).map_err(CliError::from)?;

    if let Some(svg_path) = svg {
        let col = |f: fn(&ResultRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
        let (pb, pf, pc) = (col(|r| r.p_boson), col(|r| r.p_fermion), col(|r| r.p_classical));
        let svg = line_plot(
            &Axes {
                title,
                x_label,
                y_label: "survival probability P_S",
            },
            &x,
            &[
                Series { label: "bosons", values: &pb, color: "#c0392b" },
                Series { label: "fermions", values: &pf, color: "#2c6fbb" },
                Series { label: "distinguishable", values: &pc, color: "#333333" },
            ],
            &s.echo,
        );
        write_svg(Path::new(&svg_path), &svg)?;
    }
    Ok(())
}

pub fn cmd_map(args: &MapArgs, file: ConfigFile) -> Result<(), CliError> {
    let mut s = Settings::new("map", file);
    let run = resolve_lattice(&mut s, &args.lattice, MAP_DEFAULTS, None)?;
    let stat = s.get("stat", args.stat, Statistic::Boson)?;
    let kz_min = s.get("kz_min", args.kz_min, 0.0)?;
    let kz_max = s.get("kz_max", args.kz_max, 15.0)?;
    let kz_points = s.get("kz_points", args.kz_points, 151)?;
    let d_min = s.get("detuning_min", args.detuning_min, -2.0)?;
    let d_max = s.get("detuning_max", args.detuning_max, 2.0)?;
    let d_points = s.get("detuning_points", args.detuning_points, 161)?;
    let format = s.get("format", args.format, Format::Csv)?;
    let out_path: PathBuf = s.require("out", args.out.as_ref().map(|p| p.display().to_string()))?.into();
    let svg = s.get_opt("svg", args.svg.as_ref().map(|p| p.display().to_string()))?;
    if kz_points == 0 || d_points == 0 {
        return Err(CliError::usage("--kz-points/--detuning-points: must be >= 1"));
    }

    let mut cfg = normalized_map_config(run.lattice, kz_max, kz_points, (d_min, d_max), d_points);
    let k = run.lattice.kappa;
    cfg.z_values = linspace(kz_min, kz_max, kz_points).into_iter().map(|kz| kz / k).collect();
    cfg.chain = run.chain;
    let map = survival_map(&cfg)?;
    let rows = map.rows();
    emit_results_with_comments(&rows, format, &out_path, &s.echo).map_err(CliError::from)?;

    if let Some(svg_path) = svg {
        let kz = map.kappa_z();
        let det = map.detuning_over_kappa();
        let values: Vec<Vec<f64>> = (0..det.len())
            .map(|j| {
                map.column(j)
                    .iter()
                    .map(|r| match stat {
                        Statistic::Boson => r.p_boson,
                        Statistic::Fermion => r.p_fermion,
                    })
                    .collect()
            })
            .collect();
        let title = format!("Survival probability, {stat}s");
        let svg = heatmap(
            &Axes {
                title: &title,
                x_label: "kappa z",
                y_label: "(eps2 - eps1) / kappa",
            },
            &kz,
            &det,
            &values,
            &s.echo,
        );
        write_svg(Path::new(&svg_path), &svg)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BicReport {
    energy: f64,
    chain_weight: f64,
    #[serde(flatten)]
    kind: BoundStateKind,
    v1: f64,
    v2: f64,
}

pub fn cmd_bic(args: &BicArgs, file: ConfigFile, out: &mut dyn Write) -> Result<(), CliError> {
    let mut s = Settings::new("bic", file);
    let run = resolve_lattice(&mut s, &args.lattice, EXPERIMENT_DEFAULTS, Some(EXPERIMENT_CHAIN_LEN))?;
    let threshold = s.get("threshold", args.threshold, DEFAULT_THRESHOLD)?;
    let spec = run.chain.apply(&run.lattice, 0.0)?;
    let h = build_hamiltonian(&spec)?;
    let states = detect_bics(&h, threshold)?;
    let asymptotic = asymptotic_from_states(&states);

    let mut notes = Vec::new();
    for st in &states {
        if let BoundStateKind::DecoupledSite { site } = st.kind {
            notes.push(format!(
                "site {} has no coupling to the chain; it is trivially bound, not a Fano bound state",
                site + 1
            ));
        }
    }
    let report = serde_json::json!({
        "lattice": spec,
        "bound_states": states.iter().map(|st| BicReport {
            energy: st.energy,
            chain_weight: st.chain_weight,
            kind: match st.kind {
                BoundStateKind::DecoupledSite { site } => BoundStateKind::DecoupledSite { site: site + 1 },
                k => k,
            },
            v1: st.vector[0],
            v2: st.vector[1],
        }).collect::<Vec<_>>(),
        "asymptotic": asymptotic,
        "notes": notes,
    });
    write_json_line(out, &report)
}

pub fn cmd_normalize(args: &NormalizeArgs, file: ConfigFile, out: &mut dyn Write) -> Result<(), CliError> {
    let mut s = Settings::new("normalize", file);
    let counts = CountsRecord::new(
        s.require("c_vv", args.c_vv)?,
        s.require("c_vv_dist", args.c_vv_dist)?,
        s.require("c_ent", args.c_ent)?,
        s.require("c_vh_dist", args.c_vh_dist)?,
        s.require("p_clas", args.p_clas)?,
    )?;
    let (p_boson_est, p_fermion_est) = normalize_counts(&counts);
    write_json_line(
        out,
        &serde_json::json!({ "p_boson_est": p_boson_est, "p_fermion_est": p_fermion_est }),
    )
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, file, out),
        Command::Sweep(a) => cmd_sweep(a, file),
        Command::Map(a) => cmd_map(a, file),
        Command::Bic(a) => cmd_bic(a, file, out),
        Command::Normalize(a) => cmd_normalize(a, file, out),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("fano-decay").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_file_parsing() {
        let c = ConfigFile::parse("# comment\n\nkappa = 0.7\nn-chain=30\n").unwrap();
        assert_eq!(c.entries["kappa"], "0.7");
        assert_eq!(c.entries["n_chain"], "30");
        assert!(ConfigFile::parse("kappa 0.7").is_err());
    }

    #[test]
    fn zero_kappa_is_a_usage_error() {
        let (code, _, err) = run_capture(&["simulate", "--kappa", "0"]);
        assert_eq!(code, 2);
        assert!(err.contains("--kappa"), "{err}");
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (code, _, _) = run_capture(&["simulate", "--kapa", "1"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = run_capture(&["sweep", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("--points"));
        assert!(out.contains("default"));
    }

    #[test]
    fn normalize_zero_denominator() {
        let (code, _, err) = run_capture(&[
            "normalize", "--c-vv", "1", "--c-vv-dist", "0", "--c-ent", "1", "--c-vh-dist", "1", "--p-clas", "0.1",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("--c-vv-dist"));
    }

    #[test]
    fn faithful_conflicts_with_n_chain() {
        let (code, _, _) = run_capture(&["simulate", "--faithful", "--n-chain", "30"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn missing_output_path() {
        let (code, _, err) = run_capture(&["sweep"]);
        assert_eq!(code, 2);
        assert!(err.contains("--out"));
    }

    #[test]
    fn unwritable_output_is_io_error() {
        let (code, _, _) = run_capture(&["sweep", "--points", "2", "--out", "/nonexistent-dir/x.csv"]);
        assert_eq!(code, 1);
    }
}
