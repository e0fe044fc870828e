//! `rcskit` — batch front end for the RCS recognition toolkit.
//!
//! Exit codes: 0 success, 2 validation/usage error, 3 numerical failure.

mod config;
mod manifest;
mod svg;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Config;
use manifest::RunManifest;
use rcskit_core::dist::{fit_mle, DistributionFamily};
use rcskit_core::dsp::{
    process_sweep, synthesize_background, synthesize_sphere_reference, synthesize_sweep,
    CalibrationRef, ClutterSpec, FreqTrace, GateSpec, ProcessSpec, SynthSpec,
};
use rcskit_core::mie::{
    scatter_region, sphere_rcs_approx, sphere_rcs_exact, wavelength, ChamberGeometry, Sphere,
};
use rcskit_core::montecarlo::{held_out_experiment, run_snr_sweep, Generator, SweepConfig};
use rcskit_core::recognition::{
    build_database, classify_map, classify_sector, rank_models, Criterion, DbMetadata,
};
use rcskit_core::signature::{to_dbsm, Polarization, SectorSpec};
use rcskit_core::{io as fio, Error as CoreError};

#[derive(Parser)]
#[command(
    name = "rcskit",
    version,
    about = "RCS signature processing and statistical UAV recognition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact or region-approximated PEC-sphere RCS.
    Mie(MieArgs),
    /// Generate a synthetic chamber capture set from a known signature.
    Synth(SynthArgs),
    /// Process a raw sweep into a calibrated signature.
    Process(ProcessArgs),
    /// Fit one distribution family to a signature.
    Fit(FitArgs),
    /// Fit and rank all candidate families for one signature.
    Rank(RankArgs),
    /// Build a per-class model database from training signatures.
    BuildDb(BuildDbArgs),
    /// Classify a test signature against a model database.
    Classify(ClassifyArgs),
    /// Monte Carlo SNR sweep (optionally sector-limited or held-out).
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct MieArgs {
    /// Sphere radius in meters.
    #[arg(long)]
    radius: f64,
    /// Frequency in Hz.
    #[arg(long)]
    freq: f64,
    /// Force the exact series evaluation (the default).
    #[arg(long, conflicts_with = "approx")]
    exact: bool,
    /// Use the Rayleigh/optical region approximations where they apply.
    #[arg(long)]
    approx: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Synthesis config file (band, geometry, clutter, noise floor).
    #[arg(long)]
    config: PathBuf,
    /// Target signature CSV (azimuth_deg,rcs_m2).
    #[arg(long)]
    signature: PathBuf,
    /// Polarization tag for the generated sweeps.
    #[arg(long, default_value = "VV")]
    pol: String,
    /// Class label carried through the run.
    #[arg(long, default_value = "target")]
    label: String,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ProcessArgs {
    /// Target sweep CSV.
    #[arg(long)]
    sweep: PathBuf,
    /// Empty-chamber sweep CSV.
    #[arg(long)]
    background: PathBuf,
    /// Calibration sphere sweep CSV (single azimuth).
    #[arg(long)]
    reference: PathBuf,
    /// Processing config file (gate, taper, pad factor, nominal frequency,
    /// sphere radius).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "target")]
    label: String,
    /// Output signature CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    family: String,
    /// Input signature CSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 15e9)]
    freq: f64,
    #[arg(long, default_value = "VV")]
    pol: String,
    /// Output model JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    /// Input signature CSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 15e9)]
    freq: f64,
    #[arg(long, default_value = "VV")]
    pol: String,
    /// Class name in the report; defaults to the input file stem.
    #[arg(long)]
    class: Option<String>,
    /// Output ranking CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildDbArgs {
    /// Directory of per-class signature CSVs (class name = file stem).
    #[arg(long)]
    train_dir: PathBuf,
    #[arg(long, default_value = "aic")]
    criterion: String,
    #[arg(long)]
    freq: f64,
    #[arg(long)]
    pol: String,
    /// Output database JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Model database JSON.
    #[arg(long)]
    db: PathBuf,
    /// Test signature CSV.
    #[arg(long)]
    input: PathBuf,
    /// Restrict to an azimuth sector, formatted center:width in degrees.
    #[arg(long)]
    sector: Option<String>,
    /// Write the decision/likelihood CSV here as well as stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Model database JSON.
    #[arg(long)]
    db: PathBuf,
    /// SNR grid in dB, formatted lo:step:hi.
    #[arg(long, default_value = "0:2:14")]
    snr: String,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// Samples per test signature.
    #[arg(long, default_value_t = 181)]
    samples: usize,
    /// Restrict classification to a sector, formatted center:width.
    #[arg(long)]
    sector: Option<String>,
    /// Held-out class name; requires --train-dir.
    #[arg(long)]
    hold_out: Option<String>,
    /// Training signatures for held-out mode.
    #[arg(long)]
    train_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    /// Also emit an accuracy-vs-SNR SVG plot.
    #[arg(long)]
    svg: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mie(args) => cmd_mie(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Process(args) => cmd_process(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Rank(args) => cmd_rank(args),
        Command::BuildDb(args) => cmd_build_db(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rcskit: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CmdError {
    code: u8,
    message: String,
}

impl CmdError {
    fn validation(message: impl Into<String>) -> Self {
        CmdError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::MieOverflow { .. }
            | CoreError::FitNonConvergence { .. }
            | CoreError::Degenerate { .. }
            | CoreError::EmptyTargetZone => 3,
            _ => 2,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<String> for CmdError {
    fn from(message: String) -> Self {
        CmdError::validation(message)
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::validation(e.to_string())
    }
}

type CmdResult = Result<(), CmdError>;

fn parse_polarization(s: &str) -> Result<Polarization, CmdError> {
    s.parse::<Polarization>().map_err(CmdError::from)
}

fn parse_criterion(s: &str) -> Result<Criterion, CmdError> {
    s.parse::<Criterion>().map_err(CmdError::from)
}

fn parse_family(s: &str) -> Result<DistributionFamily, CmdError> {
    s.parse::<DistributionFamily>().map_err(CmdError::from)
}

fn parse_sector(s: &str) -> Result<SectorSpec, CmdError> {
    let (center, width) = s
        .split_once(':')
        .ok_or_else(|| CmdError::validation(format!("sector {s:?} must be center:width")))?;
    let center: f64 = center
        .trim()
        .parse()
        .map_err(|e| CmdError::validation(format!("sector center: {e}")))?;
    let width: f64 = width
        .trim()
        .parse()
        .map_err(|e| CmdError::validation(format!("sector width: {e}")))?;
    SectorSpec::new(center, width).map_err(CmdError::from)
}

fn parse_snr_grid(s: &str) -> Result<Vec<f64>, CmdError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CmdError::validation(format!(
            "snr grid {s:?} must be lo:step:hi"
        )));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| CmdError::validation(format!("snr lo: {e}")))?;
    let step: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| CmdError::validation(format!("snr step: {e}")))?;
    let hi: f64 = parts[2]
        .trim()
        .parse()
        .map_err(|e| CmdError::validation(format!("snr hi: {e}")))?;
    if step <= 0.0 || hi < lo {
        return Err(CmdError::validation(
            "snr grid must have positive step and hi >= lo",
        ));
    }
    let mut grid = Vec::new();
    let mut v = lo;
    while v <= hi + 1e-9 {
        grid.push(v);
        v += step;
    }
    Ok(grid)
}

fn write_with_manifest(out: &Path, content: &str, manifest: &RunManifest) -> Result<(), CmdError> {
    std::fs::write(out, content)?;
    let manifest_path = out.with_extension(format!(
        "{}manifest.json",
        out.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    manifest.write(&manifest_path)?;
    Ok(())
}

fn cmd_mie(args: MieArgs) -> CmdResult {
    let sphere = Sphere::new(args.radius)?;
    if !(args.freq > 0.0) {
        return Err(CmdError::validation(format!(
            "frequency {} must be > 0",
            args.freq
        )));
    }
    let lambda = wavelength(args.freq);
    let (sigma, region) = if args.approx {
        sphere_rcs_approx(sphere, lambda)?
    } else {
        (
            sphere_rcs_exact(sphere, lambda)?,
            scatter_region(sphere, lambda),
        )
    };
    let dbsm = to_dbsm(sigma)?;
    println!("{sigma},{dbsm},{region}");
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> CmdResult {
    let pol = parse_polarization(&args.pol)?;
    let cfg = Config::load(&args.config)?;
    let freq_start = cfg.f64("freq_start_hz")?;
    let freq_step = cfg.f64("freq_step_hz")?;
    let n_freq = cfg.usize_or("n_freq", 201)?;
    let geometry = ChamberGeometry::new(
        cfg.f64("focal_length_m")?,
        cfg.f64_or("outside_distance_m", 0.0)?,
        10f64.powf(cfg.f64_or("tx_gain_db", 20.0)? / 10.0),
        10f64.powf(cfg.f64_or("rx_gain_db", 20.0)? / 10.0),
        cfg.f64_or("tx_power_w", 1.0)?,
    )?;
    let sphere = Sphere::new(cfg.f64("sphere_radius_m")?)?;
    let clutter = ClutterSpec {
        echoes: cfg.echoes("clutter_echoes")?,
        background: cfg.echoes("background_echoes")?,
    };
    let noise_floor_db = cfg.f64_or("noise_floor_db", -80.0)?;
    cfg.reject_unknown()?;

    let nominal = freq_start + (n_freq / 2) as f64 * freq_step;
    let target = fio::read_signature(&args.signature, nominal, pol, &args.label)?;
    let spec = SynthSpec {
        frequencies_hz: (0..n_freq)
            .map(|i| freq_start + i as f64 * freq_step)
            .collect(),
        geometry,
        clutter,
        noise_floor_db,
        seed: args.seed,
    };
    let sweep = synthesize_sweep(&target, &spec)?;
    let background = synthesize_background(&target, &spec)?;
    let reference = synthesize_sphere_reference(sphere, &spec)?;

    std::fs::create_dir_all(&args.out_dir)?;
    let mut manifest = RunManifest::new(command_line());
    manifest.seed = Some(args.seed);
    manifest.record_config(&cfg.canonical());
    manifest.record_input(&args.signature)?;
    manifest.record_input(&args.config)?;

    fio::write_sweep(&args.out_dir.join("target.csv"), &sweep)?;
    fio::write_sweep(&args.out_dir.join("background.csv"), &background)?;
    // The reference is a single-azimuth sweep on the same grid.
    let ref_sweep = rcskit_core::signature::FrequencySweep::new(
        spec.frequencies_hz.clone(),
        vec![0.0],
        pol,
        reference.values.iter().map(|v| vec![*v]).collect(),
    )?;
    fio::write_sweep(&args.out_dir.join("reference.csv"), &ref_sweep)?;
    manifest.write(&args.out_dir.join("manifest.json"))?;
    println!(
        "wrote target.csv, background.csv, reference.csv to {}",
        args.out_dir.display()
    );
    Ok(())
}

fn cmd_process(args: ProcessArgs) -> CmdResult {
    let cfg = Config::load(&args.config)?;
    let gate = GateSpec::new(
        cfg.f64("gate_start_ns")? * 1e-9,
        cfg.f64("gate_stop_ns")? * 1e-9,
        cfg.f64_or("taper_fraction", 0.5)?,
    )?;
    let spec = ProcessSpec {
        gate,
        zero_pad_factor: cfg.usize_or("pad_factor", 4)?,
        nominal_freq_hz: cfg.f64("nominal_freq_hz")?,
    };
    let sphere = Sphere::new(cfg.f64("sphere_radius_m")?)?;
    cfg.reject_unknown()?;

    let sweep = fio::read_sweep(&args.sweep)?;
    let background = fio::read_sweep(&args.background)?;
    let ref_sweep = fio::read_sweep(&args.reference)?;
    let reference = FreqTrace::new(ref_sweep.frequencies_hz.clone(), ref_sweep.column(0))?;

    let cal = CalibrationRef {
        reference,
        background: None,
        sphere,
    };
    let signature = process_sweep(&sweep, &background, &spec, &cal, &args.label)?;

    let mut manifest = RunManifest::new(command_line());
    manifest.record_config(&cfg.canonical());
    for input in [&args.sweep, &args.background, &args.reference, &args.config] {
        manifest.record_input(input)?;
    }
    write_with_manifest(&args.out, &fio::signature_to_csv(&signature), &manifest)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_fit(args: FitArgs) -> CmdResult {
    let family = parse_family(&args.family)?;
    let pol = parse_polarization(&args.pol)?;
    let label = file_stem(&args.input);
    let sig = fio::read_signature(&args.input, args.freq, pol, &label)?;
    let model = fit_mle(family, &sig.rcs_m2)?;

    let mut manifest = RunManifest::new(command_line());
    manifest.record_input(&args.input)?;
    write_with_manifest(&args.out, &fio::model_to_json(&model), &manifest)?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_rank(args: RankArgs) -> CmdResult {
    let pol = parse_polarization(&args.pol)?;
    let class = args.class.clone().unwrap_or_else(|| file_stem(&args.input));
    let sig = fio::read_signature(&args.input, args.freq, pol, &class)?;
    let ranking = rank_models(&sig.rcs_m2, &DistributionFamily::ALL)?;
    for (family, reason) in &ranking.skipped {
        eprintln!("rcskit: skipped {family}: {reason}");
    }
    let fits: Vec<(DistributionFamily, f64, usize)> = ranking
        .fits
        .iter()
        .map(|(f, m)| (*f, m.loglik, m.k))
        .collect();
    let csv = fio::ranking_to_csv(&[(class, ranking.scores.clone(), fits)]);

    let mut manifest = RunManifest::new(command_line());
    manifest.record_input(&args.input)?;
    write_with_manifest(&args.out, &csv, &manifest)?;
    print!("{csv}");
    Ok(())
}

fn class_signatures(
    dir: &Path,
    freq: f64,
    pol: Polarization,
) -> Result<BTreeMap<String, Vec<f64>>, CmdError> {
    let mut training = BTreeMap::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "csv").unwrap_or(false))
        .collect();
    entries.sort();
    for path in entries {
        let class = file_stem(&path);
        let sig = fio::read_signature(&path, freq, pol, &class)?;
        training.insert(class, sig.rcs_m2);
    }
    if training.is_empty() {
        return Err(CmdError::validation(format!(
            "no .csv signatures in {}",
            dir.display()
        )));
    }
    Ok(training)
}

fn cmd_build_db(args: BuildDbArgs) -> CmdResult {
    let pol = parse_polarization(&args.pol)?;
    let criterion = parse_criterion(&args.criterion)?;
    let training = class_signatures(&args.train_dir, args.freq, pol)?;
    let db = build_database(
        &training,
        criterion,
        DbMetadata {
            frequency_hz: args.freq,
            polarization: pol,
        },
    )?;

    let mut manifest = RunManifest::new(command_line());
    for class in db.classes.keys() {
        manifest.record_input(&args.train_dir.join(format!("{class}.csv")))?;
    }
    write_with_manifest(&args.out, &fio::database_to_json(&db), &manifest)?;
    println!(
        "wrote {} ({} classes, {})",
        args.out.display(),
        db.classes.len(),
        db.criterion
    );
    Ok(())
}

fn cmd_classify(args: ClassifyArgs) -> CmdResult {
    let db = fio::read_database(&args.db)?;
    let label = file_stem(&args.input);
    let sig = fio::read_signature(&args.input, db.frequency_hz, db.polarization, &label)?;
    let result = match &args.sector {
        Some(s) => classify_sector(&db, &sig, &parse_sector(s)?)?,
        None => classify_map(&db, &sig.rcs_m2)?,
    };

    let mut out = format!("decision,{}\n", result.decision);
    out.push_str("class,log_likelihood\n");
    let mut rows: Vec<(&String, &f64)> = result.log_likelihoods.iter().collect();
    rows.sort_by(|a, b| b.1.partial_cmp(a.1).unwrap_or(std::cmp::Ordering::Equal));
    for (class, ll) in rows {
        out.push_str(&format!("{class},{ll}\n"));
    }
    print!("{out}");
    if let Some(path) = &args.out {
        let mut manifest = RunManifest::new(command_line());
        manifest.record_input(&args.db)?;
        manifest.record_input(&args.input)?;
        write_with_manifest(path, &out, &manifest)?;
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> CmdResult {
    let db = fio::read_database(&args.db)?;
    let snr_grid = parse_snr_grid(&args.snr)?;
    let sector = args.sector.as_deref().map(parse_sector).transpose()?;
    std::fs::create_dir_all(&args.out_dir)?;

    let mut manifest = RunManifest::new(command_line());
    manifest.seed = Some(args.seed);
    manifest.record_input(&args.db)?;

    if let Some(held_out) = &args.hold_out {
        let train_dir = args
            .train_dir
            .as_ref()
            .ok_or_else(|| CmdError::validation("--hold-out requires --train-dir"))?;
        let training = class_signatures(train_dir, db.frequency_hz, db.polarization)?;
        if !training.contains_key(held_out) {
            return Err(CmdError::validation(format!(
                "held-out class {held_out:?} not in training set"
            )));
        }
        let reports = held_out_experiment(
            &training,
            held_out,
            db.criterion,
            DbMetadata {
                frequency_hz: db.frequency_hz,
                polarization: db.polarization,
            },
            &snr_grid,
            args.trials,
            args.samples,
            args.seed,
        )?;
        let mut csv = String::from("snr_db,class,fraction\n");
        for r in &reports {
            for (class, fraction) in &r.assignment_histogram {
                csv.push_str(&format!("{},{class},{fraction}\n", r.snr_db));
            }
        }
        std::fs::write(args.out_dir.join("heldout.csv"), &csv)?;
        manifest.write(&args.out_dir.join("manifest.json"))?;
        println!("wrote heldout.csv to {}", args.out_dir.display());
        return Ok(());
    }

    let generators: BTreeMap<String, Generator> = db
        .classes
        .iter()
        .map(|(name, model)| (name.clone(), Generator::Model(model.clone())))
        .collect();
    let config = SweepConfig {
        snr_grid_db: snr_grid,
        trials: args.trials,
        samples_per_trial: args.samples,
        sector,
        seed: args.seed,
        parallel: true,
    };
    let result = run_snr_sweep(&db, &generators, &config)?;

    std::fs::write(
        args.out_dir.join("accuracy.csv"),
        fio::accuracy_to_csv(&result),
    )?;
    std::fs::write(
        args.out_dir.join("counts.csv"),
        fio::sweep_counts_to_csv(&result),
    )?;
    if args.svg {
        std::fs::write(
            args.out_dir.join("accuracy.svg"),
            svg::accuracy_plot(&result.snr_grid_db, &result.accuracy),
        )?;
    }
    manifest.write(&args.out_dir.join("manifest.json"))?;
    println!(
        "wrote accuracy.csv, counts.csv to {}",
        args.out_dir.display()
    );
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into())
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}
