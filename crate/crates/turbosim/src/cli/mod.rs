//! Command-line surface: argument parsing, config resolution with
//! flags-over-file-over-defaults precedence, and the per-subcommand
//! drivers that tie the engines to the CSV/SVG/manifest emitters.

pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::asymptotics::{
    ber_asymptote, cr_closed_form, cr_general, cr_quadrature_bpsk, effective_cdf, pep_asymptote,
};
use crate::channel::TurbulenceParams;
use crate::error::{Error, Result};
use crate::montecarlo::{
    empirical_effective_cdf, estimate_capacity, estimate_pep_conditional, simulate_ber,
    throughput_at_fec, BerCurve, McOptions,
};
use crate::numerics::{derive_stream_id, QuadratureSpec, RngStream};
use crate::signal::{build_constellation, PowerNormalization, SchemeConfig, SchemeKind};

pub use config::RunConfig;
pub use output::{
    asymptote_csv, ber_csv, generic_csv, scheme_tag, svg_from_csv, CurveLabel, RunManifest,
    ASYMPTOTE_CSV_HEADER, BER_CSV_HEADER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PowerNormArg {
    PerAntenna,
    Total,
}

impl From<PowerNormArg> for PowerNormalization {
    fn from(v: PowerNormArg) -> Self {
        match v {
            PowerNormArg::PerAntenna => PowerNormalization::PerAntenna,
            PowerNormArg::Total => PowerNormalization::Total,
        }
    }
}

/// Simulator and analytics toolkit for spatially multiplexed coherent
/// optical links through atmospheric turbulence.
#[derive(Debug, Parser)]
#[command(name = "turbosim", version, disable_help_subcommand = true)]
pub struct Cli {
    /// Run configuration file (flat `key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Override the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads; 0 means all cores. Precedence: this flag, then the
    /// config file, then TURBOSIM_WORKERS, then 0.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Output directory for CSV/SVG/manifest artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Also emit an SVG plot next to each CSV.
    #[arg(long, global = true)]
    pub svg: bool,

    /// Override the transmit power normalization.
    #[arg(long = "power-normalization", global = true, value_enum)]
    pub power_normalization: Option<PowerNormArg>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate BER-vs-SNR curves for the configured scheme grid.
    Simulate,
    /// Emit high-SNR BER asymptote lines.
    Asymptote,
    /// Estimate pairwise error probabilities against their asymptotes.
    Pep,
    /// Compare the empirical small-radius channel cdf with the power law.
    Cdf,
    /// Rank schemes by FEC-limited throughput on a shared SNR grid.
    Compare,
    /// Estimate ergodic capacity per antenna configuration.
    Capacity,
    /// Evaluate the radius coefficient by all three routes.
    Cr,
}

/// Loads the config file (if any) and applies flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config `{}`: {e}", path.display()))
            })?;
            RunConfig::from_text(&text)?
        }
        None => RunConfig::default(),
    };
    // env sits below the file: apply only when the file did not set workers
    if cli.config.is_none() || cfg.workers == 0 {
        if let Ok(v) = std::env::var("TURBOSIM_WORKERS") {
            cfg.workers = v.parse().map_err(|_| {
                Error::Config(format!("TURBOSIM_WORKERS: expected an integer, got `{v}`"))
            })?;
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = cli.workers {
        cfg.workers = workers;
    }
    if let Some(norm) = cli.power_normalization {
        cfg.power_norm = norm.into();
    }
    Ok(cfg)
}

fn turbulence(cfg: &RunConfig) -> Result<TurbulenceParams> {
    TurbulenceParams::new(cfg.alpha, cfg.beta)
        .map_err(|e| Error::Config(format!("config keys `channel.alpha`/`channel.beta`: {e}")))
}

fn scheme(cfg: &RunConfig, kind: SchemeKind, m: usize, n: usize, q: usize) -> Result<SchemeConfig> {
    let constellation = build_constellation(cfg.modulation, q)
        .map_err(|e| Error::Config(format!("config key `scheme.q`: {e}")))?;
    SchemeConfig::new(kind, m, n, constellation, cfg.power_norm)
        .map_err(|e| Error::Config(format!("config keys `scheme.*`: {e}")))
}

fn mc_options(cfg: &RunConfig) -> McOptions {
    McOptions {
        min_bit_errors: cfg.min_bit_errors,
        max_trials: cfg.max_trials,
        ..McOptions::default()
    }
}

fn write_artifact(manifest: &mut RunManifest, dir: &Path, name: &str, content: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, content)?;
    manifest.record_output(&path);
    Ok(())
}

fn finish(mut manifest: RunManifest, dir: &Path) -> Result<()> {
    let text = manifest.render();
    fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

/// BPSK codeword difference with every transmit entry flipped, scaled to
/// the actual transmitted amplitude.
fn bpsk_full_delta(m: usize, norm: PowerNormalization) -> Vec<Complex64> {
    let scale = match norm {
        PowerNormalization::PerAntenna => 1.0,
        PowerNormalization::Total => 1.0 / (m as f64).sqrt(),
    };
    vec![Complex64::new(2.0 * scale, 0.0); m]
}

fn cmd_simulate(cfg: &RunConfig, out: &Path, svg: bool) -> Result<()> {
    let turb = turbulence(cfg)?;
    let opts = mc_options(cfg);
    let mut curves = Vec::new();
    for &m in &cfg.m_list {
        for &n in &cfg.n_list {
            for &q in &cfg.q_list {
                let sch = scheme(cfg, cfg.scheme_kind, m, n, q)?;
                // distinct seed per curve so curves never share RNG blocks
                let seed = derive_stream_id(&[cfg.seed, m as u64, n as u64, q as u64]);
                let curve =
                    simulate_ber(&sch, &turb, &cfg.snr_grid_db(), seed, cfg.workers, &opts)?;
                let label = CurveLabel {
                    kind: cfg.scheme_kind,
                    m_tx: m,
                    n_rx: n,
                    alpha: cfg.alpha,
                    beta: cfg.beta,
                    q,
                };
                curves.push((label, curve.points));
            }
        }
    }
    let csv = ber_csv(&curves);
    let mut manifest = RunManifest::begin("simulate", cfg.config_hash(), cfg.seed);
    write_artifact(&mut manifest, out, "ber.csv", &csv)?;
    if svg {
        let plot = svg_from_csv(&csv, "snr_db", "ber", "simulated bit error rate")?;
        write_artifact(&mut manifest, out, "ber.svg", &plot)?;
    }
    finish(manifest, out)
}

fn cmd_asymptote(cfg: &RunConfig, out: &Path, svg: bool) -> Result<()> {
    let turb = turbulence(cfg)?;
    let cr = cr_closed_form(&turb)
        .map_err(|e| Error::Config(format!("config keys `channel.alpha`/`channel.beta`: {e}")))?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let model = ber_asymptote(&cr, n as u32)?;
        for snr_db in cfg.snr_grid_db() {
            rows.push((n as u32, model.coefficient, snr_db, model.evaluate_db(snr_db)));
        }
    }
    let csv = asymptote_csv(cfg.alpha, cfg.beta, &rows);
    let mut manifest = RunManifest::begin("asymptote", cfg.config_hash(), cfg.seed);
    write_artifact(&mut manifest, out, "asymptote.csv", &csv)?;
    if svg {
        let plot = svg_from_csv(&csv, "snr_db", "ber_asymptote", "high-snr ber asymptotes")?;
        write_artifact(&mut manifest, out, "asymptote.svg", &plot)?;
    }
    finish(manifest, out)
}

fn cmd_pep(cfg: &RunConfig, out: &Path, svg: bool) -> Result<()> {
    let turb = turbulence(cfg)?;
    let cr = cr_closed_form(&turb)
        .map_err(|e| Error::Config(format!("config keys `channel.alpha`/`channel.beta`: {e}")))?;
    let delta = bpsk_full_delta(2, cfg.power_norm);
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        for snr_db in cfg.snr_grid_db() {
            let snr = 10f64.powf(snr_db / 10.0);
            let seed = derive_stream_id(&[cfg.seed, n as u64, snr_db.to_bits()]);
            let est = estimate_pep_conditional(&turb, n, &delta, snr, cfg.pep_trials, seed)?;
            let line = pep_asymptote(&cr, n as u32, snr)?;
            rows.push(vec![
                cfg.alpha.to_string(),
                cfg.beta.to_string(),
                n.to_string(),
                snr_db.to_string(),
                cfg.pep_trials.to_string(),
                est.probability.to_string(),
                est.std_error.to_string(),
                line.to_string(),
            ]);
        }
    }
    let csv = generic_csv(
        "alpha,beta,N,snr_db,trials,pep,std_error,pep_asymptote",
        &rows,
    );
    let mut manifest = RunManifest::begin("pep", cfg.config_hash(), cfg.seed);
    write_artifact(&mut manifest, out, "pep.csv", &csv)?;
    if svg {
        let plot = svg_from_csv(&csv, "snr_db", "pep", "pairwise error probability")?;
        write_artifact(&mut manifest, out, "pep.svg", &plot)?;
    }
    finish(manifest, out)
}

fn cmd_cdf(cfg: &RunConfig, out: &Path) -> Result<()> {
    let turb = turbulence(cfg)?;
    let cr = cr_closed_form(&turb)
        .map_err(|e| Error::Config(format!("config keys `channel.alpha`/`channel.beta`: {e}")))?;
    let delta = bpsk_full_delta(2, cfg.power_norm);
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let seed = derive_stream_id(&[cfg.seed, n as u64]);
        let empirical =
            empirical_effective_cdf(&turb, n, &delta, &cfg.cdf_radii, cfg.cdf_trials, seed)?;
        for (&r, &emp) in cfg.cdf_radii.iter().zip(&empirical) {
            // outside the small-radius validity region the law column is
            // left blank
            let law = effective_cdf(r, n as u32, &cr)
                .map(|v| v.to_string())
                .unwrap_or_default();
            rows.push(vec![
                cfg.alpha.to_string(),
                cfg.beta.to_string(),
                n.to_string(),
                r.to_string(),
                cfg.cdf_trials.to_string(),
                emp.to_string(),
                law,
            ]);
        }
    }
    let csv = generic_csv("alpha,beta,N,r,trials,empirical_cdf,power_law", &rows);
    let mut manifest = RunManifest::begin("cdf", cfg.config_hash(), cfg.seed);
    write_artifact(&mut manifest, out, "cdf.csv", &csv)?;
    finish(manifest, out)
}

/// Matched-rate ladder: a spatially multiplexed rung with constellation
/// size q carries the same bits per channel use as an orthogonal
/// space-time rung or single-antenna rung with size q^M.
fn compare_rungs(cfg: &RunConfig, kind: SchemeKind, n: usize) -> Result<Vec<(f64, BerCurve)>> {
    let turb = turbulence(cfg)?;
    let opts = mc_options(cfg);
    let mut rungs = Vec::new();
    for &q in &cfg.q_list {
        let (m, q_eff) = match kind {
            SchemeKind::Vblast => (2usize, q),
            SchemeKind::Astbc => (2, q * q),
            SchemeKind::Siso => (1, q * q),
        };
        let n_eff = if kind == SchemeKind::Siso { 1 } else { n };
        let sch = scheme(cfg, kind, m, n_eff, q_eff)?;
        let seed = derive_stream_id(&[cfg.seed, kind as u64, q_eff as u64]);
        let curve = simulate_ber(&sch, &turb, &cfg.snr_grid_db(), seed, cfg.workers, &opts)?;
        rungs.push((sch.bits_per_channel_use(), curve));
    }
    Ok(rungs)
}

fn cmd_compare(cfg: &RunConfig, out: &Path, svg: bool) -> Result<()> {
    let n = cfg.n_list[0];
    let mut rows = Vec::new();
    for kind in [SchemeKind::Vblast, SchemeKind::Astbc, SchemeKind::Siso] {
        let rungs = compare_rungs(cfg, kind, n)?;
        for (snr_db, rate) in throughput_at_fec(&rungs, cfg.target_ber)? {
            rows.push(vec![
                scheme_tag(kind).to_string(),
                snr_db.to_string(),
                rate.to_string(),
            ]);
        }
    }
    let csv = generic_csv("scheme,snr_db,throughput_bits_per_use", &rows);
    let mut manifest = RunManifest::begin("compare", cfg.config_hash(), cfg.seed);
    write_artifact(&mut manifest, out, "compare.csv", &csv)?;
    if svg {
        let plot = svg_from_csv(&csv, "snr_db", "throughput_bits_per_use", "throughput at the fec limit")?;
        write_artifact(&mut manifest, out, "compare.svg", &plot)?;
    }
    finish(manifest, out)
}

fn cmd_capacity(cfg: &RunConfig, out: &Path, svg: bool) -> Result<()> {
    let turb = turbulence(cfg)?;
    let mut rows = Vec::new();
    for &m in &cfg.m_list {
        for &n in &cfg.n_list {
            for snr_db in cfg.snr_grid_db() {
                let snr = 10f64.powf(snr_db / 10.0);
                let seed = derive_stream_id(&[cfg.seed, m as u64, n as u64]);
                let est = estimate_capacity(
                    Some(&turb),
                    m,
                    n,
                    cfg.power_norm,
                    snr,
                    cfg.capacity_trials,
                    seed,
                )?;
                rows.push(vec![
                    cfg.alpha.to_string(),
                    cfg.beta.to_string(),
                    m.to_string(),
                    n.to_string(),
                    snr_db.to_string(),
                    cfg.capacity_trials.to_string(),
                    est.mean_bits.to_string(),
                    est.std_error.to_string(),
                ]);
            }
        }
    }
    let csv = generic_csv("alpha,beta,M,N,snr_db,trials,capacity_bits,std_error", &rows);
    let mut manifest = RunManifest::begin("capacity", cfg.config_hash(), cfg.seed);
    write_artifact(&mut manifest, out, "capacity.csv", &csv)?;
    if svg {
        let plot = svg_from_csv(&csv, "snr_db", "capacity_bits", "ergodic capacity")?;
        write_artifact(&mut manifest, out, "capacity.svg", &plot)?;
    }
    finish(manifest, out)
}

fn cmd_cr(cfg: &RunConfig, out: &Path) -> Result<()> {
    let turb = turbulence(cfg)?;
    let closed = cr_closed_form(&turb)
        .map_err(|e| Error::Config(format!("config keys `channel.alpha`/`channel.beta`: {e}")))?;
    let quad = cr_quadrature_bpsk(&turb, &QuadratureSpec::default())?;
    let delta = bpsk_full_delta(2, PowerNormalization::PerAntenna);
    let mut rng = RngStream::new(cfg.seed, derive_stream_id(&[0xC4]));
    let mc = cr_general(&turb, &delta, cfg.cr_trials, &mut rng)?;
    let rows = vec![
        vec![
            cfg.alpha.to_string(),
            cfg.beta.to_string(),
            "closed_form".into(),
            closed.value.to_string(),
            "0".into(),
        ],
        vec![
            cfg.alpha.to_string(),
            cfg.beta.to_string(),
            "quadrature".into(),
            quad.value.to_string(),
            "0".into(),
        ],
        vec![
            cfg.alpha.to_string(),
            cfg.beta.to_string(),
            "monte_carlo".into(),
            mc.value.to_string(),
            mc.std_error.to_string(),
        ],
    ];
    let csv = generic_csv("alpha,beta,method,value,std_error", &rows);
    let mut manifest = RunManifest::begin("cr", cfg.config_hash(), cfg.seed);
    write_artifact(&mut manifest, out, "cr.csv", &csv)?;
    finish(manifest, out)
}

/// Runs a parsed command line to completion.
pub fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    let out = cli.out.as_path();
    match cli.command {
        Command::Simulate => cmd_simulate(&cfg, out, cli.svg),
        Command::Asymptote => cmd_asymptote(&cfg, out, cli.svg),
        Command::Pep => cmd_pep(&cfg, out, cli.svg),
        Command::Cdf => cmd_cdf(&cfg, out),
        Command::Compare => cmd_compare(&cfg, out, cli.svg),
        Command::Capacity => cmd_capacity(&cfg, out, cli.svg),
        Command::Cr => cmd_cr(&cfg, out),
    }
}
