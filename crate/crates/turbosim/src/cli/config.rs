//! Flat key-value run configuration with dotted section names
//! (`scheme.kind`, `channel.alpha`, `sim.seed`), plus the canonical hash
//! used to fingerprint runs.
//!
//! The format is deliberately minimal: one `key = value` pair per line,
//! `#` comments, no quoting, no nesting. Lists are comma-separated.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::signal::{ModulationKind, PowerNormalization, SchemeKind};

/// Parsed, validated run configuration with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme_kind: SchemeKind,
    pub modulation: ModulationKind,
    pub m_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub q_list: Vec<usize>,
    pub power_norm: PowerNormalization,
    pub alpha: f64,
    pub beta: f64,
    pub snr_start_db: f64,
    pub snr_stop_db: f64,
    pub snr_step_db: f64,
    pub seed: u64,
    pub workers: usize,
    pub min_bit_errors: u64,
    pub max_trials: u64,
    pub pep_trials: u64,
    pub cdf_trials: u64,
    pub cdf_radii: Vec<f64>,
    pub capacity_trials: u64,
    pub cr_trials: u64,
    pub target_ber: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scheme_kind: SchemeKind::Vblast,
            modulation: ModulationKind::Psk,
            m_list: vec![2],
            n_list: vec![2],
            q_list: vec![2],
            power_norm: PowerNormalization::PerAntenna,
            alpha: 4.0,
            beta: 2.0,
            snr_start_db: 0.0,
            snr_stop_db: 20.0,
            snr_step_db: 2.0,
            seed: 1234,
            workers: 0,
            min_bit_errors: 100,
            max_trials: 10_000_000,
            pep_trials: 200_000,
            cdf_trials: 1_000_000,
            cdf_radii: vec![0.02, 0.05, 0.1, 0.2],
            capacity_trials: 50_000,
            cr_trials: 200_000,
            target_ber: 1e-3,
        }
    }
}

/// Splits the raw text into ordered key-value pairs; duplicate keys keep
/// the last value.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected `key = value`, got `{raw}`",
                lineno + 1
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config(format!(
                "line {}: empty key or value in `{raw}`",
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.to_string());
    }
    Ok(map)
}

fn bad(key: &str, value: &str, why: &str) -> Error {
    Error::Config(format!("config key `{key}`: invalid value `{value}` ({why})"))
}

fn get_f64(map: &BTreeMap<String, String>, key: &str, out: &mut f64) -> Result<()> {
    if let Some(v) = map.get(key) {
        *out = v.parse().map_err(|_| bad(key, v, "expected a number"))?;
    }
    Ok(())
}

fn get_u64(map: &BTreeMap<String, String>, key: &str, out: &mut u64) -> Result<()> {
    if let Some(v) = map.get(key) {
        *out = v.parse().map_err(|_| bad(key, v, "expected a non-negative integer"))?;
    }
    Ok(())
}

fn get_usize_list(map: &BTreeMap<String, String>, key: &str, out: &mut Vec<usize>) -> Result<()> {
    if let Some(v) = map.get(key) {
        *out = v
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad(key, v, "expected integers")))
            .collect::<Result<Vec<_>>>()?;
        if out.is_empty() {
            return Err(bad(key, v, "list must not be empty"));
        }
    }
    Ok(())
}

fn get_f64_list(map: &BTreeMap<String, String>, key: &str, out: &mut Vec<f64>) -> Result<()> {
    if let Some(v) = map.get(key) {
        *out = v
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(key, v, "expected numbers")))
            .collect::<Result<Vec<_>>>()?;
        if out.is_empty() {
            return Err(bad(key, v, "list must not be empty"));
        }
    }
    Ok(())
}

pub fn parse_power_norm(value: &str) -> Result<PowerNormalization> {
    match value {
        "per-antenna" => Ok(PowerNormalization::PerAntenna),
        "total" => Ok(PowerNormalization::Total),
        other => Err(bad(
            "scheme.power_normalization",
            other,
            "expected `per-antenna` or `total`",
        )),
    }
}

const KNOWN_KEYS: &[&str] = &[
    "scheme.kind",
    "scheme.modulation",
    "scheme.m",
    "scheme.n",
    "scheme.q",
    "scheme.power_normalization",
    "channel.alpha",
    "channel.beta",
    "snr.start_db",
    "snr.stop_db",
    "snr.step_db",
    "sim.seed",
    "sim.workers",
    "sim.min_bit_errors",
    "sim.max_trials",
    "pep.trials",
    "cdf.trials",
    "cdf.radii",
    "capacity.trials",
    "cr.trials",
    "compare.target_ber",
];

impl RunConfig {
    /// Builds a config from raw text, layering file values over defaults.
    pub fn from_text(text: &str) -> Result<RunConfig> {
        let map = parse_pairs(text)?;
        for key in map.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown config key `{key}`")));
            }
        }
        let mut cfg = RunConfig::default();
        if let Some(v) = map.get("scheme.kind") {
            cfg.scheme_kind = match v.as_str() {
                "vblast" => SchemeKind::Vblast,
                "astbc" => SchemeKind::Astbc,
                "siso" => SchemeKind::Siso,
                other => return Err(bad("scheme.kind", other, "expected vblast, astbc, or siso")),
            };
        }
        if let Some(v) = map.get("scheme.modulation") {
            cfg.modulation = match v.as_str() {
                "psk" => ModulationKind::Psk,
                "qam" => ModulationKind::Qam,
                other => return Err(bad("scheme.modulation", other, "expected psk or qam")),
            };
        }
        get_usize_list(&map, "scheme.m", &mut cfg.m_list)?;
        get_usize_list(&map, "scheme.n", &mut cfg.n_list)?;
        get_usize_list(&map, "scheme.q", &mut cfg.q_list)?;
        if let Some(v) = map.get("scheme.power_normalization") {
            cfg.power_norm = parse_power_norm(v)?;
        }
        get_f64(&map, "channel.alpha", &mut cfg.alpha)?;
        get_f64(&map, "channel.beta", &mut cfg.beta)?;
        get_f64(&map, "snr.start_db", &mut cfg.snr_start_db)?;
        get_f64(&map, "snr.stop_db", &mut cfg.snr_stop_db)?;
        get_f64(&map, "snr.step_db", &mut cfg.snr_step_db)?;
        get_u64(&map, "sim.seed", &mut cfg.seed)?;
        if let Some(v) = map.get("sim.workers") {
            cfg.workers = v
                .parse()
                .map_err(|_| bad("sim.workers", v, "expected a non-negative integer"))?;
        }
        get_u64(&map, "sim.min_bit_errors", &mut cfg.min_bit_errors)?;
        get_u64(&map, "sim.max_trials", &mut cfg.max_trials)?;
        get_u64(&map, "pep.trials", &mut cfg.pep_trials)?;
        get_u64(&map, "cdf.trials", &mut cfg.cdf_trials)?;
        get_f64_list(&map, "cdf.radii", &mut cfg.cdf_radii)?;
        get_u64(&map, "capacity.trials", &mut cfg.capacity_trials)?;
        get_u64(&map, "cr.trials", &mut cfg.cr_trials)?;
        get_f64(&map, "compare.target_ber", &mut cfg.target_ber)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!(
                "config key `channel.alpha`: must be finite and > 0, got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::Config(format!(
                "config key `channel.beta`: must be finite and > 0, got {}",
                self.beta
            )));
        }
        if !(self.snr_step_db > 0.0) {
            return Err(Error::Config(format!(
                "config key `snr.step_db`: must be > 0, got {}",
                self.snr_step_db
            )));
        }
        if self.snr_stop_db < self.snr_start_db {
            return Err(Error::Config(format!(
                "config key `snr.stop_db`: {} is below snr.start_db = {}",
                self.snr_stop_db, self.snr_start_db
            )));
        }
        if !(self.target_ber > 0.0 && self.target_ber < 1.0) {
            return Err(Error::Config(format!(
                "config key `compare.target_ber`: must be in (0, 1), got {}",
                self.target_ber
            )));
        }
        if self.m_list.iter().any(|&m| m == 0) || self.n_list.iter().any(|&n| n == 0) {
            return Err(Error::Config(
                "config keys `scheme.m` / `scheme.n`: entries must be >= 1".into(),
            ));
        }
        if self.q_list.iter().any(|&q| q < 2) {
            return Err(Error::Config(
                "config key `scheme.q`: constellation sizes must be >= 2".into(),
            ));
        }
        Ok(())
    }

    /// Inclusive SNR grid in dB.
    pub fn snr_grid_db(&self) -> Vec<f64> {
        let mut grid = Vec::new();
        let mut i = 0u64;
        loop {
            let v = self.snr_start_db + i as f64 * self.snr_step_db;
            if v > self.snr_stop_db + 1e-9 {
                break;
            }
            grid.push(v);
            i += 1;
        }
        grid
    }

    /// Canonical serialization: every field in fixed order, one per line.
    /// Two configs hash alike iff they compare equal.
    pub fn canonical_text(&self) -> String {
        let join_usize =
            |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let join_f64 = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        format!(
            "scheme.kind = {:?}\nscheme.modulation = {:?}\nscheme.m = {}\nscheme.n = {}\n\
             scheme.q = {}\nscheme.power_normalization = {:?}\nchannel.alpha = {}\n\
             channel.beta = {}\nsnr.start_db = {}\nsnr.stop_db = {}\nsnr.step_db = {}\n\
             sim.seed = {}\nsim.workers = {}\nsim.min_bit_errors = {}\nsim.max_trials = {}\n\
             pep.trials = {}\ncdf.trials = {}\ncdf.radii = {}\ncapacity.trials = {}\n\
             cr.trials = {}\ncompare.target_ber = {}\n",
            self.scheme_kind,
            self.modulation,
            join_usize(&self.m_list),
            join_usize(&self.n_list),
            join_usize(&self.q_list),
            self.power_norm,
            self.alpha,
            self.beta,
            self.snr_start_db,
            self.snr_stop_db,
            self.snr_step_db,
            self.seed,
            self.workers,
            self.min_bit_errors,
            self.max_trials,
            self.pep_trials,
            self.cdf_trials,
            join_f64(&self.cdf_radii),
            self.capacity_trials,
            self.cr_trials,
            self.target_ber,
        )
    }

    /// FNV-1a hash of the canonical text. The worker count is excluded so
    /// that runs differing only in parallelism share a fingerprint.
    pub fn config_hash(&self) -> u64 {
        let mut canonical = RunConfig { workers: 0, ..self.clone() };
        canonical.workers = 0;
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in canonical.canonical_text().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}
