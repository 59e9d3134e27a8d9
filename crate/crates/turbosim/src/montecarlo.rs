//! Monte-Carlo engines: bit-error-rate curves with deterministic
//! worker-count-independent sharding, pairwise-error-probability
//! estimators, empirical small-radius cdfs, ergodic capacity, and
//! FEC-threshold throughput selection.
//!
//! Determinism contract: every trial block owns a counter-derived RNG
//! stream keyed by (seed, point index, block index), blocks have a fixed
//! trial count, and stopping rules are evaluated only at fixed batch
//! boundaries. Results are therefore byte-identical for any worker count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{sample_channel, sample_channel_frozen, ChannelMatrix, TurbulenceParams};
use crate::error::{Error, Result};
use crate::numerics::special::q_function;
use crate::numerics::{derive_stream_id, RngStream};
use crate::signal::{
    count_bit_errors, detect, encode, random_bits, transmit, PowerNormalization, SchemeConfig,
};

/// z for a two-sided 95% normal interval.
const Z95: f64 = 1.959963984540054;

/// Stopping and sharding knobs for the BER engine.
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    /// Stop a point once this many bit errors have accumulated.
    pub min_bit_errors: u64,
    /// Hard cap on trials per point; reaching it without `min_bit_errors`
    /// marks the point low-confidence but is not an error.
    pub max_trials: u64,
    /// Trials per RNG block; fixed so the shard layout never depends on
    /// the worker count.
    pub block_trials: u64,
    /// Blocks per stopping-rule check.
    pub blocks_per_batch: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            min_bit_errors: 100,
            max_trials: 10_000_000,
            block_trials: 1_000,
            blocks_per_batch: 64,
        }
    }
}

impl McOptions {
    fn validate(&self) -> Result<()> {
        if self.block_trials == 0 || self.blocks_per_batch == 0 {
            return Err(Error::Config(
                "block_trials and blocks_per_batch must be positive".into(),
            ));
        }
        if self.max_trials == 0 {
            return Err(Error::Config("max_trials must be positive".into()));
        }
        Ok(())
    }
}

/// One simulated SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    /// Codeword blocks simulated.
    pub trials: u64,
    pub bit_errors: u64,
    /// Information bits carried per block.
    pub bits_per_trial: u64,
    pub ber: f64,
    /// Wilson 95% interval on the per-bit error probability.
    pub ci95: (f64, f64),
}

impl BerPoint {
    /// Whether the point accumulated enough errors to be trusted.
    pub fn reliable(&self, min_bit_errors: u64) -> bool {
        self.bit_errors >= min_bit_errors
    }
}

/// A BER-vs-SNR sweep plus a fingerprint of everything that determined it.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub fingerprint: String,
    pub points: Vec<BerPoint>,
}

/// Wilson score interval for k successes in n Bernoulli trials.
pub fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // the score bounds are exact at the extremes; clamp out fp residue
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

fn block_counts(
    scheme: &SchemeConfig,
    turb: &TurbulenceParams,
    snr: f64,
    seed: u64,
    point_idx: u64,
    block_idx: u64,
    trials: u64,
) -> Result<(u64, u64)> {
    let mut rng = RngStream::new(seed, derive_stream_id(&[0xB10C, point_idx, block_idx]));
    let mut errors = 0u64;
    for _ in 0..trials {
        let bits = random_bits(scheme, &mut rng);
        let sent = encode(scheme, &bits)?;
        let h = sample_channel(scheme.m_tx(), scheme.n_rx(), turb, &mut rng)?;
        let y = transmit(&sent, &h, snr, &mut rng)?;
        let decided = detect(&y, &h, scheme)?;
        errors += count_bit_errors(&sent, &decided) as u64;
    }
    Ok((trials, errors))
}

fn simulate_point(
    scheme: &SchemeConfig,
    turb: &TurbulenceParams,
    snr_db: f64,
    seed: u64,
    point_idx: u64,
    opts: &McOptions,
) -> Result<BerPoint> {
    let snr = 10f64.powf(snr_db / 10.0);
    let bits_per_trial = scheme.bits_per_block() as u64;
    let mut trials = 0u64;
    let mut bit_errors = 0u64;
    let mut next_block = 0u64;
    while trials < opts.max_trials && bit_errors < opts.min_bit_errors {
        let remaining = opts.max_trials - trials;
        let mut batch = opts.blocks_per_batch;
        let needed = remaining.div_ceil(opts.block_trials);
        if needed < batch {
            batch = needed;
        }
        let blocks: Vec<u64> = (next_block..next_block + batch).collect();
        let (t, e) = blocks
            .par_iter()
            .map(|&b| {
                let take = if b == next_block + batch - 1 && remaining < batch * opts.block_trials
                {
                    remaining - (batch - 1) * opts.block_trials
                } else {
                    opts.block_trials
                };
                block_counts(scheme, turb, snr, seed, point_idx, b, take)
            })
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
        trials += t;
        bit_errors += e;
        next_block += batch;
    }
    let n_bits = trials * bits_per_trial;
    let ber = if n_bits > 0 {
        bit_errors as f64 / n_bits as f64
    } else {
        0.0
    };
    Ok(BerPoint {
        snr_db,
        trials,
        bit_errors,
        bits_per_trial,
        ber,
        ci95: wilson_interval(bit_errors, n_bits),
    })
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(f)
}

/// Simulates a full BER-vs-SNR curve. `workers = 0` uses all cores; any
/// positive count produces the identical curve.
pub fn simulate_ber(
    scheme: &SchemeConfig,
    turb: &TurbulenceParams,
    snr_db_grid: &[f64],
    seed: u64,
    workers: usize,
    opts: &McOptions,
) -> Result<BerCurve> {
    opts.validate()?;
    if snr_db_grid.is_empty() {
        return Err(Error::Config("snr grid must not be empty".into()));
    }
    let points = with_pool(workers, || {
        snr_db_grid
            .iter()
            .enumerate()
            .map(|(i, &snr_db)| simulate_point(scheme, turb, snr_db, seed, i as u64, opts))
            .collect::<Result<Vec<_>>>()
    })?;
    let fingerprint = format!(
        "scheme={:?} m={} n={} q={} norm={:?} alpha={} beta={} seed={} min_err={} max_trials={} block={} batch={}",
        scheme.kind(),
        scheme.m_tx(),
        scheme.n_rx(),
        scheme.constellation().len(),
        scheme.power_norm(),
        turb.alpha(),
        turb.beta(),
        seed,
        opts.min_bit_errors,
        opts.max_trials,
        opts.block_trials,
        opts.blocks_per_batch,
    );
    Ok(BerCurve { fingerprint, points })
}

/// A pairwise-error-probability estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct PepEstimate {
    pub snr_db: f64,
    pub trials: u64,
    pub probability: f64,
    pub std_error: f64,
}

fn check_pep_args(delta: &[Complex64], n_rx: usize, snr: f64, trials: u64) -> Result<()> {
    if delta.is_empty() || n_rx == 0 {
        return Err(Error::Dimension("pep needs a nonempty delta and N >= 1".into()));
    }
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::Domain(format!("snr must be finite and > 0, got {snr}")));
    }
    if trials == 0 {
        return Err(Error::InsufficientData("pep needs at least one trial".into()));
    }
    Ok(())
}

fn effective_distance(h: &ChannelMatrix, delta: &[Complex64]) -> Result<f64> {
    Ok(h.mul_vec(delta)?.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
}

/// Probability that the noisy metric of the wrong codeword beats the
/// transmitted one, by direct simulation of the decision event.
///
/// `delta` is the already-scaled transmit-vector difference between the
/// two codewords.
pub fn estimate_pep_direct(
    turb: &TurbulenceParams,
    n_rx: usize,
    delta: &[Complex64],
    snr: f64,
    trials: u64,
    seed: u64,
) -> Result<PepEstimate> {
    check_pep_args(delta, n_rx, snr, trials)?;
    let sigma = (0.5 / snr).sqrt();
    let mut rng = RngStream::new(seed, derive_stream_id(&[0x9E9, 1]));
    let mut events = 0u64;
    for _ in 0..trials {
        let h = sample_channel(delta.len(), n_rx, turb, &mut rng)?;
        let hd = h.mul_vec(delta)?;
        // y - H s = n and y - H s_hat = H d + n; the wrong codeword wins
        // iff ||H d + n||^2 < ||n||^2.
        let mut wrong = 0.0;
        let mut right = 0.0;
        for v in hd {
            let n = Complex64::new(
                sigma * rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal),
                sigma * rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal),
            );
            wrong += (v + n).norm_sqr();
            right += n.norm_sqr();
        }
        if wrong < right {
            events += 1;
        }
    }
    let n = trials as f64;
    let p = events as f64 / n;
    Ok(PepEstimate {
        snr_db: 10.0 * snr.log10(),
        trials,
        probability: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
    })
}

/// Same probability through the channel-conditional Gaussian tail
/// Q(||H d|| sqrt(snr/2)), averaged over channel draws; integrates the
/// noise out analytically, so it converges much faster than the direct
/// event count.
pub fn estimate_pep_conditional(
    turb: &TurbulenceParams,
    n_rx: usize,
    delta: &[Complex64],
    snr: f64,
    trials: u64,
    seed: u64,
) -> Result<PepEstimate> {
    check_pep_args(delta, n_rx, snr, trials)?;
    let mut rng = RngStream::new(seed, derive_stream_id(&[0x9E9, 2]));
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let h = sample_channel(delta.len(), n_rx, turb, &mut rng)?;
        let d = effective_distance(&h, delta)?;
        let q = q_function(d * (snr / 2.0).sqrt());
        sum += q;
        sum_sq += q * q;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(PepEstimate {
        snr_db: 10.0 * snr.log10(),
        trials,
        probability: mean,
        std_error: (var / n).sqrt(),
    })
}

/// Empirical cdf of the effective radius
/// R = sqrt(sum_i |(1/2) sum_j h_ij d_j|^2) at each requested radius.
pub fn empirical_effective_cdf(
    turb: &TurbulenceParams,
    n_rx: usize,
    delta: &[Complex64],
    radii: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    if delta.is_empty() || n_rx == 0 {
        return Err(Error::Dimension("needs a nonempty delta and N >= 1".into()));
    }
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Domain("all radii must be > 0".into()));
    }
    if trials == 0 {
        return Err(Error::InsufficientData("needs at least one trial".into()));
    }
    let mut rng = RngStream::new(seed, derive_stream_id(&[0xCDF, n_rx as u64]));
    let mut counts = vec![0u64; radii.len()];
    for _ in 0..trials {
        let h = sample_channel(delta.len(), n_rx, turb, &mut rng)?;
        let r = effective_distance(&h, delta)? / 2.0;
        for (c, &radius) in counts.iter_mut().zip(radii) {
            if r < radius {
                *c += 1;
            }
        }
    }
    Ok(counts.iter().map(|&c| c as f64 / trials as f64).collect())
}

/// Cholesky-based log2 det(I + c H H^H) for an N x M channel.
fn log2_det_capacity(h: &ChannelMatrix, c: f64) -> f64 {
    let n = h.rows();
    let m = h.cols();
    // A = I + c H H^H, Hermitian positive definite.
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..m {
                s += h.get(i, k) * h.get(j, k).conj();
            }
            a[i * n + j] = c * s;
        }
        a[i * n + i] += 1.0;
    }
    // in-place lower Cholesky; A is PD by construction
    let mut log_det = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k].conj();
            }
            if i == j {
                let d = s.re.max(f64::MIN_POSITIVE);
                a[i * n + i] = Complex64::new(d.sqrt(), 0.0);
                log_det += d.ln();
            } else {
                a[i * n + j] = s / a[j * n + j].re;
            }
        }
    }
    log_det / std::f64::consts::LN_2
}

/// An ergodic-capacity estimate in bits per channel use.
#[derive(Debug, Clone, Copy)]
pub struct CapacityEstimate {
    pub snr_db: f64,
    pub trials: u64,
    pub mean_bits: f64,
    pub std_error: f64,
}

/// Ergodic capacity E[log2 det(I + snr c H H^H)] where c reflects the
/// transmit power normalization. `turb = None` freezes every irradiance
/// at one (phase-only fading); for M = N = 1 that path is exactly
/// log2(1 + snr).
pub fn estimate_capacity(
    turb: Option<&TurbulenceParams>,
    m_tx: usize,
    n_rx: usize,
    norm: PowerNormalization,
    snr: f64,
    trials: u64,
    seed: u64,
) -> Result<CapacityEstimate> {
    if m_tx == 0 || n_rx == 0 {
        return Err(Error::Dimension("capacity needs M >= 1 and N >= 1".into()));
    }
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::Domain(format!("snr must be finite and > 0, got {snr}")));
    }
    if trials == 0 {
        return Err(Error::InsufficientData("capacity needs at least one trial".into()));
    }
    let c = snr
        * match norm {
            PowerNormalization::PerAntenna => 1.0,
            PowerNormalization::Total => 1.0 / m_tx as f64,
        };
    let mut rng = RngStream::new(seed, derive_stream_id(&[0xCAB, m_tx as u64, n_rx as u64]));
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let h = match turb {
            Some(p) => sample_channel(m_tx, n_rx, p, &mut rng)?,
            None => sample_channel_frozen(m_tx, n_rx, &mut rng)?,
        };
        let bits = log2_det_capacity(&h, c);
        sum += bits;
        sum_sq += bits * bits;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(CapacityEstimate {
        snr_db: 10.0 * snr.log10(),
        trials,
        mean_bits: mean,
        std_error: (var / n).sqrt(),
    })
}

/// Selects, at each SNR of a shared grid, the highest rate among the
/// supplied (rate, curve) rungs whose simulated BER meets the FEC target;
/// SNRs where no rung qualifies yield zero throughput.
pub fn throughput_at_fec(rungs: &[(f64, BerCurve)], target_ber: f64) -> Result<Vec<(f64, f64)>> {
    if rungs.is_empty() {
        return Err(Error::Config("throughput selection needs at least one rung".into()));
    }
    if !(target_ber > 0.0 && target_ber < 1.0) {
        return Err(Error::Domain(format!(
            "target BER must be in (0, 1), got {target_ber}"
        )));
    }
    let grid: Vec<f64> = rungs[0].1.points.iter().map(|p| p.snr_db).collect();
    for (_, curve) in rungs {
        let this: Vec<f64> = curve.points.iter().map(|p| p.snr_db).collect();
        if this != grid {
            return Err(Error::Config("all rungs must share one SNR grid".into()));
        }
    }
    let mut order: Vec<usize> = (0..rungs.len()).collect();
    order.sort_by(|&a, &b| rungs[b].0.total_cmp(&rungs[a].0));
    let mut out = Vec::with_capacity(grid.len());
    for (i, &snr_db) in grid.iter().enumerate() {
        let mut rate = 0.0;
        for &r in &order {
            if rungs[r].1.points[i].ber <= target_ber {
                rate = rungs[r].0;
                break;
            }
        }
        out.push((snr_db, rate));
    }
    Ok(out)
}
