//! Closed-form and numerically integrated high-SNR quantities: the
//! effective-radius coefficient `C_r`, the small-radius cdf/pdf laws, the
//! asymptotic pairwise error probability and BER lines, union-bound style
//! brackets, and finite-SNR diversity-slope extraction.
//!
//! All gamma-ratio arithmetic runs in log space with a single final
//! exponentiation, so eddy counts well beyond alpha + beta = 30 stay in
//! range.

use num_complex::Complex64;

use crate::channel::{gg_pdf, gg_sample, TurbulenceParams};
use crate::error::{Error, Result};
use crate::montecarlo::BerCurve;
use crate::numerics::special::ln_gamma_unchecked;
use crate::numerics::{integrate_semi_infinite, QuadratureSpec, RngStream};

/// How a `C_r` value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrMethod {
    ClosedForm,
    Quadrature1d,
    MonteCarloGeneral,
}

/// The coefficient of the small-radius quadratic law F_1(r) = C_r r^2.
#[derive(Debug, Clone, Copy)]
pub struct CrValue {
    pub value: f64,
    pub method: CrMethod,
    /// Zero for the deterministic methods.
    pub std_error: f64,
}

/// Closed-form `C_r` for the two-transmitter BPSK case.
///
/// Requires every gamma argument positive, i.e. alpha, beta > 1/2.
pub fn cr_closed_form(params: &TurbulenceParams) -> Result<CrValue> {
    let (a, b) = (params.alpha(), params.beta());
    for (name, v) in [
        ("alpha+beta-1", a + b - 1.0),
        ("2*beta-1", 2.0 * b - 1.0),
        ("2*alpha-1", 2.0 * a - 1.0),
        ("alpha+beta-1/2", a + b - 0.5),
    ] {
        if v <= 0.0 {
            return Err(Error::Domain(format!(
                "closed-form C_r needs {name} > 0 (alpha={a}, beta={b})"
            )));
        }
    }
    let ln_cr = ln_gamma_unchecked(a + b - 1.0) + ln_gamma_unchecked(2.0 * b - 1.0)
        + ln_gamma_unchecked(2.0 * a - 1.0)
        - 2.0 * ln_gamma_unchecked(a)
        - 2.0 * ln_gamma_unchecked(b)
        - ln_gamma_unchecked(a + b - 0.5)
        + (3.0 - 2.0 * a - 2.0 * b) * std::f64::consts::LN_2
        + 0.5 * std::f64::consts::PI.ln()
        + (a * b).ln();
    Ok(CrValue { value: ln_cr.exp(), method: CrMethod::ClosedForm, std_error: 0.0 })
}

/// `C_r` for two-transmitter BPSK by 1-D adaptive quadrature of the squared
/// irradiance pdf. Normalized so that F_1(r) = C_r r^2 holds for the actual
/// event probability; agrees with [`cr_closed_form`] to quadrature
/// tolerance.
pub fn cr_quadrature_bpsk(params: &TurbulenceParams, spec: &QuadratureSpec) -> Result<CrValue> {
    let p = *params;
    let result = integrate_semi_infinite(
        move |i| {
            if i > 0.0 {
                let f = gg_pdf(&p, i).unwrap_or(0.0);
                f * f
            } else {
                0.0
            }
        },
        spec,
    )?;
    Ok(CrValue { value: result.value, method: CrMethod::Quadrature1d, std_error: 0.0 })
}

/// General-constellation `C_r` by Monte Carlo over the k-1 interfering
/// irradiances and phases.
///
/// `delta_s` holds the k nonzero entries of the codeword difference; the
/// last entry plays the role of the resolved symbol. The expectation runs
/// jointly over irradiance and phase, which for k = 2 reduces to the
/// closed-form case.
pub fn cr_general(
    params: &TurbulenceParams,
    delta_s: &[Complex64],
    trials: u64,
    rng: &mut RngStream,
) -> Result<CrValue> {
    let k = delta_s.len();
    if k < 2 {
        return Err(Error::Domain(format!("cr_general needs k >= 2 difference entries, got {k}")));
    }
    if delta_s.iter().any(|d| d.norm_sqr() == 0.0) {
        return Err(Error::Domain("all delta_s entries must be nonzero".into()));
    }
    if trials < 10_000 {
        return Err(Error::InsufficientData(format!(
            "cr_general needs at least 1e4 trials, got {trials}"
        )));
    }
    let last_sq = delta_s[k - 1].norm_sqr();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let mut x = Complex64::new(0.0, 0.0);
        for d in &delta_s[..k - 1] {
            let irradiance = gg_sample(params, rng)?;
            let phase = rng.uniform_phase();
            x += 0.5 * Complex64::from_polar(irradiance.sqrt(), phase) * d;
        }
        let arg = 4.0 * x.norm_sqr() / last_sq;
        let g = if arg > 0.0 {
            4.0 / last_sq * gg_pdf(params, arg)?
        } else {
            0.0
        };
        sum += g;
        sum_sq += g * g;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(CrValue {
        value: mean,
        method: CrMethod::MonteCarloGeneral,
        std_error: (var / n).sqrt(),
    })
}

fn validate_order(n_rx: u32) -> Result<()> {
    if n_rx == 0 {
        return Err(Error::Domain("receiver count N must be positive".into()));
    }
    Ok(())
}

/// Small-radius cdf F_N(r) = C_r^N r^(2N) / N!.
///
/// Rejects radii outside the asymptotic validity region (F_N > 0.1).
pub fn effective_cdf(r: f64, n_rx: u32, cr: &CrValue) -> Result<f64> {
    validate_order(n_rx)?;
    if r < 0.0 {
        return Err(Error::Domain(format!("radius must be non-negative, got {r}")));
    }
    let n = n_rx as f64;
    let ln_f = n * cr.value.ln() + 2.0 * n * r.ln() - ln_gamma_unchecked(n + 1.0);
    let f = if r == 0.0 { 0.0 } else { ln_f.exp() };
    if f > 0.1 {
        return Err(Error::Domain(format!(
            "F_{n_rx}({r}) = {f:.3} is outside the small-radius validity region"
        )));
    }
    Ok(f)
}

/// Small-radius pdf f_N(r) = 2 C_r^N r^(2N-1) / (N-1)!.
pub fn effective_pdf(r: f64, n_rx: u32, cr: &CrValue) -> Result<f64> {
    validate_order(n_rx)?;
    if r < 0.0 {
        return Err(Error::Domain(format!("radius must be non-negative, got {r}")));
    }
    if r == 0.0 {
        return Ok(if n_rx == 1 { 0.0 } else { 0.0 });
    }
    let n = n_rx as f64;
    let ln_f = std::f64::consts::LN_2 + n * cr.value.ln() + (2.0 * n - 1.0) * r.ln()
        - ln_gamma_unchecked(n);
    Ok(ln_f.exp())
}

/// High-SNR pairwise error probability
/// P = C_r^N Gamma(N + 1/2) / (2 sqrt(pi) N!) * SNR^-N.
pub fn pep_asymptote(cr: &CrValue, n_rx: u32, snr: f64) -> Result<f64> {
    validate_order(n_rx)?;
    if !(snr > 0.0) {
        return Err(Error::Domain(format!("snr must be > 0, got {snr}")));
    }
    Ok(ber_asymptote(cr, n_rx)?.evaluate(snr))
}

/// The coefficient-slope pair of a high-SNR power-law line
/// `coefficient * SNR^-slope`.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoteModel {
    pub coefficient: f64,
    pub slope: u32,
}

impl AsymptoteModel {
    pub fn evaluate(&self, snr: f64) -> f64 {
        self.coefficient * snr.powi(-(self.slope as i32))
    }

    pub fn evaluate_db(&self, snr_db: f64) -> f64 {
        self.evaluate(10f64.powf(snr_db / 10.0))
    }

    /// SNR (linear) at which the line crosses the given level.
    pub fn snr_at(&self, level: f64) -> f64 {
        (self.coefficient / level).powf(1.0 / self.slope as f64)
    }
}

/// Asymptotic BER line for the two-transmitter BPSK system; the same
/// functional form holds for general constellations with a calibrated
/// coefficient.
pub fn ber_asymptote(cr: &CrValue, n_rx: u32) -> Result<AsymptoteModel> {
    validate_order(n_rx)?;
    let n = n_rx as f64;
    let ln_coef = n * cr.value.ln() + ln_gamma_unchecked(n + 0.5)
        - (2.0 * std::f64::consts::PI.sqrt()).ln()
        - ln_gamma_unchecked(n + 1.0);
    Ok(AsymptoteModel { coefficient: ln_coef.exp(), slope: n_rx })
}

/// Bracket on the BER of the 2-Tx BPSK system: the double-error PEP from
/// below, plus both single-error terms (equal by symmetry) from above.
pub fn ber_bounds_bpsk_2tx(
    cr: &CrValue,
    n_rx: u32,
    snr: f64,
    pep_single_error: f64,
) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&pep_single_error) {
        return Err(Error::Domain(format!(
            "pep_single_error must be a probability, got {pep_single_error}"
        )));
    }
    let lower = pep_asymptote(cr, n_rx, snr)?;
    Ok((lower, lower + pep_single_error))
}

/// Least-squares slope of log10(BER) vs log10(SNR) over an SNR window.
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub fitted_slope: f64,
    pub intercept: f64,
    pub snr_window_db: (f64, f64),
    pub residual_rms: f64,
    pub points_used: usize,
}

impl SlopeFit {
    /// Diversity-gain estimate: the negated log-log slope.
    pub fn diversity_estimate(&self) -> f64 {
        -self.fitted_slope
    }
}

/// Minimum accumulated bit errors for a point to enter the slope fit;
/// keeps the log-domain noise of each point below the fit tolerance.
pub const SLOPE_FIT_MIN_ERRORS: u64 = 100;

/// Fits the finite-SNR diversity slope of a simulated BER curve.
pub fn fit_diversity_slope(curve: &BerCurve, window_db: (f64, f64)) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| {
            p.snr_db >= window_db.0
                && p.snr_db <= window_db.1
                && p.bit_errors >= SLOPE_FIT_MIN_ERRORS
                && p.ber > 0.0
        })
        .map(|p| (p.snr_db / 10.0, p.ber.log10()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "slope fit needs >= 3 reliable points in [{}, {}] dB, found {}",
            window_db.0,
            window_db.1,
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::InsufficientData("degenerate SNR window".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual_rms = (pts
        .iter()
        .map(|p| {
            let e = p.1 - (slope * p.0 + intercept);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SlopeFit {
        fitted_slope: slope,
        intercept,
        snr_window_db: window_db,
        residual_rms,
        points_used: pts.len(),
    })
}
