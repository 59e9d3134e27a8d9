//! Gamma-Gamma irradiance model and random channel-matrix generation.
//!
//! The irradiance of each transmit/receive aperture pair follows the
//! normalized Gamma-Gamma law, sampled exactly as the product of two
//! independent unit-mean Gamma variates. A channel entry is
//! `h = sqrt(I) * exp(j*phase)` with the phase uniform on [0, 2*pi) per
//! observation (perfect CSIR, slow fading).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::special::ln_gamma_unchecked;
use crate::numerics::{bessel_k_scaled, sample_gamma, RngStream};

/// Effective large-scale (`alpha`) and small-scale (`beta`) eddy counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulenceParams {
    alpha: f64,
    beta: f64,
}

impl TurbulenceParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !(alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be finite and > 0, got {alpha}")));
        }
        if !beta.is_finite() || !(beta > 0.0) {
            return Err(Error::Domain(format!("beta must be finite and > 0, got {beta}")));
        }
        Ok(TurbulenceParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Scintillation index E[I^2]/E[I]^2 - 1 of the unit-mean law.
    pub fn scintillation_index(&self) -> f64 {
        (1.0 + 1.0 / self.alpha) * (1.0 + 1.0 / self.beta) - 1.0
    }
}

/// Gamma-Gamma pdf of the normalized irradiance.
///
/// Evaluated in log space so that very small and very large irradiances
/// underflow to zero instead of producing inf * 0.
pub fn gg_pdf(params: &TurbulenceParams, irradiance: f64) -> Result<f64> {
    if !(irradiance > 0.0) {
        return Err(Error::Domain(format!(
            "gg_pdf requires irradiance > 0, got {irradiance}"
        )));
    }
    let (a, b) = (params.alpha, params.beta);
    let z = 2.0 * (a * b * irradiance).sqrt();
    let k_scaled = bessel_k_scaled(a - b, z)?;
    let ln_f = std::f64::consts::LN_2 - ln_gamma_unchecked(a) - ln_gamma_unchecked(b)
        + 0.5 * (a + b) * (a * b).ln()
        + (0.5 * (a + b) - 1.0) * irradiance.ln()
        + k_scaled.ln()
        - z;
    Ok(ln_f.exp())
}

/// One draw of the normalized irradiance: X*Y with X ~ Gamma(alpha, 1/alpha)
/// and Y ~ Gamma(beta, 1/beta).
pub fn gg_sample(params: &TurbulenceParams, rng: &mut RngStream) -> Result<f64> {
    let x = sample_gamma(params.alpha, 1.0 / params.alpha, rng)?;
    let y = sample_gamma(params.beta, 1.0 / params.beta, rng)?;
    Ok(x * y)
}

/// N x M matrix of complex channel gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ChannelMatrix {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("channel matrix needs rows >= 1, cols >= 1".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|h| !h.re.is_finite() || !h.im.is_finite()) {
            return Err(Error::Domain("channel entries must be finite".into()));
        }
        Ok(ChannelMatrix { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.entries[n * self.cols + m]
    }

    /// Irradiance of entry (n, m): |h_nm|^2.
    pub fn irradiance(&self, n: usize, m: usize) -> f64 {
        self.get(n, m).norm_sqr()
    }

    /// y = H * s for an M-vector s.
    pub fn mul_vec(&self, s: &[Complex64]) -> Result<Vec<Complex64>> {
        if s.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector length {} does not match {} columns",
                s.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|n| {
                (0..self.cols)
                    .map(|m| self.get(n, m) * s[m])
                    .sum::<Complex64>()
            })
            .collect())
    }

    /// Column m as an N-vector.
    pub fn column(&self, m: usize) -> Vec<Complex64> {
        (0..self.rows).map(|n| self.get(n, m)).collect()
    }
}

/// Draws an N x M channel with i.i.d. Gamma-Gamma irradiances and uniform
/// phases.
pub fn sample_channel(
    m_tx: usize,
    n_rx: usize,
    params: &TurbulenceParams,
    rng: &mut RngStream,
) -> Result<ChannelMatrix> {
    if m_tx == 0 || n_rx == 0 {
        return Err(Error::Dimension("sample_channel needs M >= 1 and N >= 1".into()));
    }
    let mut entries = Vec::with_capacity(n_rx * m_tx);
    for _ in 0..n_rx * m_tx {
        let irradiance = gg_sample(params, rng)?;
        let phase = rng.uniform_phase();
        entries.push(Complex64::from_polar(irradiance.sqrt(), phase));
    }
    ChannelMatrix::from_entries(n_rx, m_tx, entries)
}

/// Unit-irradiance channel (I = 1 for every entry) with random phases;
/// degenerate check path for capacity sanity tests.
pub fn sample_channel_frozen(m_tx: usize, n_rx: usize, rng: &mut RngStream) -> Result<ChannelMatrix> {
    if m_tx == 0 || n_rx == 0 {
        return Err(Error::Dimension("sample_channel needs M >= 1 and N >= 1".into()));
    }
    let entries = (0..n_rx * m_tx)
        .map(|_| Complex64::from_polar(1.0, rng.uniform_phase()))
        .collect();
    ChannelMatrix::from_entries(n_rx, m_tx, entries)
}

/// Physical front-end parameters fixing the average electrical SNR.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalLinkParams {
    /// Symbol period in seconds.
    pub symbol_period: f64,
    /// Photodiode responsivity in A/W.
    pub responsivity: f64,
    /// Average irradiance of the channel in W/m^2.
    pub mean_irradiance: f64,
    /// Photon energy h*nu in joules.
    pub photon_energy: f64,
}

impl PhysicalLinkParams {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("symbol_period", self.symbol_period),
            ("responsivity", self.responsivity),
            ("mean_irradiance", self.mean_irradiance),
            ("photon_energy", self.photon_energy),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Average linear SNR of the shot-noise-limited coherent receiver:
/// 2 * T_b * R_oe * I_s / (h * nu).
pub fn snr_from_physical(link: &PhysicalLinkParams) -> Result<f64> {
    link.validate()?;
    Ok(2.0 * link.symbol_period * link.responsivity * link.mean_irradiance / link.photon_energy)
}
