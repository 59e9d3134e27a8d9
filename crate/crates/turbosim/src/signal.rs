//! Constellations, space-time encoding, AWGN injection, and exhaustive
//! maximum-likelihood detection.
//!
//! Symbols carry unit average energy per antenna by default, matching the
//! noise normalization CN(0, 1/SNR); the alternative total-power
//! normalization divides every transmitted symbol by sqrt(M) and is exposed
//! through [`PowerNormalization`].

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::numerics::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulationKind {
    Psk,
    Qam,
}

/// Complex constellation points with Gray-coded bit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ModulationKind,
    points: Vec<Complex64>,
    labels: Vec<u32>,
    bits_per_symbol: u32,
    index_of_label: Vec<usize>,
}

impl Constellation {
    pub fn kind(&self) -> ModulationKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    pub fn label(&self, index: usize) -> u32 {
        self.labels[index]
    }

    /// Point index carrying the given bit label.
    pub fn index_of_label(&self, label: u32) -> usize {
        self.index_of_label[label as usize]
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }
}

fn gray(k: u32) -> u32 {
    k ^ (k >> 1)
}

/// Builds a unit-average-energy constellation with canonical
/// binary-reflected Gray labels. BPSK uses the convention bit 1 <-> +1.
pub fn build_constellation(kind: ModulationKind, q: usize) -> Result<Constellation> {
    if q < 2 || !q.is_power_of_two() {
        return Err(Error::Domain(format!("constellation size must be a power of two >= 2, got {q}")));
    }
    let bits_per_symbol = q.trailing_zeros();
    let (points, labels) = match kind {
        ModulationKind::Psk => {
            if q == 2 {
                // bit 1 <-> +1
                (vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)], vec![1, 0])
            } else {
                let points = (0..q)
                    .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / q as f64))
                    .collect();
                let labels = (0..q as u32).map(gray).collect();
                (points, labels)
            }
        }
        ModulationKind::Qam => {
            const SUPPORTED: [usize; 7] = [2, 4, 16, 64, 256, 1024, 4096];
            if !SUPPORTED.contains(&q) {
                return Err(Error::Domain(format!("unsupported QAM size {q}")));
            }
            if q == 2 {
                (vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)], vec![1, 0])
            } else {
                // Square QAM as two Gray-coded PAM axes.
                let side = (q as f64).sqrt() as usize;
                debug_assert_eq!(side * side, q);
                let bits_per_axis = side.trailing_zeros();
                // Average energy of {+-1, +-3, ...}^2 per axis is (side^2-1)/3.
                let scale = (2.0 * (side * side - 1) as f64 / 3.0).sqrt().recip();
                let mut points = Vec::with_capacity(q);
                let mut labels = Vec::with_capacity(q);
                for i in 0..side {
                    for jq in 0..side {
                        let re = (2.0 * i as f64 - (side as f64 - 1.0)) * scale;
                        let im = (2.0 * jq as f64 - (side as f64 - 1.0)) * scale;
                        points.push(Complex64::new(re, im));
                        labels.push((gray(i as u32) << bits_per_axis) | gray(jq as u32));
                    }
                }
                (points, labels)
            }
        }
    };
    let mean_energy: f64 = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / q as f64;
    debug_assert!((mean_energy - 1.0).abs() < 1e-12, "mean energy {mean_energy}");
    let mut index_of_label = vec![usize::MAX; q];
    for (i, &l) in labels.iter().enumerate() {
        if index_of_label[l as usize] != usize::MAX {
            return Err(Error::Domain(format!("duplicate bit label {l}")));
        }
        index_of_label[l as usize] = i;
    }
    Ok(Constellation { kind, points, labels, bits_per_symbol, index_of_label })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Vblast,
    Astbc,
    Siso,
}

/// Per-antenna unit symbol energy (default) or total power split across
/// the M transmitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerNormalization {
    #[default]
    PerAntenna,
    Total,
}

/// Space-time scheme: kind, antenna counts, constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    kind: SchemeKind,
    m_tx: usize,
    n_rx: usize,
    constellation: Constellation,
    power_norm: PowerNormalization,
}

impl SchemeConfig {
    pub fn new(
        kind: SchemeKind,
        m_tx: usize,
        n_rx: usize,
        constellation: Constellation,
        power_norm: PowerNormalization,
    ) -> Result<Self> {
        match kind {
            SchemeKind::Vblast if m_tx < 1 => {
                return Err(Error::Domain("VBLAST requires M >= 1".into()))
            }
            SchemeKind::Astbc if m_tx != 2 => {
                return Err(Error::Domain("ASTBC requires M = 2".into()))
            }
            SchemeKind::Siso if m_tx != 1 || n_rx != 1 => {
                return Err(Error::Domain("SISO requires M = N = 1".into()))
            }
            _ => {}
        }
        if n_rx < 1 {
            return Err(Error::Domain("need N >= 1".into()));
        }
        Ok(SchemeConfig { kind, m_tx, n_rx, constellation, power_norm })
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn m_tx(&self) -> usize {
        self.m_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn power_norm(&self) -> PowerNormalization {
        self.power_norm
    }

    /// Time slots per codeword block.
    pub fn time_slots(&self) -> usize {
        match self.kind {
            SchemeKind::Astbc => 2,
            _ => 1,
        }
    }

    /// Source bits carried by one codeword block.
    pub fn bits_per_block(&self) -> usize {
        let bps = self.constellation.bits_per_symbol() as usize;
        match self.kind {
            SchemeKind::Vblast => self.m_tx * bps,
            SchemeKind::Astbc => 2 * bps,
            SchemeKind::Siso => bps,
        }
    }

    /// Information bits per channel use.
    pub fn bits_per_channel_use(&self) -> f64 {
        self.bits_per_block() as f64 / self.time_slots() as f64
    }

    /// Number of legal codeword blocks (the MLD search space).
    pub fn num_candidates(&self) -> usize {
        let q = self.constellation.len();
        match self.kind {
            SchemeKind::Vblast => q.pow(self.m_tx as u32),
            SchemeKind::Astbc => q * q,
            SchemeKind::Siso => q,
        }
    }

    /// Amplitude applied to every transmitted symbol.
    pub fn tx_scale(&self) -> f64 {
        match self.power_norm {
            PowerNormalization::PerAntenna => 1.0,
            PowerNormalization::Total => (self.m_tx as f64).sqrt().recip(),
        }
    }

    /// Scaled constellation point used on air.
    fn symbol(&self, index: usize) -> Complex64 {
        self.constellation.point(index) * self.tx_scale()
    }
}

/// One space-time codeword: M x T symbols plus the source bits.
#[derive(Debug, Clone, PartialEq)]
pub struct CodewordBlock {
    /// Symbol of antenna m at slot t lives at `m + t * m_tx`.
    symbols: Vec<Complex64>,
    m_tx: usize,
    slots: usize,
    bits: Vec<u8>,
    /// Position in the fixed candidate enumeration (MLD tie-break order).
    candidate_index: usize,
}

impl CodewordBlock {
    pub fn symbol(&self, antenna: usize, slot: usize) -> Complex64 {
        self.symbols[antenna + slot * self.m_tx]
    }

    /// Column of symbols transmitted in the given slot.
    pub fn slot(&self, t: usize) -> &[Complex64] {
        &self.symbols[t * self.m_tx..(t + 1) * self.m_tx]
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn candidate_index(&self) -> usize {
        self.candidate_index
    }
}

/// Splits MSB-first bits into per-symbol constellation indices.
fn bits_to_symbol_indices(constellation: &Constellation, bits: &[u8]) -> Result<Vec<usize>> {
    let bps = constellation.bits_per_symbol() as usize;
    if bits.len() % bps != 0 {
        return Err(Error::Dimension(format!(
            "bit string length {} is not a multiple of {bps}",
            bits.len()
        )));
    }
    bits.chunks(bps)
        .map(|chunk| {
            let mut label = 0u32;
            for &b in chunk {
                if b > 1 {
                    return Err(Error::Domain("bits must be 0 or 1".into()));
                }
                label = (label << 1) | b as u32;
            }
            Ok(constellation.index_of_label(label))
        })
        .collect()
}

fn label_to_bits(label: u32, bps: usize) -> Vec<u8> {
    (0..bps).rev().map(|i| ((label >> i) & 1) as u8).collect()
}

/// Builds the codeword in the fixed enumeration order from per-symbol
/// constellation indices (most significant digit = first symbol).
fn block_from_indices(scheme: &SchemeConfig, indices: &[usize]) -> CodewordBlock {
    let q = scheme.constellation().len();
    let bps = scheme.constellation().bits_per_symbol() as usize;
    let mut bits = Vec::with_capacity(indices.len() * bps);
    for &i in indices {
        bits.extend(label_to_bits(scheme.constellation().label(i), bps));
    }
    let candidate_index = indices.iter().fold(0usize, |acc, &i| acc * q + i);
    let symbols = match scheme.kind() {
        SchemeKind::Vblast | SchemeKind::Siso => {
            indices.iter().map(|&i| scheme.symbol(i)).collect()
        }
        SchemeKind::Astbc => {
            let s1 = scheme.symbol(indices[0]);
            let s2 = scheme.symbol(indices[1]);
            // [[s1, -s2*], [s2, s1*]]: rows are antennas, columns slots.
            vec![s1, s2, -s2.conj(), s1.conj()]
        }
    };
    CodewordBlock {
        symbols,
        m_tx: scheme.m_tx(),
        slots: scheme.time_slots(),
        bits,
        candidate_index,
    }
}

/// Maps a source bit string onto one codeword block.
pub fn encode(scheme: &SchemeConfig, bits: &[u8]) -> Result<CodewordBlock> {
    if bits.len() != scheme.bits_per_block() {
        return Err(Error::Dimension(format!(
            "expected {} bits, got {}",
            scheme.bits_per_block(),
            bits.len()
        )));
    }
    let indices = bits_to_symbol_indices(scheme.constellation(), bits)?;
    Ok(block_from_indices(scheme, &indices))
}

/// Codeword at a position of the fixed enumeration order.
pub fn candidate_block(scheme: &SchemeConfig, index: usize) -> CodewordBlock {
    let q = scheme.constellation().len();
    let n_symbols = match scheme.kind() {
        SchemeKind::Vblast => scheme.m_tx(),
        SchemeKind::Astbc => 2,
        SchemeKind::Siso => 1,
    };
    let mut indices = vec![0usize; n_symbols];
    let mut rest = index;
    for slot in (0..n_symbols).rev() {
        indices[slot] = rest % q;
        rest /= q;
    }
    block_from_indices(scheme, &indices)
}

/// Draws `scheme.bits_per_block()` uniform source bits.
pub fn random_bits(scheme: &SchemeConfig, rng: &mut RngStream) -> Vec<u8> {
    (0..scheme.bits_per_block()).map(|_| rng.gen_range(0..2u8)).collect()
}

/// y = H s + n, slot by slot, with CN(0, 1/snr) noise per receive entry.
/// The channel is held constant across the block's slots. An infinite
/// `snr` suppresses the noise entirely.
pub fn transmit(
    block: &CodewordBlock,
    h: &ChannelMatrix,
    snr: f64,
    rng: &mut RngStream,
) -> Result<Vec<Complex64>> {
    if h.cols() != block.m_tx {
        return Err(Error::Dimension(format!(
            "channel has {} columns but block has {} antennas",
            h.cols(),
            block.m_tx
        )));
    }
    if !(snr > 0.0) {
        return Err(Error::Domain(format!("snr must be > 0, got {snr}")));
    }
    let sigma = if snr.is_infinite() { 0.0 } else { (0.5 / snr).sqrt() };
    let mut received = Vec::with_capacity(h.rows() * block.slots);
    for t in 0..block.slots {
        let clean = h.mul_vec(block.slot(t))?;
        for y in clean {
            let nr: f64 = rng.sample(StandardNormal);
            let ni: f64 = rng.sample(StandardNormal);
            received.push(y + Complex64::new(sigma * nr, sigma * ni));
        }
    }
    Ok(received)
}

/// Outcome of a detection pass, with the metric-evaluation count used by
/// the complexity invariant tests.
#[derive(Debug, Clone)]
pub struct DetectionOutcome {
    pub block: CodewordBlock,
    pub metric_evaluations: usize,
}

fn check_received_dims(y: &[Complex64], h: &ChannelMatrix, scheme: &SchemeConfig) -> Result<()> {
    if h.cols() != scheme.m_tx() || h.rows() != scheme.n_rx() {
        return Err(Error::Dimension(format!(
            "channel is {}x{} but scheme is {}x{}",
            h.rows(),
            h.cols(),
            scheme.n_rx(),
            scheme.m_tx()
        )));
    }
    let expected = h.rows() * scheme.time_slots();
    if y.len() != expected {
        return Err(Error::Dimension(format!(
            "received vector length {} != N*T = {expected}",
            y.len()
        )));
    }
    Ok(())
}

/// Exhaustive MLD over the full candidate codebook; ties break toward the
/// lowest candidate index.
pub fn mld_detect_with_stats(
    y: &[Complex64],
    h: &ChannelMatrix,
    scheme: &SchemeConfig,
) -> Result<DetectionOutcome> {
    check_received_dims(y, h, scheme)?;
    let q = scheme.constellation().len();
    let n = h.rows();
    // Precompute column_m * symbol_i once; each candidate then only sums
    // M precomputed vectors.
    let scaled: Vec<Vec<Complex64>> = (0..scheme.m_tx())
        .flat_map(|m| {
            let col = h.column(m);
            (0..q)
                .map(|i| {
                    let s = scheme.symbol(i);
                    col.iter().map(|&g| g * s).collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let col_sym = |m: usize, i: usize| -> &[Complex64] { &scaled[m * q + i] };

    let mut best_index = 0usize;
    let mut best_metric = f64::INFINITY;
    let mut evaluations = 0usize;
    let num = scheme.num_candidates();
    match scheme.kind() {
        SchemeKind::Vblast | SchemeKind::Siso => {
            let m_tx = scheme.m_tx();
            let mut digits = vec![0usize; m_tx];
            for cand in 0..num {
                let mut rest = cand;
                for d in (0..m_tx).rev() {
                    digits[d] = rest % q;
                    rest /= q;
                }
                let mut metric = 0.0;
                for row in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (m, &i) in digits.iter().enumerate() {
                        acc += col_sym(m, i)[row];
                    }
                    metric += (y[row] - acc).norm_sqr();
                }
                evaluations += 1;
                if metric < best_metric {
                    best_metric = metric;
                    best_index = cand;
                }
            }
        }
        SchemeKind::Astbc => {
            for cand in 0..num {
                let block = candidate_block(scheme, cand);
                let mut metric = 0.0;
                for t in 0..2 {
                    let clean = h.mul_vec(block.slot(t))?;
                    for row in 0..n {
                        metric += (y[t * n + row] - clean[row]).norm_sqr();
                    }
                }
                evaluations += 1;
                if metric < best_metric {
                    best_metric = metric;
                    best_index = cand;
                }
            }
        }
    }
    Ok(DetectionOutcome {
        block: candidate_block(scheme, best_index),
        metric_evaluations: evaluations,
    })
}

/// Exhaustive MLD; see [`mld_detect_with_stats`].
pub fn mld_detect(y: &[Complex64], h: &ChannelMatrix, scheme: &SchemeConfig) -> Result<CodewordBlock> {
    Ok(mld_detect_with_stats(y, h, scheme)?.block)
}

/// ML detection for the Alamouti block via orthogonal combining. The code
/// matrix columns are orthogonal for every channel realization, so the
/// block metric decouples per symbol and the argmin equals the exhaustive
/// search (up to measure-zero ties); work drops from q^2 to 2q metrics.
pub fn astbc_detect_combining(
    y: &[Complex64],
    h: &ChannelMatrix,
    scheme: &SchemeConfig,
) -> Result<CodewordBlock> {
    if scheme.kind() != SchemeKind::Astbc {
        return Err(Error::Domain("combining detector only applies to ASTBC".into()));
    }
    check_received_dims(y, h, scheme)?;
    let n = h.rows();
    let g1 = h.column(0);
    let g2 = h.column(1);
    let (y1, y2) = y.split_at(n);
    let inner = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(&x, &v)| x.conj() * v).sum()
    };
    let gain: f64 = g1.iter().map(|g| g.norm_sqr()).sum::<f64>()
        + g2.iter().map(|g| g.norm_sqr()).sum::<f64>();
    let z1 = inner(&g1, y1) + inner(&g2, y2).conj();
    let z2 = inner(&g2, y1) - inner(&g1, y2).conj();
    let q = scheme.constellation().len();
    let pick = |z: Complex64| -> usize {
        let mut best = 0usize;
        let mut best_metric = f64::INFINITY;
        for i in 0..q {
            let s = scheme.symbol(i);
            let metric = gain * s.norm_sqr() - 2.0 * (z.conj() * s).re;
            if metric < best_metric {
                best_metric = metric;
                best = i;
            }
        }
        best
    };
    let i1 = pick(z1);
    let i2 = pick(z2);
    Ok(candidate_block(scheme, i1 * q + i2))
}

/// Detector used by the Monte-Carlo engine: exhaustive MLD, except that
/// Alamouti blocks go through the equivalent combining form.
pub fn detect(y: &[Complex64], h: &ChannelMatrix, scheme: &SchemeConfig) -> Result<CodewordBlock> {
    match scheme.kind() {
        SchemeKind::Astbc => astbc_detect_combining(y, h, scheme),
        _ => mld_detect(y, h, scheme),
    }
}

/// Hamming distance between the source bit strings of two blocks.
pub fn count_bit_errors(sent: &CodewordBlock, detected: &CodewordBlock) -> usize {
    debug_assert_eq!(sent.bits.len(), detected.bits.len());
    sent.bits
        .iter()
        .zip(&detected.bits)
        .filter(|(a, b)| a != b)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, TurbulenceParams};

    fn bpsk() -> Constellation {
        build_constellation(ModulationKind::Psk, 2).unwrap()
    }

    fn scheme(kind: SchemeKind, m: usize, n: usize, c: Constellation) -> SchemeConfig {
        SchemeConfig::new(kind, m, n, c, PowerNormalization::PerAntenna).unwrap()
    }

    #[test]
    fn bpsk_points_and_labels() {
        let c = bpsk();
        assert_eq!(c.point(0), Complex64::new(1.0, 0.0));
        assert_eq!(c.point(1), Complex64::new(-1.0, 0.0));
        // bit 1 <-> +1
        assert_eq!(c.label(0), 1);
        assert_eq!(c.label(1), 0);
        // Delta s in {0, +-2}: max |delta| = 2
        let max_d = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (c.point(i) - c.point(j)).norm())
            .fold(0.0f64, f64::max);
        assert!((max_d - 2.0).abs() < 1e-15);
    }

    #[test]
    fn qpsk_points_normalized() {
        let c = build_constellation(ModulationKind::Qam, 4).unwrap();
        let r = 0.5f64.sqrt();
        for i in 0..4 {
            let p = c.point(i);
            assert!((p.re.abs() - r).abs() < 1e-15 && (p.im.abs() - r).abs() < 1e-15);
        }
        let energy: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / 4.0;
        assert!((energy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qam16_gray_neighbors() {
        let c = build_constellation(ModulationKind::Qam, 16).unwrap();
        // Nearest-neighbor pairs differ in exactly one label bit.
        let d_min = 2.0 / (2.0 * 15.0 / 3.0f64).sqrt();
        for i in 0..16 {
            for j in 0..16 {
                if i == j {
                    continue;
                }
                let d = (c.point(i) - c.point(j)).norm();
                if d < d_min * 1.01 {
                    let diff = (c.label(i) ^ c.label(j)).count_ones();
                    assert_eq!(diff, 1, "labels {} {} at distance {d}", c.label(i), c.label(j));
                }
            }
        }
    }

    #[test]
    fn unsupported_sizes_rejected() {
        assert!(build_constellation(ModulationKind::Qam, 8).is_err());
        assert!(build_constellation(ModulationKind::Qam, 32).is_err());
        assert!(build_constellation(ModulationKind::Psk, 3).is_err());
        assert!(build_constellation(ModulationKind::Psk, 0).is_err());
    }

    #[test]
    fn delta_set_symmetric_under_negation() {
        for c in [
            bpsk(),
            build_constellation(ModulationKind::Psk, 8).unwrap(),
            build_constellation(ModulationKind::Qam, 16).unwrap(),
        ] {
            let q = c.len();
            let mut deltas: Vec<(i64, i64)> = Vec::new();
            for i in 0..q {
                for j in 0..q {
                    if i != j {
                        let d = c.point(i) - c.point(j);
                        deltas.push(((d.re * 1e12).round() as i64, (d.im * 1e12).round() as i64));
                    }
                }
            }
            let mut negated: Vec<(i64, i64)> = deltas.iter().map(|&(a, b)| (-a, -b)).collect();
            deltas.sort_unstable();
            negated.sort_unstable();
            assert_eq!(deltas, negated);
        }
    }

    #[test]
    fn scheme_validation() {
        assert!(SchemeConfig::new(SchemeKind::Astbc, 3, 2, bpsk(), PowerNormalization::PerAntenna).is_err());
        assert!(SchemeConfig::new(SchemeKind::Siso, 2, 1, bpsk(), PowerNormalization::PerAntenna).is_err());
        assert!(SchemeConfig::new(SchemeKind::Vblast, 2, 0, bpsk(), PowerNormalization::PerAntenna).is_err());
    }

    #[test]
    fn vblast_bpsk_encoding() {
        let s = scheme(SchemeKind::Vblast, 2, 2, bpsk());
        let block = encode(&s, &[1, 1]).unwrap();
        assert_eq!(block.slot(0), &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        let block = encode(&s, &[1, 0]).unwrap();
        assert_eq!(block.slot(0), &[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
    }

    #[test]
    fn siso_bpsk_bit_zero_is_minus_one() {
        let s = scheme(SchemeKind::Siso, 1, 1, bpsk());
        let block = encode(&s, &[0]).unwrap();
        assert_eq!(block.slot(0), &[Complex64::new(-1.0, 0.0)]);
    }

    #[test]
    fn astbc_alamouti_template() {
        let s = scheme(SchemeKind::Astbc, 2, 2, bpsk());
        let block = encode(&s, &[1, 1]).unwrap(); // (s1, s2) = (+1, +1)
        // slots [[+1, -1], [+1, +1]]
        assert_eq!(block.symbol(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(block.symbol(0, 1), Complex64::new(-1.0, 0.0));
        assert_eq!(block.symbol(1, 0), Complex64::new(1.0, 0.0));
        assert_eq!(block.symbol(1, 1), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn astbc_columns_orthogonal() {
        let c = build_constellation(ModulationKind::Qam, 4).unwrap();
        let s = scheme(SchemeKind::Astbc, 2, 1, c);
        for cand in 0..s.num_candidates() {
            let b = candidate_block(&s, cand);
            // <col1, col2> over antennas = s1*(-s2*)' ... = 0
            let ip = b.symbol(0, 0).conj() * b.symbol(0, 1) + b.symbol(1, 0).conj() * b.symbol(1, 1);
            assert!(ip.norm() < 1e-14, "candidate {cand}: {ip}");
        }
    }

    #[test]
    fn encode_length_mismatch() {
        let s = scheme(SchemeKind::Vblast, 2, 2, bpsk());
        assert!(encode(&s, &[1]).is_err());
        assert!(encode(&s, &[1, 0, 1]).is_err());
    }

    #[test]
    fn noiseless_transmit_is_exact() {
        let p = TurbulenceParams::new(4.0, 2.0).unwrap();
        let mut rng = RngStream::new(3, 0);
        let h = sample_channel(2, 2, &p, &mut rng).unwrap();
        let s = scheme(SchemeKind::Vblast, 2, 2, bpsk());
        let block = encode(&s, &[1, 0]).unwrap();
        let y = transmit(&block, &h, f64::INFINITY, &mut rng).unwrap();
        let clean = h.mul_vec(block.slot(0)).unwrap();
        assert_eq!(y, clean);
    }

    #[test]
    fn noise_statistics() {
        let p = TurbulenceParams::new(4.0, 2.0).unwrap();
        let mut rng = RngStream::new(11, 0);
        let h = sample_channel(2, 2, &p, &mut rng).unwrap();
        let s = scheme(SchemeKind::Vblast, 2, 2, bpsk());
        let block = encode(&s, &[1, 1]).unwrap();
        let clean = h.mul_vec(block.slot(0)).unwrap();
        let n = 500_000usize;
        let mut var = 0.0;
        let mut cov = 0.0;
        for _ in 0..n {
            let y = transmit(&block, &h, 1.0, &mut rng).unwrap();
            for (i, &c) in clean.iter().enumerate() {
                let noise = y[i] - c;
                var += noise.norm_sqr();
                cov += noise.re * noise.im;
            }
        }
        let samples = (2 * n) as f64;
        var /= samples;
        cov /= samples;
        // Complex variance 1/SNR = 1 per entry at snr = 1.
        assert!((var - 1.0).abs() < 4.0 * (2.0 / samples).sqrt(), "var {var}");
        assert!(cov.abs() < 4.0 * (0.25 / samples).sqrt(), "cov {cov}");
    }

    #[test]
    fn mld_noiseless_roundtrip() {
        let p = TurbulenceParams::new(4.0, 2.0).unwrap();
        let mut rng = RngStream::new(17, 0);
        let c = build_constellation(ModulationKind::Qam, 4).unwrap();
        let s = scheme(SchemeKind::Vblast, 2, 2, c);
        for _ in 0..50 {
            let h = sample_channel(2, 2, &p, &mut rng).unwrap();
            let bits = random_bits(&s, &mut rng);
            let block = encode(&s, &bits).unwrap();
            let y = transmit(&block, &h, f64::INFINITY, &mut rng).unwrap();
            let detected = mld_detect(&y, &h, &s).unwrap();
            assert_eq!(detected.bits(), block.bits());
        }
    }

    #[test]
    fn mld_matches_reversed_order_brute_force() {
        let p = TurbulenceParams::new(4.0, 2.0).unwrap();
        let mut rng = RngStream::new(23, 0);
        let c = build_constellation(ModulationKind::Qam, 4).unwrap();
        let s = scheme(SchemeKind::Vblast, 2, 2, c);
        for _ in 0..200 {
            let h = sample_channel(2, 2, &p, &mut rng).unwrap();
            let bits = random_bits(&s, &mut rng);
            let block = encode(&s, &bits).unwrap();
            let y = transmit(&block, &h, 5.0, &mut rng).unwrap();
            let fast = mld_detect(&y, &h, &s).unwrap();
            // Independent scan in reversed enumeration order, recomputing
            // the metric from scratch. With < on the reversed scan, ties
            // would surface as a disagreement with the forward tie-break.
            let mut best = usize::MAX;
            let mut best_metric = f64::INFINITY;
            for cand in (0..s.num_candidates()).rev() {
                let cb = candidate_block(&s, cand);
                let clean = h.mul_vec(cb.slot(0)).unwrap();
                let metric: f64 = y.iter().zip(&clean).map(|(a, b)| (a - b).norm_sqr()).sum();
                if metric < best_metric || (metric == best_metric && cand < best) {
                    best_metric = metric;
                    best = cand;
                }
            }
            assert_eq!(fast.candidate_index(), best);
        }
    }

    #[test]
    fn mld_scale_invariance() {
        let p = TurbulenceParams::new(4.0, 2.0).unwrap();
        let mut rng = RngStream::new(31, 0);
        let c = build_constellation(ModulationKind::Psk, 4).unwrap();
        let s = scheme(SchemeKind::Vblast, 2, 2, c);
        for k in 0..50 {
            let h = sample_channel(2, 2, &p, &mut rng).unwrap();
            let bits = random_bits(&s, &mut rng);
            let block = encode(&s, &bits).unwrap();
            let y = transmit(&block, &h, 2.0, &mut rng).unwrap();
            let scale = Complex64::from_polar(0.25 + k as f64 * 0.1, 1.1);
            let y2: Vec<_> = y.iter().map(|&v| v * scale).collect();
            let h2 = ChannelMatrix::from_entries(
                2,
                2,
                (0..2)
                    .flat_map(|n| (0..2).map(move |m| (n, m)))
                    .map(|(n, m)| h.get(n, m) * scale)
                    .collect(),
            )
            .unwrap();
            let a = mld_detect(&y, &h, &s).unwrap();
            let b = mld_detect(&y2, &h2, &s).unwrap();
            assert_eq!(a.candidate_index(), b.candidate_index());
        }
    }

    #[test]
    fn mld_work_is_q_to_the_m() {
        let p = TurbulenceParams::new(4.0, 2.0).unwrap();
        let mut rng = RngStream::new(41, 0);
        let c = build_constellation(ModulationKind::Qam, 4).unwrap();
        let s = scheme(SchemeKind::Vblast, 2, 2, c);
        let h = sample_channel(2, 2, &p, &mut rng).unwrap();
        let bits = random_bits(&s, &mut rng);
        let block = encode(&s, &bits).unwrap();
        let y = transmit(&block, &h, 10.0, &mut rng).unwrap();
        let out = mld_detect_with_stats(&y, &h, &s).unwrap();
        assert_eq!(out.metric_evaluations, 16); // q^M = 4^2
    }

    #[test]
    fn astbc_combining_equals_exhaustive() {
        let p = TurbulenceParams::new(4.0, 2.0).unwrap();
        let mut rng = RngStream::new(53, 0);
        for q in [2usize, 4, 16] {
            let c = build_constellation(ModulationKind::Qam, q).unwrap();
            let s = scheme(SchemeKind::Astbc, 2, 2, c);
            for _ in 0..100 {
                let h = sample_channel(2, 2, &p, &mut rng).unwrap();
                let bits = random_bits(&s, &mut rng);
                let block = encode(&s, &bits).unwrap();
                let y = transmit(&block, &h, 3.0, &mut rng).unwrap();
                let a = mld_detect(&y, &h, &s).unwrap();
                let b = astbc_detect_combining(&y, &h, &s).unwrap();
                assert_eq!(a.candidate_index(), b.candidate_index());
            }
        }
    }

    #[test]
    fn bit_error_counting() {
        let s = scheme(SchemeKind::Vblast, 2, 2, bpsk());
        let a = encode(&s, &[1, 1]).unwrap();
        let b = encode(&s, &[0, 0]).unwrap();
        let c = encode(&s, &[1, 0]).unwrap();
        assert_eq!(count_bit_errors(&a, &a), 0);
        assert_eq!(count_bit_errors(&a, &b), 2);
        assert_eq!(count_bit_errors(&a, &c), 1);
    }

    #[test]
    fn total_power_normalization_scales_symbols() {
        let s = SchemeConfig::new(SchemeKind::Vblast, 2, 2, bpsk(), PowerNormalization::Total).unwrap();
        let block = encode(&s, &[1, 1]).unwrap();
        let want = 0.5f64.sqrt();
        assert!((block.symbol(0, 0).re - want).abs() < 1e-15);
    }
}
