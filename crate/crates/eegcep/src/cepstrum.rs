//! The mel-frequency cepstral pipeline: forward MFCC extraction per frame
//! and segment, the lossy inverse used for time-domain reconstruction, and
//! FFT band-power features for the spectral-feature comparison.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dsp::{
    self, dct2, fft_magnitude_phase, frame_signal, hamming_window, idct2, overlap_add,
    pre_emphasize, spectrum_to_frame, Frame, Signal,
};
use crate::error::{Error, Result};
use crate::segment::EegSegment;

/// All pipeline constants of the cepstral feature extractor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfccConfig {
    /// Pre-emphasis constant.
    pub beta: f64,
    /// Frame length N (power of two).
    pub frame_len: usize,
    /// Hop between frames.
    pub hop: usize,
    /// Number of mel filters M.
    pub num_filters: usize,
    /// First retained DCT index (zero-based).
    pub coeff_lo: usize,
    /// Last retained DCT index (zero-based, inclusive).
    pub coeff_hi: usize,
    /// Sampling rate in Hz.
    pub fs: f64,
    /// Lower edge of the mel range in Hz.
    pub mel_lo: f64,
    /// Upper edge of the mel range in Hz.
    pub mel_hi: f64,
    /// Floor applied before the log.
    pub log_floor: f64,
}

impl MfccConfig {
    /// Desk-scale preset: fs=250 Hz, N=512, so a 5 s segment yields 3 frames.
    pub fn desk() -> Self {
        MfccConfig {
            beta: 0.95,
            frame_len: 512,
            hop: 256,
            num_filters: 40,
            coeff_lo: 1,
            coeff_hi: 12,
            fs: 250.0,
            mel_lo: 0.0,
            mel_hi: 125.0,
            log_floor: 1e-10,
        }
    }

    /// Full-scale preset with N=2048; needs fs high enough for a 5 s
    /// segment to hold at least one frame (fs >= 410 Hz).
    pub fn paper(fs: f64) -> Self {
        MfccConfig {
            beta: 0.95,
            frame_len: 2048,
            hop: 1024,
            num_filters: 40,
            coeff_lo: 1,
            coeff_hi: 12,
            fs,
            mel_lo: 0.0,
            mel_hi: fs / 2.0,
            log_floor: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::config(format!("beta must be in [0,1), got {}", self.beta)));
        }
        if self.frame_len == 0 || self.frame_len & (self.frame_len - 1) != 0 {
            return Err(Error::config(format!(
                "frame_len must be a power of two, got {}",
                self.frame_len
            )));
        }
        if self.hop == 0 || self.hop > self.frame_len {
            return Err(Error::config(format!(
                "hop must satisfy 1 <= hop <= frame_len, got {}",
                self.hop
            )));
        }
        if self.num_filters < 2 {
            return Err(Error::config("num_filters must be >= 2"));
        }
        if self.coeff_lo > self.coeff_hi || self.coeff_hi >= self.num_filters {
            return Err(Error::config(format!(
                "retained range [{}, {}] must lie within [0, {})",
                self.coeff_lo, self.coeff_hi, self.num_filters
            )));
        }
        if !(self.fs > 0.0) {
            return Err(Error::config("fs must be > 0"));
        }
        if !(self.mel_lo >= 0.0 && self.mel_lo < self.mel_hi && self.mel_hi <= self.fs / 2.0) {
            return Err(Error::config(format!(
                "mel range [{}, {}] must satisfy 0 <= lo < hi <= fs/2",
                self.mel_lo, self.mel_hi
            )));
        }
        if !(self.log_floor > 0.0) {
            return Err(Error::config("log_floor must be > 0"));
        }
        Ok(())
    }

    /// Number of retained cepstral coefficients per channel.
    pub fn retained_count(&self) -> usize {
        self.coeff_hi - self.coeff_lo + 1
    }

    /// Short stable hash over all fields, carried by features and models so
    /// that artifacts produced under different configs refuse to mix.
    pub fn fingerprint(&self) -> String {
        let canon = format!(
            "beta={};N={};hop={};M={};lo={};hi={};fs={};mlo={};mhi={};floor={}",
            self.beta,
            self.frame_len,
            self.hop,
            self.num_filters,
            self.coeff_lo,
            self.coeff_hi,
            self.fs,
            self.mel_lo,
            self.mel_hi,
            self.log_floor
        );
        let digest = Sha256::digest(canon.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Mel scale: `2595 * log10(1 + f/700)`.
pub fn mel_of_hz(f: f64) -> Result<f64> {
    if f < 0.0 {
        return Err(Error::domain(format!("mel of negative frequency {f}")));
    }
    Ok(2595.0 * (1.0 + f / 700.0).log10())
}

/// Inverse mel scale.
pub fn hz_of_mel(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular mel filter bank over the one-sided spectrum.
///
/// Each filter peaks at weight 1 on its center bin and falls linearly to 0
/// at the center bins of its neighbors. `center_freqs` holds the exact
/// (unsnapped) mel-grid frequencies; `center_bins` the snapped FFT bins.
#[derive(Debug, Clone)]
pub struct MelFilterBank {
    filters: Vec<Vec<f64>>,
    center_freqs: Vec<f64>,
    center_bins: Vec<usize>,
    col_sums: Vec<f64>,
    num_bins: usize,
}

impl MelFilterBank {
    pub fn num_filters(&self) -> usize {
        self.filters.len()
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn filters(&self) -> &[Vec<f64>] {
        &self.filters
    }

    pub fn center_freqs(&self) -> &[f64] {
        &self.center_freqs
    }

    pub fn center_bins(&self) -> &[usize] {
        &self.center_bins
    }

    pub fn col_sums(&self) -> &[f64] {
        &self.col_sums
    }

    /// Filter-bank product with a magnitude spectrum.
    pub fn apply(&self, magnitudes: &[f64]) -> Result<Vec<f64>> {
        if magnitudes.len() != self.num_bins {
            return Err(Error::domain(format!(
                "spectrum has {} bins, bank expects {}",
                magnitudes.len(),
                self.num_bins
            )));
        }
        Ok(self
            .filters
            .iter()
            .map(|row| row.iter().zip(magnitudes).map(|(w, m)| w * m).sum())
            .collect())
    }
}

/// Build the triangular filter bank for a config. The M+2 mel grid points
/// are snapped to FFT bins; a config whose grid collapses onto duplicate
/// bins is rejected as incompatible.
pub fn build_mel_bank(config: &MfccConfig) -> Result<MelFilterBank> {
    config.validate()?;
    let m = config.num_filters;
    let num_bins = config.frame_len / 2 + 1;
    let mel_lo = mel_of_hz(config.mel_lo)?;
    let mel_hi = mel_of_hz(config.mel_hi)?;
    let bin_hz = config.fs / config.frame_len as f64;

    let mut grid_hz = Vec::with_capacity(m + 2);
    let mut grid_bins = Vec::with_capacity(m + 2);
    for i in 0..m + 2 {
        let mel = mel_lo + (mel_hi - mel_lo) * i as f64 / (m + 1) as f64;
        let hz = hz_of_mel(mel);
        let bin = (hz / bin_hz).round() as usize;
        grid_hz.push(hz);
        grid_bins.push(bin.min(num_bins - 1));
    }
    for i in 1..grid_bins.len() {
        if grid_bins[i] <= grid_bins[i - 1] {
            return Err(Error::config(format!(
                "mel grid collapses at filter {i}: fs={}, N={}, M={m} leave too few \
                 distinct FFT bins",
                config.fs, config.frame_len
            )));
        }
    }

    let mut filters = Vec::with_capacity(m);
    for f in 0..m {
        let (lo, center, hi) = (grid_bins[f], grid_bins[f + 1], grid_bins[f + 2]);
        let mut row = vec![0.0; num_bins];
        for k in lo + 1..=center {
            row[k] = (k - lo) as f64 / (center - lo) as f64;
        }
        for k in center + 1..hi {
            row[k] = (hi - k) as f64 / (hi - center) as f64;
        }
        filters.push(row);
    }
    let mut col_sums = vec![0.0; num_bins];
    for row in &filters {
        for (k, w) in row.iter().enumerate() {
            col_sums[k] += w;
        }
    }
    Ok(MelFilterBank {
        filters,
        center_freqs: grid_hz[1..=m].to_vec(),
        center_bins: grid_bins[1..=m].to_vec(),
        col_sums,
        num_bins,
    })
}

/// Per-segment cepstral features: the retained coefficients of every
/// channel, concatenated in channel order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub coeffs: Vec<f64>,
    pub channel_count: usize,
    pub fingerprint: String,
}

impl FeatureVector {
    pub fn dims_per_channel(&self) -> usize {
        self.coeffs.len() / self.channel_count
    }
}

/// Side information retained per frame so a segment can be reconstructed.
#[derive(Debug, Clone)]
pub struct CepstralFrameState {
    /// All M DCT coefficients of the log mel spectrum.
    pub full_dct: Vec<f64>,
    /// One-sided phases of the windowed frame.
    pub phases: Vec<f64>,
    /// Sum of squared frame samples.
    pub frame_energy: f64,
}

/// One cepstral-domain edit action for a single DCT dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum EditOp {
    /// Set the coefficient to zero.
    Zero,
    /// Affine remap `(c - src_mean) / src_std * dst_std + dst_mean`.
    Affine {
        src_mean: f64,
        src_std: f64,
        dst_mean: f64,
        dst_std: f64,
    },
}

/// A sparse edit over the full M-dimensional DCT vector of each frame.
/// Dimensions are zero-based DCT indices; untouched dimensions keep their
/// original values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CepstralEdit {
    ops: BTreeMap<usize, EditOp>,
}

impl CepstralEdit {
    pub fn identity() -> Self {
        CepstralEdit::default()
    }

    pub fn zero_dims(dims: &[usize]) -> Self {
        let mut edit = CepstralEdit::default();
        for &d in dims {
            edit.ops.insert(d, EditOp::Zero);
        }
        edit
    }

    pub fn set(&mut self, dim: usize, op: EditOp) {
        self.ops.insert(dim, op);
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.ops.keys().copied()
    }

    /// Apply the edit to a full DCT vector of `num_filters` coefficients.
    pub fn apply(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        let mut out = coeffs.to_vec();
        for (&dim, op) in &self.ops {
            if dim >= coeffs.len() {
                return Err(Error::domain(format!(
                    "edit references dimension {dim}, outside [0, {})",
                    coeffs.len()
                )));
            }
            match op {
                EditOp::Zero => out[dim] = 0.0,
                EditOp::Affine {
                    src_mean,
                    src_std,
                    dst_mean,
                    dst_std,
                } => {
                    if !(*src_std > 0.0) {
                        return Err(Error::domain(format!(
                            "affine edit on dimension {dim} has non-positive source std; \
                             re-profile the populations"
                        )));
                    }
                    out[dim] = (out[dim] - src_mean) / src_std * dst_std + dst_mean;
                }
            }
        }
        Ok(out)
    }
}

/// MFCCs of a single (pre-emphasized) frame plus reconstruction state.
pub fn mfcc_frame(
    frame: &Frame,
    bank: &MelFilterBank,
    config: &MfccConfig,
) -> Result<(Vec<f64>, CepstralFrameState)> {
    if frame.len() != config.frame_len {
        return Err(Error::domain(format!(
            "frame length {} does not match configured N={}",
            frame.len(),
            config.frame_len
        )));
    }
    let spectrum = fft_magnitude_phase(frame, true)?;
    let mel = bank.apply(spectrum.magnitudes())?;
    let log_mel: Vec<f64> = mel.iter().map(|&e| e.max(config.log_floor).ln()).collect();
    let full_dct = dct2(&log_mel)?;
    let retained = full_dct[config.coeff_lo..=config.coeff_hi].to_vec();
    let frame_energy = frame.samples().iter().map(|v| v * v).sum();
    Ok((
        retained,
        CepstralFrameState {
            full_dct,
            phases: spectrum.phases().to_vec(),
            frame_energy,
        },
    ))
}

/// Segment MFCCs: per channel, pre-emphasize, frame, average the retained
/// coefficients across frames, then concatenate channels.
pub fn mfcc_segment(
    segment: &EegSegment,
    bank: &MelFilterBank,
    config: &MfccConfig,
) -> Result<FeatureVector> {
    let retained = config.retained_count();
    let mut coeffs = Vec::with_capacity(retained * segment.channel_count());
    for c in 0..segment.channel_count() {
        let signal = Signal::new(segment.channel(c).to_vec(), segment.fs())?;
        let emphasized = pre_emphasize(&signal, config.beta)?;
        let frames = frame_signal(&emphasized, config.frame_len, config.hop)?;
        let mut mean = vec![0.0; retained];
        for frame in &frames {
            let (slice, _) = mfcc_frame(frame, bank, config)?;
            for (acc, v) in mean.iter_mut().zip(&slice) {
                *acc += v;
            }
        }
        let n = frames.len() as f64;
        for v in &mut mean {
            *v /= n;
        }
        coeffs.extend(mean);
    }
    Ok(FeatureVector {
        coeffs,
        channel_count: segment.channel_count(),
        fingerprint: config.fingerprint(),
    })
}

/// Maximum multiplicative-update sweeps of the mel-spectrum inversion.
const MEL_INVERSION_MAX_ITERS: usize = 400;

/// Solve for non-negative per-bin magnitudes whose mel projection matches
/// `target`, starting from the original magnitudes. Gains are spread over
/// bins through the bank transpose normalized by per-bin filter-weight
/// sums; bins outside every filter's support keep their original value.
fn invert_mel_edit(
    bank: &MelFilterBank,
    magnitudes: &[f64],
    target: &[f64],
    log_floor: f64,
) -> Vec<f64> {
    let mut mags = magnitudes.to_vec();
    let num_bins = bank.num_bins();
    let mut gain = vec![1.0; num_bins];
    for _ in 0..MEL_INVERSION_MAX_ITERS {
        let current = bank
            .apply(&mags)
            .expect("bank/spectrum sizes fixed by caller");
        let mut worst: f64 = 0.0;
        let ratios: Vec<f64> = target
            .iter()
            .zip(&current)
            .map(|(&t, &c)| {
                let r = t.max(log_floor) / c.max(log_floor);
                worst = worst.max((r - 1.0).abs());
                r
            })
            .collect();
        if worst < 1e-13 {
            break;
        }
        for g in gain.iter_mut() {
            *g = 0.0;
        }
        for (row, &r) in bank.filters().iter().zip(&ratios) {
            for (k, w) in row.iter().enumerate() {
                gain[k] += w * r;
            }
        }
        for k in 0..num_bins {
            let cs = bank.col_sums()[k];
            if cs > 0.0 {
                mags[k] *= gain[k] / cs;
            }
        }
    }
    mags
}

/// Apply a cepstral edit to every frame of every channel and rebuild the
/// time-domain segment: edit DCT -> inverse DCT -> exp -> mel-domain gain
/// spread onto the spectrum -> original phases -> inverse FFT -> weighted
/// overlap-add -> de-emphasis. Samples past the last complete frame pass
/// through unchanged. The identity edit reproduces the input exactly up to
/// rounding.
pub fn reconstruct_segment(
    segment: &EegSegment,
    edit: &CepstralEdit,
    bank: &MelFilterBank,
    config: &MfccConfig,
) -> Result<EegSegment> {
    let window = hamming_window(config.frame_len)?;
    let mut channels = Vec::with_capacity(segment.channel_count());
    for c in 0..segment.channel_count() {
        let signal = Signal::new(segment.channel(c).to_vec(), segment.fs())?;
        let emphasized = pre_emphasize(&signal, config.beta)?;
        let frames = frame_signal(&emphasized, config.frame_len, config.hop)?;
        let mut edited_frames = Vec::with_capacity(frames.len());
        for frame in &frames {
            let spectrum = fft_magnitude_phase(frame, true)?;
            let mel = bank.apply(spectrum.magnitudes())?;
            let log_mel: Vec<f64> = mel.iter().map(|&e| e.max(config.log_floor).ln()).collect();
            let dct = dct2(&log_mel)?;
            let edited = edit.apply(&dct)?;
            let new_mags = if edited == dct {
                spectrum.magnitudes().to_vec()
            } else {
                let target: Vec<f64> = idct2(&edited)?.iter().map(|&v| v.exp()).collect();
                invert_mel_edit(bank, spectrum.magnitudes(), &target, config.log_floor)
            };
            edited_frames.push(spectrum_to_frame(
                &new_mags,
                spectrum.phases(),
                config.frame_len,
            )?);
        }
        let synthesized = overlap_add(&edited_frames, config.hop, &window, segment.fs())?;
        let mut rebuilt = emphasized.samples().to_vec();
        rebuilt[..synthesized.len()].copy_from_slice(synthesized.samples());
        let out = dsp::de_emphasize(&Signal::new(rebuilt, segment.fs())?, config.beta)?;
        channels.push(out.samples().to_vec());
    }
    EegSegment::new(channels, segment.fs())
}

/// The five frequency bands of the spectral-feature comparison, in Hz.
pub fn default_bands() -> Vec<(f64, f64)> {
    vec![(0.5, 4.0), (4.0, 8.0), (8.0, 13.0), (13.0, 30.0), (0.5, 30.0)]
}

/// FFT band-power features: per channel and band, the mean squared FFT
/// magnitude over bins whose center frequency lies in `[low, high)`,
/// averaged across frames.
pub fn band_power_features(
    segment: &EegSegment,
    bands: &[(f64, f64)],
    config: &MfccConfig,
) -> Result<FeatureVector> {
    if bands.is_empty() {
        return Err(Error::config("band list is empty"));
    }
    let bin_hz = segment.fs() / config.frame_len as f64;
    let num_bins = config.frame_len / 2 + 1;
    let mut band_bins = Vec::with_capacity(bands.len());
    for &(lo, hi) in bands {
        if !(lo > 0.0 && lo < hi && hi <= segment.fs() / 2.0) {
            return Err(Error::config(format!(
                "band [{lo}, {hi}] must lie within (0, fs/2]"
            )));
        }
        let bins: Vec<usize> = (0..num_bins)
            .filter(|&k| {
                let f = k as f64 * bin_hz;
                f >= lo && f < hi
            })
            .collect();
        if bins.is_empty() {
            return Err(Error::config(format!(
                "band [{lo}, {hi}] covers no FFT bins at fs={}, N={}",
                segment.fs(),
                config.frame_len
            )));
        }
        band_bins.push(bins);
    }

    let mut coeffs = Vec::with_capacity(bands.len() * segment.channel_count());
    for c in 0..segment.channel_count() {
        let signal = Signal::new(segment.channel(c).to_vec(), segment.fs())?;
        let frames = frame_signal(&signal, config.frame_len, config.hop)?;
        let mut powers = vec![0.0; bands.len()];
        for frame in &frames {
            let spectrum = fft_magnitude_phase(frame, true)?;
            for (b, bins) in band_bins.iter().enumerate() {
                let sum: f64 = bins
                    .iter()
                    .map(|&k| spectrum.magnitudes()[k].powi(2))
                    .sum();
                powers[b] += sum / bins.len() as f64;
            }
        }
        let n = frames.len() as f64;
        coeffs.extend(powers.into_iter().map(|p| p / n));
    }
    Ok(FeatureVector {
        coeffs,
        channel_count: segment.channel_count(),
        fingerprint: format!("bands-{}", config.fingerprint()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn small_config() -> MfccConfig {
        MfccConfig {
            beta: 0.95,
            frame_len: 64,
            hop: 32,
            num_filters: 8,
            coeff_lo: 1,
            coeff_hi: 6,
            fs: 200.0,
            mel_lo: 0.0,
            mel_hi: 100.0,
            log_floor: 1e-10,
        }
    }

    #[test]
    fn mel_scale_values() {
        assert_eq!(mel_of_hz(0.0).unwrap(), 0.0);
        assert!((mel_of_hz(700.0).unwrap() - 2595.0 * 2f64.log10()).abs() < 1e-9);
        assert!((mel_of_hz(7000.0).unwrap() - 2595.0 * 11f64.log10()).abs() < 1e-9);
        assert!(mel_of_hz(-1.0).is_err());
    }

    #[test]
    fn mel_scale_monotone() {
        let mut prev = -1.0;
        for i in 0..200 {
            let m = mel_of_hz(i as f64).unwrap();
            assert!(m > prev);
            prev = m;
        }
    }

    #[test]
    fn bank_rows_peak_at_one() {
        let cfg = MfccConfig::desk();
        let bank = build_mel_bank(&cfg).unwrap();
        assert_eq!(bank.num_filters(), cfg.num_filters);
        for (row, &cb) in bank.filters().iter().zip(bank.center_bins()) {
            let max = row.iter().cloned().fold(0.0, f64::max);
            assert_eq!(max, 1.0);
            assert_eq!(row[cb], 1.0);
            assert!(row.iter().all(|&w| w >= 0.0));
        }
    }

    #[test]
    fn bank_row_support_contiguous() {
        let bank = build_mel_bank(&MfccConfig::desk()).unwrap();
        for row in bank.filters() {
            let first = row.iter().position(|&w| w > 0.0).unwrap();
            let last = row.iter().rposition(|&w| w > 0.0).unwrap();
            assert!(row[first..=last].iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn bank_centers_equally_spaced_in_mel() {
        let cfg = MfccConfig::desk();
        let bank = build_mel_bank(&cfg).unwrap();
        let mels: Vec<f64> = bank
            .center_freqs()
            .iter()
            .map(|&f| mel_of_hz(f).unwrap())
            .collect();
        let step = mels[1] - mels[0];
        for w in mels.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-9);
        }
        // strictly increasing centers
        for w in bank.center_freqs().windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn bank_small_case_matches_mel_grid_oracle() {
        let cfg = MfccConfig {
            beta: 0.95,
            frame_len: 64,
            hop: 32,
            num_filters: 3,
            coeff_lo: 0,
            coeff_hi: 2,
            fs: 200.0,
            mel_lo: 0.0,
            mel_hi: 100.0,
            log_floor: 1e-10,
        };
        let bank = build_mel_bank(&cfg).unwrap();
        // independent enumeration of the mel grid: 5 equally spaced mel
        // points between mel(0) and mel(100), mapped to the nearest of the
        // 33 FFT bins (bin width 200/64 Hz)
        let top = 2595.0 * (1.0f64 + 100.0 / 700.0).log10();
        let mut oracle_bins = Vec::new();
        for i in 1..=3 {
            let hz = 700.0 * (10f64.powf(top * i as f64 / 4.0 / 2595.0) - 1.0);
            oracle_bins.push((hz * 64.0 / 200.0).round() as usize);
        }
        assert_eq!(bank.center_bins(), oracle_bins.as_slice());
        assert_eq!(oracle_bins, vec![8, 15, 24]);
    }

    #[test]
    fn bank_rejects_collapsing_grid() {
        // far more filters than distinct low-frequency bins
        let cfg = MfccConfig {
            num_filters: 60,
            ..small_config()
        };
        assert!(build_mel_bank(&cfg).is_err());
    }

    #[test]
    fn bank_column_sums_positive_between_supports() {
        let bank = build_mel_bank(&MfccConfig::desk()).unwrap();
        let first = bank.center_bins()[0];
        let last = *bank.center_bins().last().unwrap();
        for k in first..=last {
            assert!(bank.col_sums()[k] > 0.0, "column {k} sum is zero");
        }
    }

    #[test]
    fn mfcc_zero_frame_is_well_defined() {
        let cfg = small_config();
        let bank = build_mel_bank(&cfg).unwrap();
        let frame = Frame::from_samples(vec![0.0; cfg.frame_len], 0, 0);
        let (retained, state) = mfcc_frame(&frame, &bank, &cfg).unwrap();
        for &v in &retained {
            assert!(v.abs() < 1e-9, "retained coefficient {v} not ~0");
        }
        assert!(state.full_dct[0].abs() > 1.0); // log floor mass in c0
    }

    #[test]
    fn mfcc_scale_lands_in_c0() {
        let cfg = small_config();
        let bank = build_mel_bank(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..cfg.frame_len).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let scaled: Vec<f64> = x.iter().map(|v| v * 100.0).collect();
        let (a, _) = mfcc_frame(&Frame::from_samples(x, 0, 0), &bank, &cfg).unwrap();
        let (b, _) = mfcc_frame(&Frame::from_samples(scaled, 0, 0), &bank, &cfg).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn mfcc_frame_matches_pipeline_composition_oracle() {
        let cfg = small_config();
        let bank = build_mel_bank(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let x: Vec<f64> = (0..cfg.frame_len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (got, _) = mfcc_frame(&Frame::from_samples(x.clone(), 0, 0), &bank, &cfg).unwrap();

        // straight-line oracle: naive DFT + dense mel product + log + naive DCT
        let n = cfg.frame_len;
        let w = hamming_window(n).unwrap();
        let windowed: Vec<f64> = x.iter().zip(&w).map(|(v, wn)| v * wn).collect();
        let mut mags = Vec::new();
        for k in 0..n / 2 + 1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &v) in windowed.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                acc += Complex64::from_polar(v, ang);
            }
            mags.push(acc.norm());
        }
        let mut log_mel = Vec::new();
        for row in bank.filters() {
            let e: f64 = row.iter().zip(&mags).map(|(w, m)| w * m).sum();
            log_mel.push(e.max(cfg.log_floor).ln());
        }
        let m = log_mel.len() as f64;
        let mut oracle = Vec::new();
        for k in cfg.coeff_lo..=cfg.coeff_hi {
            let mut acc = 0.0;
            for (i, &v) in log_mel.iter().enumerate() {
                acc += v * (std::f64::consts::PI / m * (i as f64 + 0.5) * k as f64).cos();
            }
            oracle.push(acc * (2.0 / m).sqrt());
        }
        for (g, o) in got.iter().zip(&oracle) {
            assert!((g - o).abs() < 1e-8, "got {g}, oracle {o}");
        }
    }

    fn random_segment(cfg: &MfccConfig, channels: usize, len: usize, seed: u64) -> EegSegment {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chans: Vec<Vec<f64>> = (0..channels)
            .map(|_| (0..len).map(|_| rng.gen_range(-20.0..20.0)).collect())
            .collect();
        EegSegment::new(chans, cfg.fs).unwrap()
    }

    #[test]
    fn mfcc_segment_single_frame_equals_frame_slice() {
        let cfg = small_config();
        let bank = build_mel_bank(&cfg).unwrap();
        let seg = random_segment(&cfg, 1, cfg.frame_len, 31);
        let fv = mfcc_segment(&seg, &bank, &cfg).unwrap();
        let signal = Signal::new(seg.channel(0).to_vec(), cfg.fs).unwrap();
        let emph = pre_emphasize(&signal, cfg.beta).unwrap();
        let frames = frame_signal(&emph, cfg.frame_len, cfg.hop).unwrap();
        assert_eq!(frames.len(), 1);
        let (slice, _) = mfcc_frame(&frames[0], &bank, &cfg).unwrap();
        assert_eq!(fv.coeffs, slice);
    }

    #[test]
    fn mfcc_segment_duplicate_channel() {
        let cfg = small_config();
        let bank = build_mel_bank(&cfg).unwrap();
        let base = random_segment(&cfg, 1, 200, 37);
        let seg = EegSegment::new(
            vec![base.channel(0).to_vec(), base.channel(0).to_vec()],
            cfg.fs,
        )
        .unwrap();
        let fv = mfcc_segment(&seg, &bank, &cfg).unwrap();
        let d = fv.dims_per_channel();
        assert_eq!(&fv.coeffs[..d], &fv.coeffs[d..]);
    }

    #[test]
    fn mfcc_segment_rejects_short_segment() {
        let cfg = small_config();
        let bank = build_mel_bank(&cfg).unwrap();
        let seg = random_segment(&cfg, 1, cfg.frame_len / 2, 5);
        assert!(mfcc_segment(&seg, &bank, &cfg).is_err());
    }

    #[test]
    fn reconstruct_identity_round_trip() {
        let cfg = small_config();
        let bank = build_mel_bank(&cfg).unwrap();
        let seg = random_segment(&cfg, 2, 200, 41);
        let rebuilt = reconstruct_segment(&seg, &CepstralEdit::identity(), &bank, &cfg).unwrap();
        let a = mfcc_segment(&seg, &bank, &cfg).unwrap();
        let b = mfcc_segment(&rebuilt, &bank, &cfg).unwrap();
        for (u, v) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((u - v).abs() < 1e-6, "identity edit drifted: {u} vs {v}");
        }
    }

    #[test]
    fn reconstruct_zero_edit_kills_target_dims() {
        // non-overlapping frames keep re-analysis exactly frame-consistent
        let cfg = MfccConfig {
            hop: 64,
            ..small_config()
        };
        let bank = build_mel_bank(&cfg).unwrap();
        let seg = random_segment(&cfg, 1, 200, 43);
        let edit = CepstralEdit::zero_dims(&[5, 6]);
        let rebuilt = reconstruct_segment(&seg, &edit, &bank, &cfg).unwrap();
        let fv = mfcc_segment(&rebuilt, &bank, &cfg).unwrap();
        // retained slice starts at DCT index coeff_lo = 1
        let c5 = fv.coeffs[5 - cfg.coeff_lo];
        let c6 = fv.coeffs[6 - cfg.coeff_lo];
        assert!(c5.abs() < 1e-6, "c5 = {c5}");
        assert!(c6.abs() < 1e-6, "c6 = {c6}");
    }

    #[test]
    fn reconstruct_all_zero_segment() {
        let cfg = small_config();
        let bank = build_mel_bank(&cfg).unwrap();
        let seg = EegSegment::new(vec![vec![0.0; 200]], cfg.fs).unwrap();
        let edit = CepstralEdit::zero_dims(&[5]);
        let rebuilt = reconstruct_segment(&seg, &edit, &bank, &cfg).unwrap();
        for &v in rebuilt.channel(0) {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruct_rejects_out_of_range_dim() {
        let cfg = small_config();
        let bank = build_mel_bank(&cfg).unwrap();
        let seg = random_segment(&cfg, 1, 200, 47);
        let edit = CepstralEdit::zero_dims(&[cfg.num_filters]);
        assert!(reconstruct_segment(&seg, &edit, &bank, &cfg).is_err());
    }

    #[test]
    fn band_power_tone_placement() {
        let cfg = MfccConfig::desk();
        let fs = cfg.fs;
        let n = 1250;
        let tone: Vec<f64> = (0..n)
            .map(|t| (2.0 * std::f64::consts::PI * 10.0 * t as f64 / fs).sin() * 10.0)
            .collect();
        let seg = EegSegment::new(vec![tone], fs).unwrap();
        let fv = band_power_features(&seg, &default_bands(), &cfg).unwrap();
        // bands: delta, theta, alpha, beta, broadband
        assert!(fv.coeffs[2] > 100.0 * fv.coeffs[0], "alpha should dominate delta");
        assert!(fv.coeffs[2] > 100.0 * fv.coeffs[1]);
        assert!(fv.coeffs[2] > 100.0 * fv.coeffs[3]);
    }

    #[test]
    fn band_power_quadratic_scaling() {
        let cfg = MfccConfig::desk();
        let seg = random_segment(&cfg, 2, 1250, 53);
        let scaled = EegSegment::new(
            seg.channels().iter().map(|c| c.iter().map(|v| 2.0 * v).collect()).collect(),
            cfg.fs,
        )
        .unwrap();
        let a = band_power_features(&seg, &default_bands(), &cfg).unwrap();
        let b = band_power_features(&scaled, &default_bands(), &cfg).unwrap();
        for (u, v) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((4.0 * u - v).abs() <= 1e-6 * v.abs());
        }
    }

    #[test]
    fn band_power_matches_bin_sum_oracle() {
        let cfg = MfccConfig {
            frame_len: 64,
            hop: 64,
            fs: 200.0,
            ..small_config()
        };
        let seg = random_segment(&cfg, 1, 64, 59);
        let bands = vec![(10.0, 40.0)];
        let fv = band_power_features(&seg, &bands, &cfg).unwrap();

        let frame = Frame::from_samples(seg.channel(0).to_vec(), 0, 0);
        let sp = fft_magnitude_phase(&frame, true).unwrap();
        let bin_hz = cfg.fs / cfg.frame_len as f64;
        let mut acc = 0.0;
        let mut count = 0;
        for (k, &m) in sp.magnitudes().iter().enumerate() {
            let f = k as f64 * bin_hz;
            if f >= 10.0 && f < 40.0 {
                acc += m * m;
                count += 1;
            }
        }
        assert!((fv.coeffs[0] - acc / count as f64).abs() < 1e-9);
    }

    #[test]
    fn band_power_rejects_empty_band() {
        let cfg = small_config();
        let seg = random_segment(&cfg, 1, 64, 61);
        assert!(band_power_features(&seg, &[(1.0, 2.0)], &cfg).is_err());
    }

    #[test]
    fn fingerprint_distinguishes_configs() {
        let a = MfccConfig::desk();
        let mut b = MfccConfig::desk();
        b.hop = 128;
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), MfccConfig::desk().fingerprint());
    }

    #[test]
    fn determinism_bit_identical() {
        let cfg = MfccConfig::desk();
        let bank = build_mel_bank(&cfg).unwrap();
        let seg = random_segment(&cfg, 3, 1250, 67);
        let a = mfcc_segment(&seg, &bank, &cfg).unwrap();
        let b = mfcc_segment(&seg, &bank, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
