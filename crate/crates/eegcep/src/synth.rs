//! Deterministic synthetic EEG and ocular-artifact generation: 1/f-shaped
//! background with alpha/beta rhythms, low-frequency artifact kernels per
//! eye-movement class, convolutional or additive contamination, and
//! label-complete dataset assembly with a stratified train/validation
//! split.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::artifact::ClassLabel;
use crate::error::{Error, Result};
use crate::segment::EegSegment;

/// How artifact energy enters the clean signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContaminationMode {
    /// Mix in the difference between the kernel-convolved signal and the
    /// signal itself, scaled to the target amplitude ratio.
    Convolve,
    /// Add the kernel template at a seeded onset.
    Add,
}

/// Generation recipe for one dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub fs: f64,
    pub segment_seconds: f64,
    pub channels: usize,
    pub seed: u64,
    /// Segment count per class.
    pub class_mix: BTreeMap<ClassLabel, usize>,
    /// Artifact-to-EEG amplitude ratio in dB.
    pub snr_db: f64,
    pub mode: ContaminationMode,
    /// Baseline EEG amplitude scale in microvolts.
    pub amplitude: f64,
    /// Fraction of each class assigned to the training split.
    pub train_fraction: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            fs: 250.0,
            segment_seconds: 5.0,
            channels: 7,
            seed: 0,
            class_mix: BTreeMap::new(),
            snr_db: 20.0,
            mode: ContaminationMode::Convolve,
            amplitude: 30.0,
            train_fraction: 0.8,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.fs > 0.0) {
            return Err(Error::config("fs must be > 0"));
        }
        if !(self.segment_seconds > 0.0) {
            return Err(Error::config("segment_seconds must be > 0"));
        }
        if self.channels == 0 {
            return Err(Error::config("channels must be >= 1"));
        }
        if !self.snr_db.is_finite() || !self.amplitude.is_finite() || self.amplitude < 0.0 {
            return Err(Error::config("snr_db and amplitude must be finite, amplitude >= 0"));
        }
        if !(0.0 < self.train_fraction && self.train_fraction < 1.0) {
            return Err(Error::config(format!(
                "train_fraction must be in (0,1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }

    pub fn segment_len(&self) -> usize {
        (self.fs * self.segment_seconds).round() as usize
    }
}

fn channel_rng(seed: u64, segment_index: usize, channel: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed ^ (segment_index as u64).wrapping_mul(0x9e3779b97f4a7c15)
            ^ (channel as u64).wrapping_mul(0xd1b54a32d192ed03),
    )
}

/// Clean prefrontal EEG: a 0.5-30 Hz comb of seeded sinusoids with
/// 1/f^alpha amplitude decay (alpha drawn per segment), boosted alpha and
/// beta rhythms, and a trace of wideband noise. Deterministic per
/// (seed, segment index, channel).
pub fn gen_clean_eeg(spec: &SynthSpec, segment_index: usize) -> Result<EegSegment> {
    spec.validate()?;
    let n = spec.segment_len();
    let mut seg_rng = ChaCha8Rng::seed_from_u64(
        spec.seed ^ 0x5eed ^ (segment_index as u64).wrapping_mul(0x9e3779b97f4a7c15),
    );
    // per-segment spectral slope; the dominant source of low-dimension
    // cepstral variance across segments
    let slope = seg_rng.gen_range(0.7..1.7);
    let max_f = (spec.fs / 2.0 - 1.0).min(30.0);

    let mut channels = Vec::with_capacity(spec.channels);
    for c in 0..spec.channels {
        let mut rng = channel_rng(spec.seed, segment_index, c);
        let mut parts: Vec<(f64, f64, f64)> = Vec::new(); // (freq, amp, phase)
        let mut f = 0.5;
        while f <= max_f {
            let amp = spec.amplitude * rng.gen_range(0.5..1.5) / f.powf(slope);
            parts.push((f, amp, rng.gen_range(0.0..std::f64::consts::TAU)));
            f += 0.5;
        }
        // rhythm bursts
        let alpha_f = rng.gen_range(8.0..13.0f64).min(max_f);
        let beta_f = rng.gen_range(13.0..30.0f64).min(max_f);
        parts.push((
            alpha_f,
            spec.amplitude * rng.gen_range(0.3..0.8),
            rng.gen_range(0.0..std::f64::consts::TAU),
        ));
        parts.push((
            beta_f,
            spec.amplitude * rng.gen_range(0.1..0.4),
            rng.gen_range(0.0..std::f64::consts::TAU),
        ));

        let mut samples = Vec::with_capacity(n);
        for t in 0..n {
            let time = t as f64 / spec.fs;
            let mut v = 0.0;
            for &(freq, amp, phase) in &parts {
                v += amp * (std::f64::consts::TAU * freq * time + phase).sin();
            }
            v += spec.amplitude * 0.02 * rng.gen_range(-1.0..1.0);
            samples.push(v);
        }
        channels.push(samples);
    }
    EegSegment::new(channels, spec.fs)
}

/// Low-frequency template of one artifact class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactKernel {
    pub kind: ClassLabel,
    pub waveform: Vec<f64>,
    pub duration_ms: f64,
}

fn hann_bump(len: usize) -> impl Fn(usize) -> f64 {
    move |t| {
        let x = t as f64 / (len - 1) as f64;
        0.5 - 0.5 * (std::f64::consts::TAU * x).cos()
    }
}

/// Inter-pulse delay per class, in seconds. The delay is the class's
/// cepstral signature: convolving with a pulse pair ripples the log
/// spectrum at the matching quefrency, which lands in one retained
/// cepstral dimension (delay x 250 under the desk analysis band).
pub fn class_delay_seconds(kind: ClassLabel) -> f64 {
    match kind {
        ClassLabel::Clean => 0.0,
        ClassLabel::BlinkHard => 0.032,
        ClassLabel::LookUp => 0.016,
        ClassLabel::LookDown => 0.024,
        ClassLabel::LookLeft => 0.040,
        ClassLabel::LookRight => 0.048,
    }
}

/// One artifact kernel: a slow wave (the ocular deflection, carrying the
/// class polarity) with 2-3 sharp pulses at the class's echo delay
/// superimposed. Pulse amplitudes and the slow-wave magnitude jitter by
/// seed; the delay encodes the class, with blinks additionally wobbling
/// by one sample so their signature occupies a small quefrency
/// neighbourhood rather than a single line. Spatial asymmetry across
/// channel halves is applied at contamination time.
pub fn gen_artifact_kernel(kind: ClassLabel, fs: f64, seed: u64) -> Result<ArtifactKernel> {
    if kind == ClassLabel::Clean {
        return Err(Error::domain("no artifact kernel for the clean class"));
    }
    if !(fs > 0.0) {
        return Err(Error::domain("fs must be > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (kind.index() as u64) << 17);
    let mut delay = (class_delay_seconds(kind) * fs).round() as usize;
    if kind == ClassLabel::BlinkHard {
        delay = (delay as i64 + rng.gen_range(-1i64..=1)).max(1) as usize;
    }
    let sign = if kind == ClassLabel::LookDown { -1.0 } else { 1.0 };

    let pulses = if kind == ClassLabel::BlinkHard {
        rng.gen_range(2..=3usize)
    } else {
        2
    };
    let bump_width = ((rng.gen_range(0.4..0.55) * fs).round() as usize).max(8);
    let bump_amp = rng.gen_range(0.06..0.12);
    let len = bump_width.max(pulses.saturating_sub(1) * delay + 1);

    let bump = hann_bump(bump_width);
    let mut w: Vec<f64> = (0..len)
        .map(|t| if t < bump_width { sign * bump_amp * bump(t) } else { 0.0 })
        .collect();
    for p in 0..pulses {
        // the echo-to-peak ratio varies from blink to blink; together with
        // the delay wobble, the spread in ripple depth is what makes the
        // signature dimensions stand out against the stable background
        let amp = if p == 0 { 1.0 } else { rng.gen_range(0.5..1.0) };
        w[p * delay] += sign * amp;
    }
    let duration_ms = w.len() as f64 / fs * 1000.0;
    Ok(ArtifactKernel {
        kind,
        waveform: w,
        duration_ms,
    })
}

/// Per-channel spatial weights of a kernel class. Gaze-direction classes
/// split the montage in halves with asymmetric magnitude and opposite
/// polarity; the vertical classes decay gently across the montage.
pub fn spatial_weights(kind: ClassLabel, channels: usize) -> Vec<f64> {
    let half = channels.div_ceil(2);
    (0..channels)
        .map(|c| {
            let taper = 1.0 - 0.3 * c as f64 / channels.max(2) as f64;
            match kind {
                ClassLabel::LookLeft => {
                    if c < half {
                        1.0
                    } else {
                        -0.55
                    }
                }
                // sign-flip of lookLeft: identical magnitudes, opposite
                // polarity, so the pair is only separable through spectral
                // (delay) structure, not per-channel power
                ClassLabel::LookRight => {
                    if c < half {
                        -1.0
                    } else {
                        0.55
                    }
                }
                _ => taper,
            }
        })
        .collect()
}

fn direct_convolve_truncated(signal: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = signal.len();
    let mut out = vec![0.0; n];
    for (t, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &k) in kernel.iter().enumerate() {
            if j > t {
                break;
            }
            acc += k * signal[t - j];
        }
        *o = acc;
    }
    out
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Contaminate a clean segment with one artifact kernel at the requested
/// amplitude ratio. Convolve mode forms a convex blend of the signal with
/// its DC-normalized convolution, weighted `gamma*|w| / (1 + gamma*|w|)`
/// per channel, so a unit-impulse kernel leaves the segment untouched at
/// any ratio; add mode drops the scaled template at a seeded onset.
pub fn contaminate(
    clean: &EegSegment,
    kernel: &ArtifactKernel,
    snr_db: f64,
    mode: ContaminationMode,
    seed: u64,
) -> Result<EegSegment> {
    if kernel.waveform.len() >= clean.len() {
        return Err(Error::domain(format!(
            "kernel of {} samples does not fit a {}-sample segment",
            kernel.waveform.len(),
            clean.len()
        )));
    }
    if kernel.waveform.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("kernel has non-finite samples"));
    }
    let gamma = 10f64.powf(snr_db / 20.0);
    let weights = spatial_weights(kernel.kind, clean.channel_count());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa57e);

    let mut channels = Vec::with_capacity(clean.channel_count());
    match mode {
        ContaminationMode::Convolve => {
            let dc: f64 = kernel.waveform.iter().sum();
            let norm: Vec<f64> = if dc.abs() > 1e-12 {
                kernel.waveform.iter().map(|v| v / dc).collect()
            } else {
                // zero-DC kernels (biphasic) normalize by l1 mass instead
                let l1: f64 = kernel.waveform.iter().map(|v| v.abs()).sum();
                kernel.waveform.iter().map(|v| v / l1).collect()
            };
            for (c, w) in weights.iter().enumerate() {
                let s = clean.channel(c);
                let conv = direct_convolve_truncated(s, &norm);
                let gw = gamma * w.abs();
                let lambda = gw / (1.0 + gw);
                channels.push(
                    s.iter()
                        .zip(&conv)
                        .map(|(x, y)| (1.0 - lambda) * x + lambda * y)
                        .collect(),
                );
            }
        }
        ContaminationMode::Add => {
            let onset = rng.gen_range(0..clean.len() - kernel.waveform.len());
            let k_rms = rms(&kernel.waveform);
            for (c, w) in weights.iter().enumerate() {
                let s = clean.channel(c);
                // the template occupies only part of the segment; match
                // the ratio on segment-wide rms
                let occupancy = kernel.waveform.len() as f64 / s.len() as f64;
                let scale = if k_rms > 0.0 {
                    gamma * rms(s) / (k_rms * occupancy.sqrt())
                } else {
                    0.0
                };
                let mut out = s.to_vec();
                for (j, &kv) in kernel.waveform.iter().enumerate() {
                    out[onset + j] += scale * w * kv;
                }
                channels.push(out);
            }
        }
    }
    EegSegment::new(channels, clean.fs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
}

/// One generated segment with its provenance.
#[derive(Debug, Clone)]
pub struct SynthRecord {
    pub segment: EegSegment,
    pub label: ClassLabel,
    pub split: Split,
    /// The uncontaminated source, kept for artifact classes so removal
    /// profiling can pair each contaminated segment with its clean base.
    pub clean_base: Option<EegSegment>,
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub records: Vec<SynthRecord>,
    pub spec: SynthSpec,
}

impl SynthDataset {
    pub fn of_split(&self, split: Split) -> impl Iterator<Item = &SynthRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }
}

/// Generate the full dataset: `class_mix` counts of each class, artifact
/// segments built by contaminating fresh clean bases, and a stratified
/// seeded train/validation split. Fully deterministic from the spec.
pub fn make_dataset(spec: &SynthSpec) -> Result<SynthDataset> {
    spec.validate()?;
    if spec.class_mix.values().all(|&c| c == 0) {
        return Err(Error::domain("class_mix has no segments"));
    }
    let mut records = Vec::new();
    let mut global_index = 0usize;
    for (&label, &count) in &spec.class_mix {
        for i in 0..count {
            // clean bases are indexed within the class so that the i-th clean
            // segment and the i-th segment of each artifact class share a
            // base; removal profiling relies on that pairing
            let clean = gen_clean_eeg(spec, i)?;
            let record = if label == ClassLabel::Clean {
                SynthRecord {
                    segment: clean,
                    label,
                    split: Split::Train,
                    clean_base: None,
                }
            } else {
                let kernel_seed = spec
                    .seed
                    .wrapping_mul(0x2545f4914f6cdd1d)
                    .wrapping_add(global_index as u64);
                let kernel = gen_artifact_kernel(label, spec.fs, kernel_seed)?;
                let contaminated =
                    contaminate(&clean, &kernel, spec.snr_db, spec.mode, kernel_seed ^ i as u64)?;
                SynthRecord {
                    segment: contaminated,
                    label,
                    split: Split::Train,
                    clean_base: Some(clean),
                }
            };
            records.push(record);
            global_index += 1;
        }
    }
    // stratified split: per class, shuffle that class's record positions
    // and send the first train_fraction to Train. The shuffle restarts
    // from the same seed for every class, so equal-count classes select
    // the same base indices and each split keeps the clean/artifact
    // pairing intact
    for &label in spec.class_mix.keys() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5911);
        let mut idx: Vec<usize> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label == label)
            .map(|(i, _)| i)
            .collect();
        idx.shuffle(&mut rng);
        let n_train = (idx.len() as f64 * spec.train_fraction).round() as usize;
        for (pos, &i) in idx.iter().enumerate() {
            records[i].split = if pos < n_train {
                Split::Train
            } else {
                Split::Validation
            };
        }
    }
    Ok(SynthDataset {
        records,
        spec: spec.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cepstrum::{band_power_features, default_bands, MfccConfig};

    fn base_spec() -> SynthSpec {
        SynthSpec {
            seed: 7,
            ..SynthSpec::default()
        }
    }

    #[test]
    fn clean_eeg_deterministic() {
        let spec = base_spec();
        let a = gen_clean_eeg(&spec, 3).unwrap();
        let b = gen_clean_eeg(&spec, 3).unwrap();
        assert_eq!(a.channels(), b.channels());
        let c = gen_clean_eeg(&spec, 4).unwrap();
        assert_ne!(a.channels(), c.channels());
    }

    #[test]
    fn clean_eeg_zero_amplitude() {
        let spec = SynthSpec {
            amplitude: 0.0,
            ..base_spec()
        };
        let seg = gen_clean_eeg(&spec, 0).unwrap();
        for ch in seg.channels() {
            assert!(ch.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn clean_eeg_energy_in_band() {
        let spec = base_spec();
        let cfg = MfccConfig::desk();
        for i in 0..5 {
            let seg = gen_clean_eeg(&spec, i).unwrap();
            let bands = vec![(0.5, 30.0), (30.0, 125.0)];
            let fv = band_power_features(&seg, &bands, &cfg).unwrap();
            for chunk in fv.coeffs.chunks(2) {
                let in_band = chunk[0];
                let out_band = chunk[1];
                assert!(
                    in_band >= 9.0 * out_band,
                    "0.5-30 Hz carries {in_band} vs {out_band} above"
                );
            }
        }
    }

    #[test]
    fn kernel_polarity() {
        let up = gen_artifact_kernel(ClassLabel::LookUp, 250.0, 1).unwrap();
        assert!(up.waveform.iter().sum::<f64>() > 0.0);
        let down = gen_artifact_kernel(ClassLabel::LookDown, 250.0, 1).unwrap();
        assert!(down.waveform.iter().sum::<f64>() < 0.0);
    }

    #[test]
    fn kernel_rejects_clean() {
        assert!(gen_artifact_kernel(ClassLabel::Clean, 250.0, 1).is_err());
    }

    #[test]
    fn blink_kernel_has_multiple_pulses() {
        for seed in 0..10 {
            let k = gen_artifact_kernel(ClassLabel::BlinkHard, 250.0, seed).unwrap();
            // count disjoint runs of significant positive amplitude
            let peak = k.waveform.iter().cloned().fold(0.0, f64::max);
            let mut pulses = 0;
            let mut inside = false;
            for &v in &k.waveform {
                let hot = v > 0.3 * peak;
                if hot && !inside {
                    pulses += 1;
                }
                inside = hot;
            }
            assert!((2..=3).contains(&pulses), "seed {seed}: {pulses} pulses");
        }
    }

    /// Lag of the strongest non-zero autocorrelation peak, i.e. the echo
    /// delay realized in the waveform.
    fn echo_lag(w: &[f64]) -> usize {
        let mut best = (0usize, 0.0f64);
        for lag in 1..w.len() {
            let acc: f64 = w[lag..].iter().zip(w).map(|(a, b)| a * b).sum();
            if acc.abs() > best.1 {
                best = (lag, acc.abs());
            }
        }
        best.0
    }

    #[test]
    fn kernel_echo_lag_encodes_class() {
        let fs = 250.0;
        for seed in 0..20u64 {
            for kind in [
                ClassLabel::BlinkHard,
                ClassLabel::LookUp,
                ClassLabel::LookDown,
                ClassLabel::LookLeft,
                ClassLabel::LookRight,
            ] {
                let nominal = (class_delay_seconds(kind) * fs).round() as i64;
                let lag = echo_lag(&gen_artifact_kernel(kind, fs, seed).unwrap().waveform) as i64;
                let slack = i64::from(kind == ClassLabel::BlinkHard);
                assert!(
                    (lag - nominal).abs() <= slack,
                    "{kind:?} seed {seed}: echo lag {lag}, nominal {nominal}"
                );
            }
        }
    }

    #[test]
    fn contaminate_identity_kernel_is_noop() {
        let spec = base_spec();
        let clean = gen_clean_eeg(&spec, 0).unwrap();
        let mut kernel = gen_artifact_kernel(ClassLabel::LookUp, spec.fs, 1).unwrap();
        kernel.waveform = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let out = contaminate(&clean, &kernel, 20.0, ContaminationMode::Convolve, 5).unwrap();
        for (a, b) in clean.channels().iter().zip(out.channels()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn contaminate_add_zero_kernel_is_noop() {
        let spec = base_spec();
        let clean = gen_clean_eeg(&spec, 0).unwrap();
        let mut kernel = gen_artifact_kernel(ClassLabel::LookUp, spec.fs, 1).unwrap();
        for v in &mut kernel.waveform {
            *v = 0.0;
        }
        let out = contaminate(&clean, &kernel, 20.0, ContaminationMode::Add, 5).unwrap();
        assert_eq!(clean.channels(), out.channels());
    }

    #[test]
    fn contaminate_matches_direct_convolution_oracle() {
        let spec = base_spec();
        let clean = gen_clean_eeg(&spec, 1).unwrap();
        let kernel = gen_artifact_kernel(ClassLabel::LookDown, spec.fs, 2).unwrap();
        let out = contaminate(&clean, &kernel, 20.0, ContaminationMode::Convolve, 3).unwrap();

        let gamma = 10f64.powf(1.0); // +20 dB
        let dc: f64 = kernel.waveform.iter().sum();
        let norm: Vec<f64> = kernel.waveform.iter().map(|v| v / dc).collect();
        let weights = spatial_weights(kernel.kind, clean.channel_count());
        for c in 0..clean.channel_count() {
            let s = clean.channel(c);
            let gw = gamma * weights[c].abs();
            let lambda = gw / (1.0 + gw);
            for t in 0..s.len() {
                let mut acc = 0.0;
                for (j, &k) in norm.iter().enumerate() {
                    if j <= t {
                        acc += k * s[t - j];
                    }
                }
                let expect = (1.0 - lambda) * s[t] + lambda * acc;
                assert!(
                    (out.channel(c)[t] - expect).abs() < 1e-9,
                    "channel {c} sample {t}"
                );
            }
        }
    }

    #[test]
    fn contaminate_rejects_oversize_kernel() {
        let spec = SynthSpec {
            segment_seconds: 0.1,
            ..base_spec()
        };
        let clean = gen_clean_eeg(&spec, 0).unwrap();
        let kernel = gen_artifact_kernel(ClassLabel::LookDown, spec.fs, 1).unwrap();
        assert!(contaminate(&clean, &kernel, 20.0, ContaminationMode::Convolve, 1).is_err());
    }

    #[test]
    fn contamination_concentrates_energy_in_delta() {
        // convolve mode preserves the lowest frequencies and attenuates
        // everything above the kernel's slow wave, so the delta share of
        // broadband power rises; add mode injects slow-wave energy, so
        // absolute delta power rises too
        let spec = base_spec();
        let cfg = MfccConfig::desk();
        let bands = default_bands();
        for (i, kind) in [
            ClassLabel::BlinkHard,
            ClassLabel::LookUp,
            ClassLabel::LookDown,
            ClassLabel::LookLeft,
            ClassLabel::LookRight,
        ]
        .iter()
        .enumerate()
        {
            let clean = gen_clean_eeg(&spec, i).unwrap();
            let kernel = gen_artifact_kernel(*kind, spec.fs, i as u64).unwrap();
            let dirty =
                contaminate(&clean, &kernel, 10.0, ContaminationMode::Convolve, i as u64).unwrap();
            let pc = band_power_features(&clean, &bands, &cfg).unwrap();
            let pd = band_power_features(&dirty, &bands, &cfg).unwrap();
            // bands are [delta, theta, alpha, beta, broadband] per channel
            let clean_share = pc.coeffs[0] / pc.coeffs[4];
            let dirty_share = pd.coeffs[0] / pd.coeffs[4];
            assert!(
                dirty_share > clean_share,
                "{kind:?}: delta share {dirty_share} !> {clean_share}"
            );

            // whole-segment delta power, so the seeded onset cannot fall
            // outside the framed region
            let delta_power = |seg: &EegSegment| -> f64 {
                let n = seg.len() as f64;
                let mut acc = 0.0;
                for ch in seg.channels() {
                    for step in 1..=8 {
                        let f = step as f64 * 0.5;
                        let (mut re, mut im) = (0.0, 0.0);
                        for (t, &v) in ch.iter().enumerate() {
                            let ang = std::f64::consts::TAU * f * t as f64 / spec.fs;
                            re += v * ang.cos();
                            im += v * ang.sin();
                        }
                        acc += (re * re + im * im) / n;
                    }
                }
                acc
            };
            let added =
                contaminate(&clean, &kernel, 10.0, ContaminationMode::Add, i as u64).unwrap();
            let (pa, pc) = (delta_power(&added), delta_power(&clean));
            assert!(pa > pc, "{kind:?}: added delta {pa} !> {pc}");
        }
    }

    #[test]
    fn dataset_counts_and_determinism() {
        let mut mix = BTreeMap::new();
        mix.insert(ClassLabel::Clean, 10);
        mix.insert(ClassLabel::BlinkHard, 10);
        let spec = SynthSpec {
            class_mix: mix,
            segment_seconds: 3.0,
            ..base_spec()
        };
        let a = make_dataset(&spec).unwrap();
        assert_eq!(a.records.len(), 20);
        assert_eq!(
            a.records.iter().filter(|r| r.label == ClassLabel::Clean).count(),
            10
        );
        let b = make_dataset(&spec).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.segment.channels(), y.segment.channels());
            assert_eq!(x.split, y.split);
        }
        for r in &a.records {
            assert_eq!(r.clean_base.is_some(), r.label.is_artifact());
        }
    }

    #[test]
    fn dataset_split_stratified() {
        let mut mix = BTreeMap::new();
        mix.insert(ClassLabel::Clean, 20);
        mix.insert(ClassLabel::LookUp, 15);
        mix.insert(ClassLabel::LookLeft, 10);
        let spec = SynthSpec {
            class_mix: mix.clone(),
            segment_seconds: 3.0,
            ..base_spec()
        };
        let ds = make_dataset(&spec).unwrap();
        for (&label, &count) in &mix {
            let train = ds
                .records
                .iter()
                .filter(|r| r.label == label && r.split == Split::Train)
                .count();
            let expect = count as f64 * spec.train_fraction;
            assert!(
                (train as f64 - expect).abs() <= 1.0,
                "{label}: {train} train of {count}"
            );
        }
    }

    #[test]
    fn dataset_rejects_empty_mix() {
        let spec = base_spec();
        assert!(make_dataset(&spec).is_err());
    }

    #[test]
    fn no_nan_anywhere() {
        let mut mix = BTreeMap::new();
        for label in ClassLabel::ALL {
            mix.insert(label, 2);
        }
        let spec = SynthSpec {
            class_mix: mix,
            segment_seconds: 3.0,
            ..base_spec()
        };
        let ds = make_dataset(&spec).unwrap();
        for r in &ds.records {
            for ch in r.segment.channels() {
                assert!(ch.iter().all(|v| v.is_finite()));
            }
        }
    }
}
