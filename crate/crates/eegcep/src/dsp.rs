//! Deterministic signal primitives: pre-emphasis, framing, windowing,
//! radix-2 FFT, orthonormal DCT-II, and weighted overlap-add synthesis.
//!
//! All operations are pure functions on immutable inputs and are safe to
//! call concurrently.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A single-channel signal with its sampling rate (samples in µV, fs in Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs > 0.0) || !fs.is_finite() {
            return Err(Error::domain(format!("sampling rate must be > 0, got {fs}")));
        }
        if let Some(n) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite sample at index {n}")));
        }
        Ok(Signal { samples, fs })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// One analysis frame of a signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    samples: Vec<f64>,
    index: usize,
    start_offset: usize,
}

impl Frame {
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn start_offset(&self) -> usize {
        self.start_offset
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Build a standalone frame, mainly for tests and reconstruction paths.
    pub fn from_samples(samples: Vec<f64>, index: usize, start_offset: usize) -> Frame {
        Frame {
            samples,
            index,
            start_offset,
        }
    }
}

/// One-sided magnitude/phase spectrum over bins 0..N/2.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    magnitudes: Vec<f64>,
    phases: Vec<f64>,
}

impl Spectrum {
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }
}

/// First-order high-pass difference `out[n] = in[n] - beta * in[n-1]`,
/// with the first sample passed through unchanged.
pub fn pre_emphasize(signal: &Signal, beta: f64) -> Result<Signal> {
    if signal.is_empty() {
        return Err(Error::domain("pre-emphasis of an empty signal"));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::domain(format!("beta must be in [0, 1), got {beta}")));
    }
    let x = signal.samples();
    let mut out = Vec::with_capacity(x.len());
    out.push(x[0]);
    for n in 1..x.len() {
        out.push(x[n] - beta * x[n - 1]);
    }
    Ok(Signal {
        samples: out,
        fs: signal.fs,
    })
}

/// Exact inverse of [`pre_emphasize`]: `b[n] = c[n] + beta * b[n-1]`.
pub fn de_emphasize(signal: &Signal, beta: f64) -> Result<Signal> {
    if signal.is_empty() {
        return Err(Error::domain("de-emphasis of an empty signal"));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::domain(format!("beta must be in [0, 1), got {beta}")));
    }
    let c = signal.samples();
    let mut out = Vec::with_capacity(c.len());
    out.push(c[0]);
    for n in 1..c.len() {
        let prev = out[n - 1];
        out.push(c[n] + beta * prev);
    }
    Ok(Signal {
        samples: out,
        fs: signal.fs,
    })
}

/// Slice a signal into complete frames of `frame_len` samples every `hop`
/// samples. An incomplete tail is dropped.
pub fn frame_signal(signal: &Signal, frame_len: usize, hop: usize) -> Result<Vec<Frame>> {
    if frame_len == 0 {
        return Err(Error::domain("frame length must be >= 1"));
    }
    if hop == 0 || hop > frame_len {
        return Err(Error::domain(format!(
            "hop must satisfy 1 <= hop <= frameLen, got hop={hop} frameLen={frame_len}"
        )));
    }
    let len = signal.len();
    if len < frame_len {
        return Err(Error::domain(format!(
            "segment too short: {len} samples, frame length {frame_len}"
        )));
    }
    let count = (len - frame_len) / hop + 1;
    let mut frames = Vec::with_capacity(count);
    for i in 0..count {
        let start = i * hop;
        frames.push(Frame {
            samples: signal.samples()[start..start + frame_len].to_vec(),
            index: i,
            start_offset: start,
        });
    }
    Ok(frames)
}

/// Symmetric Hamming window `w[n] = 0.54 - 0.46 cos(2 pi n / (N-1))`.
pub fn hamming_window(frame_len: usize) -> Result<Vec<f64>> {
    if frame_len < 2 {
        return Err(Error::domain(format!(
            "Hamming window needs frameLen >= 2, got {frame_len}"
        )));
    }
    let denom = (frame_len - 1) as f64;
    Ok((0..frame_len)
        .map(|n| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / denom).cos())
        .collect())
}

fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// In-place iterative radix-2 FFT. Length must be a power of two.
pub fn fft_in_place(buf: &mut [f64], imag: &mut [f64]) {
    let n = buf.len();
    debug_assert!(is_power_of_two(n));
    debug_assert_eq!(imag.len(), n);
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
            imag.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = -2.0 * std::f64::consts::PI / len as f64;
        let (ws, wc) = ang.sin_cos();
        let wstep = Complex64::new(wc, ws);
        let mut i = 0;
        while i < n {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let a = Complex64::new(buf[i + k], imag[i + k]);
                let b = Complex64::new(buf[i + k + len / 2], imag[i + k + len / 2]) * w;
                let u = a + b;
                let v = a - b;
                buf[i + k] = u.re;
                imag[i + k] = u.im;
                buf[i + k + len / 2] = v.re;
                imag[i + k + len / 2] = v.im;
                w *= wstep;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// Forward FFT of a real frame; returns the full complex spectrum.
pub fn fft_real(frame: &[f64]) -> Result<Vec<Complex64>> {
    if !is_power_of_two(frame.len()) {
        return Err(Error::domain(format!(
            "FFT length must be a power of two, got {}",
            frame.len()
        )));
    }
    let mut re: Vec<f64> = frame.to_vec();
    let mut im = vec![0.0; frame.len()];
    fft_in_place(&mut re, &mut im);
    Ok(re
        .into_iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(r, i))
        .collect())
}

/// Inverse FFT; returns the real part (imaginary residue is discarded).
pub fn ifft_real(spectrum: &[Complex64]) -> Result<Vec<f64>> {
    let n = spectrum.len();
    if !is_power_of_two(n) {
        return Err(Error::domain(format!(
            "iFFT length must be a power of two, got {n}"
        )));
    }
    let mut re: Vec<f64> = spectrum.iter().map(|c| c.re).collect();
    let mut im: Vec<f64> = spectrum.iter().map(|c| -c.im).collect();
    fft_in_place(&mut re, &mut im);
    let scale = 1.0 / n as f64;
    Ok(re.into_iter().map(|r| r * scale).collect())
}

/// Magnitude and phase of the one-sided spectrum of a frame, optionally
/// Hamming-windowed before the transform.
pub fn fft_magnitude_phase(frame: &Frame, windowed: bool) -> Result<Spectrum> {
    let n = frame.len();
    if !is_power_of_two(n) {
        return Err(Error::domain(format!(
            "frame length must be a power of two, got {n}"
        )));
    }
    let spectrum = if windowed {
        let w = hamming_window(n)?;
        let buf: Vec<f64> = frame
            .samples()
            .iter()
            .zip(&w)
            .map(|(x, wn)| x * wn)
            .collect();
        fft_real(&buf)?
    } else {
        fft_real(frame.samples())?
    };
    let half = n / 2 + 1;
    let mut magnitudes = Vec::with_capacity(half);
    let mut phases = Vec::with_capacity(half);
    for c in &spectrum[..half] {
        magnitudes.push(c.norm());
        phases.push(c.arg());
    }
    Ok(Spectrum { magnitudes, phases })
}

/// Rebuild the full hermitian spectrum from one-sided magnitudes and phases
/// and transform back to a real frame of length `n`.
pub fn spectrum_to_frame(magnitudes: &[f64], phases: &[f64], n: usize) -> Result<Vec<f64>> {
    let half = n / 2 + 1;
    if magnitudes.len() != half || phases.len() != half {
        return Err(Error::domain(format!(
            "one-sided spectrum must have {half} bins, got {}",
            magnitudes.len()
        )));
    }
    let mut full = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..half {
        full[k] = Complex64::from_polar(magnitudes[k], phases[k]);
    }
    for k in 1..n / 2 {
        full[n - k] = full[k].conj();
    }
    ifft_real(&full)
}

/// Orthonormal DCT-II. Coefficient 0 carries the scaled mean.
pub fn dct2(values: &[f64]) -> Result<Vec<f64>> {
    let m = values.len();
    if m == 0 {
        return Err(Error::domain("DCT of empty input"));
    }
    let mf = m as f64;
    let s0 = (1.0 / mf).sqrt();
    let s = (2.0 / mf).sqrt();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let mut acc = 0.0;
        for (n, v) in values.iter().enumerate() {
            acc += v * (std::f64::consts::PI * (n as f64 + 0.5) * k as f64 / mf).cos();
        }
        out.push(acc * if k == 0 { s0 } else { s });
    }
    Ok(out)
}

/// Inverse of [`dct2`] (orthonormal DCT-III).
pub fn idct2(coeffs: &[f64]) -> Result<Vec<f64>> {
    let m = coeffs.len();
    if m == 0 {
        return Err(Error::domain("inverse DCT of empty input"));
    }
    let mf = m as f64;
    let s0 = (1.0 / mf).sqrt();
    let s = (2.0 / mf).sqrt();
    let mut out = Vec::with_capacity(m);
    for n in 0..m {
        let mut acc = s0 * coeffs[0];
        for (k, c) in coeffs.iter().enumerate().skip(1) {
            acc += s * c * (std::f64::consts::PI * (n as f64 + 0.5) * k as f64 / mf).cos();
        }
        out.push(acc);
    }
    Ok(out)
}

/// Weighted overlap-add synthesis.
///
/// `frames` are assumed to carry one analysis window already; each is
/// multiplied by `synthesis_weights` at its hop offset and the sum is
/// normalized per sample by the summed squared synthesis window, so the
/// round trip of unmodified windowed frames reproduces the covered samples.
pub fn overlap_add(frames: &[Vec<f64>], hop: usize, synthesis_weights: &[f64], fs: f64) -> Result<Signal> {
    if frames.is_empty() {
        return Err(Error::domain("overlap-add of zero frames"));
    }
    let frame_len = frames[0].len();
    if frame_len == 0 {
        return Err(Error::domain("overlap-add of empty frames"));
    }
    for (i, f) in frames.iter().enumerate() {
        if f.len() != frame_len {
            return Err(Error::domain(format!(
                "inconsistent frame lengths: frame {i} has {}, frame 0 has {frame_len}",
                f.len()
            )));
        }
    }
    if synthesis_weights.len() != frame_len {
        return Err(Error::domain(format!(
            "synthesis window length {} does not match frame length {frame_len}",
            synthesis_weights.len()
        )));
    }
    if hop == 0 {
        return Err(Error::domain("hop must be >= 1"));
    }
    let out_len = (frames.len() - 1) * hop + frame_len;
    let mut num = vec![0.0; out_len];
    let mut den = vec![0.0; out_len];
    for (j, frame) in frames.iter().enumerate() {
        let off = j * hop;
        for (t, (&x, &w)) in frame.iter().zip(synthesis_weights).enumerate() {
            num[off + t] += w * x;
            den[off + t] += w * w;
        }
    }
    let samples = num
        .into_iter()
        .zip(den)
        .map(|(s, d)| if d > 0.0 { s / d } else { 0.0 })
        .collect();
    Signal::new(samples, fs)
}
