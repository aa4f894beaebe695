//! Multi-channel EEG segments, the unit of classification.

use crate::error::{Error, Result};

/// A fixed-duration multi-channel sample matrix with its sampling rate.
///
/// Channels are stored row-major (`channels[c][n]`, values in µV). All
/// channels have equal length and every value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EegSegment {
    channels: Vec<Vec<f64>>,
    fs: f64,
}

impl EegSegment {
    pub fn new(channels: Vec<Vec<f64>>, fs: f64) -> Result<Self> {
        if !(fs > 0.0) || !fs.is_finite() {
            return Err(Error::domain(format!("sampling rate must be > 0, got {fs}")));
        }
        if channels.is_empty() {
            return Err(Error::domain("segment must have at least one channel"));
        }
        let len = channels[0].len();
        if len == 0 {
            return Err(Error::domain("segment channels must be non-empty"));
        }
        for (c, ch) in channels.iter().enumerate() {
            if ch.len() != len {
                return Err(Error::domain(format!(
                    "ragged segment: channel {c} has {} samples, channel 0 has {len}",
                    ch.len()
                )));
            }
            if let Some(n) = ch.iter().position(|v| !v.is_finite()) {
                return Err(Error::domain(format!(
                    "non-finite sample in channel {c} at index {n}"
                )));
            }
        }
        Ok(EegSegment { channels, fs })
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.channels[c]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }
}
