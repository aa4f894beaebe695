//! Multiplication-count model of the per-frame feature extraction:
//! `C * (N/2 * log2(N) + M*N + M*L)` for the FFT, the mel filtering and
//! the DCT of the retained coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostParams {
    /// Channel count C.
    pub channels: u64,
    /// Frame length N (power of two).
    pub frame_len: u64,
    /// Mel filter count M.
    pub num_filters: u64,
    /// Retained coefficient count L.
    pub retained: u64,
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        if self.channels == 0 || self.frame_len == 0 || self.num_filters == 0 || self.retained == 0
        {
            return Err(Error::config("all cost parameters must be >= 1"));
        }
        if self.frame_len & (self.frame_len - 1) != 0 {
            return Err(Error::config(format!(
                "frame length must be a power of two, got {}",
                self.frame_len
            )));
        }
        Ok(())
    }
}

/// Total multiplications per segment-frame across all channels.
pub fn estimate_cost(params: &CostParams) -> Result<u64> {
    params.validate()?;
    let log2n = params.frame_len.trailing_zeros() as u64;
    let per_channel = params.frame_len / 2 * log2n
        + params.num_filters * params.frame_len
        + params.num_filters * params.retained;
    Ok(params.channels * per_channel)
}
