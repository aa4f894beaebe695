//! Cepstral ocular artifact detection, recognition and removal for
//! multi-channel prefrontal EEG.
//!
//! The pipeline treats recorded EEG as a convolution of the underlying
//! brain signal with an eye-movement artifact, separates the two in the
//! cepstral (MFCC) domain, classifies artifacts with an RBF-SVM, and
//! removes them by renormalizing or zeroing artifact-dominated cepstral
//! dimensions before reconstructing the time-domain signal.
//!
//! Modules:
//! - [`dsp`] — pre-emphasis, framing, windowing, radix-2 FFT, DCT-II,
//!   overlap-add.
//! - [`cepstrum`] — mel filter bank, MFCC extraction, cepstral editing and
//!   segment reconstruction, FFT band-power features.
//! - [`stats`] — Pearson correlation, Kruskal-Wallis test, classification
//!   metrics.
//! - [`svm`] — RBF-SVM trained by SMO, one-vs-one multiclass, stratified
//!   k-fold CV with grid search.
//! - [`artifact`] — detection, 6-class recognition, removal profiles and
//!   the end-to-end removal algorithm.
//! - [`synth`] — deterministic synthetic EEG and artifact generation.
//! - [`io`] — segment CSV files, manifests, feature tables, model and
//!   report serialization.
//! - [`cost`] — the multiplication-count model of the pipeline.

pub mod artifact;
pub mod cepstrum;
pub mod cost;
pub mod dsp;
pub mod error;
pub mod io;
pub mod segment;
pub mod stats;
pub mod svm;
pub mod synth;

pub use error::{Error, Result};
pub use segment::EegSegment;
