//! The three tasks wired end to end: binary artifact detection, 6-class
//! recognition, correlation-based profiling of artifact-dominated cepstral
//! dimensions, the statistical removal transform, the unlabeled zero-out
//! variant, and the full removal algorithm with residual auditing.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cepstrum::{
    build_mel_bank, mfcc_segment, reconstruct_segment, CepstralEdit, EditOp, FeatureVector,
    MfccConfig,
};
use crate::error::{Error, Result};
use crate::segment::EegSegment;
use crate::stats::pearson;
use crate::svm::{svm_predict, SvmModel};

/// The six segment classes. `Clean` is the unique negative class for
/// detection; the other five are ocular artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    #[serde(rename = "clean")]
    Clean,
    #[serde(rename = "blinkHard")]
    BlinkHard,
    #[serde(rename = "lookUp")]
    LookUp,
    #[serde(rename = "lookDown")]
    LookDown,
    #[serde(rename = "lookLeft")]
    LookLeft,
    #[serde(rename = "lookRight")]
    LookRight,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 6] = [
        ClassLabel::Clean,
        ClassLabel::BlinkHard,
        ClassLabel::LookUp,
        ClassLabel::LookDown,
        ClassLabel::LookLeft,
        ClassLabel::LookRight,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClassLabel::Clean => "clean",
            ClassLabel::BlinkHard => "blinkHard",
            ClassLabel::LookUp => "lookUp",
            ClassLabel::LookDown => "lookDown",
            ClassLabel::LookLeft => "lookLeft",
            ClassLabel::LookRight => "lookRight",
        }
    }

    pub fn parse(s: &str) -> Result<ClassLabel> {
        ClassLabel::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown class label '{s}'")))
    }

    /// Dense id, matching the position in [`ClassLabel::ALL`].
    pub fn index(&self) -> usize {
        ClassLabel::ALL.iter().position(|l| l == self).unwrap()
    }

    pub fn is_artifact(&self) -> bool {
        *self != ClassLabel::Clean
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Class names of the binary detection task, in model order.
pub fn detection_class_names() -> Vec<String> {
    vec!["clean".to_string(), "artifact".to_string()]
}

/// Class names of the 6-class recognition task, in model order.
pub fn recognition_class_names() -> Vec<String> {
    ClassLabel::ALL.iter().map(|l| l.as_str().to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub is_artifact: bool,
    /// Signed decision value, positive on the artifact side.
    pub score: f64,
}

fn check_fingerprint(features: &FeatureVector, model: &SvmModel) -> Result<()> {
    if features.fingerprint != model.feature_fingerprint {
        return Err(Error::config(format!(
            "feature fingerprint {} does not match the model's {}; the model was \
             trained under a different extraction config",
            features.fingerprint, model.feature_fingerprint
        )));
    }
    Ok(())
}

/// Binary artifact detection with a clean-vs-artifact model.
pub fn detect(features: &FeatureVector, model: &SvmModel) -> Result<Detection> {
    if model.class_names.len() != 2 {
        return Err(Error::config(format!(
            "detection needs a 2-class model, this one has {} classes",
            model.class_names.len()
        )));
    }
    check_fingerprint(features, model)?;
    let artifact_id = model
        .class_names
        .iter()
        .position(|n| n == "artifact")
        .ok_or_else(|| Error::config("detection model lacks an 'artifact' class"))?;
    let machine = &model.machines[0];
    let d = model.machine_decision(machine, &features.coeffs);
    // orient the score so positive always means artifact
    let score = if machine.pair.0 == artifact_id { d } else { -d };
    Ok(Detection {
        is_artifact: score > 0.0,
        score,
    })
}

/// 6-class eye-movement recognition.
pub fn recognize(features: &FeatureVector, model: &SvmModel) -> Result<ClassLabel> {
    let expected = recognition_class_names();
    if model.class_names != expected {
        return Err(Error::config(format!(
            "recognition needs the 6 classes {:?}, model has {:?}",
            expected, model.class_names
        )));
    }
    check_fingerprint(features, model)?;
    let (id, _) = svm_predict(model, &features.coeffs)?;
    ClassLabel::parse(&model.class_names[id])
}

/// Which cepstral dimensions an artifact population dominates, plus the
/// population statistics needed for the removal transform. Dimension
/// labels are 1-based positions within the retained coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalProfile {
    /// Per-dim correlation between paired artifact and clean series;
    /// undefined (constant-series) dims are stored as 0.
    pub correlations: Vec<f64>,
    /// Selected dimension labels, 1-based, ascending.
    pub artifact_dims: Vec<usize>,
    pub clean_mean: Vec<f64>,
    pub clean_std: Vec<f64>,
    pub artifact_mean: Vec<f64>,
    pub artifact_std: Vec<f64>,
    pub warnings: Vec<String>,
}

impl RemovalProfile {
    pub fn dim_count(&self) -> usize {
        self.correlations.len()
    }
}

/// Pool feature rows into per-dimension series, one entry per
/// (row, channel) chunk, chunk order preserved.
fn pool_by_dim(rows: &[&FeatureVector], dim_count: usize) -> Vec<Vec<f64>> {
    let mut series = vec![Vec::new(); dim_count];
    for fv in rows {
        for chunk in fv.coeffs.chunks(dim_count) {
            for (d, &v) in chunk.iter().enumerate() {
                series[d].push(v);
            }
        }
    }
    series
}

fn mean_std(series: &[f64]) -> (f64, f64) {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Correlate each retained dimension's artifact series against the clean
/// series (paired by index after identical seeded shuffles, truncated to
/// the shorter length) and select the `k` dimensions with smallest
/// absolute correlation. Ties prefer the larger dimension label, so the
/// degenerate all-equal case falls back to the trailing dimensions.
pub fn build_removal_profile(
    artifact_feats: &[&FeatureVector],
    clean_feats: &[&FeatureVector],
    k: usize,
    seed: u64,
) -> Result<RemovalProfile> {
    if artifact_feats.is_empty() || clean_feats.is_empty() {
        return Err(Error::domain("profile needs non-empty artifact and clean populations"));
    }
    let dim_count = artifact_feats[0].dims_per_channel();
    for fv in artifact_feats.iter().chain(clean_feats) {
        if fv.dims_per_channel() != dim_count {
            return Err(Error::domain(format!(
                "mixed feature dimensionality: {} vs {dim_count}",
                fv.dims_per_channel()
            )));
        }
    }
    if k == 0 || k > dim_count {
        return Err(Error::domain(format!(
            "k={k} must be within 1..={dim_count}"
        )));
    }
    let artifact_series = pool_by_dim(artifact_feats, dim_count);
    let clean_series = pool_by_dim(clean_feats, dim_count);
    let n_a = artifact_series[0].len();
    let n_c = clean_series[0].len();
    let common = n_a.min(n_c);
    if common < 2 {
        return Err(Error::domain(format!(
            "paired common length {common} is too short for correlation"
        )));
    }
    // the same seed stream shuffles both populations, so equal-sized
    // populations keep their index pairing
    let mut perm_a: Vec<usize> = (0..n_a).collect();
    let mut perm_c: Vec<usize> = (0..n_c).collect();
    perm_a.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm_c.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut warnings = Vec::new();
    let mut correlations = Vec::with_capacity(dim_count);
    for d in 0..dim_count {
        let a: Vec<f64> = perm_a[..common].iter().map(|&i| artifact_series[d][i]).collect();
        let c: Vec<f64> = perm_c[..common].iter().map(|&i| clean_series[d][i]).collect();
        match pearson(&a, &c) {
            Ok(r) => correlations.push(r),
            Err(Error::ConstantSeries) => {
                warnings.push(format!(
                    "dimension {}: constant series, correlation undefined, ranked as 0",
                    d + 1
                ));
                correlations.push(0.0);
            }
            Err(e) => return Err(e),
        }
    }

    let mut order: Vec<usize> = (0..dim_count).collect();
    order.sort_by(|&a, &b| {
        correlations[a]
            .abs()
            .partial_cmp(&correlations[b].abs())
            .unwrap()
            .then(b.cmp(&a))
    });
    let mut artifact_dims: Vec<usize> = order[..k].iter().map(|&d| d + 1).collect();
    artifact_dims.sort_unstable();
    if correlations.iter().all(|&r| (r - correlations[0]).abs() < 1e-12) {
        warnings.push(format!(
            "all dimensions tied at correlation {:.6}; selection fell back to the {k} \
             largest dimension labels",
            correlations[0]
        ));
    }

    let mut clean_mean = Vec::with_capacity(dim_count);
    let mut clean_std = Vec::with_capacity(dim_count);
    let mut artifact_mean = Vec::with_capacity(dim_count);
    let mut artifact_std = Vec::with_capacity(dim_count);
    for d in 0..dim_count {
        let (m, s) = mean_std(&clean_series[d]);
        clean_mean.push(m);
        clean_std.push(s);
        let (m, s) = mean_std(&artifact_series[d]);
        artifact_mean.push(m);
        artifact_std.push(s);
    }
    Ok(RemovalProfile {
        correlations,
        artifact_dims,
        clean_mean,
        clean_std,
        artifact_mean,
        artifact_std,
        warnings,
    })
}

/// Statistical removal on features: selected dims are renormalized from
/// the artifact population's statistics onto the clean population's,
/// `(A - mean_A) / std_A * std_R + mean_R`; other dims are untouched.
pub fn remove_labeled(features: &FeatureVector, profile: &RemovalProfile) -> Result<FeatureVector> {
    let dim_count = features.dims_per_channel();
    if dim_count != profile.dim_count() {
        return Err(Error::domain(format!(
            "features have {dim_count} dims per channel, profile has {}",
            profile.dim_count()
        )));
    }
    let mut out = features.clone();
    for &label in &profile.artifact_dims {
        let d = label - 1;
        let sa = profile.artifact_std[d];
        if !(sa > 0.0) {
            return Err(Error::domain(format!(
                "selected dimension {label} has zero artifact std; re-profile the populations"
            )));
        }
        for chunk in out.coeffs.chunks_mut(dim_count) {
            chunk[d] = (chunk[d] - profile.artifact_mean[d]) / sa * profile.clean_std[d]
                + profile.clean_mean[d];
        }
    }
    Ok(out)
}

fn check_dims(dims: &[usize], dim_count: usize) -> Result<()> {
    for &d in dims {
        if d == 0 || d > dim_count {
            return Err(Error::domain(format!(
                "dimension label {d} outside the retained range 1..={dim_count}"
            )));
        }
    }
    Ok(())
}

/// Zero-out removal on a feature vector: listed dims (1-based retained
/// labels) set to zero on every channel.
pub fn remove_unlabeled_features(features: &FeatureVector, dims: &[usize]) -> Result<FeatureVector> {
    let dim_count = features.dims_per_channel();
    check_dims(dims, dim_count)?;
    let mut out = features.clone();
    for chunk in out.coeffs.chunks_mut(dim_count) {
        for &d in dims {
            chunk[d - 1] = 0.0;
        }
    }
    Ok(out)
}

/// Map 1-based retained dimension labels to zero-based DCT indices.
pub fn dims_to_dct_indices(dims: &[usize], config: &MfccConfig) -> Result<Vec<usize>> {
    check_dims(dims, config.retained_count())?;
    Ok(dims.iter().map(|d| config.coeff_lo + d - 1).collect())
}

/// Zero-out removal on a segment: zero the listed cepstral dims in every
/// frame and rebuild denoised time-domain EEG.
pub fn remove_unlabeled_segment(
    segment: &EegSegment,
    dims: &[usize],
    config: &MfccConfig,
) -> Result<EegSegment> {
    let dct = dims_to_dct_indices(dims, config)?;
    let bank = build_mel_bank(config)?;
    reconstruct_segment(segment, &CepstralEdit::zero_dims(&dct), &bank, config)
}

/// Cepstral edit realizing the profile's statistical transform on the
/// selected dims, for segment-level reconstruction.
pub fn profile_edit(profile: &RemovalProfile, config: &MfccConfig) -> Result<CepstralEdit> {
    let dct = dims_to_dct_indices(&profile.artifact_dims, config)?;
    let mut edit = CepstralEdit::identity();
    for (&label, &dim) in profile.artifact_dims.iter().zip(&dct) {
        let d = label - 1;
        if !(profile.artifact_std[d] > 0.0) {
            return Err(Error::domain(format!(
                "selected dimension {label} has zero artifact std; re-profile the populations"
            )));
        }
        edit.set(
            dim,
            EditOp::Affine {
                src_mean: profile.artifact_mean[d],
                src_std: profile.artifact_std[d],
                dst_mean: profile.clean_mean[d],
                dst_std: profile.clean_std[d],
            },
        );
    }
    Ok(edit)
}

/// Fraction of feature vectors a trained detector still flags as artifact.
pub fn residual_artifact_rate(feats: &[FeatureVector], detector: &SvmModel) -> Result<f64> {
    if feats.is_empty() {
        return Err(Error::domain("residual rate over an empty set"));
    }
    let mut flagged = 0usize;
    for fv in feats {
        if detect(fv, detector)?.is_artifact {
            flagged += 1;
        }
    }
    Ok(flagged as f64 / feats.len() as f64)
}

/// Per-segment record of the removal run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentRemoval {
    pub label: Option<ClassLabel>,
    /// Whether the statistical transform (true) or the zero-out path
    /// (false) was applied; clean labeled segments pass through untouched.
    pub transformed: bool,
    pub before_score: Option<f64>,
    pub after_score: Option<f64>,
}

/// Structured result of the removal algorithm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemovalReport {
    pub profile: RemovalProfile,
    pub per_segment: Vec<SegmentRemoval>,
    /// Residual artifact rate over the transformed feature vectors of
    /// artifact targets, when a detector is supplied.
    pub residual_rate_features: Option<f64>,
    /// Residual artifact rate over features re-extracted from the
    /// reconstructed signals, when a detector is supplied.
    pub residual_rate_signal: Option<f64>,
}

/// The full removal pipeline: profile the source populations, then per
/// target segment apply the statistical transform (labeled artifacts),
/// pass-through (labeled clean) or zero-out removal (unlabeled), and
/// rebuild time-domain signals. A detector, when given, scores each
/// artifact target before and after and yields both residual rates.
pub fn run_algorithm1(
    source_clean: &[&FeatureVector],
    source_artifact: &[&FeatureVector],
    target: &[(EegSegment, Option<ClassLabel>)],
    config: &MfccConfig,
    k: usize,
    seed: u64,
    detector: Option<&SvmModel>,
) -> Result<(Vec<EegSegment>, RemovalReport)> {
    let profile = build_removal_profile(source_artifact, source_clean, k, seed)?;
    let bank = build_mel_bank(config)?;
    let zero_edit = CepstralEdit::zero_dims(&dims_to_dct_indices(&profile.artifact_dims, config)?);
    let affine_edit = profile_edit(&profile, config)?;

    let mut denoised = Vec::with_capacity(target.len());
    let mut per_segment = Vec::with_capacity(target.len());
    let mut treated_feats = Vec::new();
    let mut signal_feats = Vec::new();
    for (segment, label) in target {
        let features = mfcc_segment(segment, &bank, config)?;
        let before_score = match detector {
            Some(m) => Some(detect(&features, m)?.score),
            None => None,
        };
        let (out, transformed) = match label {
            Some(ClassLabel::Clean) => (segment.clone(), false),
            Some(_) => (
                reconstruct_segment(segment, &affine_edit, &bank, config)?,
                true,
            ),
            None => (
                reconstruct_segment(segment, &zero_edit, &bank, config)?,
                false,
            ),
        };
        let is_treated_artifact = label.map_or(true, |l| l.is_artifact());
        let after_score = if is_treated_artifact {
            let feats = if transformed {
                remove_labeled(&features, &profile)?
            } else {
                remove_unlabeled_features(&features, &profile.artifact_dims)?
            };
            let score = match detector {
                Some(m) => {
                    signal_feats.push(mfcc_segment(&out, &bank, config)?);
                    Some(detect(&feats, m)?.score)
                }
                None => None,
            };
            treated_feats.push(feats);
            score
        } else {
            None
        };
        per_segment.push(SegmentRemoval {
            label: *label,
            transformed,
            before_score,
            after_score,
        });
        denoised.push(out);
    }

    let (residual_rate_features, residual_rate_signal) = match detector {
        Some(m) if !treated_feats.is_empty() => (
            Some(residual_artifact_rate(&treated_feats, m)?),
            Some(residual_artifact_rate(&signal_feats, m)?),
        ),
        _ => (None, None),
    };
    Ok((
        denoised,
        RemovalReport {
            profile,
            per_segment,
            residual_rate_features,
            residual_rate_signal,
        },
    ))
}
