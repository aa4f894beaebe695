//! End-to-end artifact removal: profile artifact-dominated cepstral
//! dimensions on a labeled source set, denoise a held-out target set, and
//! audit the residual artifact rate with a trained detector.
//!
//! Run with `cargo run --release --example remove_artifacts`.

use std::collections::BTreeMap;

use eegcep::artifact::{detection_class_names, run_algorithm1, ClassLabel};
use eegcep::cepstrum::{build_mel_bank, mfcc_segment, MfccConfig};
use eegcep::svm::{grid_search_cv, LabeledDataset, ParamGrid};
use eegcep::synth::{make_dataset, Split, SynthSpec};

fn main() -> eegcep::Result<()> {
    let mut class_mix = BTreeMap::new();
    class_mix.insert(ClassLabel::Clean, 100);
    class_mix.insert(ClassLabel::BlinkHard, 100);
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(9);
    let k = std::env::args()
        .nth(2)
        .map(|s| s.parse().expect("k must be an integer"))
        .unwrap_or(3);
    let spec = SynthSpec {
        seed,
        class_mix,
        ..SynthSpec::default()
    };
    let dataset = make_dataset(&spec)?;
    let cfg = MfccConfig::desk();
    let bank = build_mel_bank(&cfg)?;

    // features of the training split feed both the profile and the detector
    let mut clean_feats = Vec::new();
    let mut artifact_feats = Vec::new();
    for record in dataset.of_split(Split::Train) {
        let fv = mfcc_segment(&record.segment, &bank, &cfg)?;
        if record.label.is_artifact() {
            artifact_feats.push(fv);
        } else {
            clean_feats.push(fv);
        }
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for fv in clean_feats.iter().chain(&artifact_feats) {
        rows.push(fv.coeffs.clone());
    }
    labels.extend(std::iter::repeat(0).take(clean_feats.len()));
    labels.extend(std::iter::repeat(1).take(artifact_feats.len()));
    let train = LabeledDataset::new(rows, labels, detection_class_names())?;
    let (_, mut detector) = grid_search_cv(&train, &ParamGrid::default(), 5, seed, 1e-3, 2000)?;
    detector.feature_fingerprint = cfg.fingerprint();

    let target: Vec<_> = dataset
        .of_split(Split::Validation)
        .map(|r| (r.segment.clone(), Some(r.label)))
        .collect();
    let clean_refs: Vec<_> = clean_feats.iter().collect();
    let artifact_refs: Vec<_> = artifact_feats.iter().collect();
    let (denoised, report) =
        run_algorithm1(&clean_refs, &artifact_refs, &target, &cfg, k, seed, Some(&detector))?;

    println!("selected dims {:?}", report.profile.artifact_dims);
    println!(" dim  |pearson| between paired clean/artifact series");
    for (d, c) in report.profile.correlations.iter().enumerate() {
        let mark = if report.profile.artifact_dims.contains(&(d + 1)) {
            " <- removed"
        } else {
            ""
        };
        println!("  {:>2}  {:.3}{mark}", d + 1, c.abs());
    }
    println!(
        "residual artifact rate: features {:?}, reconstructed signal {:?}",
        report.residual_rate_features, report.residual_rate_signal
    );
    println!("denoised {} target segments", denoised.len());
    Ok(())
}
