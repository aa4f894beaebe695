//! Train the binary artifact detector with cross-validated grid search.
//!
//! Run with `cargo run --release --example train_detector`.

use std::collections::BTreeMap;

use eegcep::artifact::{detection_class_names, ClassLabel};
use eegcep::cepstrum::{build_mel_bank, mfcc_segment, MfccConfig};
use eegcep::svm::{grid_search_cv, LabeledDataset, ParamGrid};
use eegcep::synth::{make_dataset, SynthSpec};

fn main() -> eegcep::Result<()> {
    let mut class_mix = BTreeMap::new();
    class_mix.insert(ClassLabel::Clean, 60);
    for label in ClassLabel::ALL.into_iter().filter(|l| l.is_artifact()) {
        class_mix.insert(label, 12);
    }
    let spec = SynthSpec {
        seed: 3,
        class_mix,
        ..SynthSpec::default()
    };
    let dataset = make_dataset(&spec)?;

    let cfg = MfccConfig::desk();
    let bank = build_mel_bank(&cfg)?;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for record in &dataset.records {
        features.push(mfcc_segment(&record.segment, &bank, &cfg)?.coeffs);
        labels.push(usize::from(record.label.is_artifact()));
    }
    let train = LabeledDataset::new(features, labels, detection_class_names())?;

    let (report, model) = grid_search_cv(&train, &ParamGrid::default(), 5, 3, 1e-3, 2000)?;
    println!(
        "5-fold CV accuracy {:.3} +- {:.3} at C={}, gamma={}",
        report.mean_accuracy, report.std_accuracy, report.best_c, report.best_gamma
    );
    println!("grid:");
    for p in &report.grid_scores {
        println!("  C={:<6} gamma={:<5} acc {:.3}", p.c, p.gamma, p.mean_accuracy);
    }
    println!(
        "final model: {} binary machine(s), {} support vectors",
        model.machines.len(),
        model.machines.iter().map(|m| m.support_vectors.len()).sum::<usize>()
    );
    Ok(())
}
