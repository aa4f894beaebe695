//! Command-line toolchain over the library: dataset synthesis, feature
//! extraction, training, detection, recognition, artifact removal, and
//! the cost/throughput estimator.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eegcep::artifact::{
    detect, detection_class_names, recognition_class_names, recognize, run_algorithm1, ClassLabel,
};
use eegcep::cepstrum::{
    band_power_features, build_mel_bank, default_bands, mfcc_segment, FeatureVector, MfccConfig,
};
use eegcep::cost::{estimate_cost, CostParams};
use eegcep::io;
use eegcep::svm::{grid_search_cv, LabeledDataset, ParamGrid};
use eegcep::synth::{make_dataset, SynthSpec};
use eegcep::{Error, Result};

#[derive(Parser)]
#[command(name = "eegcep", about = "Cepstral ocular-artifact toolchain for multi-channel EEG")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    Desk,
    Paper,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FeatureKind {
    Mfcc,
    Bands,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Task {
    Detect,
    Recognize,
}

#[derive(Args)]
struct ExtractionOpts {
    /// Extraction preset; ignored when --config is given.
    #[arg(long, value_enum, default_value = "desk")]
    preset: Preset,
    /// TOML file with a full extraction config, overriding the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Feature family.
    #[arg(long, value_enum, default_value = "mfcc")]
    features: FeatureKind,
}

impl ExtractionOpts {
    fn mfcc_config(&self) -> Result<MfccConfig> {
        let cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                toml::from_str(&text).map_err(|e| Error::Parse {
                    file: path.display().to_string(),
                    line: e.span().map_or(0, |s| s.start),
                    msg: e.message().to_string(),
                })?
            }
            None => match self.preset {
                Preset::Desk => MfccConfig::desk(),
                Preset::Paper => MfccConfig::paper(500.0),
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn extract(&self, segment: &eegcep::EegSegment, cfg: &MfccConfig) -> Result<FeatureVector> {
        match self.features {
            FeatureKind::Mfcc => {
                let bank = build_mel_bank(cfg)?;
                mfcc_segment(segment, &bank, cfg)
            }
            FeatureKind::Bands => band_power_features(segment, &default_bands(), cfg),
        }
    }

    fn fingerprint(&self, cfg: &MfccConfig) -> String {
        match self.features {
            FeatureKind::Mfcc => cfg.fingerprint(),
            FeatureKind::Bands => format!("bands-{}", cfg.fingerprint()),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic labeled dataset.
    Synth {
        /// TOML file with a SynthSpec; a default recipe is used when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for segment files and the manifest.
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract features from segments into a feature table.
    Extract {
        /// Segment file, dataset directory, or manifest.
        input: PathBuf,
        #[command(flatten)]
        opts: ExtractionOpts,
        /// Output feature-table file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a detector or recognizer with cross-validated grid search.
    Train {
        /// Labeled feature table.
        features: PathBuf,
        #[arg(long, value_enum)]
        task: Task,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cross-validation folds.
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Output model file; the CV report lands next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-segment binary artifact verdicts.
    Detect {
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        opts: ExtractionOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-segment 6-class verdicts.
    Recognize {
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        opts: ExtractionOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Profile artifact dimensions on a labeled source set and denoise a
    /// target set.
    Remove {
        /// Target segments (file, directory, or manifest).
        target: PathBuf,
        /// Labeled source feature table with clean and artifact rows.
        #[arg(long)]
        source: PathBuf,
        /// Trained detector for residual-rate reporting.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Number of dimensions to remove.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Ignore target labels and force the zero-out path.
        #[arg(long)]
        ignore_labels: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        opts: ExtractionOpts,
        /// Output directory for denoised segments and the report.
        #[arg(long)]
        out: PathBuf,
    },
    /// Multiplication-count model and optional wall-clock throughput.
    Bench {
        #[arg(long, default_value_t = 7)]
        channels: u64,
        #[arg(long, default_value_t = 2048)]
        frame_len: u64,
        #[arg(long, default_value_t = 40)]
        filters: u64,
        #[arg(long, default_value_t = 12)]
        retained: u64,
        /// Also time feature extraction over generated segments.
        #[arg(long)]
        throughput: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_synth_spec(config: Option<&Path>, seed: Option<u64>) -> Result<SynthSpec> {
    let mut spec = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| Error::Parse {
                file: path.display().to_string(),
                line: e.span().map_or(0, |s| s.start),
                msg: e.message().to_string(),
            })?
        }
        None => {
            let mut mix = BTreeMap::new();
            for label in ClassLabel::ALL {
                mix.insert(label, 20);
            }
            SynthSpec {
                class_mix: mix,
                ..SynthSpec::default()
            }
        }
    };
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.validate()?;
    Ok(spec)
}

fn channel_names(count: usize) -> Vec<String> {
    (0..count).map(|c| format!("ch{c}")).collect()
}

fn build_dataset_for_task(
    rows: &[(FeatureVector, Option<ClassLabel>)],
    task: Task,
) -> Result<LabeledDataset> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (fv, label) in rows {
        let label = label.ok_or_else(|| {
            Error::domain("training needs a label on every feature row; found an unlabeled row")
        })?;
        features.push(fv.coeffs.clone());
        labels.push(match task {
            Task::Detect => usize::from(label.is_artifact()),
            Task::Recognize => label.index(),
        });
    }
    let class_names = match task {
        Task::Detect => detection_class_names(),
        Task::Recognize => recognition_class_names(),
    };
    LabeledDataset::new(features, labels, class_names)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { config, seed, out } => {
            let spec = load_synth_spec(config.as_deref(), seed)?;
            let dataset = make_dataset(&spec)?;
            std::fs::create_dir_all(&out)?;
            let names = channel_names(spec.channels);
            let mut entries = Vec::new();
            for (i, record) in dataset.records.iter().enumerate() {
                let name = format!("seg_{i:04}.csv");
                io::write_segment(&out.join(&name), &record.segment, &names, Some(record.label))?;
                entries.push(io::ManifestEntry {
                    path: PathBuf::from(name),
                    label: Some(record.label),
                    split: record.split,
                });
            }
            io::write_manifest(&out.join("manifest.txt"), &entries)?;
            println!("wrote {} segments to {}", entries.len(), out.display());
        }
        Command::Extract { input, opts, out } => {
            let cfg = opts.mfcc_config()?;
            let segments = io::load_segments(&input)?;
            if segments.is_empty() {
                return Err(Error::domain(format!("no segments under {}", input.display())));
            }
            let rows: Vec<(FeatureVector, Option<ClassLabel>)> = segments
                .iter()
                .map(|(seg, label)| Ok((opts.extract(seg, &cfg)?, *label)))
                .collect::<Result<_>>()?;
            io::write_features(&out, &rows)?;
            println!("extracted {} feature rows to {}", rows.len(), out.display());
        }
        Command::Train {
            features,
            task,
            seed,
            folds,
            out,
        } => {
            let rows = io::read_features(&features)?;
            let fingerprint = rows[0].0.fingerprint.clone();
            let dataset = build_dataset_for_task(&rows, task)?;
            let (report, mut model) =
                grid_search_cv(&dataset, &ParamGrid::default(), folds, seed, 1e-3, 2000)?;
            model.feature_fingerprint = fingerprint;
            io::write_json(&out, &model)?;
            let report_path = out.with_extension("cv.json");
            io::write_json(&report_path, &report)?;
            println!(
                "trained on {} rows: CV accuracy {:.3} +- {:.3} at C={}, gamma={}; model at {}",
                dataset.labels.len(),
                report.mean_accuracy,
                report.std_accuracy,
                report.best_c,
                report.best_gamma,
                out.display()
            );
        }
        Command::Detect {
            input,
            model,
            opts,
            out,
        } => {
            let cfg = opts.mfcc_config()?;
            let svm = io::load_model(&model, &opts.fingerprint(&cfg))?;
            let segments = io::load_segments(&input)?;
            let mut lines = vec!["index,verdict,score".to_string()];
            for (i, (seg, _)) in segments.iter().enumerate() {
                let fv = opts.extract(seg, &cfg)?;
                let d = detect(&fv, &svm)?;
                let verdict = if d.is_artifact { "artifact" } else { "clean" };
                lines.push(format!("{i},{verdict},{}", d.score));
            }
            std::fs::write(&out, lines.join("\n") + "\n")?;
            println!("wrote {} verdicts to {}", segments.len(), out.display());
        }
        Command::Recognize {
            input,
            model,
            opts,
            out,
        } => {
            let cfg = opts.mfcc_config()?;
            let svm = io::load_model(&model, &opts.fingerprint(&cfg))?;
            let segments = io::load_segments(&input)?;
            let mut lines = vec!["index,verdict".to_string()];
            for (i, (seg, _)) in segments.iter().enumerate() {
                let fv = opts.extract(seg, &cfg)?;
                lines.push(format!("{i},{}", recognize(&fv, &svm)?));
            }
            std::fs::write(&out, lines.join("\n") + "\n")?;
            println!("wrote {} verdicts to {}", segments.len(), out.display());
        }
        Command::Remove {
            target,
            source,
            model,
            k,
            ignore_labels,
            seed,
            opts,
            out,
        } => {
            if opts.features == FeatureKind::Bands {
                return Err(Error::config("removal operates on mfcc features only"));
            }
            let cfg = opts.mfcc_config()?;
            let rows = io::read_features(&source)?;
            let fingerprint = opts.fingerprint(&cfg);
            if rows[0].0.fingerprint != fingerprint {
                return Err(Error::config(format!(
                    "source features carry fingerprint {}, extraction config is {fingerprint}",
                    rows[0].0.fingerprint
                )));
            }
            let clean: Vec<&FeatureVector> = rows
                .iter()
                .filter(|(_, l)| *l == Some(ClassLabel::Clean))
                .map(|(f, _)| f)
                .collect();
            let artifact: Vec<&FeatureVector> = rows
                .iter()
                .filter(|(_, l)| l.is_some_and(|l| l.is_artifact()))
                .map(|(f, _)| f)
                .collect();
            let detector = model
                .map(|p| io::load_model(&p, &fingerprint))
                .transpose()?;
            let targets: Vec<(eegcep::EegSegment, Option<ClassLabel>)> = io::load_segments(&target)?
                .into_iter()
                .map(|(s, l)| (s, if ignore_labels { None } else { l }))
                .collect();
            let (denoised, report) = run_algorithm1(
                &clean,
                &artifact,
                &targets,
                &cfg,
                k,
                seed,
                detector.as_ref(),
            )?;
            std::fs::create_dir_all(&out)?;
            let mut entries = Vec::new();
            for (i, (seg, (_, label))) in denoised.iter().zip(&targets).enumerate() {
                let name = format!("denoised_{i:04}.csv");
                io::write_segment(
                    &out.join(&name),
                    seg,
                    &channel_names(seg.channel_count()),
                    *label,
                )?;
                entries.push(io::ManifestEntry {
                    path: PathBuf::from(name),
                    label: *label,
                    split: eegcep::synth::Split::Validation,
                });
            }
            io::write_manifest(&out.join("manifest.txt"), &entries)?;
            io::write_json(&out.join("report.json"), &report)?;
            println!(
                "removed dims {:?} on {} segments; residual rate features={:?} signal={:?}",
                report.profile.artifact_dims,
                denoised.len(),
                report.residual_rate_features,
                report.residual_rate_signal
            );
        }
        Command::Bench {
            channels,
            frame_len,
            filters,
            retained,
            throughput,
            seed,
        } => {
            let params = CostParams {
                channels,
                frame_len,
                num_filters: filters,
                retained,
            };
            let cost = estimate_cost(&params)?;
            println!(
                "multiplications per frame set (C={channels}, N={frame_len}, M={filters}, \
                 L={retained}): {cost}"
            );
            if throughput {
                let spec = SynthSpec {
                    seed,
                    ..SynthSpec::default()
                };
                let cfg = MfccConfig::desk();
                let bank = build_mel_bank(&cfg)?;
                let segments: Vec<_> = (0..20)
                    .map(|i| eegcep::synth::gen_clean_eeg(&spec, i))
                    .collect::<Result<_>>()?;
                let start = Instant::now();
                for seg in &segments {
                    mfcc_segment(seg, &bank, &cfg)?;
                }
                let elapsed = start.elapsed();
                println!(
                    "extracted {} segments in {:.1} ms ({:.2} ms/segment)",
                    segments.len(),
                    elapsed.as_secs_f64() * 1e3,
                    elapsed.as_secs_f64() * 1e3 / segments.len() as f64
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
