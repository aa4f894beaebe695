//! Plain-text, versioned file formats: segment CSV, dataset manifest,
//! feature tables, and JSON serialization for models and reports.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Serialize};

use crate::artifact::ClassLabel;
use crate::cepstrum::FeatureVector;
use crate::error::{Error, Result};
use crate::segment::EegSegment;
use crate::svm::SvmModel;
use crate::synth::Split;

const SEGMENT_MAGIC: &str = "#eegcsv v1";
const MANIFEST_MAGIC: &str = "#eegmanifest v1";
const FEATURES_MAGIC: &str = "#eegfeatures v1";

fn parse_err(file: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        file: file.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Write one segment as CSV: magic, fs, channel names, optional label,
/// then one row per sample. Float formatting is shortest-round-trip, so a
/// read-back is bit-identical.
pub fn write_segment(
    path: &Path,
    segment: &EegSegment,
    names: &[String],
    label: Option<ClassLabel>,
) -> Result<()> {
    if names.len() != segment.channel_count() {
        return Err(Error::domain(format!(
            "{} channel names for {} channels",
            names.len(),
            segment.channel_count()
        )));
    }
    let mut out = String::new();
    out.push_str(SEGMENT_MAGIC);
    out.push('\n');
    out.push_str(&format!("fs={}\n", segment.fs()));
    out.push_str(&format!(
        "channels={};{}\n",
        segment.channel_count(),
        names.join(",")
    ));
    if let Some(l) = label {
        out.push_str(&format!("label={l}\n"));
    }
    for t in 0..segment.len() {
        let row: Vec<String> = (0..segment.channel_count())
            .map(|c| segment.channel(c)[t].to_string())
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parsed segment file: samples, channel names, optional label.
#[derive(Debug)]
pub struct SegmentFile {
    pub segment: EegSegment,
    pub names: Vec<String>,
    pub label: Option<ClassLabel>,
}

/// Read one segment CSV, reporting the offending file and line on any
/// malformation.
pub fn read_segment(path: &Path) -> Result<SegmentFile> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (n, magic) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if magic.trim() != SEGMENT_MAGIC {
        return Err(parse_err(path, n + 1, format!("expected '{SEGMENT_MAGIC}'")));
    }
    let (n, fs_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing fs line"))?;
    let fs: f64 = fs_line
        .strip_prefix("fs=")
        .ok_or_else(|| parse_err(path, n + 1, "expected 'fs=<Hz>'"))?
        .trim()
        .parse()
        .map_err(|e| parse_err(path, n + 1, format!("bad fs value: {e}")))?;
    let (n, ch_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 3, "missing channels line"))?;
    let ch_body = ch_line
        .strip_prefix("channels=")
        .ok_or_else(|| parse_err(path, n + 1, "expected 'channels=<k>;<name>,...'"))?;
    let (count_str, names_str) = ch_body
        .split_once(';')
        .ok_or_else(|| parse_err(path, n + 1, "expected ';' after channel count"))?;
    let channel_count: usize = count_str
        .trim()
        .parse()
        .map_err(|e| parse_err(path, n + 1, format!("bad channel count: {e}")))?;
    let names: Vec<String> = names_str.split(',').map(|s| s.trim().to_string()).collect();
    if names.len() != channel_count {
        return Err(parse_err(
            path,
            n + 1,
            format!("{channel_count} channels declared but {} names listed", names.len()),
        ));
    }

    let mut label = None;
    let mut channels: Vec<Vec<f64>> = vec![Vec::new(); channel_count];
    let mut pending = lines.peekable();
    if let Some(&(_, line)) = pending.peek() {
        if let Some(body) = line.strip_prefix("label=") {
            let (n, _) = pending.next().unwrap();
            label = Some(
                ClassLabel::parse(body.trim())
                    .map_err(|e| parse_err(path, n + 1, e.to_string()))?,
            );
        }
    }
    for (n, line) in pending {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != channel_count {
            return Err(parse_err(
                path,
                n + 1,
                format!("row has {} cells, header declares {channel_count}", cells.len()),
            ));
        }
        for (c, cell) in cells.iter().enumerate() {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|e| parse_err(path, n + 1, format!("bad sample '{cell}': {e}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, n + 1, format!("non-finite sample '{cell}'")));
            }
            channels[c].push(v);
        }
    }
    let segment = EegSegment::new(channels, fs)
        .map_err(|e| parse_err(path, 1, e.to_string()))?;
    Ok(SegmentFile {
        segment,
        names,
        label,
    })
}

/// One manifest record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: Option<ClassLabel>,
    pub split: Split,
}

fn split_str(s: Split) -> &'static str {
    match s {
        Split::Train => "train",
        Split::Validation => "validation",
    }
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let mut out = String::new();
    out.push_str(MANIFEST_MAGIC);
    out.push('\n');
    for e in entries {
        let label = e.label.map_or("?".to_string(), |l| l.to_string());
        out.push_str(&format!("{},{label},{}\n", e.path.display(), split_str(e.split)));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, magic) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if magic.trim() != MANIFEST_MAGIC {
        return Err(parse_err(path, 1, format!("expected '{MANIFEST_MAGIC}'")));
    }
    let mut entries = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.splitn(3, ',').collect();
        if cells.len() != 3 {
            return Err(parse_err(path, n + 1, "expected 'path,label,split'"));
        }
        let label = match cells[1].trim() {
            "?" => None,
            s => Some(ClassLabel::parse(s).map_err(|e| parse_err(path, n + 1, e.to_string()))?),
        };
        let split = match cells[2].trim() {
            "train" => Split::Train,
            "validation" => Split::Validation,
            other => return Err(parse_err(path, n + 1, format!("unknown split '{other}'"))),
        };
        entries.push(ManifestEntry {
            path: PathBuf::from(cells[0]),
            label,
            split,
        });
    }
    Ok(entries)
}

/// Load segments from a manifest (paths resolved against the manifest's
/// directory), a single segment file, or every `.csv` in a directory.
pub fn load_segments(path: &Path) -> Result<Vec<(EegSegment, Option<ClassLabel>)>> {
    if path.is_dir() {
        let manifest = path.join("manifest.txt");
        if manifest.is_file() {
            return load_from_manifest(&manifest);
        }
        let mut files: Vec<PathBuf> = fs::read_dir(path)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        files.sort();
        return files
            .iter()
            .map(|p| read_segment(p).map(|s| (s.segment, s.label)))
            .collect();
    }
    if path.extension().is_some_and(|x| x == "txt") {
        return load_from_manifest(path);
    }
    let s = read_segment(path)?;
    Ok(vec![(s.segment, s.label)])
}

fn load_from_manifest(manifest: &Path) -> Result<Vec<(EegSegment, Option<ClassLabel>)>> {
    let base = manifest.parent().unwrap_or(Path::new("."));
    read_manifest(manifest)?
        .into_iter()
        .map(|e| {
            let p = if e.path.is_absolute() {
                e.path.clone()
            } else {
                base.join(&e.path)
            };
            let s = read_segment(&p)?;
            Ok((s.segment, e.label.or(s.label)))
        })
        .collect()
}

/// Write a feature table: magic, fingerprint, channel count, then one
/// line per segment, `label|?` followed by the coefficients.
pub fn write_features(
    path: &Path,
    rows: &[(FeatureVector, Option<ClassLabel>)],
) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::domain("no feature rows to write"));
    }
    let fingerprint = &rows[0].0.fingerprint;
    let channels = rows[0].0.channel_count;
    let mut out = String::new();
    out.push_str(FEATURES_MAGIC);
    out.push('\n');
    out.push_str(&format!("fingerprint={fingerprint}\n"));
    out.push_str(&format!("channels={channels}\n"));
    for (fv, label) in rows {
        if fv.fingerprint != *fingerprint || fv.channel_count != channels {
            return Err(Error::domain("mixed fingerprints or channel counts in one table"));
        }
        let mut line = label.map_or("?".to_string(), |l| l.to_string());
        for v in &fv.coeffs {
            line.push(',');
            line.push_str(&v.to_string());
        }
        out.push_str(&line);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_features(path: &Path) -> Result<Vec<(FeatureVector, Option<ClassLabel>)>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, magic) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if magic.trim() != FEATURES_MAGIC {
        return Err(parse_err(path, 1, format!("expected '{FEATURES_MAGIC}'")));
    }
    let (n, fp_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing fingerprint line"))?;
    let fingerprint = fp_line
        .strip_prefix("fingerprint=")
        .ok_or_else(|| parse_err(path, n + 1, "expected 'fingerprint=<hex>'"))?
        .trim()
        .to_string();
    let (n, ch_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 3, "missing channels line"))?;
    let channels: usize = ch_line
        .strip_prefix("channels=")
        .ok_or_else(|| parse_err(path, n + 1, "expected 'channels=<k>'"))?
        .trim()
        .parse()
        .map_err(|e| parse_err(path, n + 1, format!("bad channel count: {e}")))?;

    let mut rows = Vec::new();
    let mut width = None;
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let label = match cells.next().unwrap().trim() {
            "?" => None,
            s => Some(ClassLabel::parse(s).map_err(|e| parse_err(path, n + 1, e.to_string()))?),
        };
        let coeffs: Vec<f64> = cells
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(path, n + 1, format!("bad value '{c}': {e}")))
            })
            .collect::<Result<_>>()?;
        if coeffs.is_empty() || coeffs.len() % channels != 0 {
            return Err(parse_err(
                path,
                n + 1,
                format!("{} values do not divide into {channels} channels", coeffs.len()),
            ));
        }
        match width {
            None => width = Some(coeffs.len()),
            Some(w) if w != coeffs.len() => {
                return Err(parse_err(path, n + 1, "ragged feature row"))
            }
            _ => {}
        }
        rows.push((
            FeatureVector {
                coeffs,
                channel_count: channels,
                fingerprint: fingerprint.clone(),
            },
            label,
        ));
    }
    if rows.is_empty() {
        return Err(parse_err(path, 4, "feature table has no rows"));
    }
    Ok(rows)
}

/// Serialize any report or model as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))?;
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e.line(), e.to_string()))
}

/// Load a model, refusing one whose feature fingerprint differs from the
/// expected extraction config.
pub fn load_model(path: &Path, expected_fingerprint: &str) -> Result<SvmModel> {
    let model: SvmModel = read_json(path)?;
    if model.feature_fingerprint != expected_fingerprint {
        return Err(Error::config(format!(
            "model at {} was trained under feature config {}, current config is {}; \
             re-extract features or re-train",
            path.display(),
            model.feature_fingerprint,
            expected_fingerprint
        )));
    }
    Ok(model)
}
