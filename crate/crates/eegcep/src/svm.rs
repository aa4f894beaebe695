//! RBF-kernel SVM trained by sequential minimal optimization, one-vs-one
//! multiclass wrapping, and stratified k-fold cross-validation with grid
//! search.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{classification_metrics, ClassificationMetrics};

/// Feature matrix with dense class ids.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::domain(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if features.is_empty() {
            return Err(Error::domain("empty dataset"));
        }
        let dim = features[0].len();
        for (i, row) in features.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::domain(format!(
                    "row {i} has {} features, row 0 has {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("non-finite feature in row {i}")));
            }
        }
        for (i, &l) in labels.iter().enumerate() {
            if l >= class_names.len() {
                return Err(Error::domain(format!(
                    "label {l} in row {i} outside the {} declared classes",
                    class_names.len()
                )));
            }
        }
        Ok(LabeledDataset {
            features,
            labels,
            class_names,
        })
    }

    pub fn num_features(&self) -> usize {
        self.features[0].len()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

/// Per-dimension z-score statistics captured at training time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardization {
    fn fit(rows: &[Vec<f64>]) -> Standardization {
        let dim = rows[0].len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; dim];
        for row in rows {
            for ((v, m), x) in var.iter_mut().zip(&mean).zip(row) {
                let d = x - m;
                *v += d * d;
            }
        }
        let std = var
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Standardization { mean, std }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }
}

/// One trained binary machine of the one-vs-one ensemble. Decision > 0
/// votes for `pair.0`, otherwise for `pair.1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvm {
    pub pair: (usize, usize),
    /// Standardized support vectors.
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` per support vector.
    pub dual_coeffs: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Trained RBF kernel machine: one binary machine per class pair, plus the
/// standardization captured at training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub machines: Vec<BinarySvm>,
    pub gamma: f64,
    pub c: f64,
    pub class_names: Vec<String>,
    pub standardization: Standardization,
    pub num_features: usize,
    /// Fingerprint of the feature-extraction config the model was trained
    /// against; prediction refuses mismatched features upstream.
    pub feature_fingerprint: String,
}

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

impl SvmModel {
    /// Decision value of one binary machine on a raw (unstandardized) row.
    pub fn machine_decision(&self, machine: &BinarySvm, features: &[f64]) -> f64 {
        let x = self.standardization.apply(features);
        machine
            .support_vectors
            .iter()
            .zip(&machine.dual_coeffs)
            .map(|(sv, d)| d * rbf(sv, &x, self.gamma))
            .sum::<f64>()
            + machine.bias
    }
}

struct SmoProblem<'a> {
    labels: &'a [f64],
    kernel: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    errors: Vec<f64>,
    bias: f64,
    c: f64,
    tol: f64,
}

impl<'a> SmoProblem<'a> {
    fn new(rows: &'a [Vec<f64>], labels: &'a [f64], c: f64, gamma: f64, tol: f64) -> Self {
        let n = rows.len();
        let mut kernel = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                let k = rbf(&rows[i], &rows[j], gamma);
                kernel[i][j] = k;
                kernel[j][i] = k;
            }
        }
        let errors = labels.iter().map(|y| -y).collect();
        SmoProblem {
            labels,
            kernel,
            alpha: vec![0.0; n],
            errors,
            bias: 0.0,
            c,
            tol,
        }
    }

    fn decision(&self, i: usize) -> f64 {
        self.errors[i] + self.labels[i]
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (a1_old, a2_old) = (self.alpha[i1], self.alpha[i2]);
        let (y1, y2) = (self.labels[i1], self.labels[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;
        let (low, high) = if s < 0.0 {
            let d = a2_old - a1_old;
            (d.max(0.0), (self.c + d).min(self.c))
        } else {
            let sum = a1_old + a2_old;
            ((sum - self.c).max(0.0), sum.min(self.c))
        };
        if low >= high {
            return false;
        }
        let k11 = self.kernel[i1][i1];
        let k12 = self.kernel[i1][i2];
        let k22 = self.kernel[i2][i2];
        let eta = k11 + k22 - 2.0 * k12;
        let mut a2 = if eta > 0.0 {
            (a2_old + y2 * (e1 - e2) / eta).clamp(low, high)
        } else {
            // degenerate kernel direction: test both ends of the segment
            let f1 = y1 * (e1 + self.bias) - a1_old * k11 - s * a2_old * k12;
            let f2 = y2 * (e2 + self.bias) - s * a1_old * k12 - a2_old * k22;
            let l1 = a1_old + s * (a2_old - low);
            let h1 = a1_old + s * (a2_old - high);
            let obj_l = l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11 + 0.5 * low * low * k22
                + s * low * l1 * k12;
            let obj_h = h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11 + 0.5 * high * high * k22
                + s * high * h1 * k12;
            if obj_l < obj_h - 1e-12 {
                low
            } else if obj_h < obj_l - 1e-12 {
                high
            } else {
                a2_old
            }
        };
        if a2 < 1e-12 {
            a2 = 0.0;
        } else if a2 > self.c - 1e-12 {
            a2 = self.c;
        }
        if (a2 - a2_old).abs() < 1e-12 * (a2 + a2_old + 1e-12) {
            return false;
        }
        let a1 = a1_old + s * (a2_old - a2);

        let b1 = e1 + y1 * (a1 - a1_old) * k11 + y2 * (a2 - a2_old) * k12 + self.bias;
        let b2 = e2 + y1 * (a1 - a1_old) * k12 + y2 * (a2 - a2_old) * k22 + self.bias;
        let new_bias = if a1 > 0.0 && a1 < self.c {
            b1
        } else if a2 > 0.0 && a2 < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        let delta_b = new_bias - self.bias;
        self.bias = new_bias;
        self.alpha[i1] = a1;
        self.alpha[i2] = a2;
        for i in 0..self.errors.len() {
            self.errors[i] += y1 * (a1 - a1_old) * self.kernel[i1][i]
                + y2 * (a2 - a2_old) * self.kernel[i2][i]
                - delta_b;
        }
        true
    }

    fn examine(&mut self, i2: usize, rng: &mut ChaCha8Rng) -> bool {
        let y2 = self.labels[i2];
        let a2 = self.alpha[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * y2;
        if (r2 < -self.tol && a2 < self.c) || (r2 > self.tol && a2 > 0.0) {
            let non_bound: Vec<usize> = (0..self.alpha.len())
                .filter(|&i| self.alpha[i] > 0.0 && self.alpha[i] < self.c)
                .collect();
            if non_bound.len() > 1 {
                // second-choice heuristic: maximize |E1 - E2|
                let i1 = *non_bound
                    .iter()
                    .max_by(|&&a, &&b| {
                        let da = (self.errors[a] - e2).abs();
                        let db = (self.errors[b] - e2).abs();
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap();
                if self.take_step(i1, i2) {
                    return true;
                }
            }
            let start = rng.gen_range(0..self.alpha.len());
            for off in 0..non_bound.len() {
                let i1 = non_bound[(start + off) % non_bound.len()];
                if self.take_step(i1, i2) {
                    return true;
                }
            }
            let start = rng.gen_range(0..self.alpha.len());
            for off in 0..self.alpha.len() {
                let i1 = (start + off) % self.alpha.len();
                if self.take_step(i1, i2) {
                    return true;
                }
            }
        }
        false
    }

    /// Maximum violation of the KKT optimality conditions over all points.
    fn max_kkt_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.alpha.len() {
            let margin = self.labels[i] * self.decision(i);
            let v = if self.alpha[i] <= 0.0 {
                1.0 - margin
            } else if self.alpha[i] >= self.c {
                margin - 1.0
            } else {
                (margin - 1.0).abs()
            };
            worst = worst.max(v.max(0.0));
        }
        worst
    }
}

fn train_binary(
    rows: &[Vec<f64>],
    labels: &[f64],
    pair: (usize, usize),
    c: f64,
    gamma: f64,
    tol: f64,
    max_passes: usize,
    seed: u64,
) -> BinarySvm {
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed ^ (pair.0 as u64).wrapping_mul(0x9e3779b97f4a7c15) ^ pair.1 as u64,
    );
    let mut smo = SmoProblem::new(rows, labels, c, gamma, tol);
    let n = rows.len();
    let mut examine_all = true;
    let mut passes = 0;
    loop {
        let mut changed = 0;
        if examine_all {
            for i in 0..n {
                if smo.examine(i, &mut rng) {
                    changed += 1;
                }
            }
        } else {
            for i in 0..n {
                if smo.alpha[i] > 0.0 && smo.alpha[i] < c && smo.examine(i, &mut rng) {
                    changed += 1;
                }
            }
        }
        passes += 1;
        if examine_all {
            if changed == 0 {
                break;
            }
            examine_all = false;
        } else if changed == 0 {
            examine_all = true;
        }
        if passes >= max_passes {
            break;
        }
    }
    let converged = smo.max_kkt_violation() <= tol;

    let mut support_vectors = Vec::new();
    let mut dual_coeffs = Vec::new();
    for i in 0..n {
        if smo.alpha[i] > 1e-10 {
            support_vectors.push(rows[i].clone());
            dual_coeffs.push(smo.alpha[i] * labels[i]);
        }
    }
    BinarySvm {
        pair,
        support_vectors,
        dual_coeffs,
        bias: -smo.bias,
        converged,
        iterations: passes,
    }
}

/// Train a one-vs-one RBF-SVM. Features are z-scored internally; the
/// statistics travel with the model.
pub fn svm_train(
    dataset: &LabeledDataset,
    c: f64,
    gamma: f64,
    tol: f64,
    max_passes: usize,
    seed: u64,
    feature_fingerprint: &str,
) -> Result<SvmModel> {
    if !(c > 0.0) || !(gamma > 0.0) {
        return Err(Error::domain(format!("C and gamma must be > 0, got C={c} gamma={gamma}")));
    }
    let counts = dataset.class_counts();
    let present: Vec<usize> = (0..dataset.num_classes()).filter(|&k| counts[k] > 0).collect();
    if present.len() < 2 {
        return Err(Error::domain(format!(
            "training needs at least 2 classes with samples, got {}",
            present.len()
        )));
    }
    for &k in &present {
        if counts[k] < 2 {
            return Err(Error::domain(format!(
                "class '{}' has {} sample(s), needs at least 2",
                dataset.class_names[k], counts[k]
            )));
        }
    }
    let standardization = Standardization::fit(&dataset.features);
    let standardized: Vec<Vec<f64>> = dataset
        .features
        .iter()
        .map(|r| standardization.apply(r))
        .collect();

    let mut machines = Vec::new();
    for (ai, &a) in present.iter().enumerate() {
        for &b in &present[ai + 1..] {
            let mut rows = Vec::new();
            let mut labels = Vec::new();
            for (row, &l) in standardized.iter().zip(&dataset.labels) {
                if l == a {
                    rows.push(row.clone());
                    labels.push(1.0);
                } else if l == b {
                    rows.push(row.clone());
                    labels.push(-1.0);
                }
            }
            machines.push(train_binary(
                &rows, &labels, (a, b), c, gamma, tol, max_passes, seed,
            ));
        }
    }
    Ok(SvmModel {
        machines,
        gamma,
        c,
        class_names: dataset.class_names.clone(),
        standardization,
        num_features: dataset.num_features(),
        feature_fingerprint: feature_fingerprint.to_string(),
    })
}

/// One-vs-one majority vote. Ties break by summed decision magnitude
/// toward each class, then by lowest class id.
pub fn svm_predict(model: &SvmModel, features: &[f64]) -> Result<(usize, Vec<u32>)> {
    if features.len() != model.num_features {
        return Err(Error::domain(format!(
            "feature length {} does not match model's {}",
            features.len(),
            model.num_features
        )));
    }
    let mut votes = vec![0u32; model.class_names.len()];
    let mut strength = vec![0.0f64; model.class_names.len()];
    for machine in &model.machines {
        let d = model.machine_decision(machine, features);
        if d > 0.0 {
            votes[machine.pair.0] += 1;
        } else {
            votes[machine.pair.1] += 1;
        }
        strength[machine.pair.0] += d;
        strength[machine.pair.1] -= d;
    }
    let mut best = 0usize;
    for k in 1..votes.len() {
        if votes[k] > votes[best]
            || (votes[k] == votes[best] && strength[k] > strength[best])
        {
            best = k;
        }
    }
    Ok((best, votes))
}

/// Hyper-parameter grid for cross-validated search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamGrid {
    pub c_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        ParamGrid {
            c_values: vec![0.1, 1.0, 10.0, 100.0],
            gamma_values: vec![0.01, 0.1, 1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPoint {
    pub c: f64,
    pub gamma: f64,
    pub mean_accuracy: f64,
}

/// Cross-validation report at the best grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub best_c: f64,
    pub best_gamma: f64,
    pub fold_metrics: Vec<ClassificationMetrics>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_macro_precision: f64,
    pub mean_macro_recall: f64,
    pub mean_macro_f1: f64,
    /// Pooled confusion matrix over all validation folds at the best point.
    pub confusion: Vec<Vec<usize>>,
    pub grid_scores: Vec<GridPoint>,
}

/// Stratified fold assignment: per class, a seeded shuffle dealt
/// round-robin, so per-fold class proportions stay within one sample of
/// the global proportions.
pub fn stratified_folds(labels: &[usize], num_classes: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::config("k must be >= 2"));
    }
    let mut fold = vec![0usize; labels.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for class in 0..num_classes {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if !idx.is_empty() && idx.len() < k {
            return Err(Error::config(format!(
                "class {class} has {} samples, fewer than k={k}",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for (pos, &i) in idx.iter().enumerate() {
            fold[i] = pos % k;
        }
    }
    Ok(fold)
}

/// Grid search over (C, gamma) with stratified k-fold CV. Returns the
/// report and the best-point model retrained on all data.
pub fn grid_search_cv(
    dataset: &LabeledDataset,
    grid: &ParamGrid,
    k: usize,
    seed: u64,
    tol: f64,
    max_passes: usize,
) -> Result<(CvReport, SvmModel)> {
    let fold = stratified_folds(&dataset.labels, dataset.num_classes(), k, seed)?;
    let fingerprint = "cv";

    let mut grid_scores = Vec::new();
    let mut best: Option<(f64, f64, f64, Vec<Vec<(usize, usize)>>)> = None;
    for &c in &grid.c_values {
        for &gamma in &grid.gamma_values {
            let mut fold_preds: Vec<Vec<(usize, usize)>> = Vec::with_capacity(k);
            let mut acc_sum = 0.0;
            for f in 0..k {
                let mut train_rows = Vec::new();
                let mut train_labels = Vec::new();
                let mut val_idx = Vec::new();
                for i in 0..dataset.labels.len() {
                    if fold[i] == f {
                        val_idx.push(i);
                    } else {
                        train_rows.push(dataset.features[i].clone());
                        train_labels.push(dataset.labels[i]);
                    }
                }
                let train = LabeledDataset::new(
                    train_rows,
                    train_labels,
                    dataset.class_names.clone(),
                )?;
                let model = svm_train(&train, c, gamma, tol, max_passes, seed, fingerprint)?;
                let mut preds = Vec::with_capacity(val_idx.len());
                let mut correct = 0usize;
                for &i in &val_idx {
                    let (p, _) = svm_predict(&model, &dataset.features[i])?;
                    if p == dataset.labels[i] {
                        correct += 1;
                    }
                    preds.push((dataset.labels[i], p));
                }
                acc_sum += correct as f64 / val_idx.len() as f64;
                fold_preds.push(preds);
            }
            let mean_acc = acc_sum / k as f64;
            grid_scores.push(GridPoint {
                c,
                gamma,
                mean_accuracy: mean_acc,
            });
            let better = match &best {
                None => true,
                Some((best_acc, _, _, _)) => mean_acc > *best_acc,
            };
            if better {
                best = Some((mean_acc, c, gamma, fold_preds));
            }
        }
    }
    let (_, best_c, best_gamma, fold_preds) = best.expect("non-empty grid");

    let mut fold_metrics = Vec::with_capacity(k);
    let mut confusion = vec![vec![0usize; dataset.num_classes()]; dataset.num_classes()];
    for preds in &fold_preds {
        let y_true: Vec<usize> = preds.iter().map(|&(t, _)| t).collect();
        let y_pred: Vec<usize> = preds.iter().map(|&(_, p)| p).collect();
        let m = classification_metrics(&y_true, &y_pred, dataset.num_classes())?;
        for (t, row) in m.confusion.iter().enumerate() {
            for (p, &v) in row.iter().enumerate() {
                confusion[t][p] += v;
            }
        }
        fold_metrics.push(m);
    }
    let accs: Vec<f64> = fold_metrics.iter().map(|m| m.accuracy).collect();
    let mean_accuracy = accs.iter().sum::<f64>() / k as f64;
    let var = accs
        .iter()
        .map(|a| (a - mean_accuracy) * (a - mean_accuracy))
        .sum::<f64>()
        / k as f64;
    let mean = |f: fn(&ClassificationMetrics) -> f64| {
        fold_metrics.iter().map(f).sum::<f64>() / k as f64
    };
    let report = CvReport {
        k,
        best_c,
        best_gamma,
        mean_accuracy,
        std_accuracy: var.sqrt(),
        mean_macro_precision: mean(|m| m.macro_precision),
        mean_macro_recall: mean(|m| m.macro_recall),
        mean_macro_f1: mean(|m| m.macro_f1),
        fold_metrics,
        confusion,
        grid_scores,
    };
    let model = svm_train(dataset, best_c, best_gamma, tol, max_passes, seed, fingerprint)?;
    Ok((report, model))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_dataset() -> LabeledDataset {
        LabeledDataset::new(
            vec![
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
            ],
            vec![0, 1, 1, 0],
            vec!["even".into(), "odd".into()],
        )
        .unwrap()
    }

    fn two_clusters(n: usize, seed: u64) -> LabeledDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let class = i % 2;
            let center = if class == 0 { -2.0 } else { 2.0 };
            features.push(vec![
                center + rng.gen_range(-0.5..0.5),
                center + rng.gen_range(-0.5..0.5),
            ]);
            labels.push(class);
        }
        LabeledDataset::new(features, labels, vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn rbf_separates_xor() {
        let ds = xor_dataset();
        let model = svm_train(&ds, 10.0, 1.0, 1e-3, 200, 1, "t").unwrap();
        for (row, &label) in ds.features.iter().zip(&ds.labels) {
            let (p, _) = svm_predict(&model, row).unwrap();
            assert_eq!(p, label);
        }
    }

    #[test]
    fn separable_clusters_satisfy_margins() {
        let ds = two_clusters(60, 2);
        let tol = 1e-3;
        let model = svm_train(&ds, 10.0, 0.5, tol, 500, 3, "t").unwrap();
        let machine = &model.machines[0];
        for (row, &label) in ds.features.iter().zip(&ds.labels) {
            let y = if label == machine.pair.0 { 1.0 } else { -1.0 };
            let f = model.machine_decision(machine, row);
            let alpha_bound = machine
                .support_vectors
                .iter()
                .zip(&machine.dual_coeffs)
                .any(|(sv, d)| {
                    sv == &model.standardization.apply(row) && d.abs() >= model.c - 1e-9
                });
            if !alpha_bound {
                assert!(y * f >= 1.0 - tol - 1e-6, "margin violated: y*f = {}", y * f);
            }
        }
    }

    #[test]
    fn duplication_invariance_of_decision() {
        let ds = two_clusters(40, 4);
        let mut doubled_rows = ds.features.clone();
        doubled_rows.extend(ds.features.clone());
        let mut doubled_labels = ds.labels.clone();
        doubled_labels.extend(ds.labels.clone());
        let ds2 =
            LabeledDataset::new(doubled_rows, doubled_labels, ds.class_names.clone()).unwrap();
        let m1 = svm_train(&ds, 10.0, 0.5, 1e-4, 1000, 5, "t").unwrap();
        let m2 = svm_train(&ds2, 10.0, 0.5, 1e-4, 1000, 5, "t").unwrap();
        for gx in -4..=4 {
            for gy in -4..=4 {
                let probe = vec![gx as f64, gy as f64];
                let d1 = m1.machine_decision(&m1.machines[0], &probe);
                let d2 = m2.machine_decision(&m2.machines[0], &probe);
                assert!(
                    (d1 - d2).abs() < 1e-3,
                    "decision drifted under duplication: {d1} vs {d2}"
                );
            }
        }
    }

    #[test]
    fn row_order_invariance_of_decision() {
        let ds = two_clusters(50, 6);
        let mut order: Vec<usize> = (0..ds.features.len()).collect();
        order.reverse();
        let ds2 = LabeledDataset::new(
            order.iter().map(|&i| ds.features[i].clone()).collect(),
            order.iter().map(|&i| ds.labels[i]).collect(),
            ds.class_names.clone(),
        )
        .unwrap();
        let m1 = svm_train(&ds, 10.0, 0.5, 1e-4, 1000, 7, "t").unwrap();
        let m2 = svm_train(&ds2, 10.0, 0.5, 1e-4, 1000, 7, "t").unwrap();
        for gx in -3..=3 {
            let probe = vec![gx as f64, -(gx as f64)];
            let d1 = m1.machine_decision(&m1.machines[0], &probe);
            let d2 = m2.machine_decision(&m2.machines[0], &probe);
            assert!((d1 - d2).abs() < 1e-3);
        }
    }

    #[test]
    fn dual_constraints_hold() {
        let ds = two_clusters(60, 8);
        let model = svm_train(&ds, 5.0, 0.5, 1e-3, 500, 9, "t").unwrap();
        for machine in &model.machines {
            let sum: f64 = machine.dual_coeffs.iter().sum();
            assert!(sum.abs() <= 1e-3, "sum alpha_i y_i = {sum}");
            for &d in &machine.dual_coeffs {
                assert!(d.abs() <= model.c + 1e-9);
            }
            let pos = machine.dual_coeffs.iter().filter(|&&d| d > 0.0).count();
            let neg = machine.dual_coeffs.iter().filter(|&&d| d < 0.0).count();
            assert!(pos >= 1 && neg >= 1, "support vectors missing on one side");
        }
    }

    #[test]
    fn predict_training_support_vector_label() {
        let ds = two_clusters(30, 10);
        let model = svm_train(&ds, 10.0, 0.5, 1e-3, 500, 11, "t").unwrap();
        for (row, &label) in ds.features.iter().zip(&ds.labels) {
            let (p, _) = svm_predict(&model, row).unwrap();
            assert_eq!(p, label);
        }
    }

    #[test]
    fn binary_sign_decides_class() {
        let ds = two_clusters(30, 12);
        let model = svm_train(&ds, 10.0, 0.5, 1e-3, 500, 13, "t").unwrap();
        let machine = &model.machines[0];
        for row in &ds.features {
            let d = model.machine_decision(machine, row);
            let (p, _) = svm_predict(&model, row).unwrap();
            let expect = if d > 0.0 { machine.pair.0 } else { machine.pair.1 };
            assert_eq!(p, expect);
        }
    }

    #[test]
    fn three_class_votes_match_hand_enumeration() {
        // three tight clusters; a point at cluster 0 should win both of
        // its machines: votes (2, distributed among 1 and 2)
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let centers = [(-3.0, 0.0), (3.0, 0.0), (0.0, 4.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for (c, &(cx, cy)) in centers.iter().enumerate() {
            for _ in 0..10 {
                features.push(vec![
                    cx + rng.gen_range(-0.3..0.3),
                    cy + rng.gen_range(-0.3..0.3),
                ]);
                labels.push(c);
            }
        }
        let ds = LabeledDataset::new(
            features,
            labels,
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let model = svm_train(&ds, 10.0, 0.5, 1e-3, 500, 15, "t").unwrap();
        assert_eq!(model.machines.len(), 3);
        let (p, votes) = svm_predict(&model, &[-3.0, 0.0]).unwrap();
        assert_eq!(p, 0);
        assert_eq!(votes[0], 2);
        assert_eq!(votes.iter().sum::<u32>(), 3);
    }

    #[test]
    fn rejects_tiny_class() {
        let ds = LabeledDataset::new(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![0, 0, 1],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert!(svm_train(&ds, 1.0, 1.0, 1e-3, 100, 1, "t").is_err());
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let ds = two_clusters(20, 16);
        let model = svm_train(&ds, 1.0, 1.0, 1e-3, 100, 1, "t").unwrap();
        assert!(svm_predict(&model, &[1.0]).is_err());
    }

    #[test]
    fn folds_partition_dataset() {
        let ds = two_clusters(50, 18);
        let fold = stratified_folds(&ds.labels, 2, 5, 42).unwrap();
        assert_eq!(fold.len(), 50);
        for f in 0..5 {
            let count = fold.iter().filter(|&&x| x == f).count();
            assert_eq!(count, 10);
        }
    }

    #[test]
    fn folds_are_stratified_within_one_sample() {
        for seed in 0..20u64 {
            let mut labels = vec![0usize; 23];
            labels.extend(vec![1usize; 31]);
            labels.extend(vec![2usize; 17]);
            let fold = stratified_folds(&labels, 3, 5, seed).unwrap();
            for class in 0..3 {
                let total = labels.iter().filter(|&&l| l == class).count();
                for f in 0..5 {
                    let in_fold = labels
                        .iter()
                        .zip(&fold)
                        .filter(|&(&l, &ff)| l == class && ff == f)
                        .count();
                    let expected = total as f64 / 5.0;
                    assert!((in_fold as f64 - expected).abs() <= 1.0);
                }
            }
        }
    }

    #[test]
    fn folds_reject_small_class() {
        let labels = vec![0, 0, 0, 1, 1, 1, 1, 1, 1];
        assert!(stratified_folds(&labels, 2, 5, 1).is_err());
    }

    #[test]
    fn degenerate_grid_equals_plain_cv() {
        let ds = two_clusters(40, 20);
        let grid = ParamGrid {
            c_values: vec![10.0],
            gamma_values: vec![0.5],
        };
        let (report, _) = grid_search_cv(&ds, &grid, 4, 7, 1e-3, 300, ).unwrap();
        assert_eq!(report.best_c, 10.0);
        assert_eq!(report.best_gamma, 0.5);
        assert_eq!(report.grid_scores.len(), 1);
        assert!((report.grid_scores[0].mean_accuracy - report.mean_accuracy).abs() < 1e-12);
        assert!(report.mean_accuracy > 0.9);
    }
}
