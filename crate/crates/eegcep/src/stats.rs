//! Statistical tests and classification metrics: Pearson correlation,
//! Kruskal-Wallis with tie correction, and macro-averaged metrics.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Pearson correlation of two equal-length series.
///
/// Returns [`Error::ConstantSeries`] when either series is constant, so
/// callers that rank dimensions can treat the value as 0 with a flag.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "pearson needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::domain("pearson needs at least 2 samples"));
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::ConstantSeries);
    }
    let r = cov / (var_a * var_b).sqrt();
    Ok(r.clamp(-1.0, 1.0))
}

/// Midranks of pooled values; ties receive the average of their ranks.
fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Kruskal-Wallis rank test with tie correction.
///
/// Returns the H statistic and the chi-squared upper-tail p-value with
/// `groups - 1` degrees of freedom. All values identical gives H = 0,
/// p = 1.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<(f64, f64)> {
    if groups.len() < 2 {
        return Err(Error::domain("Kruskal-Wallis needs at least 2 groups"));
    }
    for (i, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(Error::domain(format!("group {i} is empty")));
        }
    }
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let ranks = midranks(&pooled);

    let mut h = 0.0;
    let mut offset = 0;
    for g in groups {
        let r_sum: f64 = ranks[offset..offset + g.len()].iter().sum();
        h += r_sum * r_sum / g.len() as f64;
        offset += g.len();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    // tie correction
    let mut sorted = pooled.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let correction = 1.0 - tie_term / (n * n * n - n);
    if correction <= 0.0 {
        // all values identical across all groups
        return Ok((0.0, 1.0));
    }
    let h = (h / correction).max(0.0);

    let df = (groups.len() - 1) as f64;
    let chi = ChiSquared::new(df).map_err(|e| Error::Numerical(e.to_string()))?;
    let p = 1.0 - chi.cdf(h);
    Ok((h, p.clamp(0.0, 1.0)))
}

/// Macro-averaged classification metrics and the confusion matrix.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    /// `confusion[true][pred]`
    pub confusion: Vec<Vec<usize>>,
    /// Classes absent from the true labels, which contribute 0 to macros.
    pub absent_classes: Vec<usize>,
}

pub fn classification_metrics(
    y_true: &[usize],
    y_pred: &[usize],
    num_classes: usize,
) -> Result<ClassificationMetrics> {
    if y_true.is_empty() {
        return Err(Error::domain("metrics of empty predictions"));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::domain("label/prediction length mismatch"));
    }
    let mut confusion = vec![vec![0usize; num_classes]; num_classes];
    let mut correct = 0;
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= num_classes || p >= num_classes {
            return Err(Error::domain(format!(
                "label out of range: true={t} pred={p} classes={num_classes}"
            )));
        }
        confusion[t][p] += 1;
        if t == p {
            correct += 1;
        }
    }
    let mut absent = Vec::new();
    let mut prec_sum = 0.0;
    let mut rec_sum = 0.0;
    let mut f1_sum = 0.0;
    for c in 0..num_classes {
        let tp = confusion[c][c] as f64;
        let pred_c: f64 = (0..num_classes).map(|t| confusion[t][c] as f64).sum();
        let true_c: f64 = confusion[c].iter().map(|&v| v as f64).sum();
        if true_c == 0.0 {
            absent.push(c);
            continue;
        }
        let precision = if pred_c > 0.0 { tp / pred_c } else { 0.0 };
        let recall = tp / true_c;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        prec_sum += precision;
        rec_sum += recall;
        f1_sum += f1;
    }
    let k = num_classes as f64;
    Ok(ClassificationMetrics {
        accuracy: correct as f64 / y_true.len() as f64,
        macro_precision: prec_sum / k,
        macro_recall: rec_sum / k,
        macro_f1: f1_sum / k,
        confusion,
        absent_classes: absent,
    })
}
