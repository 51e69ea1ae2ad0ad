//! Accuracy, confusion matrices and sentence-length failure analysis.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::Dataset;
use crate::math::sqrt;
use crate::{Error, Label, Result, NUM_LABELS};

/// Counts indexed `[true][predicted]` in label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub counts: [[u64; NUM_LABELS]; NUM_LABELS],
}

impl ConfusionMatrix {
    pub fn record(&mut self, truth: Label, predicted: Label) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_LABELS).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, truth: Label) -> u64 {
        self.counts[truth.index()].iter().sum()
    }

    pub fn column_sum(&self, predicted: Label) -> u64 {
        self.counts.iter().map(|r| r[predicted.index()]).sum()
    }

    /// Zero when nothing was predicted as `label`.
    pub fn precision(&self, label: Label) -> f64 {
        ratio(self.counts[label.index()][label.index()], self.column_sum(label))
    }

    /// Zero when `label` does not occur in the test set.
    pub fn recall(&self, label: Label) -> f64 {
        ratio(self.counts[label.index()][label.index()], self.row_sum(label))
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.trace(), self.total())
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelMetrics {
    pub label: Label,
    pub precision: f64,
    pub recall: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub per_label: [LabelMetrics; NUM_LABELS],
    pub dataset: String,
    pub model: String,
    /// `(true, predicted, cleaned length)` per sentence, in dataset order.
    pub predictions: Vec<(Label, Label, usize)>,
}

impl EvalReport {
    pub fn from_predictions(predictions: Vec<(Label, Label, usize)>, dataset: &str, model: &str) -> Self {
        let mut confusion = ConfusionMatrix::default();
        for &(t, p, _) in &predictions {
            confusion.record(t, p);
        }
        let per_label = Label::ALL.map(|label| LabelMetrics {
            label,
            precision: confusion.precision(label),
            recall: confusion.recall(label),
            support: confusion.row_sum(label),
        });
        Self {
            accuracy: confusion.accuracy(),
            confusion,
            per_label,
            dataset: dataset.into(),
            model: model.into(),
            predictions,
        }
    }

    pub fn length_stats(&self) -> LengthStats {
        LengthStats::from_outcomes(self.predictions.iter().map(|&(t, p, len)| (t == p, len)))
    }
}

/// Predicts every sentence of `test` once, in order. The first failure is
/// returned with its index.
pub fn evaluate<F>(mut predict: F, test: &Dataset, dataset: &str, model: &str) -> Result<EvalReport>
where
    F: FnMut(&str) -> Result<Label>,
{
    if test.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = Vec::with_capacity(test.len());
    for (index, s) in test.iter().enumerate() {
        let p = predict(s.text()).map_err(|e| Error::Prediction { index, source: Box::new(e) })?;
        out.push((s.label(), p, s.length()));
    }
    Ok(EvalReport::from_predictions(out, dataset, model))
}

/// Population mean and standard deviation of one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
}

impl GroupStats {
    fn of(values: &[usize]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
        let var = values.iter().map(|&v| (v as f64 - mean) * (v as f64 - mean)).sum::<f64>() / n;
        Some(Self { count: values.len(), mean, std: sqrt(var) })
    }
}

/// Length statistics of correctly and incorrectly classified sentences.
/// Standard deviations use the population convention; empty groups are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthStats {
    pub all: Option<GroupStats>,
    pub correct: Option<GroupStats>,
    pub misclassified: Option<GroupStats>,
}

impl LengthStats {
    pub fn from_outcomes(outcomes: impl IntoIterator<Item = (bool, usize)>) -> Self {
        let (mut all, mut ok, mut bad) = (Vec::new(), Vec::new(), Vec::new());
        for (correct, len) in outcomes {
            all.push(len);
            if correct { ok.push(len) } else { bad.push(len) }
        }
        Self { all: GroupStats::of(&all), correct: GroupStats::of(&ok), misclassified: GroupStats::of(&bad) }
    }
}

/// Prediction failures are counted as misclassifications.
pub fn length_failure_analysis<F>(mut predict: F, test: &Dataset) -> LengthStats
where
    F: FnMut(&str) -> Result<Label>,
{
    LengthStats::from_outcomes(
        test.iter().map(|s| (predict(s.text()).is_ok_and(|l| l == s.label()), s.length())),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossDomainReport {
    pub in_domain: EvalReport,
    pub out_domain: EvalReport,
    /// In-domain accuracy minus out-of-domain accuracy.
    pub delta: f64,
}

pub fn cross_domain_eval<F>(
    mut predict: F,
    in_domain_test: &Dataset,
    out_domain_test: &Dataset,
    model: &str,
) -> Result<CrossDomainReport>
where
    F: FnMut(&str) -> Result<Label>,
{
    let in_domain = evaluate(&mut predict, in_domain_test, "in-domain", model)?;
    let out_domain = evaluate(&mut predict, out_domain_test, "out-of-domain", model)?;
    let delta = in_domain.accuracy - out_domain.accuracy;
    Ok(CrossDomainReport { in_domain, out_domain, delta })
}
