//! Self-contained logistic regression on dense vectors, plus k-fold
//! splitting and evaluation. Single sigmoid head for binary problems,
//! one-vs-rest heads for multiclass; mini-batch gradient descent with seeded
//! shuffling, so identical config + data always give an identical model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Gradient-descent hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { learning_rate: 0.1, epochs: 200, l2: 1e-4, seed: 0, batch_size: 64 }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter("learning_rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be positive".into()));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::InvalidParameter("l2 must be non-negative".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter("batch_size must be positive".into()));
        }
        Ok(())
    }
}

/// Trained model. For two classes there is a single head scoring
/// `classes[1]` (classes are kept sorted, so the positive class is the
/// lexicographically larger label); for C > 2 classes there is one
/// one-vs-rest head per class, in class order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LRModel {
    pub classes: Vec<String>,
    pub biases: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
}

impl LRModel {
    /// Input dimension the model was trained on.
    pub fn dimension(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    fn head_count_for(classes: usize) -> usize {
        if classes == 2 {
            1
        } else {
            classes
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.len() < 2 {
            return Err(Error::InvalidParameter("model must carry at least 2 classes".into()));
        }
        let heads = Self::head_count_for(self.classes.len());
        if self.biases.len() != heads || self.weights.len() != heads {
            return Err(Error::DimensionMismatch {
                expected: heads,
                got: self.weights.len(),
                what: "model heads",
            });
        }
        let d = self.dimension();
        for w in &self.weights {
            if w.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: w.len(), what: "head weight dims" });
            }
            if w.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("model weights".into()));
            }
        }
        if self.biases.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("model biases".into()));
        }
        let mut sorted = self.classes.clone();
        sorted.sort();
        sorted.dedup();
        if sorted != self.classes {
            return Err(Error::InvalidParameter("model classes must be sorted and distinct".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: LRModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    /// Per-head sigmoid scores for one input.
    pub fn scores(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: input.len(),
                what: "input dims at inference",
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| sigmoid(dot(w, input) + b))
            .collect())
    }

    /// Predicted class label. Binary: positive iff score ≥ 1/2. Multiclass:
    /// highest-scoring head, first head on exact ties.
    pub fn predict(&self, input: &[f64]) -> Result<&str> {
        let scores = self.scores(input)?;
        if self.classes.len() == 2 {
            Ok(if scores[0] >= 0.5 { &self.classes[1] } else { &self.classes[0] })
        } else {
            let mut best = 0;
            for (i, s) in scores.iter().enumerate() {
                if *s > scores[best] {
                    best = i;
                }
            }
            Ok(&self.classes[best])
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Numerically stable logistic function.
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Regularized mean cross-entropy loss and its gradient at (weights, bias)
/// for binary targets in {0, 1}:
/// `loss = mean(CE) + 0.5·l2·‖w‖²` (bias unregularized),
/// `∂loss/∂w = Xᵀ(σ(Xw+b) − y)/B + l2·w`, `∂loss/∂b = mean(σ(Xw+b) − y)`.
pub fn loss_and_gradient(
    weights: &[f64],
    bias: f64,
    inputs: &[Vec<f64>],
    targets: &[f64],
    l2: f64,
) -> Result<(f64, Vec<f64>, f64)> {
    if inputs.is_empty() {
        return Err(Error::EmptyInput("loss needs at least one sample"));
    }
    if inputs.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            got: targets.len(),
            what: "targets for inputs",
        });
    }
    let d = weights.len();
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; d];
    let mut grad_b = 0.0;
    let inv = 1.0 / inputs.len() as f64;
    for (x, &y) in inputs.iter().zip(targets) {
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len(), what: "input dims" });
        }
        let z = dot(weights, x) + bias;
        // Stable binary cross-entropy with logits.
        loss += inv * (z.max(0.0) - z * y + (-z.abs()).exp().ln_1p());
        let err = inv * (sigmoid(z) - y);
        for (g, &xi) in grad_w.iter_mut().zip(x) {
            *g += err * xi;
        }
        grad_b += err;
    }
    let mut reg = 0.0;
    for (g, &w) in grad_w.iter_mut().zip(weights) {
        *g += l2 * w;
        reg += w * w;
    }
    loss += 0.5 * l2 * reg;
    Ok((loss, grad_w, grad_b))
}

fn check_training_inputs(inputs: &[Vec<f64>], labels: &[String]) -> Result<usize> {
    if inputs.is_empty() {
        return Err(Error::EmptyInput("training needs at least one sample"));
    }
    if inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            got: labels.len(),
            what: "labels for inputs",
        });
    }
    let d = inputs[0].len();
    if d == 0 {
        return Err(Error::EmptyInput("inputs must have at least one dimension"));
    }
    for (i, x) in inputs.iter().enumerate() {
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len(), what: "input dims" });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("input sample {i}")));
        }
    }
    Ok(d)
}

fn train_head(
    inputs: &[Vec<f64>],
    targets: &[f64],
    cfg: &TrainConfig,
    d: usize,
) -> (Vec<f64>, f64, Vec<f64>) {
    let mut weights = vec![0.0; d];
    let mut bias = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let bx: Vec<Vec<f64>> = batch.iter().map(|&i| inputs[i].clone()).collect();
            let by: Vec<f64> = batch.iter().map(|&i| targets[i]).collect();
            let (_, gw, gb) = loss_and_gradient(&weights, bias, &bx, &by, cfg.l2)
                .expect("validated inputs cannot fail");
            for (w, g) in weights.iter_mut().zip(&gw) {
                *w -= cfg.learning_rate * g;
            }
            bias -= cfg.learning_rate * gb;
        }
        let (epoch_loss, _, _) = loss_and_gradient(&weights, bias, inputs, targets, cfg.l2)
            .expect("validated inputs cannot fail");
        history.push(epoch_loss);
    }
    (weights, bias, history)
}

/// Trains a model and returns the full-dataset regularized loss measured at
/// the end of every epoch (averaged across heads for multiclass).
pub fn train_with_loss_history(
    inputs: &[Vec<f64>],
    labels: &[String],
    cfg: &TrainConfig,
) -> Result<(LRModel, Vec<f64>)> {
    cfg.validate()?;
    let d = check_training_inputs(inputs, labels)?;
    let classes: Vec<String> = labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if classes.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "training needs at least 2 classes, got {}",
            classes.len()
        )));
    }
    let head_classes: Vec<&String> =
        if classes.len() == 2 { vec![&classes[1]] } else { classes.iter().collect() };
    let mut biases = Vec::with_capacity(head_classes.len());
    let mut weights = Vec::with_capacity(head_classes.len());
    let mut history = vec![0.0; cfg.epochs];
    for target_class in &head_classes {
        let targets: Vec<f64> =
            labels.iter().map(|l| if l == *target_class { 1.0 } else { 0.0 }).collect();
        let (w, b, h) = train_head(inputs, &targets, cfg, d);
        weights.push(w);
        biases.push(b);
        for (acc, v) in history.iter_mut().zip(&h) {
            *acc += v / head_classes.len() as f64;
        }
    }
    let model = LRModel { classes, biases, weights };
    model.validate()?;
    Ok((model, history))
}

/// Trains a logistic-regression model. See [`train_with_loss_history`] for
/// the variant that also reports per-epoch loss.
pub fn train(inputs: &[Vec<f64>], labels: &[String], cfg: &TrainConfig) -> Result<LRModel> {
    train_with_loss_history(inputs, labels, cfg).map(|(m, _)| m)
}

/// Square confusion matrix in model class order: `counts[actual][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

/// Evaluation summary on one labeled set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub f1_positive: f64,
    pub f1_macro: f64,
    pub auc: f64,
    pub confusion: ConfusionMatrix,
}

/// Area under the ROC curve by trapezoidal integration with tied scores
/// grouped into single ROC steps. Integration runs in raw (FP, TP) count
/// space and normalizes once at the end, which makes the result coincide —
/// exactly, not approximately — with concordant-pair counting.
pub fn auc_trapezoidal(scores: &[f64], positives: &[bool]) -> Result<f64> {
    if scores.len() != positives.len() {
        return Err(Error::DimensionMismatch {
            expected: scores.len(),
            got: positives.len(),
            what: "labels for scores",
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("scores".into()));
    }
    let pos = positives.iter().filter(|&&p| p).count() as u64;
    let neg = positives.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Undefined(
            "AUC needs at least one positive and one negative sample".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).expect("finite scores"));
    let mut area_counts = 0.0; // in units of (false positives × true positives)
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut idx = 0;
    while idx < order.len() {
        let mut end = idx + 1;
        while end < order.len() && scores[order[end]] == scores[order[idx]] {
            end += 1;
        }
        let (mut dtp, mut dfp) = (0u64, 0u64);
        for &s in &order[idx..end] {
            if positives[s] {
                dtp += 1;
            } else {
                dfp += 1;
            }
        }
        // Trapezoid over this step: width dfp, mean height tp + dtp/2.
        area_counts += dfp as f64 * (tp as f64 + dtp as f64 / 2.0);
        tp += dtp;
        fp += dfp;
        idx = end;
    }
    debug_assert_eq!((tp, fp), (pos, neg));
    Ok(area_counts / (pos as f64 * neg as f64))
}

/// Scores the inputs and reports accuracy, F1 (positive-class for binary,
/// macro otherwise, plus macro always), AUC, and the confusion matrix.
pub fn evaluate(model: &LRModel, inputs: &[Vec<f64>], labels: &[String]) -> Result<EvalReport> {
    model.validate()?;
    if inputs.is_empty() {
        return Err(Error::EmptyInput("evaluation needs at least one sample"));
    }
    if inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: inputs.len(),
            got: labels.len(),
            what: "labels for inputs",
        });
    }
    let class_index = |label: &String| -> Result<usize> {
        model
            .classes
            .iter()
            .position(|c| c == label)
            .ok_or_else(|| Error::UnseenLabel(label.clone()))
    };
    let c = model.classes.len();
    let mut counts = vec![vec![0u64; c]; c];
    let mut correct = 0u64;
    let mut all_scores: Vec<Vec<f64>> = Vec::with_capacity(inputs.len());
    for (x, label) in inputs.iter().zip(labels) {
        let actual = class_index(label)?;
        let scores = model.scores(x)?;
        let predicted = model.predict(x)?;
        let predicted_idx = model.classes.iter().position(|cl| cl == predicted).unwrap();
        counts[actual][predicted_idx] += 1;
        if predicted_idx == actual {
            correct += 1;
        }
        all_scores.push(scores);
    }
    let accuracy = correct as f64 / inputs.len() as f64;

    // Per-class F1 from the confusion matrix; 0/0 cases count as 0.
    let f1_of = |class: usize| -> f64 {
        let tp = counts[class][class] as f64;
        let fp: f64 = (0..c).filter(|&a| a != class).map(|a| counts[a][class] as f64).sum();
        let fn_: f64 = (0..c).filter(|&p| p != class).map(|p| counts[class][p] as f64).sum();
        if 2.0 * tp + fp + fn_ == 0.0 {
            0.0
        } else {
            2.0 * tp / (2.0 * tp + fp + fn_)
        }
    };
    let f1_macro = (0..c).map(f1_of).sum::<f64>() / c as f64;
    let f1_positive = if c == 2 { f1_of(1) } else { f1_macro };

    let auc = if c == 2 {
        let scores: Vec<f64> = all_scores.iter().map(|s| s[0]).collect();
        let positives: Vec<bool> = labels.iter().map(|l| l == &model.classes[1]).collect();
        auc_trapezoidal(&scores, &positives)?
    } else {
        // Macro one-vs-rest AUC over classes present with both outcomes.
        let mut total = 0.0;
        let mut used = 0usize;
        for class in 0..c {
            let scores: Vec<f64> = all_scores.iter().map(|s| s[class]).collect();
            let positives: Vec<bool> = labels.iter().map(|l| l == &model.classes[class]).collect();
            match auc_trapezoidal(&scores, &positives) {
                Ok(a) => {
                    total += a;
                    used += 1;
                }
                Err(Error::Undefined(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        if used == 0 {
            return Err(Error::Undefined("AUC undefined: every class is one-sided".into()));
        }
        total / used as f64
    };

    Ok(EvalReport {
        accuracy,
        f1_positive,
        f1_macro,
        auc,
        confusion: ConfusionMatrix { classes: model.classes.clone(), counts },
    })
}

/// Seeded k-fold partition of `0..count`: returns `(train, test)` index lists
/// per fold. Test folds are disjoint, cover every index, and differ in size
/// by at most one.
pub fn kfold_split(count: usize, folds: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if folds < 2 {
        return Err(Error::InvalidParameter(format!("folds must be at least 2, got {folds}")));
    }
    if count < folds {
        return Err(Error::InvalidParameter(format!(
            "cannot split {count} samples into {folds} folds"
        )));
    }
    let mut order: Vec<usize> = (0..count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let base = count / folds;
    let extra = count % folds;
    let mut splits = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        let test: Vec<usize> = order[start..start + size].to_vec();
        let train: Vec<usize> =
            order[..start].iter().chain(&order[start + size..]).copied().collect();
        splits.push((train, test));
        start += size;
    }
    Ok(splits)
}
