//! Multinomial logistic regression on standardized features, trained by full-batch
//! gradient descent.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::readout::FeatureVector;
use crate::spikes::fmt_sig9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
    /// Standard deviation of the initial weights; zero starts from all-zero weights.
    pub init_scale: f64,
}

impl Default for Hyper {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 500,
            l2: 1e-4,
            seed: 0,
            init_scale: 0.0,
        }
    }
}

impl Hyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Validation("learning rate must be > 0".into()));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::Validation("l2 must be >= 0".into()));
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return Err(Error::Validation("init scale must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    pub class_count: usize,
    pub feature_count: usize,
    /// Row-major `class_count × feature_count`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub feature_means: Vec<f64>,
    pub feature_scales: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub per_class_recall: Vec<f64>,
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// Mean cross-entropy plus `l2/2 · ‖W‖²` and its gradient.
///
/// `params` holds the weight rows followed by the bias vector; the bias is not regularized.
pub fn loss_and_gradient(
    params: &[f64],
    x: &[Vec<f64>],
    y: &[usize],
    class_count: usize,
    l2: f64,
) -> (f64, Vec<f64>) {
    let f = x.first().map_or(0, Vec::len);
    let (w, b) = params.split_at(class_count * f);
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    let mut z = vec![0.0; class_count];
    for (xi, &yi) in x.iter().zip(y) {
        for (c, zc) in z.iter_mut().enumerate() {
            let row = &w[c * f..(c + 1) * f];
            *zc = b[c] + row.iter().zip(xi).map(|(a, v)| a * v).sum::<f64>();
        }
        softmax_in_place(&mut z);
        loss -= z[yi].max(f64::MIN_POSITIVE).ln();
        for c in 0..class_count {
            let d = z[c] - if c == yi { 1.0 } else { 0.0 };
            let g = &mut grad[c * f..(c + 1) * f];
            for (gj, xj) in g.iter_mut().zip(xi) {
                *gj += d * xj;
            }
            grad[class_count * f + c] += d;
        }
    }
    let n = x.len().max(1) as f64;
    loss /= n;
    grad.iter_mut().for_each(|g| *g /= n);
    for (gj, wj) in grad.iter_mut().zip(w) {
        *gj += l2 * wj;
    }
    loss += 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>();
    (loss, grad)
}

fn check_features(features: &[FeatureVector], class_count: usize) -> Result<usize> {
    let f = features
        .first()
        .map(|v| v.values.len())
        .ok_or_else(|| Error::Validation("no training features".into()))?;
    if f == 0 {
        return Err(Error::Validation("feature vectors are empty".into()));
    }
    for (i, v) in features.iter().enumerate() {
        if v.values.len() != f {
            return Err(Error::Structural(format!(
                "feature vector {i} has {} values, expected {f}",
                v.values.len()
            )));
        }
        if v.label >= class_count {
            return Err(Error::Validation(format!(
                "label {} out of range for {class_count} classes",
                v.label
            )));
        }
        if v.values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation(format!("feature vector {i} is not finite")));
        }
    }
    Ok(f)
}

impl ClassifierModel {
    fn standardize(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .zip(self.feature_means.iter().zip(&self.feature_scales))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    fn params(&self) -> Vec<f64> {
        self.weights.iter().chain(&self.bias).copied().collect()
    }

    /// Class scores; the prediction is the first index of the maximum.
    pub fn scores(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.feature_count {
            return Err(Error::Structural(format!(
                "model expects {} features, got {}",
                self.feature_count,
                values.len()
            )));
        }
        let x = self.standardize(values);
        Ok((0..self.class_count)
            .map(|c| {
                let row = &self.weights[c * self.feature_count..(c + 1) * self.feature_count];
                self.bias[c] + row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect())
    }

    pub fn predict(&self, values: &[f64]) -> Result<usize> {
        let s = self.scores(values)?;
        let mut best = 0;
        for (c, &v) in s.iter().enumerate() {
            if v > s[best] {
                best = c;
            }
        }
        Ok(best)
    }

    /// Dimensions, then one `key = values` line per array, nine significant digits.
    pub fn to_text(&self) -> String {
        let row = |xs: &[f64]| xs.iter().map(|&v| fmt_sig9(v)).collect::<Vec<_>>().join(" ");
        let mut s = String::from("# multinomial logistic regression; weights row-major by class\n");
        let _ = writeln!(s, "classes = {}", self.class_count);
        let _ = writeln!(s, "features = {}", self.feature_count);
        let _ = writeln!(s, "means = {}", row(&self.feature_means));
        let _ = writeln!(s, "scales = {}", row(&self.feature_scales));
        let _ = writeln!(s, "bias = {}", row(&self.bias));
        let _ = writeln!(s, "weights = {}", row(&self.weights));
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut fields = std::collections::HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                row: i + 1,
                message: "expected `key = value`".into(),
            })?;
            fields.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }
        let get = |k: &str| {
            fields
                .get(k)
                .ok_or_else(|| Error::Structural(format!("model file lacks `{k}`")))
        };
        let count = |k: &str| -> Result<usize> {
            let (row, v) = get(k)?;
            v.parse().map_err(|_| Error::Parse {
                row: *row,
                message: format!("bad count {v:?}"),
            })
        };
        let floats = |k: &str| -> Result<Vec<f64>> {
            let (row, v) = get(k)?;
            v.split_whitespace()
                .map(|x| {
                    x.parse().map_err(|_| Error::Parse {
                        row: *row,
                        message: format!("bad number {x:?}"),
                    })
                })
                .collect()
        };
        let m = Self {
            class_count: count("classes")?,
            feature_count: count("features")?,
            weights: floats("weights")?,
            bias: floats("bias")?,
            feature_means: floats("means")?,
            feature_scales: floats("scales")?,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let (c, f) = (self.class_count, self.feature_count);
        if self.weights.len() != c * f
            || self.bias.len() != c
            || self.feature_means.len() != f
            || self.feature_scales.len() != f
        {
            return Err(Error::Structural("model dimensions are inconsistent".into()));
        }
        if self.feature_scales.iter().any(|s| s.is_nan() || *s <= 0.0) {
            return Err(Error::Structural("feature scales must be > 0".into()));
        }
        Ok(())
    }
}

/// Fit a model; returns it together with the training loss after every epoch.
pub fn train_with_history(
    features: &[FeatureVector],
    class_count: usize,
    hyper: &Hyper,
) -> Result<(ClassifierModel, Vec<f64>)> {
    hyper.validate()?;
    if class_count < 2 {
        return Err(Error::Validation("at least two classes are required".into()));
    }
    let f = check_features(features, class_count)?;
    let n = features.len() as f64;
    let mut means = vec![0.0; f];
    for v in features {
        for (m, x) in means.iter_mut().zip(&v.values) {
            *m += x / n;
        }
    }
    let mut scales = vec![0.0; f];
    for v in features {
        for ((s, x), m) in scales.iter_mut().zip(&v.values).zip(&means) {
            *s += (x - m).powi(2) / n;
        }
    }
    let mut degenerate = 0;
    for s in &mut scales {
        *s = s.sqrt();
        if s.is_nan() || *s <= 1e-12 {
            *s = 1.0;
            degenerate += 1;
        }
    }
    if degenerate > 0 {
        log::warn!("{degenerate} of {f} feature columns have zero variance; their scale is fixed at 1");
    }
    let mut model = ClassifierModel {
        class_count,
        feature_count: f,
        weights: vec![0.0; class_count * f],
        bias: vec![0.0; class_count],
        feature_means: means,
        feature_scales: scales,
    };
    if hyper.init_scale > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        let normal = Normal::new(0.0, hyper.init_scale).expect("finite scale");
        model.weights.iter_mut().for_each(|w| *w = normal.sample(&mut rng));
    }
    let x: Vec<Vec<f64>> = features.iter().map(|v| model.standardize(&v.values)).collect();
    let y: Vec<usize> = features.iter().map(|v| v.label).collect();
    let mut params = model.params();
    let mut history = Vec::with_capacity(hyper.epochs);
    for _ in 0..hyper.epochs {
        let (_, grad) = loss_and_gradient(&params, &x, &y, class_count, hyper.l2);
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= hyper.learning_rate * g;
        }
        history.push(loss_and_gradient(&params, &x, &y, class_count, hyper.l2).0);
    }
    let (w, b) = params.split_at(class_count * f);
    model.weights = w.to_vec();
    model.bias = b.to_vec();
    Ok((model, history))
}

pub fn train(features: &[FeatureVector], class_count: usize, hyper: &Hyper) -> Result<ClassifierModel> {
    train_with_history(features, class_count, hyper).map(|(m, _)| m)
}

pub fn evaluate(model: &ClassifierModel, features: &[FeatureVector]) -> Result<EvalReport> {
    let c = model.class_count;
    let mut confusion = vec![vec![0usize; c]; c];
    for v in features {
        if v.label >= c {
            return Err(Error::Validation(format!("label {} out of range", v.label)));
        }
        confusion[v.label][model.predict(&v.values)?] += 1;
    }
    Ok(EvalReport::from_confusion(confusion))
}

impl EvalReport {
    pub fn from_confusion(confusion: Vec<Vec<usize>>) -> Self {
        let total: usize = confusion.iter().flatten().sum();
        let correct: usize = (0..confusion.len()).map(|i| confusion[i][i]).sum();
        let per_class_recall = confusion
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let n: usize = row.iter().sum();
                if n == 0 {
                    0.0
                } else {
                    row[i] as f64 / n as f64
                }
            })
            .collect();
        Self {
            accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
            confusion,
            per_class_recall,
        }
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    pub fn to_text(&self, title: &str) -> String {
        let mut s = format!("{title}\naccuracy: {:.4} ({} items)\n", self.accuracy, self.total());
        s.push_str("confusion (rows = true class, columns = predicted):\n");
        for (i, row) in self.confusion.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>6}")).collect();
            let _ = writeln!(s, "  {i:>3} |{}   recall {:.4}", cells.join(""), self.per_class_recall[i]);
        }
        s
    }

    /// One row per true class: `class,recall,pred_0,..,pred_{c-1}`; a final `all` row carries
    /// the accuracy.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let c = self.confusion.len();
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Validation(format!("csv write: {e}"));
        let header: Vec<String> = ["class".to_string(), "recall".to_string()]
            .into_iter()
            .chain((0..c).map(|j| format!("pred_{j}")))
            .collect();
        w.write_record(&header).map_err(err)?;
        for (i, row) in self.confusion.iter().enumerate() {
            let rec: Vec<String> = [i.to_string(), fmt_sig9(self.per_class_recall[i])]
                .into_iter()
                .chain(row.iter().map(usize::to_string))
                .collect();
            w.write_record(&rec).map_err(err)?;
        }
        let mut last = vec!["all".to_string(), fmt_sig9(self.accuracy)];
        last.resize(c + 2, String::new());
        w.write_record(&last).map_err(err)?;
        w.flush().map_err(|e| Error::Validation(format!("csv write: {e}")))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn fv(values: Vec<f64>, label: usize) -> FeatureVector {
        FeatureVector { values, label }
    }

    fn clusters(seed: u64, per: usize, classes: usize, features: usize, sep: f64) -> Vec<FeatureVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for _ in 0..per {
            for c in 0..classes {
                let values = (0..features)
                    .map(|j| {
                        let centre = if j % classes == c { sep } else { 0.0 };
                        centre + rng.random_range(-1.0..1.0)
                    })
                    .collect();
                out.push(fv(values, c));
            }
        }
        out
    }

    #[test]
    fn separable_clusters_reach_full_accuracy() {
        let data = clusters(1, 40, 2, 3, 5.0);
        let m = train(&data, 2, &Hyper::default()).unwrap();
        let r = evaluate(&m, &data).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.confusion, vec![vec![40, 0], vec![0, 40]]);
    }

    #[test]
    fn zero_epochs_predicts_uniformly() {
        let data = clusters(2, 20, 5, 5, 3.0);
        let m = train(&data, 5, &Hyper { epochs: 0, ..Hyper::default() }).unwrap();
        let r = evaluate(&m, &data).unwrap();
        // all-zero scores break ties toward class 0
        assert!((r.accuracy - 0.2).abs() < 1e-12);
        assert!(r.confusion.iter().all(|row| row[0] == 20));
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let data = clusters(3, 6, 3, 5, 1.0);
        let x: Vec<Vec<f64>> = data.iter().map(|v| v.values.clone()).collect();
        let y: Vec<usize> = data.iter().map(|v| v.label).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let params: Vec<f64> = (0..3 * 5 + 3).map(|_| rng.random_range(-0.5..0.5)).collect();
        let (_, grad) = loss_and_gradient(&params, &x, &y, 3, 0.01);
        let h = 1e-5;
        for i in 0..params.len() {
            let mut p = params.clone();
            p[i] += h;
            let up = loss_and_gradient(&p, &x, &y, 3, 0.01).0;
            p[i] -= 2.0 * h;
            let down = loss_and_gradient(&p, &x, &y, 3, 0.01).0;
            let fd = (up - down) / (2.0 * h);
            let rel = (fd - grad[i]).abs() / fd.abs().max(grad[i].abs()).max(1e-8);
            assert!(rel < 1e-6, "param {i}: analytic {} vs numeric {fd}", grad[i]);
        }
    }

    #[test]
    fn loss_never_increases_at_default_rate() {
        let data = clusters(4, 10, 3, 5, 1.0);
        let (_, hist) = train_with_history(&data, 3, &Hyper::default()).unwrap();
        assert!(hist.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn predictions_survive_uniform_rescaling() {
        let data = clusters(5, 15, 3, 4, 1.5);
        let scaled: Vec<_> = data
            .iter()
            .map(|v| fv(v.values.iter().map(|x| x * 37.5).collect(), v.label))
            .collect();
        let a = train(&data, 3, &Hyper::default()).unwrap();
        let b = train(&scaled, 3, &Hyper::default()).unwrap();
        for (u, v) in data.iter().zip(&scaled) {
            assert_eq!(a.predict(&u.values).unwrap(), b.predict(&v.values).unwrap());
        }
    }

    #[test]
    fn constant_class_model_scores_one_fifth() {
        let data = clusters(6, 10, 5, 5, 2.0);
        let mut m = train(&data, 5, &Hyper { epochs: 0, ..Hyper::default() }).unwrap();
        m.bias[3] = 1.0;
        let r = evaluate(&m, &data).unwrap();
        assert!((r.accuracy - 0.2).abs() < 1e-12);
        for (i, row) in r.confusion.iter().enumerate() {
            assert_eq!(row.iter().sum::<usize>(), 10);
            assert_eq!(r.per_class_recall[i], if i == 3 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn zero_variance_column_gets_unit_scale() {
        let data = vec![fv(vec![1.0, 0.0], 0), fv(vec![1.0, 1.0], 1), fv(vec![1.0, 0.1], 0)];
        let m = train(&data, 2, &Hyper::default()).unwrap();
        assert_eq!(m.feature_scales[0], 1.0);
    }

    #[test]
    fn dimension_mismatch_is_structural() {
        let data = clusters(7, 5, 2, 3, 2.0);
        let m = train(&data, 2, &Hyper::default()).unwrap();
        assert!(matches!(evaluate(&m, &[fv(vec![1.0], 0)]), Err(Error::Structural(_))));
        let ragged = vec![fv(vec![1.0, 2.0], 0), fv(vec![1.0], 1)];
        assert!(matches!(train(&ragged, 2, &Hyper::default()), Err(Error::Structural(_))));
        assert!(train(&[], 2, &Hyper::default()).is_err());
    }

    #[test]
    fn seeded_initialization_is_deterministic() {
        let data = clusters(8, 5, 2, 3, 2.0);
        let h = Hyper { init_scale: 0.1, seed: 4, epochs: 3, ..Hyper::default() };
        assert_eq!(train(&data, 2, &h).unwrap(), train(&data, 2, &h).unwrap());
    }

    #[test]
    fn model_text_round_trip() {
        let data = clusters(9, 10, 3, 4, 2.0);
        let m = train(&data, 3, &Hyper::default()).unwrap();
        let back = ClassifierModel::from_text(&m.to_text()).unwrap();
        assert_eq!((back.class_count, back.feature_count), (3, 4));
        for (a, b) in m.weights.iter().zip(&back.weights) {
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-300));
        }
        for v in &data {
            assert_eq!(m.predict(&v.values).unwrap(), back.predict(&v.values).unwrap());
        }
        assert!(ClassifierModel::from_text("classes = 2\n").is_err());
    }

    #[test]
    fn report_formats() {
        let r = EvalReport::from_confusion(vec![vec![3, 1], vec![0, 4]]);
        assert!((r.accuracy - 7.0 / 8.0).abs() < 1e-12);
        assert_eq!(r.per_class_recall, vec![0.75, 1.0]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "class,recall,pred_0,pred_1");
        assert_eq!(text.lines().last().unwrap(), "all,0.875,,");
        assert!(r.to_text("features").contains("accuracy: 0.8750"));
    }
}
