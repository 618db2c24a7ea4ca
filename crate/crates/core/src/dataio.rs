//! Preprocessed ECG beat datasets: CSV ingestion, balanced sampling and stratified splits.
//!
//! Each CSV row holds `N` amplitude columns followed by one integer label, the layout of
//! the widely distributed 125 Hz beat collections (N = 187).

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spikes::fmt_sig9;

pub const DEFAULT_SAMPLE_RATE: f64 = 125.0;

/// One beat: unit-range amplitudes at a fixed rate plus its class.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate_hz: f64,
    label: usize,
    source_id: String,
}

impl Signal {
    pub fn new(
        samples: Vec<f64>,
        sample_rate_hz: f64,
        label: usize,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Validation("signal has no samples".into()));
        }
        if let Some(x) = samples
            .iter()
            .find(|x| !x.is_finite() || **x < 0.0 || **x > 1.0)
        {
            return Err(Error::Validation(format!(
                "sample {x} outside the normalized range [0, 1]"
            )));
        }
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::Validation(format!(
                "sample rate must be > 0, got {sample_rate_hz}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            label,
            source_id: source_id.into(),
        })
    }

    /// Min-max normalizes `raw` first unless it already lies in [0, 1].
    pub fn from_raw(
        raw: Vec<f64>,
        sample_rate_hz: f64,
        label: usize,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        Self::new(normalize(raw)?, sample_rate_hz, label, source_id)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    /// Time span covered by the samples, one sample period per sample.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// The beat played `times` times back to back.
    pub fn repeated(&self, times: usize) -> Self {
        let mut samples = Vec::with_capacity(self.samples.len() * times);
        for _ in 0..times {
            samples.extend_from_slice(&self.samples);
        }
        Self {
            samples,
            ..self.clone()
        }
    }

    /// The beat with `count` copies of its first sample prepended.
    pub fn delayed(&self, count: usize) -> Self {
        let mut samples = vec![self.samples[0]; count];
        samples.extend_from_slice(&self.samples);
        Self {
            samples,
            ..self.clone()
        }
    }
}

fn normalize(raw: Vec<f64>) -> Result<Vec<f64>> {
    if let Some(x) = raw.iter().find(|x| !x.is_finite()) {
        return Err(Error::Validation(format!("non-finite amplitude {x}")));
    }
    if raw.iter().all(|x| (0.0..=1.0).contains(x)) {
        return Ok(raw);
    }
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    Ok(raw
        .into_iter()
        .map(|x| if span > 0.0 { ((x - lo) / span).clamp(0.0, 1.0) } else { 0.0 })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub class_count: usize,
    pub signals: Vec<Signal>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, class_count: usize, signals: Vec<Signal>) -> Result<Self> {
        if class_count == 0 {
            return Err(Error::Validation("class_count must be >= 1".into()));
        }
        if let Some(s) = signals.iter().find(|s| s.label >= class_count) {
            return Err(Error::Validation(format!(
                "{}: label {} outside [0, {class_count})",
                s.source_id, s.label
            )));
        }
        Ok(Self {
            name: name.into(),
            class_count,
            signals,
        })
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn class_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.class_count];
        for s in &self.signals {
            h[s.label] += 1;
        }
        h
    }

    fn subset(&self, mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        Self {
            name: self.name.clone(),
            class_count: self.class_count,
            signals: indices.into_iter().map(|i| self.signals[i].clone()).collect(),
        }
    }

    fn indices_by_class(&self) -> Vec<Vec<usize>> {
        let mut by_class = vec![Vec::new(); self.class_count];
        for (i, s) in self.signals.iter().enumerate() {
            by_class[s.label].push(i);
        }
        by_class
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    /// Skip the first line.
    pub header: bool,
}

pub fn load_csv(path: impl AsRef<Path>, class_count: usize, opts: CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    read_csv(BufReader::new(file), &name, class_count, opts)
}

pub fn read_csv<R: Read>(
    input: R,
    name: &str,
    class_count: usize,
    opts: CsvOptions,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(opts.header)
        .flexible(true)
        .from_reader(input);
    let mut signals = Vec::new();
    let mut width = None;
    let first_row = if opts.header { 2 } else { 1 };
    for (i, rec) in rdr.records().enumerate() {
        let row = first_row + i;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let expected = *width.get_or_insert(rec.len());
        if expected < 3 {
            return Err(Error::Parse {
                row,
                message: format!(
                    "need at least 2 amplitude columns and a label, found {} columns",
                    rec.len()
                ),
            });
        }
        if rec.len() != expected {
            return Err(Error::Parse {
                row,
                message: format!("expected {expected} columns, found {}", rec.len()),
            });
        }
        let mut values = Vec::with_capacity(expected - 1);
        for (col, cell) in rec.iter().take(expected - 1).enumerate() {
            let x: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                row,
                message: format!("column {}: non-numeric cell {cell:?}", col + 1),
            })?;
            if !x.is_finite() {
                return Err(Error::Parse {
                    row,
                    message: format!("column {}: non-finite amplitude {cell:?}", col + 1),
                });
            }
            values.push(x);
        }
        let label = parse_label(&rec[expected - 1]).ok_or_else(|| Error::Parse {
            row,
            message: format!("label {:?} is not a non-negative integer", &rec[expected - 1]),
        })?;
        if label >= class_count {
            return Err(Error::Validation(format!(
                "row {row}: label {label} outside [0, {class_count})"
            )));
        }
        let source = format!("{name}:{row}");
        signals.push(Signal::from_raw(values, DEFAULT_SAMPLE_RATE, label, source).map_err(
            |e| Error::Parse {
                row,
                message: e.to_string(),
            },
        )?);
    }
    Dataset::new(name, class_count, signals)
}

/// Labels are stored as floats ("3.0") in the public distribution.
fn parse_label(cell: &str) -> Option<usize> {
    let x: f64 = cell.trim().parse().ok()?;
    (x >= 0.0 && x.fract() == 0.0 && x < u32::MAX as f64).then_some(x as usize)
}

pub fn write_csv<W: Write>(out: W, ds: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let map = |e: csv::Error| Error::Validation(format!("csv write: {e}"));
    for s in &ds.signals {
        let mut row: Vec<String> = s.samples.iter().map(|&x| fmt_sig9(x)).collect();
        row.push(s.label.to_string());
        w.write_record(&row).map_err(map)?;
    }
    w.flush()
        .map_err(|e| Error::Validation(format!("csv write: {e}")))?;
    Ok(())
}

pub fn save_csv(path: impl AsRef<Path>, ds: &Dataset) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), ds)
}

/// Draw `total / class_count` distinct signals from every class.
pub fn balanced_sample(ds: &Dataset, total: usize, seed: u64) -> Result<Dataset> {
    if total == 0 || !total.is_multiple_of(ds.class_count) {
        return Err(Error::Validation(format!(
            "total {total} is not a positive multiple of {} classes",
            ds.class_count
        )));
    }
    let per_class = total / ds.class_count;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::with_capacity(total);
    for (class, mut members) in ds.indices_by_class().into_iter().enumerate() {
        if members.len() < per_class {
            return Err(Error::Capacity(format!(
                "class {class} has {} signals, {per_class} requested",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        chosen.extend_from_slice(&members[..per_class]);
    }
    Ok(ds.subset(chosen))
}

/// Per-class shuffled split; each class contributes `round(n * train_fraction)` training
/// signals, kept within `[1, n - 1]`.
pub fn stratified_split(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Validation(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (class, mut members) in ds.indices_by_class().into_iter().enumerate() {
        let n = members.len();
        if n < 2 {
            return Err(Error::Capacity(format!(
                "class {class} has {n} signals, at least 2 needed to split"
            )));
        }
        members.shuffle(&mut rng);
        let k = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    Ok((ds.subset(train), ds.subset(test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(per_class: &[usize]) -> Dataset {
        let mut signals = Vec::new();
        for (label, &n) in per_class.iter().enumerate() {
            for k in 0..n {
                let x = (k as f64 + 1.0) / (n as f64 + 1.0);
                signals.push(Signal::new(vec![0.0, x], 125.0, label, format!("{label}-{k}")).unwrap());
            }
        }
        Dataset::new("toy", per_class.len(), signals).unwrap()
    }

    #[test]
    fn parses_row_into_signal() {
        let ds = read_csv("0.0,0.5,1.0,0.5,0.0,3\n".as_bytes(), "t", 5, CsvOptions::default()).unwrap();
        assert_eq!(ds.len(), 1);
        let s = &ds.signals[0];
        assert_eq!(s.samples(), &[0.0, 0.5, 1.0, 0.5, 0.0]);
        assert_eq!(s.label(), 3);
        assert_eq!(s.sample_rate_hz(), 125.0);
    }

    #[test]
    fn accepts_float_labels_crlf_and_header() {
        let text = "a,b,c,label\r\n0.1,0.2,0.3,1.0\r\n0.3,0.2,0.1,0.0\r\n";
        let ds = read_csv(text.as_bytes(), "t", 2, CsvOptions { header: true }).unwrap();
        assert_eq!(ds.class_histogram(), vec![1, 1]);
        assert_eq!(ds.signals[0].samples(), &[0.1, 0.2, 0.3]);
    }

    #[test]
    fn normalizes_out_of_range_rows() {
        let ds = read_csv("-2,0,2,0\n".as_bytes(), "t", 2, CsvOptions::default()).unwrap();
        assert_eq!(ds.signals[0].samples(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_nan_naming_the_row() {
        let err = read_csv("0.1,0.2,0\n0.1,NaN,1\n".as_bytes(), "t", 2, CsvOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_ragged_and_non_numeric_rows() {
        let err = read_csv("0.1,0.2,0\n0.1,1\n".as_bytes(), "t", 2, CsvOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }));
        let err = read_csv("0.1,abc,0\n".as_bytes(), "t", 2, CsvOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
        let err = read_csv("0.1,0\n".as_bytes(), "t", 2, CsvOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
    }

    #[test]
    fn rejects_out_of_range_label() {
        let err = read_csv("0.1,0.2,7\n".as_bytes(), "t", 5, CsvOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn preserves_row_count() {
        let text: String = (0..1000).map(|i| format!("0.1,0.{},{}\n", i % 9, i % 5)).collect();
        let ds = read_csv(text.as_bytes(), "t", 5, CsvOptions::default()).unwrap();
        assert_eq!(ds.len(), 1000);
    }

    #[test]
    fn balanced_sample_is_uniform_and_deterministic() {
        let ds = toy(&[300, 250, 220, 400, 201]);
        let a = balanced_sample(&ds, 1000, 3).unwrap();
        assert_eq!(a.class_histogram(), vec![200; 5]);
        let b = balanced_sample(&ds, 1000, 3).unwrap();
        assert_eq!(a, b);
        let mut ids: Vec<&str> = a.signals.iter().map(|s| s.source_id()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 1000);
        assert_ne!(a, balanced_sample(&ds, 1000, 4).unwrap());
    }

    #[test]
    fn balanced_sample_minimal_and_capacity() {
        let ds = toy(&[3, 3, 1]);
        assert_eq!(balanced_sample(&ds, 3, 0).unwrap().class_histogram(), vec![1, 1, 1]);
        let err = balanced_sample(&ds, 6, 0).unwrap_err();
        assert!(matches!(err, Error::Capacity(ref m) if m.contains("class 2")), "{err}");
        assert!(balanced_sample(&ds, 4, 0).is_err());
    }

    #[test]
    fn stratified_split_proportions() {
        let ds = toy(&[200; 5]);
        let (train, test) = stratified_split(&ds, 0.7, 9).unwrap();
        assert_eq!((train.len(), test.len()), (700, 300));
        assert_eq!(train.class_histogram(), vec![140; 5]);
        assert_eq!(test.class_histogram(), vec![60; 5]);
        let (train2, _) = stratified_split(&ds, 0.7, 9).unwrap();
        assert_eq!(train, train2);
    }

    #[test]
    fn stratified_split_minimal_and_capacity() {
        let (train, test) = stratified_split(&toy(&[2, 2]), 0.5, 0).unwrap();
        assert_eq!(train.class_histogram(), vec![1, 1]);
        assert_eq!(test.class_histogram(), vec![1, 1]);
        assert!(matches!(
            stratified_split(&toy(&[2, 1]), 0.5, 0),
            Err(Error::Capacity(_))
        ));
        assert!(stratified_split(&toy(&[2, 2]), 1.0, 0).is_err());
    }

    #[test]
    fn signal_invariants() {
        assert!(Signal::new(vec![], 125.0, 0, "x").is_err());
        assert!(Signal::new(vec![1.5], 125.0, 0, "x").is_err());
        assert!(Signal::new(vec![0.5], 0.0, 0, "x").is_err());
        assert!(Dataset::new("d", 2, vec![Signal::new(vec![0.5], 125.0, 2, "x").unwrap()]).is_err());
    }
}
