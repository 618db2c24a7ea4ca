//! Rate readout of the output neurons: feature vectors at snapshot times and per-step
//! spatial profiles.

use std::collections::BTreeMap;

use crate::chain::NetworkSpec;
use crate::error::{Error, Result};
use crate::neuro::{one_to_one_weight_range, NeuronParams};
use crate::spikes::{fmt_sig9, Channel, Polarity, SpikeTrain};

/// Drive rate at which the output neuron's weight is calibrated.
pub const READOUT_CALIBRATION_RATE: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RateSchedule {
    pub window: f64,
    pub snapshot_times: Vec<f64>,
}

impl Default for RateSchedule {
    fn default() -> Self {
        Self {
            window: 0.03,
            snapshot_times: vec![0.45, 0.9, 1.35],
        }
    }
}

impl RateSchedule {
    pub fn new(window: f64, snapshot_times: Vec<f64>) -> Result<Self> {
        let s = Self {
            window,
            snapshot_times,
        };
        s.validate()?;
        Ok(s)
    }

    /// `count` snapshots spaced one memory span apart.
    pub fn from_memory_span(window: f64, memory_span: f64, count: usize) -> Result<Self> {
        Self::new(window, (1..=count).map(|k| k as f64 * memory_span).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(Error::Validation(format!("rate window must be > 0, got {}", self.window)));
        }
        if self.snapshot_times.is_empty() {
            return Err(Error::Validation("at least one snapshot time is required".into()));
        }
        if self.snapshot_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("snapshot times must be strictly increasing".into()));
        }
        if self.snapshot_times[0] < self.window || self.snapshot_times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Validation(
                "snapshot times must be finite and no earlier than one window".into(),
            ));
        }
        Ok(())
    }

    pub fn last(&self) -> f64 {
        *self.snapshot_times.last().expect("validated non-empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: usize,
}

/// Mean rate (Hz) over the trailing window `(t_end - window, t_end]`.
pub fn rate_in_window(train: &SpikeTrain, t_end: f64, window: f64) -> f64 {
    train.count_in(t_end - window, t_end) as f64 / window
}

fn output_train(outputs: &BTreeMap<u32, SpikeTrain>, id: u32) -> Result<&SpikeTrain> {
    outputs
        .get(&id)
        .ok_or_else(|| Error::Structural(format!("no spike train for output neuron {id}")))
}

/// Per-step DOWN and UP output rates at time `t`.
pub fn spatial_profile(
    outputs: &BTreeMap<u32, SpikeTrain>,
    net: &NetworkSpec,
    t: f64,
    window: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let rates = |ids: &[u32]| -> Result<Vec<f64>> {
        ids.iter()
            .map(|&id| Ok(rate_in_window(output_train(outputs, id)?, t, window)))
            .collect()
    };
    Ok((rates(&net.output_down)?, rates(&net.output_up)?))
}

/// Snapshot-major concatenation of DOWN then UP output rates.
pub fn extract_features(
    outputs: &BTreeMap<u32, SpikeTrain>,
    net: &NetworkSpec,
    sched: &RateSchedule,
    label: usize,
) -> Result<FeatureVector> {
    sched.validate()?;
    let mut values = Vec::with_capacity(2 * net.steps * sched.snapshot_times.len());
    for &t in &sched.snapshot_times {
        let (down, up) = spatial_profile(outputs, net, t, sched.window)?;
        values.extend(down);
        values.extend(up);
    }
    Ok(FeatureVector { values, label })
}

/// Weight of the output neuron's synapse from a chain of each threshold: proportional to
/// the threshold, with the largest threshold at the centre of the output neuron's
/// one-to-one weight interval for a 20 Hz drive.
pub fn readout_weights(thresholds: &[f64], output: &NeuronParams, dt: f64) -> Result<Vec<f64>> {
    let max = thresholds.iter().copied().fold(0.0, f64::max);
    if thresholds.is_empty() || max.is_nan() || max <= 0.0 {
        return Err(Error::Validation("readout needs positive thresholds".into()));
    }
    let (lo, hi) = one_to_one_weight_range(output, READOUT_CALIBRATION_RATE, dt)?;
    let anchor = (lo * hi).sqrt();
    Ok(thresholds.iter().map(|t| anchor * t / max).collect())
}

/// Threshold-weighted ADM spike rate seen `lags[k]` seconds before `t`, per step, for one
/// polarity: the quantity the step-`k` output neuron should mirror at time `t`.
pub fn weighted_input_history(
    inputs: &[SpikeTrain],
    thresholds: &[f64],
    polarity: Polarity,
    t: f64,
    lags: &[f64],
    window: f64,
) -> Vec<f64> {
    lags.iter()
        .map(|&lag| {
            inputs
                .iter()
                .filter_map(|train| match train.channel() {
                    Channel::Adm {
                        threshold_index,
                        polarity: p,
                    } if p == polarity && threshold_index < thresholds.len() => Some(
                        thresholds[threshold_index] * rate_in_window(train, t - lag, window),
                    ),
                    _ => None,
                })
                .sum()
        })
        .collect()
}

/// Pearson correlation; `None` when either side has no variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "pearson needs equal lengths");
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Feature table: `f0..f{n-1},label`.
pub fn write_features_csv<W: std::io::Write>(out: W, features: &[FeatureVector]) -> Result<()> {
    let width = features.first().map_or(0, |f| f.values.len());
    if features.iter().any(|f| f.values.len() != width) {
        return Err(Error::Structural("feature vectors differ in length".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Validation(format!("csv write: {e}"));
    let header: Vec<String> = (0..width)
        .map(|i| format!("f{i}"))
        .chain(std::iter::once("label".to_string()))
        .collect();
    w.write_record(&header).map_err(err)?;
    for f in features {
        let row: Vec<String> = f
            .values
            .iter()
            .map(|&v| fmt_sig9(v))
            .chain(std::iter::once(f.label.to_string()))
            .collect();
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Validation(format!("csv write: {e}")))?;
    Ok(())
}

pub fn read_features_csv<R: std::io::Read>(input: R) -> Result<Vec<FeatureVector>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let bad = |cell: &str| Error::Parse {
            row,
            message: format!("non-numeric cell {cell:?}"),
        };
        let cells: Vec<&str> = rec.iter().collect();
        let (label, values) = cells.split_last().ok_or_else(|| bad(""))?;
        let values = values
            .iter()
            .map(|c| c.trim().parse::<f64>().map_err(|_| bad(c)))
            .collect::<Result<Vec<_>>>()?;
        let label = label.trim().parse::<usize>().map_err(|_| bad(label))?;
        out.push(FeatureVector { values, label });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_network, run_network, select_matched, chain_channel, NeuronRecord};
    use crate::neuro::SimConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn train(times: Vec<f64>) -> SpikeTrain {
        SpikeTrain::new(Channel::Neuron(0), times).unwrap()
    }

    #[test]
    fn three_spikes_in_window_is_100_hz() {
        let t = train(vec![0.401, 0.41, 0.43, 0.5]);
        assert!((rate_in_window(&t, 0.43, 0.03) - 100.0).abs() < 1e-9);
        assert_eq!(rate_in_window(&train(vec![]), 1.0, 0.03), 0.0);
    }

    #[test]
    fn poisson_rate_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rates: Vec<f64> = (0..100)
            .map(|_| {
                let mut t = 0.0;
                let mut times = Vec::new();
                loop {
                    t += -(1.0 - rng.random::<f64>()).ln() / 50.0;
                    if t > 1.0 {
                        break train(times);
                    }
                    times.push(t);
                }
            })
            .map(|tr| rate_in_window(&tr, 1.0, 1.0))
            .collect();
        let within = rates.iter().filter(|r| (*r - 50.0).abs() <= 15.0).count();
        assert!(within >= 95, "{within} of 100 within 50 ± 15 Hz");
    }

    #[test]
    fn merged_rates_add() {
        let a = train(vec![0.1, 0.2, 0.25]);
        let b = train(vec![0.15, 0.22]);
        let m = SpikeTrain::merge(Channel::Neuron(9), [&a, &b]);
        let sum = rate_in_window(&a, 0.3, 0.2) + rate_in_window(&b, 0.3, 0.2);
        assert!((rate_in_window(&m, 0.3, 0.2) - sum).abs() < 1e-9);
    }

    #[test]
    fn schedule_validation() {
        assert!(RateSchedule::default().validate().is_ok());
        assert!(RateSchedule::new(0.0, vec![0.45]).is_err());
        assert!(RateSchedule::new(0.03, vec![0.9, 0.45]).is_err());
        assert!(RateSchedule::new(0.03, vec![]).is_err());
        let s = RateSchedule::from_memory_span(0.03, 0.3, 3).unwrap();
        assert!((s.snapshot_times[2] - 0.9).abs() < 1e-12);
    }

    fn net(chains: usize, steps: usize) -> NetworkSpec {
        let recs: Vec<_> = (0..(chains * steps) as u32)
            .map(|id| NeuronRecord {
                id,
                params: NeuronParams::delay_default(),
                measured_delay: Some(0.02),
                f_one_to_one_max: Some(25.0),
                f_curve: vec![],
            })
            .collect();
        let (a, _) = select_matched(&recs, chains, steps).unwrap();
        let th: Vec<f64> = [0.2, 0.1, 0.04][..chains / 2].to_vec();
        let w = readout_weights(&th, &NeuronParams::output_default(), 1e-4).unwrap();
        build_network(&a, &recs, &th, &NeuronParams::output_default(), &w).unwrap()
    }

    #[test]
    fn default_layout_has_90_features() {
        let n = net(6, 15);
        let outputs: BTreeMap<u32, SpikeTrain> = n
            .output_up
            .iter()
            .chain(&n.output_down)
            .map(|&id| (id, SpikeTrain::empty(Channel::Neuron(id))))
            .collect();
        let f = extract_features(&outputs, &n, &RateSchedule::default(), 1).unwrap();
        assert_eq!(f.values.len(), 90);
        assert!(f.values.iter().all(|&v| v == 0.0));
        let mut missing = outputs.clone();
        missing.remove(&n.output_up[3]);
        assert!(matches!(
            extract_features(&missing, &n, &RateSchedule::default(), 1),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn down_rates_precede_up_rates() {
        let n = net(2, 1);
        let up = SpikeTrain::new(Channel::Neuron(n.output_up[0]), vec![0.425, 0.435, 0.445]).unwrap();
        let outputs = BTreeMap::from([
            (n.output_up[0], up),
            (n.output_down[0], SpikeTrain::empty(Channel::Neuron(n.output_down[0]))),
        ]);
        let sched = RateSchedule::new(0.03, vec![0.45]).unwrap();
        let f = extract_features(&outputs, &n, &sched, 0).unwrap();
        assert_eq!(f.values.len(), 2);
        assert_eq!(f.values[0], 0.0);
        assert!((f.values[1] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn features_are_translation_consistent() {
        let n = net(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let outputs: BTreeMap<u32, SpikeTrain> = n
            .output_up
            .iter()
            .chain(&n.output_down)
            .map(|&id| {
                let mut ts: Vec<f64> = (0..40).map(|_| rng.random_range(0.0..1.5)).collect();
                ts.sort_by(f64::total_cmp);
                ts.dedup();
                (id, SpikeTrain::new(Channel::Neuron(id), ts).unwrap())
            })
            .collect();
        let sched = RateSchedule::default();
        let base = extract_features(&outputs, &n, &sched, 0).unwrap();
        // a dyadic shift keeps every boundary comparison exact
        let delta = 0.25;
        let moved: BTreeMap<u32, SpikeTrain> =
            outputs.iter().map(|(&id, t)| (id, t.shifted(delta).unwrap())).collect();
        let sched2 = RateSchedule::new(
            sched.window,
            sched.snapshot_times.iter().map(|t| t + delta).collect(),
        )
        .unwrap();
        let shifted = extract_features(&moved, &n, &sched2, 0).unwrap();
        assert_eq!(base.values.len(), shifted.values.len());
        for (a, b) in base.values.iter().zip(&shifted.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn readout_weights_scale_with_threshold() {
        let w = readout_weights(&[0.2, 0.1, 0.04], &NeuronParams::output_default(), 1e-4).unwrap();
        let base = NeuronParams::output_default().base_weight;
        assert!((w[0] - base).abs() < 1e-3 * base);
        assert!((w[1] / w[0] - 0.5).abs() < 1e-12);
        assert!((w[2] / w[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn burst_ends_up_at_the_last_steps() {
        let n = net(2, 10);
        let burst = vec![0.01, 0.06];
        let inputs = vec![
            SpikeTrain::new(chain_channel(0), burst).unwrap(),
            SpikeTrain::empty(chain_channel(1)),
        ];
        let sim = SimConfig::new(1e-4, 0.6).unwrap();
        let out = run_network(&n, &inputs, &sim).unwrap();
        let last = n.chains[0][9];
        let span = out[&last].times()[0] + 0.005;
        let (down, up) = spatial_profile(&out, &n, span, 0.03).unwrap();
        assert!(down.iter().all(|&r| r == 0.0));
        let late: f64 = up[7..].iter().sum();
        let early: f64 = up[..5].iter().sum();
        assert!(late > 0.0 && early == 0.0, "{up:?}");
    }

    #[test]
    fn pearson_basics() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(pearson(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn weighted_history_uses_polarity_and_threshold() {
        let inputs = vec![
            SpikeTrain::new(Channel::adm(0, Polarity::Up), vec![0.09]).unwrap(),
            SpikeTrain::new(Channel::adm(1, Polarity::Up), vec![0.09, 0.095]).unwrap(),
            SpikeTrain::new(Channel::adm(0, Polarity::Down), vec![0.09]).unwrap(),
        ];
        let h = weighted_input_history(&inputs, &[0.2, 0.1], Polarity::Up, 0.2, &[0.1, 0.0], 0.02);
        assert!((h[0] - (0.2 * 50.0 + 0.1 * 100.0)).abs() < 1e-9);
        assert_eq!(h[1], 0.0);
    }

    #[test]
    fn features_csv_round_trip() {
        let fs = vec![
            FeatureVector { values: vec![0.0, 33.25, 100.0], label: 1 },
            FeatureVector { values: vec![1.5, 0.0, 2.0], label: 0 },
        ];
        let mut buf = Vec::new();
        write_features_csv(&mut buf, &fs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("f0,f1,f2,label\n"));
        assert_eq!(read_features_csv(buf.as_slice()).unwrap(), fs);
    }
}
