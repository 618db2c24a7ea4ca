//! End-to-end experiment: network calibration, per-beat encoding and simulation, feature
//! extraction, and the feature versus raw-sample classification comparison.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::adm::{encode_bank, DEFAULT_THRESHOLDS};
use crate::chain::{
    build_network, calibrate_pool, measure_preservation, run_network, select_matched, Assignment,
    CalibrationReport, NetworkSpec, NeuronRecord, Preservation, CORE_SIZE,
};
use crate::classify::{evaluate, train, EvalReport, Hyper};
use crate::dataio::{balanced_sample, stratified_split, Dataset, Signal};
use crate::error::{Error, Result};
use crate::neuro::{MismatchModel, NeuronParams, SimConfig};
use crate::readout::{
    extract_features, pearson, readout_weights, spatial_profile, weighted_input_history, FeatureVector,
    RateSchedule,
};
use crate::spikes::{Polarity, SpikeTrain};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub thresholds: Vec<f64>,
    pub steps: usize,
    pub pool_size: usize,
    pub cv: f64,
    pub mismatch_seed: u64,
    pub sim: SimConfig,
    pub schedule: RateSchedule,
    /// Replace the snapshot times with multiples of the calibrated memory span.
    pub auto_schedule: bool,
    pub interpolate: bool,
    pub hyper: Hyper,
    pub sample_total: usize,
    pub train_fraction: f64,
    /// Worker threads; 0 lets the thread pool decide.
    pub jobs: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            steps: 15,
            pool_size: CORE_SIZE,
            cv: 0.2,
            mismatch_seed: 0,
            sim: SimConfig::default(),
            schedule: RateSchedule::default(),
            auto_schedule: false,
            interpolate: true,
            hyper: Hyper::default(),
            sample_total: 1000,
            train_fraction: 0.7,
            jobs: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thresholds.is_empty() || self.thresholds.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Validation("thresholds must be a non-empty list of values > 0".into()));
        }
        if self.steps == 0 {
            return Err(Error::Validation("steps must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.cv) {
            return Err(Error::Validation(format!("cv must be in [0, 1), got {}", self.cv)));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Validation("train fraction must be in (0, 1)".into()));
        }
        self.sim.validate()?;
        self.schedule.validate()?;
        self.hyper.validate()
    }

    fn chains(&self) -> usize {
        2 * self.thresholds.len()
    }
}

/// A calibrated, wired network plus the schedule its features are read on.
#[derive(Debug, Clone)]
pub struct PreparedNetwork {
    pub net: NetworkSpec,
    pub report: CalibrationReport,
    pub schedule: RateSchedule,
}

/// Calibrate the mismatched pool and pick the delay-matched chain assignment.
pub fn calibrate(cfg: &PipelineConfig) -> Result<(Vec<NeuronRecord>, CalibrationReport, Assignment)> {
    cfg.validate()?;
    let mm = MismatchModel::new(cfg.cv, cfg.mismatch_seed)?;
    let needed = cfg.chains() * cfg.steps;
    let pool = calibrate_pool(cfg.pool_size, &NeuronParams::delay_default(), &mm, &cfg.sim, needed)?;
    let (assignment, report) = select_matched(&pool, cfg.chains(), cfg.steps)?;
    Ok((pool, report, assignment))
}

pub fn prepare_network(cfg: &PipelineConfig) -> Result<PreparedNetwork> {
    let (pool, report, assignment) = calibrate(cfg)?;
    let output = NeuronParams::output_default();
    let weights = readout_weights(&cfg.thresholds, &output, cfg.sim.dt)?;
    let net = build_network(&assignment, &pool, &cfg.thresholds, &output, &weights)?;
    let schedule = if cfg.auto_schedule {
        RateSchedule::from_memory_span(
            cfg.schedule.window,
            report.memory_span,
            cfg.schedule.snapshot_times.len(),
        )?
    } else {
        cfg.schedule.clone()
    };
    Ok(PreparedNetwork {
        net,
        report,
        schedule,
    })
}

/// Simulation window long enough to cover the beat and the last snapshot.
pub fn sim_for(cfg: &PipelineConfig, schedule: &RateSchedule, signal: &Signal) -> Result<SimConfig> {
    let duration = cfg
        .sim
        .duration
        .max(schedule.last())
        .max(signal.duration());
    SimConfig::new(cfg.sim.dt, duration)
}

/// Encode one beat and run it through the network.
pub fn simulate_signal(
    prepared: &PreparedNetwork,
    cfg: &PipelineConfig,
    signal: &Signal,
) -> Result<(Vec<SpikeTrain>, BTreeMap<u32, SpikeTrain>)> {
    let inputs = encode_bank(signal, &prepared.net.thresholds, cfg.interpolate)?;
    let sim = sim_for(cfg, &prepared.schedule, signal)?;
    let outputs = run_network(&prepared.net, &inputs, &sim)?;
    Ok((inputs, outputs))
}

/// First-to-last spike transfer of every chain for `signal` played `repeats` times.
pub fn chain_preservation(
    prepared: &PreparedNetwork,
    cfg: &PipelineConfig,
    signal: &Signal,
    repeats: usize,
) -> Result<Vec<Preservation>> {
    let beat = signal.repeated(repeats.max(1));
    // leave room for the last spikes to reach the chain ends
    let tail = prepared.report.memory_span + 0.2;
    let cfg = PipelineConfig {
        sim: SimConfig::new(cfg.sim.dt, beat.duration() + tail)?,
        ..cfg.clone()
    };
    let (_, outputs) = simulate_signal(prepared, &cfg, &beat)?;
    let net = &prepared.net;
    let mut out = Vec::with_capacity(net.chains.len());
    for (c, chain) in net.chains.iter().enumerate() {
        let (first, last) = match (chain.first(), chain.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::Structural(format!("chain {c} is empty"))),
        };
        let expected = prepared.report.cumulative_delay(c, net.steps - 1) - prepared.report.cumulative_delay(c, 0);
        let train = |id: &u32| {
            outputs
                .get(id)
                .ok_or_else(|| Error::Structural(format!("no spike train for neuron {id}")))
        };
        out.push(measure_preservation(train(first)?, train(last)?, expected));
    }
    Ok(out)
}

/// Pearson correlation between the step-profile read at `snapshots` and the
/// threshold-weighted input rate history at each step's mean cumulative delay.
pub fn profile_correlation(
    prepared: &PreparedNetwork,
    cfg: &PipelineConfig,
    signal: &Signal,
    snapshots: &[f64],
) -> Result<Option<f64>> {
    let (inputs, outputs) = simulate_signal(prepared, cfg, signal)?;
    let net = &prepared.net;
    let window = prepared.schedule.window;
    let lags: Vec<f64> = (0..net.steps).map(|k| prepared.report.mean_cumulative_delay(k)).collect();
    let (mut profile, mut history) = (Vec::new(), Vec::new());
    for &t in snapshots {
        let (down, up) = spatial_profile(&outputs, net, t, window)?;
        profile.extend(down);
        profile.extend(up);
        for polarity in [Polarity::Down, Polarity::Up] {
            history.extend(weighted_input_history(&inputs, &net.thresholds, polarity, t, &lags, window));
        }
    }
    Ok(pearson(&profile, &history))
}

pub fn signal_features(prepared: &PreparedNetwork, cfg: &PipelineConfig, signal: &Signal) -> Result<FeatureVector> {
    let (_, outputs) = simulate_signal(prepared, cfg, signal)?;
    extract_features(&outputs, &prepared.net, &prepared.schedule, signal.label())
}

/// Run `f` on a pool of `jobs` threads (0 for the default pool).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Validation(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(f))
}

/// Features for every signal, in dataset order regardless of thread count.
pub fn dataset_features(prepared: &PreparedNetwork, cfg: &PipelineConfig, ds: &Dataset) -> Result<Vec<FeatureVector>> {
    with_jobs(cfg.jobs, || {
        ds.signals
            .par_iter()
            .map(|s| signal_features(prepared, cfg, s))
            .collect::<Result<Vec<_>>>()
    })?
}

pub fn raw_features(ds: &Dataset) -> Vec<FeatureVector> {
    ds.signals
        .iter()
        .map(|s| FeatureVector {
            values: s.samples().to_vec(),
            label: s.label(),
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub feature_report: EvalReport,
    pub raw_report: EvalReport,
    pub train_size: usize,
    pub test_size: usize,
    pub memory_span: f64,
}

impl ExperimentReport {
    /// Raw accuracy minus feature accuracy, in percentage points.
    pub fn gap_points(&self) -> f64 {
        100.0 * (self.raw_report.accuracy - self.feature_report.accuracy)
    }

    pub fn summary(&self, name: &str) -> String {
        format!(
            "{name}: features {:.1}%  raw {:.1}%  gap {:.1} points  (train {}, test {}, memory span {:.3} s)",
            100.0 * self.feature_report.accuracy,
            100.0 * self.raw_report.accuracy,
            self.gap_points(),
            self.train_size,
            self.test_size,
            self.memory_span
        )
    }
}

/// Balanced sample, calibrate, featurize, then train and test both the rate-feature and
/// the raw-sample classifier on the same split.
pub fn run_experiment(ds: &Dataset, cfg: &PipelineConfig, seed: u64) -> Result<ExperimentReport> {
    cfg.validate()?;
    if ds.is_empty() {
        return Err(Error::Validation("dataset is empty".into()));
    }
    let sample = balanced_sample(ds, cfg.sample_total, seed)?;
    let (train_ds, test_ds) = stratified_split(&sample, cfg.train_fraction, seed)?;
    let prepared = prepare_network(cfg)?;
    let train_f = dataset_features(&prepared, cfg, &train_ds)?;
    let test_f = dataset_features(&prepared, cfg, &test_ds)?;
    let hyper = Hyper { seed, ..cfg.hyper };
    let model = train(&train_f, ds.class_count, &hyper)?;
    let feature_report = evaluate(&model, &test_f)?;
    let raw_model = train(&raw_features(&train_ds), ds.class_count, &hyper)?;
    let raw_report = evaluate(&raw_model, &raw_features(&test_ds))?;
    Ok(ExperimentReport {
        feature_report,
        raw_report,
        train_size: train_ds.len(),
        test_size: test_ds.len(),
        memory_span: prepared.report.memory_span,
    })
}
