//! Python bindings: ADM encoding, neuron probes, network calibration and simulation,
//! feature extraction and the classifier comparison.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use delaychain::adm;
use delaychain::classify::{self, ClassifierModel, Hyper};
use delaychain::dataio::{Dataset, Signal, DEFAULT_SAMPLE_RATE};
use delaychain::neuro::{self, NeuronParams, SimConfig};
use delaychain::pipeline::{self, PipelineConfig, PreparedNetwork};
use delaychain::readout::FeatureVector;
use delaychain::synth;
use delaychain::Error;

fn to_py(e: Error) -> PyErr {
    if e.is_calibration() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn signal(samples: Vec<f64>, sample_rate: f64, label: usize) -> PyResult<Signal> {
    Signal::new(samples, sample_rate, label, "python").map_err(to_py)
}

fn dataset(x: Vec<Vec<f64>>, y: Vec<usize>, class_count: usize) -> Result<Dataset, Error> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!("{} signals but {} labels", x.len(), y.len())));
    }
    let signals = x
        .into_iter()
        .zip(y)
        .enumerate()
        .map(|(i, (s, l))| Signal::new(s, DEFAULT_SAMPLE_RATE, l, format!("python:{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    Dataset::new("python", class_count, signals)
}

fn features(x: Vec<Vec<f64>>, y: Vec<usize>) -> Result<Vec<FeatureVector>, Error> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!("{} rows but {} labels", x.len(), y.len())));
    }
    Ok(x.into_iter()
        .zip(y)
        .map(|(values, label)| FeatureVector { values, label })
        .collect())
}

/// UP and DOWN spike times of one delta modulator.
#[pyfunction]
#[pyo3(signature = (samples, threshold, sample_rate=DEFAULT_SAMPLE_RATE, interpolate=true))]
fn encode(samples: Vec<f64>, threshold: f64, sample_rate: f64, interpolate: bool) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let s = signal(samples, sample_rate, 0)?;
    let out = adm::encode(&s, &adm::AdmConfig { threshold, interpolate }).map_err(to_py)?;
    Ok((out.up.times().to_vec(), out.down.times().to_vec()))
}

/// `(channel label, spike times)` for every threshold and polarity.
#[pyfunction]
#[pyo3(signature = (samples, thresholds=adm::DEFAULT_THRESHOLDS.to_vec(), sample_rate=DEFAULT_SAMPLE_RATE))]
fn encode_bank(samples: Vec<f64>, thresholds: Vec<f64>, sample_rate: f64) -> PyResult<Vec<(String, Vec<f64>)>> {
    let s = signal(samples, sample_rate, 0)?;
    let trains = adm::encode_bank(&s, &thresholds, true).map_err(to_py)?;
    Ok(trains
        .iter()
        .map(|t| (t.channel().to_string(), t.times().to_vec()))
        .collect())
}

#[pyclass(name = "NeuronParams", from_py_object)]
#[derive(Clone)]
struct PyNeuronParams {
    #[pyo3(get, set)]
    tau_mem: f64,
    #[pyo3(get, set)]
    tau_syn: f64,
    #[pyo3(get, set)]
    v_threshold: f64,
    #[pyo3(get, set)]
    v_reset: f64,
    #[pyo3(get, set)]
    refractory: f64,
    #[pyo3(get, set)]
    base_weight: f64,
}

impl From<NeuronParams> for PyNeuronParams {
    fn from(p: NeuronParams) -> Self {
        Self {
            tau_mem: p.tau_mem,
            tau_syn: p.tau_syn,
            v_threshold: p.v_threshold,
            v_reset: p.v_reset,
            refractory: p.refractory,
            base_weight: p.base_weight,
        }
    }
}

impl PyNeuronParams {
    fn inner(&self) -> PyResult<NeuronParams> {
        let p = NeuronParams {
            tau_mem: self.tau_mem,
            tau_syn: self.tau_syn,
            v_threshold: self.v_threshold,
            v_reset: self.v_reset,
            refractory: self.refractory,
            base_weight: self.base_weight,
        };
        p.validate().map_err(to_py)?;
        Ok(p)
    }
}

#[pymethods]
impl PyNeuronParams {
    #[staticmethod]
    fn delay_default() -> Self {
        NeuronParams::delay_default().into()
    }

    #[staticmethod]
    fn output_default() -> Self {
        NeuronParams::output_default().into()
    }

    /// Mean input-to-output latency (s) under a regular drive.
    #[pyo3(signature = (rate, dt=1e-4))]
    fn measure_delay(&self, rate: f64, dt: f64) -> PyResult<f64> {
        let sim = SimConfig::new(dt, 1.0).map_err(to_py)?;
        neuro::measure_delay(&self.inner()?, rate, &sim).map_err(to_py)
    }

    /// `(input rate, output rate)` pairs.
    #[pyo3(signature = (rates, dt=1e-4))]
    fn f_curve(&self, rates: Vec<f64>, dt: f64) -> PyResult<Vec<(f64, f64)>> {
        let sim = SimConfig::new(dt, 1.0).map_err(to_py)?;
        Ok(neuro::measure_f_curve(&self.inner()?, &rates, &sim).map_err(to_py)?.points)
    }

    fn __repr__(&self) -> String {
        format!(
            "NeuronParams(tau_mem={}, tau_syn={}, v_threshold={}, v_reset={}, refractory={}, base_weight={})",
            self.tau_mem, self.tau_syn, self.v_threshold, self.v_reset, self.refractory, self.base_weight
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn pipeline_config(
    thresholds: Vec<f64>,
    steps: usize,
    pool_size: usize,
    cv: f64,
    mismatch_seed: u64,
    auto_schedule: bool,
    jobs: usize,
) -> Result<PipelineConfig, Error> {
    let cfg = PipelineConfig {
        thresholds,
        steps,
        pool_size,
        cv,
        mismatch_seed,
        auto_schedule,
        jobs,
        ..PipelineConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// A calibrated delay-chain network with its output neurons and rate schedule.
#[pyclass(name = "Network")]
struct PyNetwork {
    cfg: PipelineConfig,
    prepared: PreparedNetwork,
}

#[pymethods]
impl PyNetwork {
    #[new]
    #[pyo3(signature = (
        thresholds=adm::DEFAULT_THRESHOLDS.to_vec(),
        steps=15,
        pool_size=256,
        cv=0.2,
        mismatch_seed=0,
        auto_schedule=false,
        jobs=0,
    ))]
    fn new(
        thresholds: Vec<f64>,
        steps: usize,
        pool_size: usize,
        cv: f64,
        mismatch_seed: u64,
        auto_schedule: bool,
        jobs: usize,
    ) -> PyResult<Self> {
        let cfg = pipeline_config(thresholds, steps, pool_size, cv, mismatch_seed, auto_schedule, jobs).map_err(to_py)?;
        let prepared = pipeline::with_jobs(jobs, || pipeline::prepare_network(&cfg))
            .and_then(|r| r)
            .map_err(to_py)?;
        Ok(Self { cfg, prepared })
    }

    /// Total calibrated propagation delay along a chain (s).
    #[getter]
    fn memory_span(&self) -> f64 {
        self.prepared.report.memory_span
    }

    #[getter]
    fn per_step_delay(&self) -> Vec<f64> {
        self.prepared.report.per_step_delay.clone()
    }

    #[getter]
    fn per_step_spread(&self) -> Vec<f64> {
        self.prepared.report.per_step_spread.clone()
    }

    /// Neuron ids of every chain, first step first.
    #[getter]
    fn chains(&self) -> Vec<Vec<u32>> {
        self.prepared.net.chains.clone()
    }

    #[getter]
    fn snapshot_times(&self) -> Vec<f64> {
        self.prepared.schedule.snapshot_times.clone()
    }

    /// Spike times of every simulated neuron for one beat.
    fn simulate(&self, samples: Vec<f64>) -> PyResult<BTreeMap<u32, Vec<f64>>> {
        let s = signal(samples, DEFAULT_SAMPLE_RATE, 0)?;
        let (_, outputs) = pipeline::simulate_signal(&self.prepared, &self.cfg, &s).map_err(to_py)?;
        Ok(outputs.into_iter().map(|(id, t)| (id, t.times().to_vec())).collect())
    }

    /// Output-neuron rate features of one beat.
    fn features(&self, samples: Vec<f64>) -> PyResult<Vec<f64>> {
        let s = signal(samples, DEFAULT_SAMPLE_RATE, 0)?;
        Ok(pipeline::signal_features(&self.prepared, &self.cfg, &s)
            .map_err(to_py)?
            .values)
    }

    /// `(count error, jitter)` of every chain for the beat played `repeats` times.
    #[pyo3(signature = (samples, repeats=3))]
    fn preservation(&self, samples: Vec<f64>, repeats: usize) -> PyResult<Vec<(f64, f64)>> {
        let s = signal(samples, DEFAULT_SAMPLE_RATE, 0)?;
        Ok(pipeline::chain_preservation(&self.prepared, &self.cfg, &s, repeats)
            .map_err(to_py)?
            .iter()
            .map(|p| (p.count_error, p.jitter))
            .collect())
    }

    fn to_text(&self) -> String {
        self.prepared.net.to_text()
    }
}

/// Multinomial logistic regression on z-scored features.
#[pyclass(name = "Classifier")]
struct PyClassifier {
    model: ClassifierModel,
}

#[pymethods]
impl PyClassifier {
    #[staticmethod]
    #[pyo3(signature = (x, y, class_count, learning_rate=0.1, epochs=500, l2=1e-4, seed=0))]
    fn train(
        x: Vec<Vec<f64>>,
        y: Vec<usize>,
        class_count: usize,
        learning_rate: f64,
        epochs: usize,
        l2: f64,
        seed: u64,
    ) -> PyResult<Self> {
        let hyper = Hyper {
            learning_rate,
            epochs,
            l2,
            seed,
            ..Hyper::default()
        };
        let model = classify::train(&features(x, y).map_err(to_py)?, class_count, &hyper).map_err(to_py)?;
        Ok(Self { model })
    }

    fn predict(&self, values: Vec<f64>) -> PyResult<usize> {
        self.model.predict(&values).map_err(to_py)
    }

    fn accuracy(&self, x: Vec<Vec<f64>>, y: Vec<usize>) -> PyResult<f64> {
        Ok(classify::evaluate(&self.model, &features(x, y).map_err(to_py)?)
            .map_err(to_py)?
            .accuracy)
    }

    fn to_text(&self) -> String {
        self.model.to_text()
    }
}

/// Seeded synthetic beats: `(samples, labels)`.
#[pyfunction]
#[pyo3(signature = (class_count=2, per_class=10, seed=0))]
fn synthetic(class_count: usize, per_class: usize, seed: u64) -> PyResult<(Vec<Vec<f64>>, Vec<usize>)> {
    let ds = synth::generate(class_count, per_class, seed).map_err(to_py)?;
    Ok(ds
        .signals
        .iter()
        .map(|s| (s.samples().to_vec(), s.label()))
        .unzip())
}

/// Rate-feature versus raw-sample accuracy on one labelled dataset.
#[pyfunction]
#[pyo3(signature = (x, y, class_count, sample_total=1000, seed=0, auto_schedule=false, cv=0.2, jobs=0))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    x: Vec<Vec<f64>>,
    y: Vec<usize>,
    class_count: usize,
    sample_total: usize,
    seed: u64,
    auto_schedule: bool,
    cv: f64,
    jobs: usize,
) -> PyResult<BTreeMap<String, f64>> {
    let ds = dataset(x, y, class_count).map_err(to_py)?;
    let cfg = PipelineConfig {
        sample_total,
        auto_schedule,
        cv,
        jobs,
        ..PipelineConfig::default()
    };
    let r = pipeline::with_jobs(jobs, || pipeline::run_experiment(&ds, &cfg, seed))
        .and_then(|r| r)
        .map_err(to_py)?;
    Ok(BTreeMap::from([
        ("feature_accuracy".to_string(), r.feature_report.accuracy),
        ("raw_accuracy".to_string(), r.raw_report.accuracy),
        ("gap_points".to_string(), r.gap_points()),
        ("memory_span".to_string(), r.memory_span),
        ("train_size".to_string(), r.train_size as f64),
        ("test_size".to_string(), r.test_size as f64),
    ]))
}

#[pymodule]
#[pyo3(name = "delaychain")]
fn delaychain_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(encode_bank, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_class::<PyNeuronParams>()?;
    m.add_class::<PyNetwork>()?;
    m.add_class::<PyClassifier>()?;
    Ok(())
}
