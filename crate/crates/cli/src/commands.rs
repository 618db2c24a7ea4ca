use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use delaychain::adm::encode_bank;
use delaychain::chain::{
    build_network, write_pool_csv, write_steps_csv, CalibrationReport, NeuronRecord, CALIBRATION_RATES,
};
use delaychain::classify::EvalReport;
use delaychain::dataio::{load_csv, save_csv, CsvOptions, Dataset, Signal};
use delaychain::neuro::{measure_f_curve, NeuronParams, SimConfig};
use delaychain::pipeline::{
    calibrate, chain_preservation, dataset_features, prepare_network, run_experiment, simulate_signal,
    PipelineConfig, PreparedNetwork,
};
use delaychain::readout::{readout_weights, spatial_profile, write_features_csv};
use delaychain::spikes::{fmt_sig9, write_spike_csv, SpikeTrain};
use delaychain::synth;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::svg::{Figure, Layer};

pub type CmdResult = Result<(), CliError>;

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Create the output directory and record the resolved configuration in it.
pub fn prepare_out(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    write_text(&cfg.out.join("config.txt"), &cfg.serialize())?;
    Ok(cfg.out.clone())
}

fn load_dataset(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let path = cfg
        .dataset
        .as_ref()
        .ok_or_else(|| CliError::Usage("no dataset given (positional argument or `dataset` key)".into()))?;
    let ds = load_csv(path, cfg.classes, CsvOptions { header: cfg.header })?;
    if ds.is_empty() {
        return Err(delaychain::Error::Validation(format!("{}: dataset is empty", path.display())).into());
    }
    Ok(ds)
}

fn selected_signal(cfg: &RunConfig, ds: &Dataset) -> Result<Signal, CliError> {
    ds.signals.get(cfg.signal_index).cloned().ok_or_else(|| {
        CliError::Usage(format!(
            "signal index {} out of range for {} signals",
            cfg.signal_index,
            ds.len()
        ))
    })
}

pub fn encode(cfg: &RunConfig) -> CmdResult {
    let ds = load_dataset(cfg)?;
    let signal = selected_signal(cfg, &ds)?;
    let out = prepare_out(cfg)?;
    let trains = encode_bank(&signal, &cfg.pipeline.thresholds, cfg.pipeline.interpolate)?;
    for train in &trains {
        let path = out.join(format!("spikes_{}.csv", train.channel()));
        write_spike_csv(create(&path)?, std::slice::from_ref(train))?;
        println!("{}: {} spikes", path.display(), train.len());
    }
    Ok(())
}

fn delay_histogram(pool: &[NeuronRecord], selected: &[u32]) -> Vec<(f64, f64, usize, usize)> {
    const BIN: f64 = 0.001;
    let delays: Vec<(u32, f64)> = pool.iter().filter_map(|r| r.measured_delay.map(|d| (r.id, d))).collect();
    let Some(max) = delays.iter().map(|d| d.1).reduce(f64::max) else {
        return Vec::new();
    };
    let min = delays.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
    let (first, last) = ((min / BIN).floor() as i64, (max / BIN).floor() as i64);
    (first..=last)
        .map(|b| {
            let (lo, hi) = (b as f64 * BIN, (b + 1) as f64 * BIN);
            let in_bin = |d: f64| (d / BIN).floor() as i64 == b;
            let all = delays.iter().filter(|d| in_bin(d.1)).count();
            let sel = delays.iter().filter(|d| in_bin(d.1) && selected.contains(&d.0)).count();
            (lo, hi, all, sel)
        })
        .collect()
}

fn write_fcurves(path: &Path, nominal: &[(f64, f64)], pool: &[NeuronRecord]) -> CmdResult {
    let mut text = String::from("neuron,rate_in,rate_out\n");
    for &(fin, fout) in nominal {
        text.push_str(&format!("nominal,{},{}\n", fmt_sig9(fin), fmt_sig9(fout)));
    }
    for r in pool {
        for &(fin, fout) in &r.f_curve {
            text.push_str(&format!("{},{},{}\n", r.id, fmt_sig9(fin), fmt_sig9(fout)));
        }
    }
    write_text(path, &text)
}

fn calibration_summary(report: &CalibrationReport) -> String {
    let max_spread = report.per_step_spread.iter().cloned().fold(0.0, f64::max);
    format!(
        "usable neurons: {}/{}\nmemory span: {:.4} s\nmax per-step spread: {:.2} ms\n",
        report.pool.iter().filter(|r| r.is_usable()).count(),
        report.pool.len(),
        report.memory_span,
        max_spread * 1e3
    )
}

pub fn calibrate_cmd(cfg: &RunConfig) -> CmdResult {
    let p = &cfg.pipeline;
    let out = prepare_out(cfg)?;
    let (pool, report, assignment) = calibrate(p)?;
    let output = NeuronParams::output_default();
    let weights = readout_weights(&p.thresholds, &output, p.sim.dt)?;
    let net = build_network(&assignment, &pool, &p.thresholds, &output, &weights)?;
    write_pool_csv(create(&out.join("pool.csv"))?, &pool)?;
    write_steps_csv(create(&out.join("steps.csv"))?, &report)?;
    write_text(&out.join("network.txt"), &net.to_text())?;

    let nominal = measure_f_curve(&NeuronParams::delay_default(), &CALIBRATION_RATES, &p.sim)?;
    write_fcurves(&out.join("fcurve.csv"), &nominal.points, &pool)?;
    let selected: Vec<u32> = assignment.chains.iter().flatten().copied().collect();
    let hist = delay_histogram(&pool, &selected);
    let mut text = String::from("bin_start_s,bin_end_s,pool_count,selected_count\n");
    for (lo, hi, all, sel) in &hist {
        text.push_str(&format!("{},{},{all},{sel}\n", fmt_sig9(*lo), fmt_sig9(*hi)));
    }
    write_text(&out.join("delay_histogram.csv"), &text)?;

    let diagonal = CALIBRATION_RATES.iter().map(|&r| (r, r)).collect();
    let fig = Figure::new("Input versus output rate", "input rate (Hz)", "output rate (Hz)")
        .with(Layer::Line {
            label: "nominal neuron".into(),
            points: nominal.points.clone(),
        })
        .with(Layer::Line {
            label: "one-to-one".into(),
            points: diagonal,
        });
    write_text(&out.join("fcurve.svg"), &fig.render())?;
    let ms = |x: f64| x * 1e3;
    let fig = Figure::new("Measured delays", "delay (ms)", "neurons")
        .with(Layer::Bars {
            label: "pool".into(),
            bins: hist.iter().map(|h| (ms(h.0), ms(h.1), h.2 as f64)).collect(),
        })
        .with(Layer::Bars {
            label: "selected".into(),
            bins: hist.iter().map(|h| (ms(h.0), ms(h.1), h.3 as f64)).collect(),
        });
    write_text(&out.join("delay_histogram.svg"), &fig.render())?;

    let summary = calibration_summary(&report);
    write_text(&out.join("calibration.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn neuron_trains(outputs: &std::collections::BTreeMap<u32, SpikeTrain>, ids: &[u32]) -> Vec<SpikeTrain> {
    ids.iter().filter_map(|id| outputs.get(id).cloned()).collect()
}

fn write_rasters(out: &Path, prepared: &PreparedNetwork, cfg: &PipelineConfig, beat: &Signal, repeat: usize) -> CmdResult {
    let long = beat.repeated(repeat);
    let sim = SimConfig::new(
        cfg.sim.dt,
        cfg.sim.duration.max(long.duration() + prepared.report.memory_span + 0.2),
    )?;
    let run_cfg = PipelineConfig { sim, ..cfg.clone() };
    let (inputs, outputs) = simulate_signal(prepared, &run_cfg, &long)?;
    let net = &prepared.net;
    let first: Vec<u32> = net.chains.iter().map(|c| c[0]).collect();
    let last: Vec<u32> = net.chains.iter().map(|c| c[c.len() - 1]).collect();
    write_spike_csv(create(&out.join("inputs.csv"))?, &inputs)?;
    write_spike_csv(create(&out.join("raster_first.csv"))?, &neuron_trains(&outputs, &first))?;
    write_spike_csv(create(&out.join("raster_last.csv"))?, &neuron_trains(&outputs, &last))?;

    let mut profile = String::from("snapshot_s,step,down_rate,up_rate\n");
    for &t in &prepared.schedule.snapshot_times {
        let (down, up) = spatial_profile(&outputs, net, t, prepared.schedule.window)?;
        for k in 0..net.steps {
            profile.push_str(&format!("{},{k},{},{}\n", fmt_sig9(t), fmt_sig9(down[k]), fmt_sig9(up[k])));
        }
    }
    write_text(&out.join("profile.csv"), &profile)?;

    let pres = chain_preservation(prepared, cfg, beat, repeat)?;
    let mut text = String::from("chain,first_spikes,last_spikes,count_error,jitter_s,matched\n");
    for (c, p) in pres.iter().enumerate() {
        text.push_str(&format!(
            "{c},{},{},{},{},{}\n",
            outputs[&first[c]].len(),
            outputs[&last[c]].len(),
            fmt_sig9(p.count_error),
            fmt_sig9(p.jitter),
            p.matched
        ));
    }
    write_text(&out.join("preservation.csv"), &text)?;

    let rows = |ids: &[u32], tag: &str| -> Vec<(String, Vec<f64>)> {
        ids.iter()
            .enumerate()
            .map(|(c, id)| (format!("c{c} {tag}"), outputs[id].times().to_vec()))
            .collect()
    };
    let mut all = rows(&first, "first");
    all.extend(rows(&last, "last"));
    let fig = Figure::new("First and last chain neurons", "time (s)", "").with(Layer::Raster { rows: all });
    write_text(&out.join("raster.svg"), &fig.render())?;
    for (c, p) in pres.iter().enumerate() {
        println!(
            "chain {c}: count error {:.1}%, jitter {:.1} ms",
            p.count_error * 100.0,
            p.jitter * 1e3
        );
    }
    Ok(())
}

pub fn run(cfg: &RunConfig) -> CmdResult {
    let ds = load_dataset(cfg)?;
    let beat = selected_signal(cfg, &ds)?;
    let out = prepare_out(cfg)?;
    let prepared = prepare_network(&cfg.pipeline)?;
    let features = dataset_features(&prepared, &cfg.pipeline, &ds)?;
    write_features_csv(create(&out.join("features.csv"))?, &features)?;
    write_rasters(&out, &prepared, &cfg.pipeline, &beat, cfg.repeat)?;
    println!("{} feature vectors of {} values", features.len(), features[0].values.len());
    Ok(())
}

fn write_report(out: &Path, stem: &str, title: &str, report: &EvalReport) -> CmdResult {
    write_text(&out.join(format!("{stem}.txt")), &report.to_text(title))?;
    report.write_csv(create(&out.join(format!("{stem}.csv")))?)?;
    Ok(())
}

pub fn experiment(cfg: &RunConfig) -> CmdResult {
    let ds = load_dataset(cfg)?;
    let out = prepare_out(cfg)?;
    let report = run_experiment(&ds, &cfg.pipeline, cfg.seed)?;
    let name = if cfg.dataset_name.is_empty() {
        ds.name.clone()
    } else {
        cfg.dataset_name.clone()
    };
    write_report(&out, "feature_report", &format!("{name}: rate features"), &report.feature_report)?;
    write_report(&out, "raw_report", &format!("{name}: raw samples"), &report.raw_report)?;
    let table = format!(
        "dataset,train,test,feature_accuracy,raw_accuracy,gap_points,memory_span_s\n{name},{},{},{},{},{},{}\n",
        report.train_size,
        report.test_size,
        fmt_sig9(report.feature_report.accuracy),
        fmt_sig9(report.raw_report.accuracy),
        fmt_sig9(report.gap_points()),
        fmt_sig9(report.memory_span)
    );
    write_text(&out.join("summary.csv"), &table)?;
    let line = report.summary(&name);
    write_text(&out.join("summary.txt"), &format!("{line}\n"))?;
    println!("{line}");
    Ok(())
}

pub fn synth_cmd(cfg: &RunConfig) -> CmdResult {
    if !(1..=synth::MAX_CLASSES).contains(&cfg.classes) {
        return Err(CliError::Usage(format!(
            "synthetic data has 1 to {} classes, got {}",
            synth::MAX_CLASSES,
            cfg.classes
        )));
    }
    let out = prepare_out(cfg)?;
    let ds = synth::generate(cfg.classes, cfg.per_class, cfg.seed)?;
    let path = out.join("synthetic.csv");
    save_csv(&path, &ds)?;
    println!("{}: {} beats, {} classes", path.display(), ds.len(), ds.class_count);
    Ok(())
}
