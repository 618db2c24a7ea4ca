use delaychain::chain::NetworkSpec;
use delaychain::dataio::{read_csv, write_csv, CsvOptions};
use delaychain::pipeline::{dataset_features, prepare_network, PipelineConfig};
use delaychain::readout::{read_features_csv, write_features_csv};
use delaychain::synth;

fn small() -> PipelineConfig {
    PipelineConfig {
        thresholds: vec![0.2, 0.05],
        steps: 4,
        pool_size: 48,
        cv: 0.15,
        ..PipelineConfig::default()
    }
}

#[test]
fn dataset_csv_to_features_csv() {
    let ds = synth::generate(3, 2, 8).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &ds).unwrap();
    let back = read_csv(buf.as_slice(), "synthetic", 3, CsvOptions::default()).unwrap();
    assert_eq!(back.len(), ds.len());
    assert_eq!(back.class_histogram(), vec![2, 2, 2]);

    let cfg = small();
    let prepared = prepare_network(&cfg).unwrap();
    let features = dataset_features(&prepared, &cfg, &back).unwrap();
    assert_eq!(features.len(), 6);
    assert!(features.iter().all(|f| f.values.len() == 3 * 2 * 4));
    let mut csv = Vec::new();
    write_features_csv(&mut csv, &features).unwrap();
    let reread = read_features_csv(csv.as_slice()).unwrap();
    assert_eq!(reread.len(), features.len());
    for (a, b) in reread.iter().zip(&features) {
        assert_eq!(a.label, b.label);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-8 * y.abs().max(1.0));
        }
    }
}

#[test]
fn network_text_rebuilds_the_same_simulation() {
    let cfg = small();
    let prepared = prepare_network(&cfg).unwrap();
    let text = prepared.net.to_text();
    let rebuilt = NetworkSpec::from_text(&text).unwrap();
    assert_eq!(rebuilt, prepared.net);
    assert_eq!(rebuilt.to_text(), text);
}

#[test]
fn recalibration_is_deterministic() {
    let a = prepare_network(&small()).unwrap();
    let b = prepare_network(&small()).unwrap();
    assert_eq!(a.net, b.net);
    assert_eq!(a.report.per_step_delay, b.report.per_step_delay);
    let other = prepare_network(&PipelineConfig {
        mismatch_seed: 1,
        ..small()
    })
    .unwrap();
    assert_ne!(a.net, other.net);
}
