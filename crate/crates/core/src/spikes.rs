//! Spike trains and channel labels shared by the encoder, the network and the readout.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Up,
    Down,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Up => "up",
            Polarity::Down => "down",
        }
    }
}

/// Where a spike train comes from: one polarity of one delta modulator, or a simulated neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    Adm {
        threshold_index: usize,
        polarity: Polarity,
    },
    Neuron(u32),
}

impl Channel {
    pub fn adm(threshold_index: usize, polarity: Polarity) -> Self {
        Channel::Adm {
            threshold_index,
            polarity,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Adm {
                threshold_index,
                polarity,
            } => write!(f, "adm{}_{}", threshold_index, polarity.as_str()),
            Channel::Neuron(id) => write!(f, "n{id}"),
        }
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Validation(format!("unrecognized channel label {s:?}"));
        if let Some(rest) = s.strip_prefix("adm") {
            let (idx, pol) = rest.split_once('_').ok_or_else(bad)?;
            let threshold_index = idx.parse().map_err(|_| bad())?;
            let polarity = match pol {
                "up" => Polarity::Up,
                "down" => Polarity::Down,
                _ => return Err(bad()),
            };
            Ok(Channel::adm(threshold_index, polarity))
        } else if let Some(id) = s.strip_prefix('n') {
            Ok(Channel::Neuron(id.parse().map_err(|_| bad())?))
        } else {
            Err(bad())
        }
    }
}

/// Strictly increasing, non-negative event times (seconds) for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrain {
    channel: Channel,
    times: Vec<f64>,
}

impl SpikeTrain {
    pub fn new(channel: Channel, times: Vec<f64>) -> Result<Self> {
        if let Some(t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::Validation(format!(
                "{channel}: spike time {t} is negative or non-finite"
            )));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Validation(format!(
                "{channel}: spike times not strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { channel, times })
    }

    pub fn empty(channel: Channel) -> Self {
        Self {
            channel,
            times: Vec::new(),
        }
    }

    /// Caller guarantees the ordering invariant.
    pub(crate) fn from_sorted(channel: Channel, times: Vec<f64>) -> Self {
        debug_assert!(times.windows(2).all(|w| w[1] > w[0]));
        Self { channel, times }
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn with_channel(mut self, channel: Channel) -> Self {
        self.channel = channel;
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of spikes at or before `t`.
    pub fn count_until(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t)
    }

    /// Number of spikes in the half-open interval `(start, end]`.
    pub fn count_in(&self, start: f64, end: f64) -> usize {
        self.count_until(end).saturating_sub(self.count_until(start))
    }

    /// All times moved by `offset`; fails if any would become negative.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        Self::new(self.channel, self.times.iter().map(|t| t + offset).collect())
    }

    /// Union of several trains under a new label. Coincident events are kept once.
    pub fn merge<'a>(channel: Channel, trains: impl IntoIterator<Item = &'a SpikeTrain>) -> Self {
        let mut times: Vec<f64> = trains.into_iter().flat_map(|t| t.times.iter().copied()).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        Self { channel, times }
    }
}

/// Shortest decimal rendering of `x` after rounding to nine significant digits.
pub fn fmt_sig9(x: f64) -> String {
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    format!("{rounded}")
}

/// Serialize trains as `channel,time_s` rows.
pub fn write_spike_csv<W: std::io::Write>(out: W, trains: &[SpikeTrain]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let map = |e: csv::Error| Error::Validation(format!("csv write: {e}"));
    w.write_record(["channel", "time_s"]).map_err(map)?;
    for train in trains {
        let label = train.channel.to_string();
        for &t in &train.times {
            w.write_record([label.as_str(), fmt_sig9(t).as_str()])
                .map_err(map)?;
        }
    }
    w.flush()
        .map_err(|e| Error::Validation(format!("csv write: {e}")))?;
    Ok(())
}

/// Parse `channel,time_s` rows back into trains, grouped by channel in order of first appearance.
pub fn read_spike_csv<R: std::io::Read>(input: R) -> Result<Vec<SpikeTrain>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let mut order: Vec<Channel> = Vec::new();
    let mut groups: std::collections::HashMap<Channel, Vec<f64>> = Default::default();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if rec.len() != 2 {
            return Err(Error::Parse {
                row,
                message: format!("expected 2 columns, found {}", rec.len()),
            });
        }
        let channel: Channel = rec[0].trim().parse().map_err(|e: Error| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let t: f64 = rec[1].trim().parse().map_err(|_| Error::Parse {
            row,
            message: format!("non-numeric time {:?}", &rec[1]),
        })?;
        groups
            .entry(channel)
            .or_insert_with(|| {
                order.push(channel);
                Vec::new()
            })
            .push(t);
    }
    order
        .into_iter()
        .map(|c| SpikeTrain::new(c, groups.remove(&c).unwrap_or_default()))
        .collect()
}
