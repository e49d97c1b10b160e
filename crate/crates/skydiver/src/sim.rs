//! Cycle-accounting performance model of the SPE-cluster datapath.
//!
//! Filter-based clusters each hold N channel-based SPEs sharing one
//! channel partition, so per-cluster accounting collapses to per-SPE-
//! position accounting. Each input spike triggers an R×R accumulation
//! window at one cycle per weight accumulate; silent connections are
//! skipped entirely. Layers run sequentially, timesteps sequentially;
//! the 4-stream row split enters as a uniform throughput divisor.

use serde::Serialize;

use crate::aprc::{self, MagnitudeKind};
use crate::cbws::{self, Partition, WeightedItems};
use crate::error::{Error, Result};
use crate::snn::{self, NetworkSpec, SpikeTrain};

#[derive(Debug, Clone, PartialEq)]
pub struct HwConfig {
    /// Filter-based SPE clusters.
    pub clusters: usize,
    /// Channel-based SPEs per cluster (the N of the channel partition).
    pub spes_per_cluster: usize,
    /// Row-parallel streams inside each SPE.
    pub streams: usize,
    pub clock_hz: f64,
}

impl Default for HwConfig {
    fn default() -> Self {
        Self {
            clusters: 8,
            spes_per_cluster: 4,
            streams: 4,
            clock_hz: 200e6,
        }
    }
}

impl HwConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clusters == 0 || self.spes_per_cluster == 0 || self.streams == 0 {
            return Err(Error::Config("hardware counts must be >= 1".into()));
        }
        if !(self.clock_hz > 0.0) {
            return Err(Error::Config("clock must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Baseline,
    Cbws,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateSource {
    AprcPredicted,
    OracleMeasured,
}

/// Per-layer assignment of input channels to the N SPE positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub per_layer: Vec<Partition>,
    pub kind: ScheduleKind,
    pub rate_source: RateSource,
}

impl Schedule {
    pub fn mode_label(&self) -> String {
        let k = match self.kind {
            ScheduleKind::Baseline => "baseline",
            ScheduleKind::Cbws => "cbws",
        };
        let r = match self.rate_source {
            RateSource::AprcPredicted => "aprc-predicted",
            RateSource::OracleMeasured => "oracle-measured",
        };
        format!("{k}/{r}")
    }
}

/// Measured per-channel input spike counts for every layer, the oracle
/// rate source. Index [layer][channel]; layer 0 comes from the input
/// train, deeper layers from the previous layer's output spikes.
pub fn measured_input_rates(net: &NetworkSpec, input: &SpikeTrain) -> Result<Vec<Vec<f64>>> {
    let fwd = snn::network_forward(net, input)?;
    Ok(layer_input_counts_f64(net, input, &fwd.spike_counts))
}

fn layer_input_counts_f64(
    net: &NetworkSpec,
    input: &SpikeTrain,
    spike_counts: &[Vec<Vec<u64>>],
) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(net.layers.len());
    for l in 0..net.layers.len() {
        let counts: Vec<f64> = if l == 0 {
            let mut totals = vec![0u64; input.channels];
            for t in 0..input.timesteps {
                for (c, v) in input.channel_counts(t).iter().enumerate() {
                    totals[c] += v;
                }
            }
            totals.iter().map(|&v| v as f64).collect()
        } else {
            let mut totals = vec![0u64; net.layers[l - 1].out_channels];
            for per_t in &spike_counts[l - 1] {
                for (c, v) in per_t.iter().enumerate() {
                    totals[c] += v;
                }
            }
            totals.iter().map(|&v| v as f64).collect()
        };
        out.push(counts);
    }
    out
}

/// Builds the per-layer channel partition.
///
/// Baseline is the hardware default: contiguous equal-count chunks in
/// channel order. CBWS partitions on predicted weights — upstream filter
/// magnitudes when `rate_source` is APRC prediction (layer 0 falls back
/// to measured input rates), or measured spike counts throughout in
/// oracle mode. Signed magnitudes are mapped through |·| before
/// partitioning since workload is non-negative.
pub fn assign_schedule(
    net: &NetworkSpec,
    hw: &HwConfig,
    kind: ScheduleKind,
    rate_source: RateSource,
    measured_rates: Option<&[Vec<f64>]>,
) -> Result<Schedule> {
    net.validate()?;
    hw.validate()?;
    let n = hw.spes_per_cluster;
    let mut per_layer = Vec::with_capacity(net.layers.len());
    for (l, layer) in net.layers.iter().enumerate() {
        let weights: Vec<f64> = match kind {
            ScheduleKind::Baseline => vec![1.0; layer.in_channels],
            ScheduleKind::Cbws => match rate_source {
                RateSource::OracleMeasured => {
                    let rates = measured_rates.ok_or_else(|| {
                        Error::Config("oracle-measured schedule needs measured rates".into())
                    })?;
                    rates
                        .get(l)
                        .filter(|r| r.len() == layer.in_channels)
                        .ok_or_else(|| {
                            Error::Shape(format!("measured rates missing for layer {l}"))
                        })?
                        .clone()
                }
                RateSource::AprcPredicted => {
                    if l == 0 {
                        let rates = measured_rates.ok_or_else(|| {
                            Error::Config(
                                "layer 0 prediction needs measured input rates".into(),
                            )
                        })?;
                        rates
                            .first()
                            .filter(|r| r.len() == layer.in_channels)
                            .ok_or_else(|| {
                                Error::Shape("measured rates missing for layer 0".into())
                            })?
                            .clone()
                    } else {
                        aprc::predict_channel_workload(net, l, None, MagnitudeKind::Signed)?
                            .into_iter()
                            .map(f64::abs)
                            .collect()
                    }
                }
            },
        };
        let items = WeightedItems::new(weights)?;
        let partition = match kind {
            ScheduleKind::Baseline => cbws::contiguous_partition(&items, n)?,
            ScheduleKind::Cbws => {
                cbws::cbws_partition(&items, n, cbws::default_t_iter(items.len()))?
            }
        };
        per_layer.push(partition);
    }
    Ok(Schedule {
        per_layer,
        kind,
        rate_source,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SimReport {
    pub net_name: String,
    pub mode: String,
    pub spes: usize,
    pub streams: usize,
    /// busy[layer][timestep][spe]: spike-triggered accumulate cycles.
    pub busy: Vec<Vec<Vec<u64>>>,
    /// layer_latency[layer][timestep] = max over SPEs of busy.
    pub layer_latency: Vec<Vec<u64>>,
    /// Σ over layers and timesteps of layer latency.
    pub total_cycles: u64,
    /// Σ over all busy counts (total synaptic accumulates).
    pub total_work: u64,
}

/// Runs the functional model to obtain true per-channel spike counts and
/// charges each SPE R·R cycles per input spike in its channel group.
pub fn simulate(
    net: &NetworkSpec,
    input: &SpikeTrain,
    schedule: &Schedule,
    hw: &HwConfig,
) -> Result<SimReport> {
    hw.validate()?;
    if schedule.per_layer.len() != net.layers.len() {
        return Err(Error::Shape(format!(
            "schedule covers {} layers, net has {}",
            schedule.per_layer.len(),
            net.layers.len()
        )));
    }
    let fwd = snn::network_forward(net, input)?;
    let t_max = input.timesteps;
    let n = hw.spes_per_cluster;

    let mut busy = Vec::with_capacity(net.layers.len());
    let mut layer_latency = Vec::with_capacity(net.layers.len());
    let mut total_cycles = 0u64;
    let mut total_work = 0u64;

    for (l, layer) in net.layers.iter().enumerate() {
        let partition = &schedule.per_layer[l];
        if partition.sublists.len() != n {
            return Err(Error::Shape(format!(
                "layer {l} partition has {} sublists, hardware has {n} SPEs",
                partition.sublists.len()
            )));
        }
        partition.validate(layer.in_channels).map_err(|e| {
            Error::Shape(format!("layer {l} partition does not cover its channels: {e}"))
        })?;
        let window = (layer.kernel_size * layer.kernel_size) as u64;
        let mut layer_busy = Vec::with_capacity(t_max);
        let mut lat = Vec::with_capacity(t_max);
        for t in 0..t_max {
            let counts: Vec<u64> = if l == 0 {
                input.channel_counts(t)
            } else {
                fwd.spike_counts[l - 1][t].clone()
            };
            let per_spe: Vec<u64> = partition
                .sublists
                .iter()
                .map(|group| group.iter().map(|&c| counts[c] * window).sum())
                .collect();
            let max = per_spe.iter().copied().max().unwrap_or(0);
            total_work += per_spe.iter().sum::<u64>();
            total_cycles += max;
            lat.push(max);
            layer_busy.push(per_spe);
        }
        busy.push(layer_busy);
        layer_latency.push(lat);
    }

    Ok(SimReport {
        net_name: net.name.clone(),
        mode: schedule.mode_label(),
        spes: n,
        streams: hw.streams,
        busy,
        layer_latency,
        total_cycles,
        total_work,
    })
}

/// Mean-to-max work ratio of one layer, aggregated over timesteps:
/// (Σ_t Σ_j busy) / (N · Σ_t max_j busy). `None` for zero-work layers.
pub fn balance_ratio(report: &SimReport, layer: usize) -> Option<f64> {
    let layer_busy = report.busy.get(layer)?;
    let total: u64 = layer_busy.iter().flatten().sum();
    let max_total: u64 = report.layer_latency[layer].iter().sum();
    if max_total == 0 {
        return None;
    }
    Some(total as f64 / (report.spes as f64 * max_total as f64))
}

/// Average balance ratio over layers with nonzero work.
pub fn mean_balance_ratio(report: &SimReport) -> Option<f64> {
    let ratios: Vec<f64> = (0..report.busy.len())
        .filter_map(|l| balance_ratio(report, l))
        .collect();
    if ratios.is_empty() {
        None
    } else {
        Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Throughput {
    /// Frames per second: clock / (cycles per frame / streams). A model
    /// estimate, not a silicon measurement.
    pub frames_per_second: f64,
    /// Synaptic operations per second: accumulates × clock / cycles.
    pub synaptic_ops_per_second: f64,
}

pub fn throughput_estimate(report: &SimReport, hw: &HwConfig) -> Result<Throughput> {
    hw.validate()?;
    if report.total_cycles == 0 {
        return Err(Error::Config(
            "zero-cycle report: throughput undefined".into(),
        ));
    }
    let cycles = report.total_cycles as f64;
    Ok(Throughput {
        frames_per_second: hw.clock_hz * hw.streams as f64 / cycles,
        synaptic_ops_per_second: report.total_work as f64 * hw.clock_hz / cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snn::{LayerKind, LayerSpec, WeightTensor};

    fn one_layer_net(c: usize, m: usize, h: usize) -> NetworkSpec {
        NetworkSpec {
            name: "t".into(),
            layers: vec![LayerSpec {
                kind: LayerKind::Conv,
                in_channels: c,
                out_channels: m,
                kernel_size: 3,
                input_side: h,
                pad: 2,
                stride: 1,
                v_th: 1.0,
                weights: WeightTensor::zeros([m, c, 3, 3]),
                bias: vec![0.0; m],
            }],
        }
    }

    fn hw(n: usize) -> HwConfig {
        HwConfig {
            clusters: 2,
            spes_per_cluster: n,
            streams: 1,
            clock_hz: 200e6,
        }
    }

    #[test]
    fn baseline_contiguous_split() {
        let net = one_layer_net(8, 2, 6);
        let sched = assign_schedule(
            &net,
            &hw(2),
            ScheduleKind::Baseline,
            RateSource::AprcPredicted,
            None,
        )
        .unwrap();
        assert_eq!(sched.per_layer[0].sublists[0], vec![0, 1, 2, 3]);
        assert_eq!(sched.per_layer[0].sublists[1], vec![4, 5, 6, 7]);
    }

    #[test]
    fn cbws_splits_unequal_magnitude_channels() {
        // Upstream magnitudes 2.7 / 0.9 become the layer-1 weights.
        let l0 = crate::aprc::tests::two_filter_layer();
        let l1 = LayerSpec {
            kind: LayerKind::Conv,
            in_channels: 2,
            out_channels: 1,
            kernel_size: 3,
            input_side: 10,
            pad: 2,
            stride: 1,
            v_th: 1.0,
            weights: WeightTensor::zeros([1, 2, 3, 3]),
            bias: vec![0.0],
        };
        let net = NetworkSpec {
            name: "t".into(),
            layers: vec![l0, l1],
        };
        let rates = vec![vec![4.0]];
        let sched = assign_schedule(
            &net,
            &hw(2),
            ScheduleKind::Cbws,
            RateSource::AprcPredicted,
            Some(&rates),
        )
        .unwrap();
        assert_eq!(sched.per_layer[1].sublists, vec![vec![0], vec![1]]);
    }

    #[test]
    fn cbws_uniform_weights_equal_counts() {
        let net = one_layer_net(8, 2, 6);
        let rates = vec![vec![1.0; 8]];
        let sched = assign_schedule(
            &net,
            &hw(2),
            ScheduleKind::Cbws,
            RateSource::AprcPredicted,
            Some(&rates),
        )
        .unwrap();
        for list in &sched.per_layer[0].sublists {
            assert_eq!(list.len(), 4);
        }
    }

    #[test]
    fn cbws_oracle_mode_requires_rates() {
        let net = one_layer_net(4, 1, 6);
        assert!(assign_schedule(
            &net,
            &hw(2),
            ScheduleKind::Cbws,
            RateSource::OracleMeasured,
            None,
        )
        .is_err());
    }

    fn schedule_with(partitions: Vec<Vec<Vec<usize>>>) -> Schedule {
        Schedule {
            per_layer: partitions
                .into_iter()
                .map(|sublists| {
                    let n = sublists.len();
                    Partition {
                        sublists,
                        sums: vec![0.0; n],
                    }
                })
                .collect(),
            kind: ScheduleKind::Baseline,
            rate_source: RateSource::AprcPredicted,
        }
    }

    /// One layer, 2 input channels with spike counts (6, 2) at one
    /// timestep, R = 3: split {0}|{1} gives busy (54, 18), latency 54.
    fn six_two_input() -> (NetworkSpec, SpikeTrain) {
        let net = one_layer_net(2, 1, 8);
        let mut train = SpikeTrain::zeros(1, 2, 8, 8);
        for i in 0..6 {
            train.set(0, 0, i / 3, i % 3, 1);
        }
        train.set(0, 1, 0, 0, 1);
        train.set(0, 1, 5, 5, 1);
        (net, train)
    }

    #[test]
    fn silent_input_zero_report() {
        let net = one_layer_net(2, 1, 8);
        let train = SpikeTrain::zeros(2, 2, 8, 8);
        let sched = schedule_with(vec![vec![vec![0], vec![1]]]);
        let report = simulate(&net, &train, &sched, &hw(2)).unwrap();
        assert_eq!(report.total_cycles, 0);
        assert_eq!(report.total_work, 0);
        assert!(balance_ratio(&report, 0).is_none());
        assert!(throughput_estimate(&report, &hw(2)).is_err());
    }

    #[test]
    fn busy_counts_from_worked_example() {
        let (net, train) = six_two_input();
        let sched = schedule_with(vec![vec![vec![0], vec![1]]]);
        let report = simulate(&net, &train, &sched, &hw(2)).unwrap();
        assert_eq!(report.busy[0][0], vec![54, 18]);
        assert_eq!(report.layer_latency[0][0], 54);
        let ratio = balance_ratio(&report, 0).unwrap();
        assert!((ratio - 72.0 / (2.0 * 54.0)).abs() < 1e-12);
    }

    #[test]
    fn lopsided_partition_costs_latency() {
        let (net, train) = six_two_input();
        let sched = schedule_with(vec![vec![vec![0, 1], vec![]]]);
        let report = simulate(&net, &train, &sched, &hw(2)).unwrap();
        assert_eq!(report.busy[0][0], vec![72, 0]);
        assert_eq!(report.layer_latency[0][0], 72);
        assert!((balance_ratio(&report, 0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn work_is_conserved_across_schedules() {
        let (net, train) = six_two_input();
        let a = simulate(
            &net,
            &train,
            &schedule_with(vec![vec![vec![0], vec![1]]]),
            &hw(2),
        )
        .unwrap();
        let b = simulate(
            &net,
            &train,
            &schedule_with(vec![vec![vec![0, 1], vec![]]]),
            &hw(2),
        )
        .unwrap();
        assert_eq!(a.total_work, b.total_work);
        assert_eq!(a.total_work, 72);
    }

    #[test]
    fn schedule_mismatch_rejected() {
        let (net, train) = six_two_input();
        let sched = schedule_with(vec![vec![vec![0], vec![1]], vec![vec![0]]]);
        assert!(simulate(&net, &train, &sched, &hw(2)).is_err());
        let bad_cover = schedule_with(vec![vec![vec![0], vec![0]]]);
        assert!(simulate(&net, &train, &bad_cover, &hw(2)).is_err());
    }

    #[test]
    fn throughput_arithmetic() {
        let (net, train) = six_two_input();
        let sched = schedule_with(vec![vec![vec![0], vec![1]]]);
        let mut cfg = hw(2);
        cfg.clock_hz = 200e6;
        cfg.streams = 1;
        let report = simulate(&net, &train, &sched, &cfg).unwrap();
        // 54 cycles/frame at 200 MHz, 1 stream.
        let tp = throughput_estimate(&report, &cfg).unwrap();
        assert!((tp.frames_per_second - 200e6 / 54.0).abs() < 1e-3);
        assert!((tp.synaptic_ops_per_second - 72.0 * 200e6 / 54.0).abs() < 1e-3);
    }

    #[test]
    fn streams_divide_reported_cycles() {
        let (net, train) = six_two_input();
        let sched = schedule_with(vec![vec![vec![0], vec![1]]]);
        let mut cfg = hw(2);
        cfg.streams = 4;
        let report = simulate(&net, &train, &sched, &cfg).unwrap();
        let tp = throughput_estimate(&report, &cfg).unwrap();
        assert!((tp.frames_per_second - 200e6 * 4.0 / 54.0).abs() < 1e-3);
    }

    #[test]
    fn latency_lower_bound() {
        let (net, train) = six_two_input();
        let sched = schedule_with(vec![vec![vec![0], vec![1]]]);
        let report = simulate(&net, &train, &sched, &hw(2)).unwrap();
        for l in 0..report.busy.len() {
            for t in 0..report.busy[l].len() {
                let total: u64 = report.busy[l][t].iter().sum();
                let lat = report.layer_latency[l][t];
                assert!(lat as f64 >= total as f64 / report.spes as f64);
            }
        }
    }
}
