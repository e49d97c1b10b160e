//! Batch front door: build synthetic networks, generate or load spike
//! inputs, run simulations, and emit comparison/profile tables. The
//! binary in `main.rs` is a thin argument-parsing shell over these
//! functions, which keeps every pipeline callable from tests and
//! examples.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::aprc;
use crate::error::{Error, Result};
use crate::io::{self, CompareRow};
use crate::sim::{self, HwConfig, RateSource, ScheduleKind, SimReport};
use crate::snn::{
    self, Image, LayerKind, LayerSpec, NetworkSpec, SpikeTrain, WeightTensor,
};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SKYDIVER_OUT_DIR";

/// Parses a layer spec string in the compact `HxWxC-8C3-16C3-10` style:
/// an optional leading input shape, then `<M>C<R>` conv tokens and bare
/// `<M>` (or `<M>c`) dense tokens. Spatial maps are square; a dense
/// token after a conv flattens the map into channels.
pub fn build_network(spec: &str, seed: u64, sigma: f32, name: &str) -> Result<NetworkSpec> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Config("sigma must be positive".into()));
    }
    let mut tokens = spec.split('-').peekable();
    let usage = |t: &str| Error::Config(format!("cannot parse layer token '{t}' in '{spec}'"));

    // Input shape defaults to 8x8x1.
    let (mut side, mut channels) = (8usize, 1usize);
    if let Some(tok) = tokens.peek() {
        if tok.to_ascii_lowercase().contains('x') {
            let parts: Vec<usize> = tok
                .to_ascii_lowercase()
                .split('x')
                .map(|p| p.parse().map_err(|_| usage(tok)))
                .collect::<Result<_>>()?;
            match parts[..] {
                [h, w] if h == w && h > 0 => (side, channels) = (h, 1),
                [h, w, c] if h == w && h > 0 && c > 0 => (side, channels) = (h, c),
                [h, w] | [h, w, _] if h != w => {
                    return Err(Error::Config(format!(
                        "input maps must be square, got {h}x{w}"
                    )))
                }
                _ => return Err(usage(tok)),
            }
            tokens.next();
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0f32, sigma).map_err(|e| Error::Config(e.to_string()))?;
    let mut layers: Vec<LayerSpec> = Vec::new();

    for tok in tokens {
        let lower = tok.to_ascii_lowercase();
        let (kind, m, r) = if let Some(cpos) = lower.find('c') {
            let m: usize = lower[..cpos].parse().map_err(|_| usage(tok))?;
            let rest = &lower[cpos + 1..];
            if rest.is_empty() {
                (LayerKind::Dense, m, 1)
            } else {
                let r: usize = rest.parse().map_err(|_| usage(tok))?;
                (LayerKind::Conv, m, r)
            }
        } else {
            let m: usize = lower.parse().map_err(|_| usage(tok))?;
            (LayerKind::Dense, m, 1)
        };
        if m == 0 || r == 0 {
            return Err(Error::Config(format!(
                "layer token '{tok}' has a zero dimension"
            )));
        }

        let (c, h) = match kind {
            LayerKind::Conv => {
                if r > side + 2 * ((r - 1) / 2) {
                    return Err(Error::Config(format!(
                        "kernel {r} too large for {side}x{side} maps"
                    )));
                }
                (channels, side)
            }
            LayerKind::Dense => {
                // Flatten whatever spatial extent remains.
                (channels * side * side, 1)
            }
        };
        let pad = match kind {
            LayerKind::Conv => (r - 1) / 2, // "same" padding for odd R
            LayerKind::Dense => 0,
        };
        let count = m * c * r * r;
        let data: Vec<f32> = (0..count).map(|_| normal.sample(&mut rng)).collect();
        let layer = LayerSpec {
            kind,
            in_channels: c,
            out_channels: m,
            kernel_size: r,
            input_side: h,
            pad,
            stride: 1,
            v_th: 1.0,
            weights: WeightTensor::new([m, c, r, r], data)?,
            bias: vec![0.0; m],
        };
        side = layer.output_side();
        channels = m;
        layers.push(layer);
    }

    let net = NetworkSpec {
        name: name.to_string(),
        layers,
    };
    net.validate()?;
    Ok(net)
}

/// Where the input spike train comes from.
#[derive(Debug, Clone)]
pub enum InputSource {
    /// A bit-packed trace file; timesteps come from the file.
    Trace(PathBuf),
    /// One image of an IDX file, rate-encoded.
    Idx { path: PathBuf, index: usize },
    /// Synthetic Bernoulli spikes at a fixed density.
    Random { density: f64 },
}

pub fn load_or_make_input(
    net: &NetworkSpec,
    source: &InputSource,
    timesteps: usize,
    seed: u64,
) -> Result<SpikeTrain> {
    let first = &net.layers[0];
    let train = match source {
        InputSource::Trace(path) => io::load_trace(path)?,
        InputSource::Idx { path, index } => {
            let images = io::load_idx_images(path, Some(index + 1))?;
            let image = images.into_iter().nth(*index).ok_or_else(|| {
                Error::Config(format!("image index {index} out of range"))
            })?;
            snn::rate_encode(&image, timesteps, seed)?
        }
        InputSource::Random { density } => {
            if !(0.0..=1.0).contains(density) {
                return Err(Error::Config("density must be in [0, 1]".into()));
            }
            let image = Image::constant(
                first.in_channels,
                first.input_side,
                first.input_side,
                *density as f32,
            );
            snn::rate_encode(&image, timesteps, seed)?
        }
    };
    if train.channels != first.in_channels
        || train.height != first.input_side
        || train.width != first.input_side
    {
        return Err(Error::Shape(format!(
            "input {}x{}x{} does not match layer 0 ({}x{}x{})",
            train.channels,
            train.height,
            train.width,
            first.in_channels,
            first.input_side,
            first.input_side
        )));
    }
    Ok(train)
}

pub fn cmd_gen(layers: &str, seed: u64, sigma: f32, out: &Path) -> Result<()> {
    let name = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("synthetic")
        .to_string();
    let net = build_network(layers, seed, sigma, &name)?;
    io::save_network(&net, out)
}

/// Per-channel layer-0 spike counts of the input train, the measured
/// fallback that seeds APRC prediction where no upstream filter exists.
fn input_channel_rates(input: &SpikeTrain) -> Vec<Vec<f64>> {
    let mut totals = vec![0u64; input.channels];
    for t in 0..input.timesteps {
        for (c, v) in input.channel_counts(t).iter().enumerate() {
            totals[c] += v;
        }
    }
    vec![totals.iter().map(|&v| v as f64).collect()]
}

pub struct RunOutcome {
    pub report: SimReport,
    pub json_path: PathBuf,
    pub csv_path: PathBuf,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_run(
    net_path: &Path,
    source: &InputSource,
    timesteps: usize,
    seed: u64,
    kind: ScheduleKind,
    aprc_on: bool,
    rate_source: RateSource,
    hw: &HwConfig,
    out_dir: &Path,
) -> Result<RunOutcome> {
    if timesteps == 0 && !matches!(source, InputSource::Trace(_)) {
        return Err(Error::Config("timesteps must be >= 1".into()));
    }
    let net = io::load_network(net_path)?;
    let net = if aprc_on { aprc::apply_aprc(&net)? } else { net };
    let input = load_or_make_input(&net, source, timesteps, seed)?;

    let rates = match rate_source {
        RateSource::OracleMeasured => sim::measured_input_rates(&net, &input)?,
        RateSource::AprcPredicted => input_channel_rates(&input),
    };
    let schedule = sim::assign_schedule(&net, hw, kind, rate_source, Some(&rates))?;
    let report = sim::simulate(&net, &input, &schedule, hw)?;

    let json_path = out_dir.join("report.json");
    let csv_path = out_dir.join("report.csv");
    io::write_report_json(&report, hw, &json_path)?;
    io::write_report_csv(&report, &csv_path)?;
    Ok(RunOutcome {
        report,
        json_path,
        csv_path,
    })
}

/// The four schedule modes of the ablation matrix, with their reports.
pub struct CompareOutcome {
    pub rows: Vec<CompareRow>,
    /// (mode label, report) in row order.
    pub reports: Vec<(String, SimReport)>,
    pub csv_path: PathBuf,
}

/// Runs {baseline, cbws} × {aprc off, aprc on} and emits one CSV row per
/// mode per layer. Throughput ratio compares cbws against baseline
/// within the same APRC setting (the two settings run different
/// networks, so cross-setting work totals differ).
pub fn cmd_compare(
    net_path: &Path,
    source: &InputSource,
    timesteps: usize,
    seed: u64,
    hw: &HwConfig,
    out: &Path,
) -> Result<CompareOutcome> {
    if timesteps == 0 && !matches!(source, InputSource::Trace(_)) {
        return Err(Error::Config("timesteps must be >= 1".into()));
    }
    let base_net = io::load_network(net_path)?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();

    for aprc_on in [false, true] {
        let net = if aprc_on {
            aprc::apply_aprc(&base_net)?
        } else {
            base_net.clone()
        };
        let input = load_or_make_input(&net, source, timesteps, seed)?;
        let rates = input_channel_rates(&input);

        let mut pair: Vec<(String, SimReport)> = Vec::new();
        for kind in [ScheduleKind::Baseline, ScheduleKind::Cbws] {
            let schedule =
                sim::assign_schedule(&net, hw, kind, RateSource::AprcPredicted, Some(&rates))?;
            let report = sim::simulate(&net, &input, &schedule, hw)?;
            let label = format!(
                "{}/aprc-{}",
                match kind {
                    ScheduleKind::Baseline => "baseline",
                    ScheduleKind::Cbws => "cbws",
                },
                if aprc_on { "on" } else { "off" }
            );
            pair.push((label, report));
        }

        let baseline_cycles = pair[0].1.total_cycles;
        for (label, report) in pair {
            let fps = sim::throughput_estimate(&report, hw)
                .ok()
                .map(|t| t.frames_per_second);
            let ratio = if report.total_cycles > 0 && baseline_cycles > 0 {
                Some(baseline_cycles as f64 / report.total_cycles as f64)
            } else {
                None
            };
            for l in 0..report.busy.len() {
                rows.push(CompareRow {
                    mode: label.clone(),
                    layer: l,
                    balance_ratio: sim::balance_ratio(&report, l),
                    latency_cycles: report.layer_latency[l].iter().sum(),
                    total_work: report.total_work,
                    frames_per_second: fps,
                    throughput_ratio: ratio,
                });
            }
            reports.push((label, report));
        }
    }

    io::write_compare_csv(&rows, out)?;
    Ok(CompareOutcome {
        rows,
        reports,
        csv_path: out.to_path_buf(),
    })
}

/// Sparsity profile of one run: per-layer spikerate plus per-channel
/// totals and per-timestep quartiles.
pub struct ProfileOutcome {
    pub layers_csv: PathBuf,
    pub channels_csv: PathBuf,
    /// Per-layer mean spikerate, input layer excluded.
    pub layer_spikerates: Vec<f64>,
    /// [layer][channel] total output spikes.
    pub channel_totals: Vec<Vec<u64>>,
}

pub fn cmd_profile(
    net_path: &Path,
    source: &InputSource,
    timesteps: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<ProfileOutcome> {
    if timesteps == 0 && !matches!(source, InputSource::Trace(_)) {
        return Err(Error::Config("timesteps must be >= 1".into()));
    }
    let net = io::load_network(net_path)?;
    let input = load_or_make_input(&net, source, timesteps, seed)?;
    let fwd = snn::network_forward(&net, &input)?;

    use std::fmt::Write as _;
    let mut layers_csv = String::from("layer,spikerate\n");
    let mut spikerates = Vec::new();
    for (l, train) in fwd.layer_trains.iter().enumerate() {
        let rate = train.density();
        spikerates.push(rate);
        let _ = writeln!(layers_csv, "{l},{rate:.6}");
    }

    let mut channels_csv = String::from("layer,channel,total_spikes,q1,median,q3\n");
    let mut channel_totals = Vec::new();
    for (l, per_t) in fwd.spike_counts.iter().enumerate() {
        let channels = net.layers[l].out_channels;
        let mut totals = vec![0u64; channels];
        for c in 0..channels {
            let mut series: Vec<u64> = per_t.iter().map(|counts| counts[c]).collect();
            totals[c] = series.iter().sum();
            series.sort_unstable();
            let q = |f: f64| -> f64 {
                // Linear interpolation between closest ranks.
                let pos = f * (series.len() - 1) as f64;
                let lo = pos.floor() as usize;
                let hi = pos.ceil() as usize;
                let frac = pos - lo as f64;
                series[lo] as f64 * (1.0 - frac) + series[hi] as f64 * frac
            };
            let _ = writeln!(
                channels_csv,
                "{l},{c},{},{:.6},{:.6},{:.6}",
                totals[c],
                q(0.25),
                q(0.5),
                q(0.75)
            );
        }
        channel_totals.push(totals);
    }

    let layers_path = out_dir.join("profile_layers.csv");
    let channels_path = out_dir.join("profile_channels.csv");
    io::atomic_write(&layers_path, layers_csv.as_bytes())?;
    io::atomic_write(&channels_path, channels_csv.as_bytes())?;
    Ok(ProfileOutcome {
        layers_csv: layers_path,
        channels_csv: channels_path,
        layer_spikerates: spikerates,
        channel_totals,
    })
}
