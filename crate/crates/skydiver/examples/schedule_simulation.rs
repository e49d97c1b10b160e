//! Full ablation on one synthetic network: {contiguous, balanced}
//! schedules with and without the full-padding transform, cycle counts
//! and balance ratios side by side.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use skydiver::aprc;
use skydiver::sim::{
    assign_schedule, mean_balance_ratio, simulate, throughput_estimate, HwConfig, RateSource,
    ScheduleKind,
};
use skydiver::snn::{LayerKind, LayerSpec, NetworkSpec, SpikeTrain, WeightTensor};

/// A conv stack whose filters have uneven (lognormal) magnitudes —
/// exactly the regime where channel workloads drift apart and a
/// balanced schedule pays off.
fn demo_network(seed: u64) -> skydiver::Result<NetworkSpec> {
    let chans = [4usize, 8, 16, 8, 4];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_normal = Normal::new(0.0f32, 0.5).unwrap();
    let mut layers = Vec::new();
    let mut side = 16;
    for l in 0..4 {
        let (c, m) = (chans[l], chans[l + 1]);
        let mut weights = Vec::with_capacity(m * c * 9);
        for _ in 0..m {
            let mean = log_normal.sample(&mut rng).exp() / (9.0 * c as f32);
            let dist = Normal::new(mean, 0.3 * mean).unwrap();
            weights.extend((0..c * 9).map(|_| dist.sample(&mut rng)));
        }
        let layer = LayerSpec {
            kind: LayerKind::Conv,
            in_channels: c,
            out_channels: m,
            kernel_size: 3,
            input_side: side,
            pad: 1,
            stride: 1,
            v_th: 1.0,
            weights: WeightTensor::new([m, c, 3, 3], weights)?,
            bias: vec![0.0; m],
        };
        side = layer.output_side();
        layers.push(layer);
    }
    Ok(NetworkSpec {
        name: "demo".into(),
        layers,
    })
}

fn main() -> skydiver::Result<()> {
    let net = demo_network(7)?;
    let hw = HwConfig::default();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut input = SpikeTrain::zeros(50, 4, 16, 16);
    for b in input.bits.iter_mut() {
        *b = u8::from(rng.random_bool(0.15));
    }

    // Layer-0 channel activity, the one thing weights cannot predict.
    let layer0_rates = vec![{
        let mut totals = vec![0u64; input.channels];
        for t in 0..input.timesteps {
            for (c, v) in input.channel_counts(t).iter().enumerate() {
                totals[c] += v;
            }
        }
        totals.iter().map(|&v| v as f64).collect::<Vec<f64>>()
    }];

    let transformed = aprc::apply_aprc(&net)?;
    for (label, net) in [("plain", &net), ("transformed", &transformed)] {
        for kind in [ScheduleKind::Baseline, ScheduleKind::Cbws] {
            let sched = assign_schedule(
                net,
                &hw,
                kind,
                RateSource::AprcPredicted,
                Some(&layer0_rates),
            )?;
            let report = simulate(net, &input, &sched, &hw)?;
            let fps = throughput_estimate(&report, &hw)?.frames_per_second;
            println!(
                "{label:<12} {:<22} {:>9} cycles  balance {:.3}  {:>9.0} fps",
                report.mode,
                report.total_cycles,
                mean_balance_ratio(&report).unwrap_or(f64::NAN),
                fps,
            );
        }
    }
    Ok(())
}
