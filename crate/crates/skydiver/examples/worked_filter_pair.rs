//! The two-filter demonstration: under full padding, each output
//! channel's summed membrane updates are exactly filter-magnitude ×
//! input-spike-count, so a 3:1 magnitude ratio shows up as a 3:1 ΔV
//! ratio — and, with a suitable threshold, as ordered spike counts.

use skydiver::aprc;
use skydiver::snn::{self, Frame, LayerKind, LayerSpec, NetworkSpec, SpikeTrain, WeightTensor};

fn main() -> skydiver::Result<()> {
    // Two 3x3 filters over one 8x8 channel: all 0.3s and all 0.1s.
    let mut weights = vec![0.3f32; 9];
    weights.extend(vec![0.1f32; 9]);
    let layer = LayerSpec {
        kind: LayerKind::Conv,
        in_channels: 1,
        out_channels: 2,
        kernel_size: 3,
        input_side: 8,
        pad: 2, // full padding: every weight meets every input
        stride: 1,
        v_th: 0.5,
        weights: WeightTensor::new([2, 1, 3, 3], weights)?,
        bias: vec![0.0; 2],
    };

    for n in 0..2 {
        println!("filter {n}: magnitude {}", aprc::filter_magnitude(&layer, n)?);
    }

    // A 2x3 block of six spikes.
    let mut frame = Frame::zeros(1, 8, 8);
    for (y, x) in [(3, 3), (3, 4), (3, 5), (4, 3), (4, 4), (4, 5)] {
        frame.set(0, y, x, 1);
    }
    let sums = aprc::channel_dv_sums(&layer, frame.view())?;
    println!("dv sums: {sums:?} (ratio {})", sums[0] / sums[1]);

    let net = NetworkSpec {
        name: "pair".into(),
        layers: vec![layer],
    };
    let mut input = SpikeTrain::zeros(1, 1, 8, 8);
    input.bits.copy_from_slice(&frame.bits);
    let fwd = snn::network_forward(&net, &input)?;
    println!(
        "spike counts at v_th=0.5: channel 0 -> {}, channel 1 -> {}",
        fwd.spike_counts[0][0][0], fwd.spike_counts[0][0][1]
    );
    Ok(())
}
