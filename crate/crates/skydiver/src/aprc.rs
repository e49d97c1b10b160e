//! Proportional-relation construction: transform a network to full
//! padding and stride 1, compute filter magnitudes, and quantify how well
//! per-channel spike counts track those magnitudes.
//!
//! Under full padding every weight element meets every input element
//! exactly once, so the per-channel sum of membrane updates factorizes as
//! Σ_i (kernel-slice sum for input channel i) × (spikes in channel i) —
//! with a single input channel this is just filter magnitude × spike
//! count. That makes relative channel workload predictable offline from
//! the weights alone.

use crate::error::{Error, Result};
use crate::snn::{self, FrameView, LayerKind, LayerSpec, NetworkSpec, SpikeTrain};

/// How a filter's scalar magnitude is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MagnitudeKind {
    /// Signed sum of all weight elements (the defining quantity).
    #[default]
    Signed,
    /// Sum of absolute values, a robustness variant for negative-weight
    /// regimes.
    Absolute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterMagnitude {
    pub layer_index: usize,
    pub filter_index: usize,
    pub magnitude: f32,
}

/// Signed sum of all C·R·R weight elements of filter `n` (bias excluded).
pub fn filter_magnitude(layer: &LayerSpec, n: usize) -> Result<f32> {
    if n >= layer.out_channels {
        return Err(Error::Config(format!(
            "filter index {n} out of range (M = {})",
            layer.out_channels
        )));
    }
    Ok(layer.weights.filter(n).iter().sum())
}

pub fn filter_magnitude_of_kind(layer: &LayerSpec, n: usize, kind: MagnitudeKind) -> Result<f32> {
    if n >= layer.out_channels {
        return Err(Error::Config(format!(
            "filter index {n} out of range (M = {})",
            layer.out_channels
        )));
    }
    let it = layer.weights.filter(n).iter();
    Ok(match kind {
        MagnitudeKind::Signed => it.sum(),
        MagnitudeKind::Absolute => it.map(|w| w.abs()).sum(),
    })
}

/// All filter magnitudes of one layer.
pub fn filter_magnitudes(layer: &LayerSpec, kind: MagnitudeKind) -> Vec<f32> {
    (0..layer.out_channels)
        .map(|n| filter_magnitude_of_kind(layer, n, kind).expect("n < M"))
        .collect()
}

/// True when a layer already has full padding (R−1) and stride 1, the
/// regime in which the channel-sum factorization is exact.
pub fn is_fully_padded(layer: &LayerSpec) -> bool {
    layer.pad == layer.kernel_size - 1 && layer.stride == 1
}

/// Returns a copy of the network with every layer set to full padding
/// (R−1 zeros per side) and stride 1, spatial dims recomputed down the
/// chain. Weights are untouched; applying twice equals applying once.
pub fn apply_aprc(net: &NetworkSpec) -> Result<NetworkSpec> {
    net.validate()?;
    let mut layers = Vec::with_capacity(net.layers.len());
    let mut side = net.layers[0].input_side;
    for (i, layer) in net.layers.iter().enumerate() {
        let mut l = layer.clone();
        if l.kind == LayerKind::Dense {
            // A flattening dense layer is sized to the upstream map; the
            // transform grows that map, so the weights cannot carry over.
            if i > 0 {
                let prev: &LayerSpec = &layers[i - 1];
                if l.in_channels != prev.out_channels * side * side {
                    return Err(Error::Config(format!(
                        "layer {i}: cannot transform a dense layer that flattens \
                         a spatial map (expects C={}, upstream now provides {})",
                        l.in_channels,
                        prev.out_channels * side * side
                    )));
                }
            }
            l.input_side = 1;
        } else {
            l.input_side = side;
        }
        l.pad = l.kernel_size - 1;
        l.stride = 1;
        side = l.output_side();
        layers.push(l);
    }
    let out = NetworkSpec {
        name: net.name.clone(),
        layers,
    };
    out.validate()?;
    Ok(out)
}

/// Σ_x Σ_y ΔV_n per output channel, computed by direct summation of the
/// membrane-update map. Only defined for fully padded, stride-1 layers,
/// where it matches [`predicted_channel_dv_sum`] exactly.
pub fn channel_dv_sums(layer: &LayerSpec, frame: FrameView<'_>) -> Result<Vec<f32>> {
    if !is_fully_padded(layer) {
        return Err(Error::Config(format!(
            "channel_dv_sums requires full padding (pad = R−1 = {}) and stride 1, got pad = {}, stride = {}",
            layer.kernel_size - 1,
            layer.pad,
            layer.stride
        )));
    }
    let dv = snn::conv_dv(layer, frame)?;
    let e = layer.output_side();
    let plane = e * e;
    Ok((0..layer.out_channels)
        .map(|n| dv[n * plane..(n + 1) * plane].iter().sum())
        .collect())
}

/// Closed-form prediction of Σ_x Σ_y ΔV_n for a fully padded stride-1
/// layer: Σ_i S_{n,i} · c_i, where S_{n,i} is the signed sum of filter
/// n's kernel slice over input channel i and c_i the spike count of
/// channel i. No convolution is evaluated. With one input channel this
/// reduces to magnitude(n) × nnz(frame); for C ≥ 2 the single-product
/// form holds only when per-channel counts coincide, so callers should
/// prefer this exact form.
pub fn predicted_channel_dv_sum(layer: &LayerSpec, n: usize, frame: FrameView<'_>) -> f32 {
    let r2 = layer.kernel_size * layer.kernel_size;
    let filter = layer.weights.filter(n);
    frame
        .channel_counts()
        .iter()
        .enumerate()
        .map(|(i, &c)| filter[i * r2..(i + 1) * r2].iter().sum::<f32>() * c as f32)
        .sum()
}

#[derive(Debug, Clone)]
pub struct LayerProportionality {
    pub layer_index: usize,
    /// One (magnitude, total spikes over T) pair per output channel.
    pub entries: Vec<(f32, u64)>,
    /// Spearman rank correlation; `None` when fewer than 2 channels or
    /// when either side is constant.
    pub spearman: Option<f64>,
    pub has_magnitude_ties: bool,
    /// Max over channel pairs (both with positive magnitude and spikes)
    /// of |(s_a/m_a)/(s_b/m_b) − 1|.
    pub max_ratio_deviation: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ProportionalityReport {
    pub layers: Vec<LayerProportionality>,
}

/// Average ranks, ties shared.
fn ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let mut out = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson over average ranks).
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Runs the network and pairs per-channel spike counts with filter
/// magnitudes, layer by layer.
pub fn proportionality_report(net: &NetworkSpec, input: &SpikeTrain) -> Result<ProportionalityReport> {
    let fwd = snn::network_forward(net, input)?;
    let mut layers = Vec::with_capacity(net.layers.len());
    for (l, layer) in net.layers.iter().enumerate() {
        let mags = filter_magnitudes(layer, MagnitudeKind::Signed);
        let totals: Vec<u64> = (0..layer.out_channels)
            .map(|c| fwd.spike_counts[l].iter().map(|per_t| per_t[c]).sum())
            .collect();
        let entries: Vec<(f32, u64)> = mags.iter().copied().zip(totals.iter().copied()).collect();
        let has_ties = {
            let mut sorted: Vec<f32> = mags.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            sorted.windows(2).any(|w| w[0] == w[1])
        };
        let xs: Vec<f64> = mags.iter().map(|&m| m as f64).collect();
        let ys: Vec<f64> = totals.iter().map(|&s| s as f64).collect();
        let rho = spearman(&xs, &ys);

        let mut max_dev: Option<f64> = None;
        let rates: Vec<f64> = entries
            .iter()
            .filter(|(m, s)| *m > 0.0 && *s > 0)
            .map(|(m, s)| *s as f64 / *m as f64)
            .collect();
        for a in 0..rates.len() {
            for b in a + 1..rates.len() {
                let dev = (rates[a] / rates[b] - 1.0).abs();
                max_dev = Some(max_dev.map_or(dev, |d: f64| d.max(dev)));
            }
        }

        layers.push(LayerProportionality {
            layer_index: l,
            entries,
            spearman: rho,
            has_magnitude_ties: has_ties,
            max_ratio_deviation: max_dev,
        });
    }
    Ok(ProportionalityReport { layers })
}

/// Predicted relative workload of each input channel of layer `l`.
///
/// For l ≥ 1 the weight of input channel c is the magnitude of filter c
/// in layer l−1 (the filter that generates that channel). Layer 0 has no
/// upstream filter, so measured or user-supplied per-channel input rates
/// are passed through verbatim.
pub fn predict_channel_workload(
    net: &NetworkSpec,
    layer_index: usize,
    input_rates: Option<&[f64]>,
    kind: MagnitudeKind,
) -> Result<Vec<f64>> {
    if layer_index >= net.layers.len() {
        return Err(Error::Config(format!(
            "layer index {layer_index} out of range ({} layers)",
            net.layers.len()
        )));
    }
    if layer_index == 0 {
        let rates = input_rates.ok_or_else(|| {
            Error::Config("layer 0 workload prediction needs measured input rates".into())
        })?;
        if rates.len() != net.layers[0].in_channels {
            return Err(Error::Shape(format!(
                "got {} input rates for C = {} channels",
                rates.len(),
                net.layers[0].in_channels
            )));
        }
        return Ok(rates.to_vec());
    }
    let prev = &net.layers[layer_index - 1];
    Ok(filter_magnitudes(prev, kind)
        .into_iter()
        .map(|m| m as f64)
        .collect())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::snn::{Frame, LayerKind, WeightTensor};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn layer_with_weights(c: usize, m: usize, r: usize, h: usize, data: Vec<f32>) -> LayerSpec {
        LayerSpec {
            kind: LayerKind::Conv,
            in_channels: c,
            out_channels: m,
            kernel_size: r,
            input_side: h,
            pad: r - 1,
            stride: 1,
            v_th: 1.0,
            weights: WeightTensor::new([m, c, r, r], data).unwrap(),
            bias: vec![0.0; m],
        }
    }

    /// The Fig-4 style pair: two 3x3 filters of 0.3s and 0.1s over an
    /// 8x8 single-channel input, fully padded.
    pub(crate) fn two_filter_layer() -> LayerSpec {
        let mut data = vec![0.3f32; 9];
        data.extend(vec![0.1f32; 9]);
        layer_with_weights(1, 2, 3, 8, data)
    }

    pub(crate) fn six_spike_frame() -> Frame {
        let mut f = Frame::zeros(1, 8, 8);
        for &(y, x) in &[(3, 3), (3, 4), (3, 5), (4, 3), (4, 4), (4, 5)] {
            f.set(0, y, x, 1);
        }
        f
    }

    #[test]
    fn magnitude_of_uniform_filter() {
        let layer = two_filter_layer();
        assert!((filter_magnitude(&layer, 0).unwrap() - 2.7).abs() < 1e-6);
        assert!((filter_magnitude(&layer, 1).unwrap() - 0.9).abs() < 1e-6);
    }

    #[test]
    fn magnitude_of_zero_filter() {
        let layer = layer_with_weights(1, 1, 3, 4, vec![0.0; 9]);
        assert_eq!(filter_magnitude(&layer, 0).unwrap(), 0.0);
    }

    #[test]
    fn magnitude_is_signed_sum() {
        let mut data = vec![0.0f32; 9];
        data[0] = 1.0;
        data[4] = -1.0;
        data[8] = 0.5;
        let layer = layer_with_weights(1, 1, 3, 4, data);
        assert!((filter_magnitude(&layer, 0).unwrap() - 0.5).abs() < 1e-6);
        assert!(
            (filter_magnitude_of_kind(&layer, 0, MagnitudeKind::Absolute).unwrap() - 2.5).abs()
                < 1e-6
        );
    }

    #[test]
    fn magnitude_index_out_of_range() {
        let layer = two_filter_layer();
        assert!(filter_magnitude(&layer, 2).is_err());
    }

    #[test]
    fn aprc_sets_full_pad_and_stride_one() {
        let mut layer = two_filter_layer();
        layer.pad = 1;
        let net = NetworkSpec {
            name: "t".into(),
            layers: vec![layer],
        };
        let out = apply_aprc(&net).unwrap();
        assert_eq!(out.layers[0].pad, 2);
        assert_eq!(out.layers[0].stride, 1);
        assert_eq!(out.layers[0].output_side(), 10);
    }

    #[test]
    fn aprc_r1_layer_unchanged() {
        let layer = layer_with_weights(1, 1, 1, 4, vec![1.0]);
        let net = NetworkSpec {
            name: "t".into(),
            layers: vec![layer.clone()],
        };
        let out = apply_aprc(&net).unwrap();
        assert_eq!(out.layers[0], layer);
    }

    #[test]
    fn aprc_chains_spatial_dims() {
        // 3 layers, R=3 each, H=8 input: sides 10, 12, 14.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mk = |rng: &mut ChaCha8Rng, c: usize, m: usize, h: usize| {
            let data = (0..m * c * 9).map(|_| rng.random::<f32>() - 0.5).collect();
            layer_with_weights(c, m, 3, h, data)
        };
        let l0 = mk(&mut rng, 1, 2, 8);
        let l1 = mk(&mut rng, 2, 2, 10);
        let l2 = mk(&mut rng, 2, 1, 12);
        let net = NetworkSpec {
            name: "t".into(),
            layers: vec![l0, l1, l2],
        };
        let out = apply_aprc(&net).unwrap();
        let sides: Vec<usize> = out.layers.iter().map(|l| l.output_side()).collect();
        assert_eq!(sides, vec![10, 12, 14]);
    }

    #[test]
    fn aprc_idempotent_and_weight_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data: Vec<f32> = (0..2 * 9).map(|_| rng.random::<f32>() - 0.5).collect();
        let mut layer = layer_with_weights(1, 2, 3, 8, data);
        layer.pad = 0;
        let net = NetworkSpec {
            name: "t".into(),
            layers: vec![layer],
        };
        let once = apply_aprc(&net).unwrap();
        let twice = apply_aprc(&once).unwrap();
        assert_eq!(once, twice);
        for (a, b) in net.layers[0]
            .weights
            .data
            .iter()
            .zip(&once.layers[0].weights.data)
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn dv_sums_match_worked_example() {
        // Magnitudes 2.7 / 0.9, six input spikes: sums 16.2 / 5.4, ratio 3.
        let layer = two_filter_layer();
        let frame = six_spike_frame();
        let sums = channel_dv_sums(&layer, frame.view()).unwrap();
        assert!((sums[0] - 16.2).abs() < 1e-4, "{sums:?}");
        assert!((sums[1] - 5.4).abs() < 1e-4, "{sums:?}");
        assert!((sums[0] / sums[1] - 3.0).abs() < 1e-4);
    }

    #[test]
    fn dv_sums_zero_frame() {
        let layer = two_filter_layer();
        let frame = Frame::zeros(1, 8, 8);
        let sums = channel_dv_sums(&layer, frame.view()).unwrap();
        assert_eq!(sums, vec![0.0, 0.0]);
    }

    #[test]
    fn dv_sums_require_full_padding() {
        let mut layer = two_filter_layer();
        layer.pad = 1;
        let frame = six_spike_frame();
        assert!(channel_dv_sums(&layer, frame.view()).is_err());
    }

    #[test]
    fn dv_sums_factorize_on_random_instances() {
        // Multi-channel frames: per-channel factorization
        // Σ_xy ΔV_n = Σ_i S_{n,i} · c_i, with S the kernel-slice sum and
        // c the channel spike count.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let c = 2;
            let m = 4;
            let data: Vec<f32> = (0..m * c * 9).map(|_| rng.random::<f32>() - 0.5).collect();
            let layer = layer_with_weights(c, m, 3, 6, data);
            let frame = crate::snn::tests::random_frame(&mut rng, c, 6, 6, 0.4);
            let sums = channel_dv_sums(&layer, frame.view()).unwrap();
            for n in 0..m {
                let expect = predicted_channel_dv_sum(&layer, n, frame.view());
                let scale = expect.abs().max(1.0);
                assert!((sums[n] - expect).abs() / scale <= 1e-5, "{} vs {expect}", sums[n]);
            }
        }
    }

    #[test]
    fn dv_sums_equal_magnitude_times_nnz_single_channel() {
        // With one input channel the factorization collapses to
        // magnitude × nnz, the form of the worked example.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let m = 3;
            let data: Vec<f32> = (0..m * 9).map(|_| rng.random::<f32>() - 0.5).collect();
            let layer = layer_with_weights(1, m, 3, 6, data);
            let frame = crate::snn::tests::random_frame(&mut rng, 1, 6, 6, 0.4);
            let sums = channel_dv_sums(&layer, frame.view()).unwrap();
            let nnz = frame.view().nnz() as f32;
            for n in 0..m {
                let expect = filter_magnitude(&layer, n).unwrap() * nnz;
                let scale = expect.abs().max(1.0);
                assert!((sums[n] - expect).abs() / scale <= 1e-5, "{} vs {expect}", sums[n]);
            }
        }
    }

    #[test]
    fn magnitude_times_nnz_fails_for_uneven_multichannel_counts() {
        // Regression guard for the factorization's domain: with C = 2 and
        // all spikes in one channel, magnitude × nnz is NOT the ΔV sum;
        // only the per-channel form is.
        let mut data = vec![1.0f32; 9]; // channel-0 slice sums to 9
        data.extend(vec![0.0f32; 9]); // channel-1 slice sums to 0
        let layer = layer_with_weights(2, 1, 3, 6, data);
        let mut frame = Frame::zeros(2, 6, 6);
        frame.set(1, 3, 3, 1); // the only spike lives in channel 1
        let sums = channel_dv_sums(&layer, frame.view()).unwrap();
        assert!(sums[0].abs() < 1e-6, "true sum is 0, got {}", sums[0]);
        let literal = filter_magnitude(&layer, 0).unwrap() * frame.view().nnz() as f32;
        assert!((literal - 9.0).abs() < 1e-6);
    }

    #[test]
    fn partial_padding_breaks_factorization() {
        // Regression: with pad < R−1 the identity must NOT hold for this
        // instance (a border spike misses part of the kernel).
        let mut layer = two_filter_layer();
        layer.pad = 1; // ordinary "same" padding
        let mut frame = Frame::zeros(1, 8, 8);
        frame.set(0, 0, 0, 1);
        let dv = snn::conv_dv(&layer, frame.view()).unwrap();
        let e = layer.output_side();
        let sum0: f32 = dv[..e * e].iter().sum();
        let expect = 2.7; // magnitude × 1 spike
        assert!(
            (sum0 - expect).abs() > 0.1,
            "identity unexpectedly held: {sum0}"
        );
    }

    #[test]
    fn report_flags_ties() {
        let mut data = vec![0.2f32; 9];
        data.extend(vec![0.2f32; 9]);
        let layer = layer_with_weights(1, 2, 3, 8, data);
        let net = NetworkSpec {
            name: "t".into(),
            layers: vec![layer],
        };
        let input = {
            let mut t = SpikeTrain::zeros(3, 1, 8, 8);
            t.set(0, 0, 4, 4, 1);
            t.set(1, 0, 2, 2, 1);
            t
        };
        let report = proportionality_report(&net, &input).unwrap();
        assert!(report.layers[0].has_magnitude_ties);
        // Identical filters: identical membrane maps, identical counts.
        let (_, s0) = report.layers[0].entries[0];
        let (_, s1) = report.layers[0].entries[1];
        assert_eq!(s0, s1);
    }

    #[test]
    fn report_single_channel_has_no_correlation() {
        let layer = layer_with_weights(1, 1, 3, 8, vec![0.3; 9]);
        let net = NetworkSpec {
            name: "t".into(),
            layers: vec![layer],
        };
        let input = SpikeTrain::zeros(2, 1, 8, 8);
        let report = proportionality_report(&net, &input).unwrap();
        assert!(report.layers[0].spearman.is_none());
    }

    #[test]
    fn predict_uses_upstream_magnitudes() {
        let l0 = two_filter_layer();
        let data: Vec<f32> = vec![0.05; 2 * 9];
        let l1 = layer_with_weights(2, 1, 3, 10, data);
        let net = NetworkSpec {
            name: "t".into(),
            layers: vec![l0, l1],
        };
        let w = predict_channel_workload(&net, 1, None, MagnitudeKind::Signed).unwrap();
        assert!((w[0] - 2.7).abs() < 1e-6);
        assert!((w[1] - 0.9).abs() < 1e-6);
    }

    #[test]
    fn predict_layer_zero_passthrough_and_errors() {
        let net = NetworkSpec {
            name: "t".into(),
            layers: vec![two_filter_layer()],
        };
        let w = predict_channel_workload(&net, 0, Some(&[0.1]), MagnitudeKind::Signed).unwrap();
        assert_eq!(w, vec![0.1]);
        assert!(predict_channel_workload(&net, 0, None, MagnitudeKind::Signed).is_err());
        assert!(predict_channel_workload(&net, 5, None, MagnitudeKind::Signed).is_err());
    }

    #[test]
    fn report_ranks_worked_example_perfectly() {
        // Magnitudes (2.7, 0.9) against measured counts at v_th = 0.5:
        // ordering agrees, so the rank correlation is exactly 1.
        let mut layer = two_filter_layer();
        layer.v_th = 0.5;
        let net = NetworkSpec {
            name: "t".into(),
            layers: vec![layer],
        };
        let frame = six_spike_frame();
        let mut input = SpikeTrain::zeros(1, 1, 8, 8);
        input.bits.copy_from_slice(&frame.bits);
        let report = proportionality_report(&net, &input).unwrap();
        let l = &report.layers[0];
        assert!((l.entries[0].0 - 2.7).abs() < 1e-5 && l.entries[0].1 == 16, "{:?}", l.entries);
        assert!((l.entries[1].0 - 0.9).abs() < 1e-5 && l.entries[1].1 == 2, "{:?}", l.entries);
        assert_eq!(l.spearman, Some(1.0));
    }

    #[test]
    fn transformed_nets_rank_counts_by_magnitude() {
        // 20 seeded two-layer nets, T = 50: per-layer rank correlation
        // between magnitudes and spike counts, averaged. Floor 0.9
        // pinned after first measurement (0.9968).
        let mut rhos = Vec::new();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
            let mk = |rng: &mut ChaCha8Rng, c: usize, m: usize, h: usize| {
                let mut data = Vec::with_capacity(m * c * 9);
                for _ in 0..m {
                    let mean = (rng.random::<f32>() + 0.2) / (9.0 * c as f32);
                    data.extend((0..c * 9).map(|_| mean * (0.7 + 0.6 * rng.random::<f32>())));
                }
                layer_with_weights(c, m, 3, h, data)
            };
            let net = NetworkSpec {
                name: "t".into(),
                layers: vec![mk(&mut rng, 1, 6, 10), mk(&mut rng, 6, 6, 12)],
            };
            let net = apply_aprc(&net).unwrap();
            let mut input = SpikeTrain::zeros(50, 1, 10, 10);
            for b in input.bits.iter_mut() {
                *b = u8::from(rng.random::<f64>() < 0.2);
            }
            let report = proportionality_report(&net, &input).unwrap();
            rhos.extend(report.layers.iter().filter_map(|l| l.spearman));
        }
        let mean = rhos.iter().sum::<f64>() / rhos.len() as f64;
        println!("mean rank correlation {mean:.4} over {} layers", rhos.len());
        assert!(mean >= 0.9, "mean rank correlation {mean:.3}");
    }

    #[test]
    fn spearman_perfect_and_reversed() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let up = [2.0, 4.0, 9.0, 11.0];
        let down = [5.0, 4.0, 3.0, 2.0];
        assert!((spearman(&xs, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&xs, &down).unwrap() + 1.0).abs() < 1e-12);
    }
}
