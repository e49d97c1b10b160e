//! Functional model of the spiking network: integrate-and-fire dynamics
//! with reset-by-subtraction, spike-triggered convolution, layer and
//! network forward passes, and rate encoding of analog inputs.
//!
//! All state is explicit and all operations are deterministic; membrane
//! potentials are `f32` throughout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Conv,
    Dense,
}

/// Row-major weight storage in (filter, in-channel, row, col) order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTensor {
    pub dims: [usize; 4],
    pub data: Vec<f32>,
}

impl WeightTensor {
    pub fn new(dims: [usize; 4], data: Vec<f32>) -> Result<Self> {
        let expect: usize = dims.iter().product();
        if data.len() != expect {
            return Err(Error::Shape(format!(
                "weight tensor {:?} needs {} elements, got {}",
                dims,
                expect,
                data.len()
            )));
        }
        if data.iter().any(|w| !w.is_finite()) {
            return Err(Error::Numeric("non-finite weight value".into()));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: [usize; 4]) -> Self {
        let len = dims.iter().product();
        Self {
            dims,
            data: vec![0.0; len],
        }
    }

    #[inline]
    pub fn get(&self, n: usize, c: usize, j: usize, k: usize) -> f32 {
        let [_, cs, rs, ks] = self.dims;
        self.data[((n * cs + c) * rs + j) * ks + k]
    }

    /// Contiguous weight slice of one filter (all C·R·R elements).
    #[inline]
    pub fn filter(&self, n: usize) -> &[f32] {
        let stride = self.dims[1] * self.dims[2] * self.dims[3];
        &self.data[n * stride..(n + 1) * stride]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub kind: LayerKind,
    /// C: input channels.
    pub in_channels: usize,
    /// M: filters / output channels.
    pub out_channels: usize,
    /// R: kernel side (1 for dense).
    pub kernel_size: usize,
    /// H: input map side (square maps; 1 for dense).
    pub input_side: usize,
    /// Zero padding per side.
    pub pad: usize,
    /// S: stride.
    pub stride: usize,
    pub v_th: f32,
    pub weights: WeightTensor,
    /// One bias per output channel, injected as constant current every timestep.
    pub bias: Vec<f32>,
}

impl LayerSpec {
    /// E = (H − R + 2·pad)/S + 1.
    pub fn output_side(&self) -> usize {
        (self.input_side + 2 * self.pad - self.kernel_size) / self.stride + 1
    }

    pub fn validate(&self) -> Result<()> {
        let (c, m, r, h) = (
            self.in_channels,
            self.out_channels,
            self.kernel_size,
            self.input_side,
        );
        if c == 0 || m == 0 || r == 0 || h == 0 {
            return Err(Error::Config("layer dims must be nonzero".into()));
        }
        if self.kind == LayerKind::Dense && (r != 1 || h != 1) {
            return Err(Error::Config(
                "dense layers are modeled as 1x1 conv over 1x1 maps".into(),
            ));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be >= 1".into()));
        }
        if self.pad > r - 1 {
            return Err(Error::Config(format!(
                "pad {} out of range [0, {}]",
                self.pad,
                r - 1
            )));
        }
        if !(self.v_th > 0.0) || !self.v_th.is_finite() {
            return Err(Error::Config("threshold must be strictly positive".into()));
        }
        if self.weights.dims != [m, c, r, r] {
            return Err(Error::Shape(format!(
                "weights {:?} do not match layer [M,C,R,R] = [{m},{c},{r},{r}]",
                self.weights.dims
            )));
        }
        if self.bias.len() != m {
            return Err(Error::Shape(format!(
                "bias length {} != M = {m}",
                self.bias.len()
            )));
        }
        if self.bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::Numeric("non-finite bias".into()));
        }
        let span = h + 2 * self.pad;
        if span < r || (span - r) % self.stride != 0 {
            return Err(Error::Config(format!(
                "H={h}, R={r}, pad={}, stride={}: output side is not integral",
                self.pad, self.stride
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub name: String,
    pub layers: Vec<LayerSpec>,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Config("network has no layers".into()));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            layer
                .validate()
                .map_err(|e| Error::Config(format!("layer {l}: {e}")))?;
            if l > 0 {
                let prev = &self.layers[l - 1];
                // A dense layer consumes the previous map flattened into
                // channels; a conv layer consumes it as-is.
                let e = prev.output_side();
                let (want_c, want_h) = match layer.kind {
                    LayerKind::Dense => (prev.out_channels * e * e, 1),
                    LayerKind::Conv => (prev.out_channels, e),
                };
                if layer.in_channels != want_c {
                    return Err(Error::Config(format!(
                        "layer {l} expects C={} input channels but layer {} provides {}",
                        layer.in_channels,
                        l - 1,
                        want_c
                    )));
                }
                if layer.input_side != want_h {
                    return Err(Error::Config(format!(
                        "layer {l} expects H={} but layer {} provides {}",
                        layer.input_side,
                        l - 1,
                        want_h
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Borrowed binary C×H×W slice (one timestep of activity).
#[derive(Debug, Clone, Copy)]
pub struct FrameView<'a> {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub bits: &'a [u8],
}

impl<'a> FrameView<'a> {
    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> u8 {
        self.bits[(c * self.height + y) * self.width + x]
    }

    pub fn nnz(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }

    pub fn channel_counts(&self) -> Vec<u64> {
        let plane = self.height * self.width;
        (0..self.channels)
            .map(|c| {
                self.bits[c * plane..(c + 1) * plane]
                    .iter()
                    .map(|&b| b as u64)
                    .sum()
            })
            .collect()
    }
}

/// Owned binary frame, same layout as [`FrameView`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub bits: Vec<u8>,
}

impl Frame {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self {
            channels,
            height,
            width,
            bits: vec![0; channels * height * width],
        }
    }

    pub fn view(&self) -> FrameView<'_> {
        FrameView {
            channels: self.channels,
            height: self.height,
            width: self.width,
            bits: &self.bits,
        }
    }

    #[inline]
    pub fn set(&mut self, c: usize, y: usize, x: usize, v: u8) {
        self.bits[(c * self.height + y) * self.width + x] = v;
    }
}

/// Binary spike tensor over timesteps, (t, c, y, x) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeTrain {
    pub timesteps: usize,
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub bits: Vec<u8>,
}

impl SpikeTrain {
    pub fn zeros(timesteps: usize, channels: usize, height: usize, width: usize) -> Self {
        Self {
            timesteps,
            channels,
            height,
            width,
            bits: vec![0; timesteps * channels * height * width],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let expect = self.timesteps * self.channels * self.height * self.width;
        if self.bits.len() != expect {
            return Err(Error::Shape(format!(
                "spike train holds {} bits, dims require {expect}",
                self.bits.len()
            )));
        }
        if self.bits.iter().any(|&b| b > 1) {
            return Err(Error::Numeric("spike train is not binary".into()));
        }
        Ok(())
    }

    pub fn frame(&self, t: usize) -> FrameView<'_> {
        let plane = self.channels * self.height * self.width;
        FrameView {
            channels: self.channels,
            height: self.height,
            width: self.width,
            bits: &self.bits[t * plane..(t + 1) * plane],
        }
    }

    pub fn set_frame(&mut self, t: usize, frame: &Frame) {
        let plane = self.channels * self.height * self.width;
        self.bits[t * plane..(t + 1) * plane].copy_from_slice(&frame.bits);
    }

    #[inline]
    pub fn get(&self, t: usize, c: usize, y: usize, x: usize) -> u8 {
        self.bits[((t * self.channels + c) * self.height + y) * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, t: usize, c: usize, y: usize, x: usize, v: u8) {
        self.bits[((t * self.channels + c) * self.height + y) * self.width + x] = v;
    }

    pub fn nnz(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }

    /// Fraction of neuron-timestep slots containing a spike.
    pub fn density(&self) -> f64 {
        if self.bits.is_empty() {
            return 0.0;
        }
        self.nnz() as f64 / self.bits.len() as f64
    }

    /// Spike count per channel at timestep `t`.
    pub fn channel_counts(&self, t: usize) -> Vec<u64> {
        self.frame(t).channel_counts()
    }
}

/// Per-neuron membrane potentials for one layer (M × E × E).
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronState {
    pub channels: usize,
    pub side: usize,
    pub vmem: Vec<f32>,
}

impl NeuronState {
    pub fn zeros(channels: usize, side: usize) -> Self {
        Self {
            channels,
            side,
            vmem: vec![0.0; channels * side * side],
        }
    }

    pub fn for_layer(layer: &LayerSpec) -> Self {
        Self::zeros(layer.out_channels, layer.output_side())
    }
}

/// Analog image, (channel, y, x) order, values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<f32>,
}

impl Image {
    pub fn new(channels: usize, height: usize, width: usize, pixels: Vec<f32>) -> Result<Self> {
        if pixels.len() != channels * height * width {
            return Err(Error::Shape(format!(
                "image pixel count {} does not match {channels}x{height}x{width}",
                pixels.len()
            )));
        }
        Ok(Self {
            channels,
            height,
            width,
            pixels,
        })
    }

    /// Constant-intensity image, handy for synthetic Bernoulli inputs.
    pub fn constant(channels: usize, height: usize, width: usize, value: f32) -> Self {
        Self {
            channels,
            height,
            width,
            pixels: vec![value; channels * height * width],
        }
    }
}

/// One integrate-and-fire update with reset-by-subtraction.
///
/// v = vmem + z; fires when v ≥ v_th, in which case v_th is subtracted.
#[inline]
pub fn lif_step(vmem: f32, z: f32, v_th: f32) -> Result<(f32, bool)> {
    if !vmem.is_finite() || !z.is_finite() {
        return Err(Error::Numeric("non-finite membrane input".into()));
    }
    if !(v_th > 0.0) {
        return Err(Error::Config("threshold must be strictly positive".into()));
    }
    let v = vmem + z;
    if v >= v_th {
        Ok((v - v_th, true))
    } else {
        Ok((v, false))
    }
}

/// Membrane update map of one timestep:
/// dv[n][x][y] = Σ_i Σ_j Σ_k w_n[i][j][k] · in[i][x·S − pad + j][y·S − pad + k],
/// with zero padding for out-of-range reads (cross-correlation, no kernel flip).
///
/// The accumulation walks input spikes and scatters their kernel windows,
/// so silent inputs cost nothing; the iteration order is fixed, keeping
/// float results bit-reproducible.
pub fn conv_dv(layer: &LayerSpec, frame: FrameView<'_>) -> Result<Vec<f32>> {
    if frame.channels != layer.in_channels
        || frame.height != layer.input_side
        || frame.width != layer.input_side
    {
        return Err(Error::Shape(format!(
            "frame {}x{}x{} does not match layer C={}, H={}",
            frame.channels, frame.height, frame.width, layer.in_channels, layer.input_side
        )));
    }
    let m = layer.out_channels;
    let r = layer.kernel_size;
    let e = layer.output_side();
    let s = layer.stride as isize;
    let pad = layer.pad as isize;
    let mut dv = vec![0.0f32; m * e * e];

    let plane = e * e;
    for c in 0..frame.channels {
        for iy in 0..frame.height {
            for ix in 0..frame.width {
                if frame.get(c, iy, ix) == 0 {
                    continue;
                }
                // Output positions whose window covers this spike:
                // x·S − pad + j = iy  =>  x = (iy + pad − j)/S
                for j in 0..r {
                    let ty = iy as isize + pad - j as isize;
                    if ty < 0 || ty % s != 0 {
                        continue;
                    }
                    let x = (ty / s) as usize;
                    if x >= e {
                        continue;
                    }
                    for k in 0..r {
                        let tx = ix as isize + pad - k as isize;
                        if tx < 0 || tx % s != 0 {
                            continue;
                        }
                        let y = (tx / s) as usize;
                        if y >= e {
                            continue;
                        }
                        let out = x * e + y;
                        for n in 0..m {
                            dv[n * plane + out] += layer.weights.get(n, c, j, k);
                        }
                    }
                }
            }
        }
    }
    Ok(dv)
}

/// One layer, one timestep: convolution then element-wise LIF with bias
/// injected as constant current.
pub fn layer_forward(
    layer: &LayerSpec,
    frame: FrameView<'_>,
    state: &mut NeuronState,
) -> Result<Frame> {
    let e = layer.output_side();
    if state.channels != layer.out_channels || state.side != e {
        return Err(Error::Shape(format!(
            "state {}x{}x{} does not match layer output {}x{e}x{e}",
            state.channels, state.side, state.side, layer.out_channels
        )));
    }
    let dv = conv_dv(layer, frame)?;
    let mut out = Frame::zeros(layer.out_channels, e, e);
    let plane = e * e;
    for n in 0..layer.out_channels {
        let bias = layer.bias[n];
        for p in 0..plane {
            let idx = n * plane + p;
            let (v, fired) = lif_step(state.vmem[idx], dv[idx] + bias, layer.v_th)?;
            state.vmem[idx] = v;
            out.bits[idx] = fired as u8;
        }
    }
    Ok(out)
}

/// Full forward pass: per-layer spike trains plus per-channel,
/// per-timestep spike counts.
#[derive(Debug, Clone)]
pub struct ForwardOutput {
    /// Output spike train of each layer.
    pub layer_trains: Vec<SpikeTrain>,
    /// spike_counts[layer][t][channel]: output spikes of that layer.
    pub spike_counts: Vec<Vec<Vec<u64>>>,
}

/// Runs all timesteps sequentially through all layers with persistent
/// membrane state.
pub fn network_forward(net: &NetworkSpec, input: &SpikeTrain) -> Result<ForwardOutput> {
    net.validate()?;
    input.validate()?;
    let first = &net.layers[0];
    let input_matches = match first.kind {
        LayerKind::Conv => {
            input.channels == first.in_channels
                && input.height == first.input_side
                && input.width == first.input_side
        }
        // Dense front layers take the input flattened, whatever its shape.
        LayerKind::Dense => input.channels * input.height * input.width == first.in_channels,
    };
    if !input_matches {
        return Err(Error::Shape(format!(
            "input train {}x{}x{} does not match layer 0 (C={}, H={})",
            input.channels, input.height, input.width, first.in_channels, first.input_side
        )));
    }
    let t_max = input.timesteps;
    let mut states: Vec<NeuronState> = net.layers.iter().map(NeuronState::for_layer).collect();
    let mut trains: Vec<SpikeTrain> = net
        .layers
        .iter()
        .map(|l| SpikeTrain::zeros(t_max, l.out_channels, l.output_side(), l.output_side()))
        .collect();
    let mut counts: Vec<Vec<Vec<u64>>> = net
        .layers
        .iter()
        .map(|l| vec![vec![0u64; l.out_channels]; t_max])
        .collect();

    for t in 0..t_max {
        let mut current: Option<Frame> = None;
        for (l, layer) in net.layers.iter().enumerate() {
            // The (c, y, x) layout flattens into channels by relabeling.
            let flatten = |mut f: Frame| {
                if layer.kind == LayerKind::Dense {
                    f.channels *= f.height * f.width;
                    f.height = 1;
                    f.width = 1;
                }
                f
            };
            let out = match current.take() {
                None if layer.kind == LayerKind::Conv => {
                    layer_forward(layer, input.frame(t), &mut states[l])?
                }
                None => {
                    let view = input.frame(t);
                    let frame = Frame {
                        channels: view.channels,
                        height: view.height,
                        width: view.width,
                        bits: view.bits.to_vec(),
                    };
                    layer_forward(layer, flatten(frame).view(), &mut states[l])?
                }
                Some(f) => layer_forward(layer, flatten(f).view(), &mut states[l])?,
            };
            counts[l][t] = out.view().channel_counts();
            trains[l].set_frame(t, &out);
            current = Some(out);
        }
    }
    Ok(ForwardOutput {
        layer_trains: trains,
        spike_counts: counts,
    })
}

/// Bernoulli rate coding: each pixel value in [0, 1] becomes an
/// independent spike probability per timestep. Deterministic per seed.
pub fn rate_encode(image: &Image, timesteps: usize, seed: u64) -> Result<SpikeTrain> {
    if timesteps == 0 {
        return Err(Error::Config("rate encoding needs at least 1 timestep".into()));
    }
    if image.pixels.iter().any(|p| !p.is_finite()) {
        return Err(Error::Numeric("non-finite pixel".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = SpikeTrain::zeros(timesteps, image.channels, image.height, image.width);
    let plane = image.channels * image.height * image.width;
    for t in 0..timesteps {
        for (i, &p) in image.pixels.iter().enumerate() {
            let p = p.clamp(0.0, 1.0);
            let u: f32 = rng.random();
            train.bits[t * plane + i] = (u < p) as u8;
        }
    }
    Ok(train)
}
