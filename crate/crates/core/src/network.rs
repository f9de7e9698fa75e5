//! Single-hidden-layer feed-forward classifier evaluated from a flat
//! parameter vector.
//!
//! The optimizers search over `ParamVector`s; this module gives those vectors
//! meaning: slice them into weights and biases, run the forward pass, and
//! score them with the mean-squared-error fitness the optimizers minimize.
//! All functions here are pure, so particle evaluations can run in parallel
//! without coordination.

use crate::error::{Error, Result};

/// Layer sizes. `inputs` = feature count, `outputs` = class count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Topology {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
}

impl Topology {
    pub fn new(inputs: usize, hidden: usize, outputs: usize) -> Result<Self> {
        if inputs == 0 || hidden == 0 || outputs == 0 {
            return Err(Error::InvalidConfig(
                "topology requires at least one node per layer".into(),
            ));
        }
        Ok(Topology {
            inputs,
            hidden,
            outputs,
        })
    }

    /// Default hidden size 2p+1 for p inputs.
    pub fn with_default_hidden(inputs: usize, outputs: usize) -> Result<Self> {
        Topology::new(inputs, 2 * inputs + 1, outputs)
    }

    /// Search-space dimensionality: both weight matrices plus both bias
    /// vectors, D = pq + qr + q + r.
    pub fn param_count(&self) -> usize {
        let (p, q, r) = (self.inputs, self.hidden, self.outputs);
        p * q + q * r + q + r
    }
}

/// One training or test sample: features plus a one-hot target row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: Vec<f64>,
    pub target: Vec<f64>,
}

/// Borrowed weight views into a parameter vector. Layout, in order:
/// input->hidden weights (hidden x inputs, row-major), hidden biases,
/// hidden->output weights (outputs x hidden, row-major), output biases.
#[derive(Debug, Clone, Copy)]
pub struct NetworkWeights<'a> {
    pub topology: Topology,
    pub w1: &'a [f64],
    pub b1: &'a [f64],
    pub w2: &'a [f64],
    pub b2: &'a [f64],
}

/// Slice a flat parameter vector into weight views. Zero-copy inverse of
/// [`encode`].
pub fn decode(params: &[f64], topology: Topology) -> Result<NetworkWeights<'_>> {
    let d = topology.param_count();
    if params.len() != d {
        return Err(Error::DimensionMismatch {
            context: "parameter vector",
            expected: d,
            got: params.len(),
        });
    }
    let (p, q, r) = (topology.inputs, topology.hidden, topology.outputs);
    let (w1, rest) = params.split_at(p * q);
    let (b1, rest) = rest.split_at(q);
    let (w2, b2) = rest.split_at(q * r);
    Ok(NetworkWeights {
        topology,
        w1,
        b1,
        w2,
        b2,
    })
}

/// Flatten weights back into layout order; `encode(decode(v)) == v`.
pub fn encode(net: &NetworkWeights) -> Vec<f64> {
    let mut out = Vec::with_capacity(net.topology.param_count());
    out.extend_from_slice(net.w1);
    out.extend_from_slice(net.b1);
    out.extend_from_slice(net.w2);
    out.extend_from_slice(net.b2);
    out
}

/// Logistic activation, numerically stable on both tails: never NaN, output
/// strictly inside (0,1) for finite input.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Dot product with four independent accumulators. A single running sum
/// chains every addition and caps throughput at the adder latency; the
/// split lanes trade a fixed summation order (still deterministic) for a
/// vectorizable loop.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n4 = a.len() & !3;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for (ca, cb) in a[..n4].chunks_exact(4).zip(b[..n4].chunks_exact(4)) {
        s0 += ca[0] * cb[0];
        s1 += ca[1] * cb[1];
        s2 += ca[2] * cb[2];
        s3 += ca[3] * cb[3];
    }
    let mut tail = 0.0;
    for (x, y) in a[n4..].iter().zip(&b[n4..]) {
        tail += x * y;
    }
    (s0 + s1) + (s2 + s3) + tail
}

fn hidden_activations(net: &NetworkWeights, input: &[f64], hidden: &mut [f64]) {
    let p = net.topology.inputs;
    for (j, h) in hidden.iter_mut().enumerate() {
        let pre = dot(&net.w1[j * p..(j + 1) * p], input) + net.b1[j];
        *h = sigmoid(pre);
    }
}

fn output_activations(net: &NetworkWeights, hidden: &[f64], output: &mut [f64]) {
    let q = net.topology.hidden;
    for (k, o) in output.iter_mut().enumerate() {
        let pre = dot(&net.w2[k * q..(k + 1) * q], hidden) + net.b2[k];
        *o = sigmoid(pre);
    }
}

/// Forward pass: sigmoid hidden layer, sigmoid output layer (both layers
/// carry a bias term). Outputs are strictly inside (0,1).
pub fn forward(net: &NetworkWeights, input: &[f64]) -> Result<Vec<f64>> {
    if input.len() != net.topology.inputs {
        return Err(Error::DimensionMismatch {
            context: "forward input",
            expected: net.topology.inputs,
            got: input.len(),
        });
    }
    let mut hidden = vec![0.0; net.topology.hidden];
    let mut output = vec![0.0; net.topology.outputs];
    hidden_activations(net, input, &mut hidden);
    output_activations(net, &hidden, &mut output);
    Ok(output)
}

/// Sum over samples and output components of (target - output)^2, with
/// per-sample shape validation. Shared accumulator for the two error views.
fn sum_squared_error(net: &NetworkWeights, samples: &[LabeledSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("error over samples"));
    }
    let mut hidden = vec![0.0; net.topology.hidden];
    let mut output = vec![0.0; net.topology.outputs];
    let mut sse = 0.0;
    for sample in samples {
        if sample.features.len() != net.topology.inputs {
            return Err(Error::DimensionMismatch {
                context: "sample features",
                expected: net.topology.inputs,
                got: sample.features.len(),
            });
        }
        if sample.target.len() != net.topology.outputs {
            return Err(Error::DimensionMismatch {
                context: "sample target",
                expected: net.topology.outputs,
                got: sample.target.len(),
            });
        }
        hidden_activations(net, &sample.features, &mut hidden);
        output_activations(net, &hidden, &mut output);
        sse += output
            .iter()
            .zip(&sample.target)
            .map(|(o, t)| (t - o) * (t - o))
            .sum::<f64>();
    }
    Ok(sse)
}

/// Half the summed squared error over all samples and outputs.
pub fn total_error(net: &NetworkWeights, samples: &[LabeledSample]) -> Result<f64> {
    Ok(0.5 * sum_squared_error(net, samples)?)
}

/// Mean squared error over the sample set: equals 2 * total_error / N
/// exactly. This is the fitness every optimizer in the crate minimizes.
pub fn mse_fitness(params: &[f64], topology: Topology, samples: &[LabeledSample]) -> Result<f64> {
    let net = decode(params, topology)?;
    Ok(sum_squared_error(&net, samples)? / samples.len() as f64)
}

/// Class decision: index of the maximal output, ties to the lowest index.
pub fn predict(net: &NetworkWeights, input: &[f64]) -> Result<usize> {
    let outputs = forward(net, input)?;
    let mut best = 0;
    for (k, &o) in outputs.iter().enumerate().skip(1) {
        if o > outputs[best] {
            best = k;
        }
    }
    Ok(best)
}
