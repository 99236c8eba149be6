//! Network structure, initialization, forward pass and backpropagation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mat::{self, Mat};
use crate::seeding::rng_from_seed;
use rand::Rng;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch in {what}: expected {expected}, got {got}")]
    ShapeMismatch { what: String, expected: usize, got: usize },
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("non-finite gradient in block {block}")]
    NonFiniteGradient { block: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadRole {
    Task,
    Adversary,
}

/// Where a head reads its input from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attach {
    /// The trunk output (penultimate features).
    Trunk,
    /// The logits of an earlier head, by name.
    Head(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrunkLayerSpec {
    pub width: usize,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadSpec {
    pub name: String,
    pub width: usize,
    pub role: HeadRole,
    pub attach: Attach,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub trunk: Vec<TrunkLayerSpec>,
    pub heads: Vec<HeadSpec>,
}

impl NetworkSpec {
    /// Structural checks for a trainable network: positive widths, at least
    /// one task head, unique head names, and head-on-head attachments that
    /// only reference earlier heads (so evaluation order is the spec order).
    pub fn validate(&self) -> Result<(), NnError> {
        if self.input_dim == 0 {
            return Err(NnError::InvalidSpec("input_dim must be positive".into()));
        }
        if self.trunk.iter().any(|l| l.width == 0) || self.heads.iter().any(|h| h.width == 0) {
            return Err(NnError::InvalidSpec("zero-width layer".into()));
        }
        if !self.heads.iter().any(|h| h.role == HeadRole::Task) {
            return Err(NnError::InvalidSpec("at least one task head required".into()));
        }
        for (i, h) in self.heads.iter().enumerate() {
            if self.heads.iter().filter(|o| o.name == h.name).count() > 1 {
                return Err(NnError::InvalidSpec(format!("duplicate head name {:?}", h.name)));
            }
            if let Attach::Head(target) = &h.attach {
                match self.heads.iter().position(|o| &o.name == target) {
                    Some(j) if j < i => {}
                    Some(_) => {
                        return Err(NnError::InvalidSpec(format!(
                            "head {:?} attaches to later head {:?}",
                            h.name, target
                        )))
                    }
                    None => {
                        return Err(NnError::InvalidSpec(format!(
                            "head {:?} attaches to unknown head {:?}",
                            h.name, target
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    /// Width of the trunk output that trunk-attached heads consume.
    pub fn trunk_out_dim(&self) -> usize {
        self.trunk.last().map(|l| l.width).unwrap_or(self.input_dim)
    }

    /// Input width for the head at `idx`.
    pub fn head_input_dim(&self, idx: usize) -> usize {
        match &self.heads[idx].attach {
            Attach::Trunk => self.trunk_out_dim(),
            Attach::Head(name) => {
                let j = self.heads.iter().position(|h| &h.name == name).expect("validated");
                self.heads[j].width
            }
        }
    }
}

/// One dense layer's parameters (or their gradients): `w` is `(out, in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBlock {
    pub w: Mat,
    pub b: Vec<f64>,
}

impl ParamBlock {
    fn zeros(out_dim: usize, in_dim: usize) -> Self {
        ParamBlock { w: Mat::zeros(out_dim, in_dim), b: vec![0.0; out_dim] }
    }

    pub fn len(&self) -> usize {
        self.w.data().len() + self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.b.iter().all(|v| v.is_finite())
    }

    fn zero(&mut self) {
        self.w.fill(0.0);
        self.b.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// Canonical address of a parameter block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockId {
    Trunk(usize),
    Head(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    spec: NetworkSpec,
    trunk: Vec<ParamBlock>,
    heads: Vec<ParamBlock>,
}

impl Network {
    /// Initialize with per-layer uniform(−a, a) weights, a = √(6/(fan_in+fan_out)),
    /// and zero biases. Deterministic given the seed.
    pub fn init(spec: NetworkSpec, seed: u64) -> Network {
        let mut rng = rng_from_seed(seed);
        let mut trunk = Vec::with_capacity(spec.trunk.len());
        let mut in_dim = spec.input_dim;
        for layer in &spec.trunk {
            trunk.push(init_block(layer.width, in_dim, &mut rng));
            in_dim = layer.width;
        }
        let heads = (0..spec.heads.len())
            .map(|i| init_block(spec.heads[i].width, spec.head_input_dim(i), &mut rng))
            .collect();
        Network { spec, trunk, heads }
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn head_index(&self, name: &str) -> Option<usize> {
        self.spec.heads.iter().position(|h| h.name == name)
    }

    pub fn block_ids(&self) -> Vec<BlockId> {
        (0..self.trunk.len())
            .map(BlockId::Trunk)
            .chain((0..self.heads.len()).map(BlockId::Head))
            .collect()
    }

    pub fn block(&self, id: BlockId) -> &ParamBlock {
        match id {
            BlockId::Trunk(i) => &self.trunk[i],
            BlockId::Head(i) => &self.heads[i],
        }
    }

    pub fn block_mut(&mut self, id: BlockId) -> &mut ParamBlock {
        match id {
            BlockId::Trunk(i) => &mut self.trunk[i],
            BlockId::Head(i) => &mut self.heads[i],
        }
    }

    pub fn block_name(&self, id: BlockId) -> String {
        match id {
            BlockId::Trunk(i) => format!("trunk.{i}"),
            BlockId::Head(i) => format!("head.{}", self.spec.heads[i].name),
        }
    }

    pub fn param_count(&self) -> usize {
        self.block_ids().iter().map(|&id| self.block(id).len()).sum()
    }

    /// Flat parameter access in canonical block order (weights row-major,
    /// then biases, per block). Used by the gradient checker and checkpoints.
    pub fn param_get(&self, idx: usize) -> f64 {
        let (id, off) = self.locate(idx);
        let blk = self.block(id);
        if off < blk.w.data().len() {
            blk.w.data()[off]
        } else {
            blk.b[off - blk.w.data().len()]
        }
    }

    pub fn param_set(&mut self, idx: usize, v: f64) {
        let (id, off) = self.locate(idx);
        let blk = self.block_mut(id);
        if off < blk.w.data().len() {
            blk.w.data_mut()[off] = v;
        } else {
            let woff = blk.w.data().len();
            blk.b[off - woff] = v;
        }
    }

    fn locate(&self, mut idx: usize) -> (BlockId, usize) {
        for id in self.block_ids() {
            let n = self.block(id).len();
            if idx < n {
                return (id, idx);
            }
            idx -= n;
        }
        panic!("parameter index out of range");
    }

    /// Gradient (or velocity) buffers with the same shapes as the parameters.
    pub fn zero_grads(&self) -> Gradients {
        Gradients {
            trunk: self.trunk.iter().map(|b| ParamBlock::zeros(b.w.rows(), b.w.cols())).collect(),
            heads: self.heads.iter().map(|b| ParamBlock::zeros(b.w.rows(), b.w.cols())).collect(),
        }
    }
}

fn init_block(out_dim: usize, in_dim: usize, rng: &mut impl Rng) -> ParamBlock {
    let a = (6.0 / (in_dim + out_dim) as f64).sqrt();
    let mut blk = ParamBlock::zeros(out_dim, in_dim);
    for v in blk.w.data_mut() {
        *v = rng.gen_range(-a..a);
    }
    blk
}

/// Per-block gradients, shaped exactly like the network's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    trunk: Vec<ParamBlock>,
    heads: Vec<ParamBlock>,
}

impl Gradients {
    pub fn block(&self, id: BlockId) -> &ParamBlock {
        match id {
            BlockId::Trunk(i) => &self.trunk[i],
            BlockId::Head(i) => &self.heads[i],
        }
    }

    pub fn block_mut(&mut self, id: BlockId) -> &mut ParamBlock {
        match id {
            BlockId::Trunk(i) => &mut self.trunk[i],
            BlockId::Head(i) => &mut self.heads[i],
        }
    }

    pub fn block_ids(&self) -> Vec<BlockId> {
        (0..self.trunk.len())
            .map(BlockId::Trunk)
            .chain((0..self.heads.len()).map(BlockId::Head))
            .collect()
    }

    pub fn zero(&mut self) {
        self.trunk.iter_mut().chain(self.heads.iter_mut()).for_each(ParamBlock::zero);
    }

    /// Copy one block's values as a flat vector (weights row-major, then bias).
    pub fn flat_block(&self, id: BlockId) -> Vec<f64> {
        let blk = self.block(id);
        blk.w.data().iter().chain(blk.b.iter()).copied().collect()
    }

    pub fn set_flat_block(&mut self, id: BlockId, values: &[f64]) {
        let blk = self.block_mut(id);
        let wn = blk.w.data().len();
        assert_eq!(values.len(), wn + blk.b.len(), "flat block length mismatch");
        blk.w.data_mut().copy_from_slice(&values[..wn]);
        blk.b.copy_from_slice(&values[wn..]);
    }
}

/// Everything the backward pass needs from one forward evaluation.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// `acts[0]` is the input batch; `acts[i+1]` the output of trunk layer `i`.
    pub acts: Vec<Mat>,
    /// Pre-activation values per trunk layer.
    pub preacts: Vec<Mat>,
    /// Logits per head, in spec order.
    pub head_logits: Vec<Mat>,
}

impl ForwardTrace {
    /// Trunk output (the penultimate features fed to trunk-attached heads).
    pub fn trunk_out(&self) -> &Mat {
        self.acts.last().expect("trace always holds the input batch")
    }
}

/// Forward pass over a batch; the trace retains everything backward needs.
pub fn forward(net: &Network, batch: &Mat) -> Result<ForwardTrace, NnError> {
    if batch.cols() != net.spec.input_dim {
        return Err(NnError::ShapeMismatch {
            what: "batch columns".into(),
            expected: net.spec.input_dim,
            got: batch.cols(),
        });
    }
    let b = batch.rows();
    let mut acts: Vec<Mat> = Vec::with_capacity(net.trunk.len() + 1);
    let mut preacts: Vec<Mat> = Vec::with_capacity(net.trunk.len());
    acts.push(batch.clone());
    for (layer, spec) in net.trunk.iter().zip(net.spec.trunk.iter()) {
        let mut z = Mat::zeros(b, layer.w.rows());
        mat::affine(acts.last().unwrap(), &layer.w, &layer.b, &mut z);
        let mut a = z.clone();
        if spec.activation == Activation::Relu {
            a.data_mut().iter_mut().for_each(|v| {
                if *v < 0.0 {
                    *v = 0.0
                }
            });
        }
        preacts.push(z);
        acts.push(a);
    }
    let mut head_logits: Vec<Mat> = Vec::with_capacity(net.heads.len());
    for (i, head) in net.heads.iter().enumerate() {
        let input = match &net.spec.heads[i].attach {
            Attach::Trunk => acts.last().unwrap(),
            Attach::Head(name) => {
                let j = net.head_index(name).expect("validated spec");
                &head_logits[j]
            }
        };
        let mut z = Mat::zeros(b, head.w.rows());
        mat::affine(input, &head.w, &head.b, &mut z);
        head_logits.push(z);
    }
    Ok(ForwardTrace { acts, preacts, head_logits })
}

/// Exact gradients of the scalar loss implied by the per-head logit
/// gradients. Heads without an upstream gradient contribute nothing.
///
/// `out` is zeroed and then filled; its shapes must match the network.
pub fn backward(
    net: &Network,
    trace: &ForwardTrace,
    head_grads: &[Option<Mat>],
    out: &mut Gradients,
) -> Result<(), NnError> {
    if head_grads.len() != net.heads.len() {
        return Err(NnError::ShapeMismatch {
            what: "head gradient count".into(),
            expected: net.heads.len(),
            got: head_grads.len(),
        });
    }
    let batch = trace.acts[0].rows();
    for (i, g) in head_grads.iter().enumerate() {
        if let Some(g) = g {
            if g.rows() != batch || g.cols() != net.heads[i].w.rows() {
                return Err(NnError::ShapeMismatch {
                    what: format!("upstream gradient for head {}", net.spec.heads[i].name),
                    expected: net.heads[i].w.rows(),
                    got: g.cols(),
                });
            }
        }
    }
    out.zero();

    // Heads in reverse spec order, so a head's accumulated upstream gradient
    // (its own plus contributions from heads attached to it) is complete when
    // it is processed.
    let mut upstream: Vec<Option<Mat>> = head_grads.to_vec();
    let mut d_trunk_out: Option<Mat> = None;
    for i in (0..net.heads.len()).rev() {
        let Some(g) = upstream[i].take() else { continue };
        let input = match &net.spec.heads[i].attach {
            Attach::Trunk => trace.trunk_out(),
            Attach::Head(name) => {
                let j = net.head_index(name).expect("validated spec");
                &trace.head_logits[j]
            }
        };
        let hb = out.block_mut(BlockId::Head(i));
        mat::matmul_tn_acc(&g, input, &mut hb.w);
        mat::col_sums_acc(&g, &mut hb.b);
        let mut dinput = Mat::zeros(batch, net.heads[i].w.cols());
        mat::matmul_acc(&g, &net.heads[i].w, &mut dinput);
        match &net.spec.heads[i].attach {
            Attach::Trunk => match &mut d_trunk_out {
                Some(acc) => add_into(acc, &dinput),
                None => d_trunk_out = Some(dinput),
            },
            Attach::Head(name) => {
                let j = net.head_index(name).expect("validated spec");
                match &mut upstream[j] {
                    Some(acc) => add_into(acc, &dinput),
                    None => upstream[j] = Some(dinput),
                }
            }
        }
    }

    let Some(mut dact) = d_trunk_out else { return Ok(()) };
    for i in (0..net.trunk.len()).rev() {
        // relu'(z) = 1 for z > 0, else 0 (including at exactly zero).
        if net.spec.trunk[i].activation == Activation::Relu {
            for (dv, &z) in dact.data_mut().iter_mut().zip(trace.preacts[i].data()) {
                if z <= 0.0 {
                    *dv = 0.0;
                }
            }
        }
        let tb = out.block_mut(BlockId::Trunk(i));
        mat::matmul_tn_acc(&dact, &trace.acts[i], &mut tb.w);
        mat::col_sums_acc(&dact, &mut tb.b);
        if i > 0 {
            let mut dprev = Mat::zeros(batch, net.trunk[i].w.cols());
            mat::matmul_acc(&dact, &net.trunk[i].w, &mut dprev);
            dact = dprev;
        }
    }
    Ok(())
}

fn add_into(acc: &mut Mat, other: &Mat) {
    for (a, &o) in acc.data_mut().iter_mut().zip(other.data()) {
        *a += o;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple_spec() -> NetworkSpec {
        NetworkSpec {
            input_dim: 3,
            trunk: vec![TrunkLayerSpec { width: 4, activation: Activation::Relu }],
            heads: vec![HeadSpec {
                name: "task".into(),
                width: 2,
                role: HeadRole::Task,
                attach: Attach::Trunk,
            }],
        }
    }

    #[test]
    fn zero_parameters_give_zero_logits() {
        let mut net = Network::init(simple_spec(), 1);
        for id in net.block_ids() {
            net.block_mut(id).zero();
        }
        let batch = Mat::from_vec(2, 3, vec![1.0, -2.0, 0.5, 0.0, 3.0, -1.0]);
        let trace = forward(&net, &batch).unwrap();
        assert!(trace.head_logits[0].data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_single_layer_reproduces_input() {
        let spec = NetworkSpec {
            input_dim: 3,
            trunk: vec![],
            heads: vec![HeadSpec {
                name: "task".into(),
                width: 3,
                role: HeadRole::Task,
                attach: Attach::Trunk,
            }],
        };
        let mut net = Network::init(spec, 0);
        let blk = net.block_mut(BlockId::Head(0));
        blk.w.fill(0.0);
        for i in 0..3 {
            blk.w.set(i, i, 1.0);
        }
        let batch = Mat::from_vec(1, 3, vec![0.25, -1.5, 2.0]);
        let trace = forward(&net, &batch).unwrap();
        assert_eq!(trace.head_logits[0].row(0), batch.row(0));
    }

    #[test]
    fn forward_is_deterministic_across_runs() {
        let batch = Mat::from_vec(2, 3, vec![0.1, 0.2, 0.3, -0.4, 0.5, -0.6]);
        let a = forward(&Network::init(simple_spec(), 99), &batch).unwrap();
        let b = forward(&Network::init(simple_spec(), 99), &batch).unwrap();
        assert_eq!(a.head_logits[0], b.head_logits[0]);
    }

    #[test]
    fn zero_upstream_gradient_means_zero_parameter_gradients() {
        let net = Network::init(simple_spec(), 5);
        let batch = Mat::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let trace = forward(&net, &batch).unwrap();
        let mut grads = net.zero_grads();
        backward(&net, &trace, &[None], &mut grads).unwrap();
        for id in grads.block_ids() {
            assert!(grads.flat_block(id).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn two_heads_gradient_isolation() {
        let spec = NetworkSpec {
            input_dim: 3,
            trunk: vec![TrunkLayerSpec { width: 4, activation: Activation::Relu }],
            heads: vec![
                HeadSpec { name: "a".into(), width: 2, role: HeadRole::Task, attach: Attach::Trunk },
                HeadSpec { name: "b".into(), width: 2, role: HeadRole::Task, attach: Attach::Trunk },
            ],
        };
        let net = Network::init(spec, 5);
        let batch = Mat::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let trace = forward(&net, &batch).unwrap();
        let mut grads = net.zero_grads();
        let g = Mat::from_vec(2, 2, vec![0.3, -0.7, 0.1, 0.2]);
        backward(&net, &trace, &[Some(g), None], &mut grads).unwrap();
        assert!(grads.flat_block(BlockId::Head(1)).iter().all(|&v| v == 0.0));
        assert!(grads.flat_block(BlockId::Head(0)).iter().any(|&v| v != 0.0));
        assert!(grads.flat_block(BlockId::Trunk(0)).iter().any(|&v| v != 0.0));
    }

    #[test]
    fn spec_validation_rejects_bad_attachments() {
        let mut spec = simple_spec();
        spec.heads.push(HeadSpec {
            name: "adv".into(),
            width: 2,
            role: HeadRole::Adversary,
            attach: Attach::Head("missing".into()),
        });
        assert!(spec.validate().is_err());
        spec.heads[1].attach = Attach::Head("task".into());
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn forward_rejects_wrong_input_width() {
        let net = Network::init(simple_spec(), 3);
        let batch = Mat::zeros(1, 5);
        assert!(forward(&net, &batch).is_err());
    }
}
