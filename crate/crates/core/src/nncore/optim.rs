//! SGD with momentum, weight decay, and a step learning-rate schedule.

use serde::{Deserialize, Serialize};

use super::net::{BlockId, Gradients, Network, NnError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    /// Multiply the learning rate by this factor every `lr_drop_period` epochs.
    pub lr_drop_factor: f64,
    pub lr_drop_period: usize,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig {
            lr: 0.1,
            momentum: 0.9,
            weight_decay: 5e-4,
            lr_drop_factor: 0.1,
            lr_drop_period: 10,
            epochs: 30,
            batch_size: 128,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<(), NnError> {
        if self.lr < 0.0 || !(0.0..1.0).contains(&self.momentum) || self.weight_decay < 0.0 {
            return Err(NnError::InvalidSpec(
                "require lr >= 0, momentum in [0,1), weight_decay >= 0".into(),
            ));
        }
        if self.batch_size == 0 || self.lr_drop_period == 0 {
            return Err(NnError::InvalidSpec("batch_size and lr_drop_period must be positive".into()));
        }
        Ok(())
    }

    /// Learning rate in effect during `epoch` (0-based), applying the step
    /// drop at every period boundary.
    pub fn lr_at(&self, epoch: usize) -> f64 {
        self.lr * self.lr_drop_factor.powi((epoch / self.lr_drop_period) as i32)
    }
}

/// Momentum buffers, shaped like the network parameters.
#[derive(Debug, Clone)]
pub struct OptimState {
    velocity: Gradients,
}

impl OptimState {
    pub fn new(net: &Network) -> Self {
        OptimState { velocity: net.zero_grads() }
    }
}

/// One SGD update: `v ← momentum·v + g + weight_decay·p; p ← p − lr·v`.
///
/// Only the blocks listed in `blocks` are touched (`None` = all blocks);
/// untouched blocks keep their velocity and receive no weight decay, which is
/// what lets per-domain heads stay exactly at initialization until their
/// domain appears in a batch.
pub fn sgd_step(
    net: &mut Network,
    grads: &Gradients,
    state: &mut OptimState,
    lr: f64,
    momentum: f64,
    weight_decay: f64,
    blocks: Option<&[BlockId]>,
) -> Result<(), NnError> {
    let all = net.block_ids();
    let ids: &[BlockId] = blocks.unwrap_or(&all);
    for &id in ids {
        if !grads.block(id).is_finite() {
            return Err(NnError::NonFiniteGradient { block: net.block_name(id) });
        }
    }
    for &id in ids {
        let g = grads.block(id);
        let v = state.velocity.block_mut(id);
        let p = net.block_mut(id);
        for ((pv, vv), gv) in
            p.w.data_mut().iter_mut().zip(v.w.data_mut().iter_mut()).zip(g.w.data().iter())
        {
            *vv = momentum * *vv + *gv + weight_decay * *pv;
            *pv -= lr * *vv;
        }
        for ((pv, vv), gv) in p.b.iter_mut().zip(v.b.iter_mut()).zip(g.b.iter()) {
            // Biases follow the same rule; weight decay on biases is part of
            // the update definition here, matching the reference recurrence.
            *vv = momentum * *vv + *gv + weight_decay * *pv;
            *pv -= lr * *vv;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nncore::net::{Activation, Attach, HeadRole, HeadSpec, NetworkSpec, TrunkLayerSpec};

    fn small_net(seed: u64) -> Network {
        Network::init(
            NetworkSpec {
                input_dim: 2,
                trunk: vec![TrunkLayerSpec { width: 3, activation: Activation::Relu }],
                heads: vec![HeadSpec {
                    name: "task".into(),
                    width: 2,
                    role: HeadRole::Task,
                    attach: Attach::Trunk,
                }],
            },
            seed,
        )
    }

    fn constant_grads(net: &Network, value: f64) -> Gradients {
        let mut g = net.zero_grads();
        for id in g.block_ids() {
            let n = g.flat_block(id).len();
            g.set_flat_block(id, &vec![value; n]);
        }
        g
    }

    #[test]
    fn zero_lr_leaves_parameters_unchanged() {
        let mut net = small_net(7);
        let before = net.clone();
        let grads = constant_grads(&net, 1.0);
        let mut state = OptimState::new(&net);
        sgd_step(&mut net, &grads, &mut state, 0.0, 0.9, 5e-4, None).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn plain_gradient_descent_when_momentum_and_decay_are_zero() {
        let mut net = small_net(7);
        let before: Vec<f64> = (0..net.param_count()).map(|i| net.param_get(i)).collect();
        let grads = constant_grads(&net, 0.5);
        let mut state = OptimState::new(&net);
        sgd_step(&mut net, &grads, &mut state, 0.1, 0.0, 0.0, None).unwrap();
        for (i, b) in before.iter().enumerate() {
            assert!((net.param_get(i) - (b - 0.1 * 0.5)).abs() < 1e-15);
        }
    }

    #[test]
    fn two_steps_with_constant_grad_displace_by_lr_g_times_2_plus_mu() {
        // v1 = g, p1 = p0 − lr·g; v2 = μg + g, p2 = p1 − lr(1+μ)g
        // total displacement = lr·g·(2+μ).
        let mu = 0.9;
        let lr = 0.05;
        let g = 0.3;
        let mut net = small_net(7);
        let before: Vec<f64> = (0..net.param_count()).map(|i| net.param_get(i)).collect();
        let grads = constant_grads(&net, g);
        let mut state = OptimState::new(&net);
        sgd_step(&mut net, &grads, &mut state, lr, mu, 0.0, None).unwrap();
        sgd_step(&mut net, &grads, &mut state, lr, mu, 0.0, None).unwrap();
        for (i, b) in before.iter().enumerate() {
            let expect = b - lr * g * (2.0 + mu);
            assert!((net.param_get(i) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_gradient_is_rejected_with_block_name() {
        let mut net = small_net(7);
        let mut grads = constant_grads(&net, 1.0);
        let n = grads.flat_block(crate::nncore::BlockId::Head(0)).len();
        let mut bad = vec![1.0; n];
        bad[0] = f64::NAN;
        grads.set_flat_block(crate::nncore::BlockId::Head(0), &bad);
        let mut state = OptimState::new(&net);
        let err = sgd_step(&mut net, &grads, &mut state, 0.1, 0.9, 0.0, None).unwrap_err();
        assert!(err.to_string().contains("head.task"), "{err}");
    }

    #[test]
    fn masked_step_skips_untouched_blocks_entirely() {
        let mut net = small_net(7);
        let head_before = net.block(crate::nncore::BlockId::Head(0)).clone();
        let grads = constant_grads(&net, 1.0);
        let mut state = OptimState::new(&net);
        sgd_step(&mut net, &grads, &mut state, 0.1, 0.9, 5e-4, Some(&[crate::nncore::BlockId::Trunk(0)]))
            .unwrap();
        // Weight decay must not leak into the head block.
        assert_eq!(*net.block(crate::nncore::BlockId::Head(0)), head_before);
    }

    #[test]
    fn schedule_drops_by_factor_every_period() {
        let cfg = OptimConfig { lr: 0.1, lr_drop_factor: 0.1, lr_drop_period: 10, ..Default::default() };
        assert!((cfg.lr_at(0) - 0.1).abs() < 1e-15);
        assert!((cfg.lr_at(9) - 0.1).abs() < 1e-15);
        assert!((cfg.lr_at(10) - 0.01).abs() < 1e-15);
        assert!((cfg.lr_at(29) - 0.001).abs() < 1e-15);
    }
}
