//! Central-finite-difference verification of the backward pass.

use rand::seq::index::sample;

use super::net::{Gradients, Network};
use crate::seeding::rng_from_seed;

const H: f64 = 1e-5;

/// Compare analytic gradients against central differences on a seeded random
/// subsample of at least `n_coords` parameter coordinates (all of them when
/// the network is smaller than that). Returns the maximum relative error;
/// a parameterless network vacuously returns 0.
///
/// `loss_fn` must evaluate the exact scalar loss whose gradients are in
/// `analytic`, at 64-bit precision.
pub fn finite_diff_check<F>(
    net: &Network,
    loss_fn: F,
    analytic: &Gradients,
    n_coords: usize,
    seed: u64,
) -> f64
where
    F: Fn(&Network) -> f64,
{
    let total = net.param_count();
    if total == 0 || n_coords == 0 {
        return 0.0;
    }
    let mut rng = rng_from_seed(seed);
    let picked: Vec<usize> = if n_coords >= total {
        (0..total).collect()
    } else {
        sample(&mut rng, total, n_coords).into_vec()
    };

    let flat_analytic: Vec<f64> = {
        let mut v = Vec::with_capacity(total);
        for id in analytic.block_ids() {
            v.extend(analytic.flat_block(id));
        }
        v
    };

    let mut work = net.clone();
    let mut max_rel = 0.0f64;
    for idx in picked {
        let orig = work.param_get(idx);
        work.param_set(idx, orig + H);
        let plus = loss_fn(&work);
        work.param_set(idx, orig - H);
        let minus = loss_fn(&work);
        work.param_set(idx, orig);
        let fd = (plus - minus) / (2.0 * H);
        let a = flat_analytic[idx];
        let rel = (a - fd).abs() / (a.abs() + fd.abs()).max(1e-8);
        if rel > max_rel {
            max_rel = rel;
        }
    }
    max_rel
}
