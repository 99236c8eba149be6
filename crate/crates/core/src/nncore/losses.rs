//! Classification losses with exact logit gradients.

/// Numerically stable softmax into `out`.
pub fn softmax(logits: &[f64], out: &mut [f64]) {
    debug_assert_eq!(logits.len(), out.len());
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &z) in out.iter_mut().zip(logits.iter()) {
        *o = (z - m).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// Softmax cross-entropy for one example.
///
/// Returns `(−log softmax(logits)[target], softmax(logits) − onehot(target))`.
pub fn softmax_xent(logits: &[f64], target: usize) -> (f64, Vec<f64>) {
    assert!(target < logits.len(), "target {} out of range {}", target, logits.len());
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut dlogits = vec![0.0; logits.len()];
    let mut sum = 0.0;
    for (d, &z) in dlogits.iter_mut().zip(logits.iter()) {
        *d = (z - m).exp();
        sum += *d;
    }
    let loss = sum.ln() + m - logits[target];
    for d in dlogits.iter_mut() {
        *d /= sum;
    }
    dlogits[target] -= 1.0;
    (loss, dlogits)
}

/// Mean-reduced binary cross-entropy with logits over a vector of
/// independent attributes. `dlogits[i] = (sigmoid(z_i) − t_i) / len`.
pub fn sigmoid_bce(logits: &[f64], targets: &[f64]) -> (f64, Vec<f64>) {
    assert_eq!(logits.len(), targets.len(), "logit/target length mismatch");
    let n = logits.len() as f64;
    let mut loss = 0.0;
    let mut dlogits = vec![0.0; logits.len()];
    for (i, (&z, &t)) in logits.iter().zip(targets.iter()).enumerate() {
        // max(z,0) − z·t + ln(1 + exp(−|z|)) is the stable per-element form.
        loss += z.max(0.0) - z * t + (-z.abs()).exp().ln_1p();
        let s = 1.0 / (1.0 + (-z).exp());
        dlogits[i] = (s - t) / n;
    }
    (loss / n, dlogits)
}
