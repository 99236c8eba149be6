//! Domain transforms: how domain-1 features are derived from domain-0 ones.
//!
//! Every transform maps back into the original feature space so that a single
//! architecture serves both domains (grayscale replicates the luma value into
//! all three channels, crops are re-padded, downsampled images are upsampled
//! back, linear maps are square).

use serde::{Deserialize, Serialize};

use super::DatagenError;
use crate::seeding::rng_from_seed;
use rand_distr::{Distribution, StandardNormal};

/// ITU-R BT.601 luma of one pixel, rounded half away from zero and clamped.
/// Callers replicate the value into all three channels.
pub fn luma_gray(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
    y.round().clamp(0.0, 255.0) as u8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainTransform {
    Identity,
    /// Float-domain luma on a 3×H×W image in [0,1], replicated to 3 channels.
    GrayscaleLuma,
    /// Keep the centered `crop_size`² window of each channel, zero-pad back.
    CenterCrop { crop_size: usize },
    /// Box-average `factor`² blocks, then nearest-neighbor upsample back.
    Downsample { factor: usize },
    /// `x ↦ M·x` with a square row-major matrix.
    LinearMap { dim: usize, matrix: Vec<f64> },
}

impl DomainTransform {
    pub fn validate(&self) -> Result<(), DatagenError> {
        match self {
            DomainTransform::LinearMap { dim, matrix } => {
                if matrix.len() != dim * dim {
                    return Err(DatagenError::InvalidConfig(format!(
                        "linear map has {} entries, expected {}",
                        matrix.len(),
                        dim * dim
                    )));
                }
                if matrix.iter().all(|&v| v == 0.0) {
                    return Err(DatagenError::InvalidConfig("degenerate zero linear map".into()));
                }
                Ok(())
            }
            DomainTransform::CenterCrop { crop_size } if *crop_size == 0 => {
                Err(DatagenError::InvalidConfig("crop size must be positive".into()))
            }
            DomainTransform::Downsample { factor } if *factor == 0 => {
                Err(DatagenError::InvalidConfig("downsample factor must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Apply to one feature vector; output length always equals input length.
    pub fn apply(&self, features: &[f32]) -> Result<Vec<f32>, DatagenError> {
        match self {
            DomainTransform::Identity => Ok(features.to_vec()),
            DomainTransform::GrayscaleLuma => {
                let (side, plane) = image_side(features.len())?;
                let mut out = vec![0.0f32; features.len()];
                let _ = side;
                for p in 0..plane {
                    let y = 0.299 * features[p] + 0.587 * features[plane + p] + 0.114 * features[2 * plane + p];
                    out[p] = y;
                    out[plane + p] = y;
                    out[2 * plane + p] = y;
                }
                Ok(out)
            }
            DomainTransform::CenterCrop { crop_size } => {
                let (side, plane) = image_side(features.len())?;
                if *crop_size > side {
                    return Err(DatagenError::InvalidConfig(format!(
                        "crop {} larger than image side {}",
                        crop_size, side
                    )));
                }
                let off = (side - crop_size) / 2;
                let mut out = vec![0.0f32; features.len()];
                for c in 0..3 {
                    for y in off..off + crop_size {
                        for x in off..off + crop_size {
                            out[c * plane + y * side + x] = features[c * plane + y * side + x];
                        }
                    }
                }
                Ok(out)
            }
            DomainTransform::Downsample { factor } => {
                let (side, plane) = image_side(features.len())?;
                if side % factor != 0 {
                    return Err(DatagenError::InvalidConfig(format!(
                        "side {} not divisible by factor {}",
                        side, factor
                    )));
                }
                let mut out = vec![0.0f32; features.len()];
                let f = *factor;
                let area = (f * f) as f32;
                for c in 0..3 {
                    for by in (0..side).step_by(f) {
                        for bx in (0..side).step_by(f) {
                            let mut sum = 0.0f32;
                            for y in by..by + f {
                                for x in bx..bx + f {
                                    sum += features[c * plane + y * side + x];
                                }
                            }
                            let avg = sum / area;
                            for y in by..by + f {
                                for x in bx..bx + f {
                                    out[c * plane + y * side + x] = avg;
                                }
                            }
                        }
                    }
                }
                Ok(out)
            }
            DomainTransform::LinearMap { dim, matrix } => {
                if features.len() != *dim {
                    return Err(DatagenError::Shape { expected: *dim, got: features.len() });
                }
                let mut out = vec![0.0f32; *dim];
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &matrix[i * dim..(i + 1) * dim];
                    *o = row.iter().zip(features.iter()).map(|(&m, &x)| m * f64::from(x)).sum::<f64>()
                        as f32;
                }
                Ok(out)
            }
        }
    }
}

/// Orthogonal projection onto a seeded random `rank`-dimensional subspace.
///
/// Built by Gram–Schmidt on standard-normal vectors; the resulting map keeps
/// exactly `rank` directions of the input and zeroes the rest, the synthetic
/// analog of one domain carrying strictly less information.
pub fn rank_projection(dim: usize, rank: usize, seed: u64) -> DomainTransform {
    assert!(rank >= 1 && rank <= dim, "rank {rank} outside 1..={dim}");
    let mut rng = rng_from_seed(seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(rank);
    while basis.len() < rank {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        for q in &basis {
            let proj: f64 = v.iter().zip(q.iter()).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q.iter()) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    let mut matrix = vec![0.0f64; dim * dim];
    for q in &basis {
        for i in 0..dim {
            for j in 0..dim {
                matrix[i * dim + j] += q[i] * q[j];
            }
        }
    }
    DomainTransform::LinearMap { dim, matrix }
}

fn image_side(len: usize) -> Result<(usize, usize), DatagenError> {
    if len % 3 != 0 {
        return Err(DatagenError::Shape { expected: 3072, got: len });
    }
    let plane = len / 3;
    let side = (plane as f64).sqrt().round() as usize;
    if side * side != plane {
        return Err(DatagenError::Shape { expected: 3072, got: len });
    }
    Ok((side, plane))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luma_of_white_and_black() {
        assert_eq!(luma_gray(255, 255, 255), 255);
        assert_eq!(luma_gray(0, 0, 0), 0);
    }

    #[test]
    fn luma_of_pure_red() {
        // round(0.299 · 255) = round(76.245)
        assert_eq!(luma_gray(255, 0, 0), 76);
    }

    #[test]
    fn luma_is_idempotent_on_gray_triples() {
        for v in 0..=255u8 {
            assert_eq!(luma_gray(v, v, v), v, "value {v}");
        }
    }

    #[test]
    fn grayscale_float_output_is_channel_equal() {
        let img: Vec<f32> = (0..3072).map(|i| (i % 97) as f32 / 96.0).collect();
        let out = DomainTransform::GrayscaleLuma.apply(&img).unwrap();
        for p in 0..1024 {
            assert_eq!(out[p], out[1024 + p]);
            assert_eq!(out[p], out[2048 + p]);
        }
    }

    #[test]
    fn zero_linear_map_is_rejected() {
        let t = DomainTransform::LinearMap { dim: 4, matrix: vec![0.0; 16] };
        assert!(t.validate().is_err());
    }

    #[test]
    fn rank_one_projection_collapses_to_a_line() {
        let t = rank_projection(8, 1, 123);
        t.validate().unwrap();
        let mut rng = rng_from_seed(5);
        use rand::Rng;
        let first = t.apply(&(0..8).map(|_| rng.gen_range(-1.0f32..1.0)).collect::<Vec<_>>()).unwrap();
        let n0: f64 = first.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt();
        for _ in 0..10 {
            let x: Vec<f32> = (0..8).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
            let y = t.apply(&x).unwrap();
            let ny: f64 = y.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt();
            if ny < 1e-9 {
                continue;
            }
            let cos: f64 = y
                .iter()
                .zip(first.iter())
                .map(|(&a, &b)| f64::from(a) * f64::from(b))
                .sum::<f64>()
                / (ny * n0);
            assert!((cos.abs() - 1.0).abs() < 1e-5, "not colinear: cos = {cos}");
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let t = rank_projection(6, 3, 9);
        let x: Vec<f32> = (0..6).map(|i| i as f32 * 0.3 - 1.0).collect();
        let once = t.apply(&x).unwrap();
        let twice = t.apply(&once).unwrap();
        for (a, b) in once.iter().zip(twice.iter()) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn center_crop_zeroes_the_border() {
        let img = vec![1.0f32; 3072];
        let out = DomainTransform::CenterCrop { crop_size: 28 }.apply(&img).unwrap();
        // (32−28)/2 = 2-pixel zero frame.
        assert_eq!(out[0], 0.0);
        assert_eq!(out[2 * 32 + 2], 1.0);
        let kept: f32 = out.iter().sum();
        assert_eq!(kept, (28 * 28 * 3) as f32);
    }

    #[test]
    fn downsample_preserves_block_means_and_dimension() {
        let img: Vec<f32> = (0..3072).map(|i| (i % 13) as f32).collect();
        let out = DomainTransform::Downsample { factor: 2 }.apply(&img).unwrap();
        assert_eq!(out.len(), img.len());
        let m: f32 = (img[0] + img[1] + img[32] + img[33]) / 4.0;
        assert_eq!(out[0], m);
        assert_eq!(out[1], m);
        assert_eq!(out[32], m);
    }
}
