//! Train-time augmentation for 32×32×3 images: zero-pad 4 pixels per side,
//! sample a random 32×32 crop, flip horizontally half the time.

use rand::Rng;

use super::DatagenError;

const SIDE: usize = 32;
const PAD: usize = 4;
const IMAGE_LEN: usize = 3 * SIDE * SIDE;

/// Randomized augmentation. Draw order is fixed (crop y offset, crop x
/// offset, then flip), so a seeded RNG reproduces the exact output.
pub fn augment(features: &[f32], rng: &mut impl Rng) -> Result<Vec<f32>, DatagenError> {
    let oy = rng.gen_range(0..=2 * PAD);
    let ox = rng.gen_range(0..=2 * PAD);
    let flip = rng.gen_bool(0.5);
    augment_with(features, ox, oy, flip)
}

/// Deterministic variant with explicit crop offsets (each in `0..=8`) and
/// flip choice. Offset (4, 4) without a flip is the identity.
pub fn augment_with(features: &[f32], ox: usize, oy: usize, flip: bool) -> Result<Vec<f32>, DatagenError> {
    if features.len() != IMAGE_LEN {
        return Err(DatagenError::Shape { expected: IMAGE_LEN, got: features.len() });
    }
    if ox > 2 * PAD || oy > 2 * PAD {
        return Err(DatagenError::InvalidConfig(format!("crop offset ({ox},{oy}) out of range")));
    }
    let plane = SIDE * SIDE;
    let mut out = vec![0.0f32; IMAGE_LEN];
    for c in 0..3 {
        for y in 0..SIDE {
            // Row y of the crop reads padded row y+oy; padded rows/cols
            // outside [PAD, PAD+SIDE) are zero.
            let src_y = (y + oy) as isize - PAD as isize;
            if src_y < 0 || src_y >= SIDE as isize {
                continue;
            }
            for x in 0..SIDE {
                let src_x = (x + ox) as isize - PAD as isize;
                if src_x < 0 || src_x >= SIDE as isize {
                    continue;
                }
                let dst_x = if flip { SIDE - 1 - x } else { x };
                out[c * plane + y * SIDE + dst_x] =
                    features[c * plane + src_y as usize * SIDE + src_x as usize];
            }
        }
    }
    Ok(out)
}
