//! CIFAR-10 binary ingestion and the skewed color/grayscale benchmark.
//!
//! Record layout: 1 label byte then 3072 pixel bytes (1024 red, 1024 green,
//! 1024 blue, row-major 32×32). Train batches hold 10,000 records each.
//! The skewed train split converts each class's minority share to grayscale;
//! the test set is emitted twice, once in color and once fully grayscale,
//! with grayscale images kept 3-channel.

use std::path::Path;

use super::transform::luma_gray;
use super::{assign_domains, DatagenError, Dataset, Example, SkewSpec, Split};
use crate::seeding::sub_seed;

pub const CIFAR_IMAGE_BYTES: usize = 3072;
pub const CIFAR_RECORD_BYTES: usize = CIFAR_IMAGE_BYTES + 1;
pub const CIFAR_BATCH_RECORDS: usize = 10_000;
pub const CIFAR_CLASSES: u16 = 10;
pub const CIFAR_TRAIN_FILES: [&str; 5] = [
    "data_batch_1.bin",
    "data_batch_2.bin",
    "data_batch_3.bin",
    "data_batch_4.bin",
    "data_batch_5.bin",
];
pub const CIFAR_TEST_FILE: &str = "test_batch.bin";

#[derive(Debug, Clone)]
pub struct Cifar10sBundle {
    pub train: Dataset,
    pub test_color: Dataset,
    pub test_gray: Dataset,
}

/// Split one batch file's bytes into `(label, pixels)` records.
pub fn parse_cifar_batch<'a>(bytes: &'a [u8], file: &str) -> Result<Vec<(u8, &'a [u8])>, DatagenError> {
    if bytes.len() != CIFAR_BATCH_RECORDS * CIFAR_RECORD_BYTES {
        return Err(DatagenError::Format {
            file: file.to_string(),
            details: format!(
                "expected {} bytes ({} records of {}), got {}",
                CIFAR_BATCH_RECORDS * CIFAR_RECORD_BYTES,
                CIFAR_BATCH_RECORDS,
                CIFAR_RECORD_BYTES,
                bytes.len()
            ),
        });
    }
    let mut records = Vec::with_capacity(CIFAR_BATCH_RECORDS);
    for (i, rec) in bytes.chunks_exact(CIFAR_RECORD_BYTES).enumerate() {
        let label = rec[0];
        if label >= CIFAR_CLASSES as u8 {
            return Err(DatagenError::Format {
                file: file.to_string(),
                details: format!("record {i} has label {label}, expected 0..10"),
            });
        }
        records.push((label, &rec[1..]));
    }
    Ok(records)
}

/// Build the skewed benchmark from a directory holding the five train batch
/// files and the test batch in the standard binary layout.
pub fn build_cifar10s(dir: &Path, spec: &SkewSpec, seed: u64) -> Result<Cifar10sBundle, DatagenError> {
    spec.validate(CIFAR_CLASSES, 2)?;
    let mut train_records: Vec<(u8, Vec<u8>)> = Vec::with_capacity(5 * CIFAR_BATCH_RECORDS);
    for name in CIFAR_TRAIN_FILES {
        let bytes = read_file(dir, name)?;
        for (label, pixels) in parse_cifar_batch(&bytes, name)? {
            train_records.push((label, pixels.to_vec()));
        }
    }
    let test_bytes = read_file(dir, CIFAR_TEST_FILE)?;
    let test_records: Vec<(u8, Vec<u8>)> = parse_cifar_batch(&test_bytes, CIFAR_TEST_FILE)?
        .into_iter()
        .map(|(l, p)| (l, p.to_vec()))
        .collect();
    assemble_cifar10s(&train_records, &test_records, spec, seed)
}

/// Core assembly, split out so it can be exercised without full-size files.
pub fn assemble_cifar10s(
    train_records: &[(u8, Vec<u8>)],
    test_records: &[(u8, Vec<u8>)],
    spec: &SkewSpec,
    seed: u64,
) -> Result<Cifar10sBundle, DatagenError> {
    // Per-class domain assignment over each class's records in file order.
    let mut class_indices: Vec<Vec<usize>> = vec![Vec::new(); CIFAR_CLASSES as usize];
    for (i, (label, _)) in train_records.iter().enumerate() {
        class_indices[*label as usize].push(i);
    }
    let mut domains = vec![0u16; train_records.len()];
    for (c, indices) in class_indices.iter().enumerate() {
        let labels =
            assign_domains(c, indices.len(), spec, 2, sub_seed(seed, &format!("cifar.skew.c{c}")));
        for (&idx, &d) in indices.iter().zip(labels.iter()) {
            domains[idx] = d;
        }
    }

    let mut train = Vec::with_capacity(train_records.len());
    for (i, (label, pixels)) in train_records.iter().enumerate() {
        let features =
            if domains[i] == 1 { gray_features(pixels) } else { color_features(pixels) };
        train.push(Example { id: i as u32, features, y: u16::from(*label), d: domains[i] });
    }

    let mut color = Vec::with_capacity(test_records.len());
    let mut gray = Vec::with_capacity(test_records.len());
    for (i, (label, pixels)) in test_records.iter().enumerate() {
        color.push(Example {
            id: i as u32,
            features: color_features(pixels),
            y: u16::from(*label),
            d: 0,
        });
        gray.push(Example {
            id: i as u32,
            features: gray_features(pixels),
            y: u16::from(*label),
            d: 1,
        });
    }

    Ok(Cifar10sBundle {
        train: Dataset { examples: train, n_classes: CIFAR_CLASSES, n_domains: 2, split: Split::Train },
        test_color: Dataset {
            examples: color,
            n_classes: CIFAR_CLASSES,
            n_domains: 2,
            split: Split::TestDomain(0),
        },
        test_gray: Dataset {
            examples: gray,
            n_classes: CIFAR_CLASSES,
            n_domains: 2,
            split: Split::TestDomain(1),
        },
    })
}

fn color_features(pixels: &[u8]) -> Vec<f32> {
    pixels.iter().map(|&b| f32::from(b) / 255.0).collect()
}

/// Byte-exact grayscale: luma per pixel, replicated into all three channels,
/// then scaled like the color path.
fn gray_features(pixels: &[u8]) -> Vec<f32> {
    let plane = CIFAR_IMAGE_BYTES / 3;
    let mut out = vec![0.0f32; CIFAR_IMAGE_BYTES];
    for p in 0..plane {
        let y = luma_gray(pixels[p], pixels[plane + p], pixels[2 * plane + p]);
        let v = f32::from(y) / 255.0;
        out[p] = v;
        out[plane + p] = v;
        out[2 * plane + p] = v;
    }
    out
}

fn read_file(dir: &Path, name: &str) -> Result<Vec<u8>, DatagenError> {
    std::fs::read(dir.join(name))
        .map_err(|source| DatagenError::Ingestion { file: name.to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 10 classes × `per_class` records with recognizable pixel fill.
    fn fake_records(per_class: usize) -> Vec<(u8, Vec<u8>)> {
        let mut records = Vec::new();
        for k in 0..per_class {
            for c in 0..10u8 {
                let v = (c as usize * 20 + k) as u8;
                let mut px = vec![0u8; CIFAR_IMAGE_BYTES];
                for (i, p) in px.iter_mut().enumerate() {
                    *p = v.wrapping_add((i % 3) as u8 * 30);
                }
                records.push((c, px));
            }
        }
        records
    }

    #[test]
    fn skew_counts_and_global_balance() {
        let train = fake_records(20);
        let test = fake_records(2);
        let spec = SkewSpec::half_split(10, 0.95);
        let bundle = assemble_cifar10s(&train, &test, &spec, 7).unwrap();
        let counts = bundle.train.cell_counts();
        let mut per_domain = [0usize; 2];
        for (c, row) in counts.iter().enumerate() {
            let maj = if c < 5 { 0 } else { 1 };
            assert_eq!(row[maj], 19, "round(0.95·20)");
            assert_eq!(row[1 - maj], 1);
            per_domain[0] += row[0];
            per_domain[1] += row[1];
        }
        assert_eq!(per_domain[0], per_domain[1], "domain totals balanced");
    }

    #[test]
    fn gray_copy_is_channel_equal_and_color_copy_is_raw() {
        let train = fake_records(4);
        let test = fake_records(1);
        let spec = SkewSpec::half_split(10, 0.5);
        let bundle = assemble_cifar10s(&train, &test, &spec, 0).unwrap();
        for e in &bundle.test_gray.examples {
            for p in 0..1024 {
                assert_eq!(e.features[p], e.features[1024 + p]);
                assert_eq!(e.features[p], e.features[2048 + p]);
            }
            assert_eq!(e.d, 1);
        }
        let (label, px) = &test[0];
        let e = &bundle.test_color.examples[0];
        assert_eq!(e.y, u16::from(*label));
        assert_eq!(e.d, 0);
        assert!((e.features[5] - f32::from(px[5]) / 255.0).abs() < 1e-9);
    }

    #[test]
    fn assembly_is_bit_reproducible() {
        let train = fake_records(6);
        let test = fake_records(1);
        let spec = SkewSpec::half_split(10, 0.8);
        let a = assemble_cifar10s(&train, &test, &spec, 3).unwrap();
        let b = assemble_cifar10s(&train, &test, &spec, 3).unwrap();
        assert_eq!(a.train, b.train);
    }

    #[test]
    fn truncated_batch_is_a_format_error() {
        let bytes = vec![0u8; CIFAR_RECORD_BYTES * 3];
        let err = parse_cifar_batch(&bytes, "data_batch_1.bin").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("data_batch_1.bin"), "{msg}");
    }

    #[test]
    fn out_of_range_label_is_a_format_error() {
        let mut bytes = vec![0u8; CIFAR_BATCH_RECORDS * CIFAR_RECORD_BYTES];
        bytes[0] = 11;
        assert!(parse_cifar_batch(&bytes, "test_batch.bin").is_err());
    }

    #[test]
    fn missing_file_error_names_the_file() {
        let spec = SkewSpec::half_split(10, 0.95);
        let err = build_cifar10s(Path::new("/definitely/not/here"), &spec, 0).unwrap_err();
        assert!(err.to_string().contains("data_batch_1.bin"), "{err}");
    }
}
