//! Record-oriented binary dataset file.
//!
//! Header: magic `SKB1`, `n_examples: u32`, `feature_dim: u32`,
//! `n_classes: u16`, `n_domains: u16`; then per record `id: u32`, `y: u16`,
//! `d: u16` and the features as little-endian 32-bit reals. The split kind is
//! not stored; callers know it from context (file name or CLI flag).

use std::io::{Read, Write};

use super::{DatagenError, Dataset, Example, Split};

pub const DATASET_MAGIC: &[u8; 4] = b"SKB1";

pub fn write_dataset<W: Write>(ds: &Dataset, mut w: W) -> Result<(), DatagenError> {
    let dim = ds.feature_dim();
    if ds.examples.iter().any(|e| e.features.len() != dim) {
        return Err(DatagenError::DatasetFormat("inconsistent feature widths".into()));
    }
    w.write_all(DATASET_MAGIC)?;
    w.write_all(&(ds.examples.len() as u32).to_le_bytes())?;
    w.write_all(&(dim as u32).to_le_bytes())?;
    w.write_all(&ds.n_classes.to_le_bytes())?;
    w.write_all(&ds.n_domains.to_le_bytes())?;
    for e in &ds.examples {
        w.write_all(&e.id.to_le_bytes())?;
        w.write_all(&e.y.to_le_bytes())?;
        w.write_all(&e.d.to_le_bytes())?;
        for &f in &e.features {
            w.write_all(&f.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_dataset<R: Read>(mut r: R, split: Split) -> Result<Dataset, DatagenError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != DATASET_MAGIC {
        return Err(DatagenError::DatasetFormat("bad magic".into()));
    }
    let n_examples = read_u32(&mut r)? as usize;
    let dim = read_u32(&mut r)? as usize;
    let n_classes = read_u16(&mut r)?;
    let n_domains = read_u16(&mut r)?;
    let mut examples = Vec::with_capacity(n_examples);
    let mut fbuf = vec![0u8; dim * 4];
    for _ in 0..n_examples {
        let id = read_u32(&mut r)?;
        let y = read_u16(&mut r)?;
        let d = read_u16(&mut r)?;
        r.read_exact(&mut fbuf)?;
        let features = fbuf
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        examples.push(Example { id, features, y, d });
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(DatagenError::DatasetFormat("trailing bytes after records".into()));
    }
    let ds = Dataset { examples, n_classes, n_domains, split };
    ds.validate()?;
    Ok(ds)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, DatagenError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u16<R: Read>(r: &mut R) -> Result<u16, DatagenError> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_dataset() -> Dataset {
        Dataset {
            examples: (0..6u32)
                .map(|i| Example {
                    id: i,
                    features: vec![i as f32 * 0.5, -(i as f32), 0.25],
                    y: (i % 3) as u16,
                    d: (i % 2) as u16,
                })
                .collect(),
            n_classes: 3,
            n_domains: 2,
            split: Split::Train,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let ds = demo_dataset();
        let mut buf = Vec::new();
        write_dataset(&ds, &mut buf).unwrap();
        assert_eq!(&buf[..4], DATASET_MAGIC);
        let back = read_dataset(buf.as_slice(), Split::Train).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn header_is_bit_exact() {
        let ds = demo_dataset();
        let mut buf = Vec::new();
        write_dataset(&ds, &mut buf).unwrap();
        assert_eq!(buf[4..8], 6u32.to_le_bytes());
        assert_eq!(buf[8..12], 3u32.to_le_bytes());
        assert_eq!(buf[12..14], 3u16.to_le_bytes());
        assert_eq!(buf[14..16], 2u16.to_le_bytes());
        // Record 0: id, y, d, then 3 f32s.
        assert_eq!(buf[16..20], 0u32.to_le_bytes());
        assert_eq!(buf[24..28], 0.0f32.to_le_bytes());
    }

    #[test]
    fn truncated_and_oversized_files_are_rejected() {
        let ds = demo_dataset();
        let mut buf = Vec::new();
        write_dataset(&ds, &mut buf).unwrap();
        let mut short = buf.clone();
        short.truncate(short.len() - 2);
        assert!(read_dataset(short.as_slice(), Split::Train).is_err());
        buf.push(7);
        assert!(read_dataset(buf.as_slice(), Split::Train).is_err());
    }
}
