//! Model checkpoint format.
//!
//! Layout: magic `SKBM`, a u32 little-endian length followed by the JSON
//! serialization of the [`NetworkSpec`], a u64 parameter count, then every
//! parameter block in canonical order (trunk layers then heads, weights
//! row-major then bias) as little-endian 64-bit reals.

use std::io::{Read, Write};

use thiserror::Error;

use super::net::{Network, NetworkSpec};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"SKBM";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad checkpoint magic")]
    BadMagic,
    #[error("checkpoint spec: {0}")]
    Spec(#[from] serde_json::Error),
    #[error("parameter count mismatch: header says {header}, spec implies {expected}")]
    ParamCount { header: u64, expected: u64 },
    #[error("trailing bytes after parameter blocks")]
    TrailingBytes,
}

pub fn write_checkpoint<W: Write>(net: &Network, mut w: W) -> Result<(), CheckpointError> {
    w.write_all(CHECKPOINT_MAGIC)?;
    let spec_json = serde_json::to_vec(net.spec())?;
    w.write_all(&(spec_json.len() as u32).to_le_bytes())?;
    w.write_all(&spec_json)?;
    w.write_all(&(net.param_count() as u64).to_le_bytes())?;
    for i in 0..net.param_count() {
        w.write_all(&net.param_get(i).to_le_bytes())?;
    }
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Network, CheckpointError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let mut len4 = [0u8; 4];
    r.read_exact(&mut len4)?;
    let mut spec_json = vec![0u8; u32::from_le_bytes(len4) as usize];
    r.read_exact(&mut spec_json)?;
    let spec: NetworkSpec = serde_json::from_slice(&spec_json)?;
    let mut count8 = [0u8; 8];
    r.read_exact(&mut count8)?;
    let header = u64::from_le_bytes(count8);

    // Shapes come from the spec; the seed is irrelevant since every value is
    // overwritten below.
    let mut net = Network::init(spec, 0);
    let expected = net.param_count() as u64;
    if header != expected {
        return Err(CheckpointError::ParamCount { header, expected });
    }
    let mut buf = [0u8; 8];
    for i in 0..net.param_count() {
        r.read_exact(&mut buf)?;
        net.param_set(i, f64::from_le_bytes(buf));
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(CheckpointError::TrailingBytes);
    }
    Ok(net)
}
