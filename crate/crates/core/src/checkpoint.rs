//! Binary model checkpoints.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic      8 bytes  "HINEVCKP"
//! version    u32      1
//! dim        u64
//! depth      u64      number of hidden layers
//! types      u64      number of object types
//! per type:  u64 tag length, tag bytes (UTF-8), u64 object count
//! beta       f64
//! alpha      f64
//! seed       u64
//! blocks     f64...   per type: W (d×n row-major), b (d), Ŵ (n×d row-major), b̂ (n);
//!                     then per extra hidden layer: W (d×d), b (d)
//! ```

use std::io::{Read, Write};

use thiserror::Error;

use crate::autoencoder::AutoencoderParams;

const MAGIC: &[u8; 8] = b"HINEVCKP";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("not a checkpoint file (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub type_tags: Vec<String>,
    pub beta: f64,
    pub alpha: f64,
    pub seed: u64,
    pub params: AutoencoderParams,
}

fn put_u64<W: Write>(w: &mut W, v: u64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn get_u64<R: Read>(r: &mut R) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64<R: Read>(r: &mut R) -> std::io::Result<f64> {
    get_u64(r).map(f64::from_bits)
}

// Upper bound on sizes read from a header, to fail fast on garbage input.
const MAX_LEN: u64 = 1 << 40;

fn get_len<R: Read>(r: &mut R, what: &str) -> Result<usize, CheckpointError> {
    let v = get_u64(r)?;
    if v > MAX_LEN {
        return Err(CheckpointError::Corrupt(format!(
            "{what} = {v} is implausible"
        )));
    }
    Ok(v as usize)
}

impl Checkpoint {
    pub fn write<W: Write>(&self, mut w: W) -> Result<(), CheckpointError> {
        let p = &self.params;
        if self.type_tags.len() != p.branches.len() {
            return Err(CheckpointError::Corrupt(
                "type tag count does not match branch count".to_string(),
            ));
        }
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        put_u64(&mut w, p.dim as u64)?;
        put_u64(&mut w, p.depth() as u64)?;
        put_u64(&mut w, p.branches.len() as u64)?;
        for (tag, br) in self.type_tags.iter().zip(&p.branches) {
            put_u64(&mut w, tag.len() as u64)?;
            w.write_all(tag.as_bytes())?;
            put_u64(&mut w, br.size() as u64)?;
        }
        w.write_all(&self.beta.to_le_bytes())?;
        w.write_all(&self.alpha.to_le_bytes())?;
        put_u64(&mut w, self.seed)?;
        for block in p.blocks() {
            for v in block {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self, CheckpointError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let mut v = [0u8; 4];
        r.read_exact(&mut v)?;
        let version = u32::from_le_bytes(v);
        if version != VERSION {
            return Err(CheckpointError::Version(version));
        }
        let dim = get_len(&mut r, "dim")?;
        let depth = get_len(&mut r, "depth")?;
        if depth == 0 {
            return Err(CheckpointError::Corrupt("depth 0".to_string()));
        }
        let types = get_len(&mut r, "type count")?;
        let mut type_tags = Vec::with_capacity(types.min(1024));
        let mut sizes = Vec::with_capacity(types.min(1024));
        for _ in 0..types {
            let len = get_len(&mut r, "tag length")?;
            let mut buf = vec![0u8; len];
            r.read_exact(&mut buf)?;
            let tag = String::from_utf8(buf)
                .map_err(|_| CheckpointError::Corrupt("type tag is not UTF-8".to_string()))?;
            type_tags.push(tag);
            sizes.push(get_len(&mut r, "type size")?);
        }
        let beta = get_f64(&mut r)?;
        let alpha = get_f64(&mut r)?;
        let seed = get_u64(&mut r)?;
        let mut params = AutoencoderParams::zeros(&sizes, dim, depth);
        for block in params.blocks_mut() {
            for slot in block.iter_mut() {
                *slot = get_f64(&mut r)?;
            }
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(CheckpointError::Corrupt("trailing bytes".to_string()));
        }
        Ok(Checkpoint {
            type_tags,
            beta,
            alpha,
            seed,
            params,
        })
    }
}
