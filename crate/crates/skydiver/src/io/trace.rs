//! Bit-packed spike trace files.
//!
//! Header: T, C, H, W as little-endian u32. Body: spikes in (t, c, y, x)
//! order, each row of W bits packed LSB-first and padded to a byte
//! boundary. File length must match the header arithmetic exactly.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::snn::SpikeTrain;

fn body_len(t: usize, c: usize, h: usize, w: usize) -> usize {
    t * c * h * w.div_ceil(8)
}

pub fn save_trace(train: &SpikeTrain, path: &Path) -> Result<()> {
    train.validate()?;
    let (t, c, h, w) = (train.timesteps, train.channels, train.height, train.width);
    let mut bytes = Vec::with_capacity(16 + body_len(t, c, h, w));
    for dim in [t, c, h, w] {
        bytes.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    let row_bytes = w.div_ceil(8);
    for ti in 0..t {
        for ci in 0..c {
            for y in 0..h {
                let mut row = vec![0u8; row_bytes];
                for x in 0..w {
                    if train.get(ti, ci, y, x) == 1 {
                        row[x / 8] |= 1 << (x % 8);
                    }
                }
                bytes.extend_from_slice(&row);
            }
        }
    }
    super::atomic_write(path, &bytes)?;
    Ok(())
}

pub fn load_trace(path: &Path) -> Result<SpikeTrain> {
    let bytes = fs::read(path)?;
    if bytes.len() < 16 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("header needs 16 bytes, file has {}", bytes.len()),
        });
    }
    let dim = |i: usize| u32::from_le_bytes(bytes[i * 4..i * 4 + 4].try_into().unwrap()) as usize;
    let (t, c, h, w) = (dim(0), dim(1), dim(2), dim(3));
    if t == 0 || c == 0 || h == 0 || w == 0 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("zero dimension in header {t}x{c}x{h}x{w}"),
        });
    }
    // Wide arithmetic: a hostile header must not overflow or allocate.
    let expected = 16u128
        + t as u128 * c as u128 * h as u128 * (w as u128).div_ceil(8);
    if bytes.len() as u128 != expected {
        return Err(Error::LengthMismatch {
            path: path.to_path_buf(),
            expected: expected.min(u64::MAX as u128) as u64,
            actual: bytes.len() as u64,
        });
    }
    let row_bytes = w.div_ceil(8);
    let mut train = SpikeTrain::zeros(t, c, h, w);
    let mut offset = 16;
    for ti in 0..t {
        for ci in 0..c {
            for y in 0..h {
                let row = &bytes[offset..offset + row_bytes];
                offset += row_bytes;
                for x in 0..w {
                    train.set(ti, ci, y, x, (row[x / 8] >> (x % 8)) & 1);
                }
                // Padding bits past W must be zero; fail closed otherwise.
                for (bi, &b) in row.iter().enumerate() {
                    let valid_bits = (w - bi * 8).min(8);
                    if valid_bits < 8 && b >> valid_bits != 0 {
                        return Err(Error::Format {
                            path: path.to_path_buf(),
                            message: "nonzero padding bits in packed row".into(),
                        });
                    }
                }
            }
        }
    }
    Ok(train)
}
