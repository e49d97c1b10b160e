//! IDX image ingestion (the MNIST container format): big-endian header,
//! magic 0x00000803, unsigned bytes scaled to [0, 1].

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::snn::Image;

const IMAGE_MAGIC: u32 = 0x0000_0803;

pub fn load_idx_images(path: &Path, limit: Option<usize>) -> Result<Vec<Image>> {
    let bytes = fs::read(path)?;
    if bytes.len() < 16 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("IDX header needs 16 bytes, file has {}", bytes.len()),
        });
    }
    let be = |i: usize| u32::from_be_bytes(bytes[i..i + 4].try_into().unwrap());
    let magic = be(0);
    if magic != IMAGE_MAGIC {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("bad IDX magic 0x{magic:08x}, expected 0x{IMAGE_MAGIC:08x}"),
        });
    }
    let count = be(4) as usize;
    let height = be(8) as usize;
    let width = be(12) as usize;
    let take = limit.map_or(count, |l| l.min(count));
    let need = 16 + take * height * width;
    if bytes.len() < need {
        return Err(Error::LengthMismatch {
            path: path.to_path_buf(),
            expected: need as u64,
            actual: bytes.len() as u64,
        });
    }
    let mut images = Vec::with_capacity(take);
    for i in 0..take {
        let start = 16 + i * height * width;
        let pixels: Vec<f32> = bytes[start..start + height * width]
            .iter()
            .map(|&b| b as f32 / 255.0)
            .collect();
        images.push(Image::new(1, height, width, pixels)?);
    }
    Ok(images)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx_bytes(count: u32, h: u32, w: u32, pixels: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
        b.extend_from_slice(&count.to_be_bytes());
        b.extend_from_slice(&h.to_be_bytes());
        b.extend_from_slice(&w.to_be_bytes());
        b.extend_from_slice(pixels);
        b
    }

    #[test]
    fn loads_and_scales_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("imgs.idx");
        fs::write(&path, idx_bytes(2, 2, 2, &[0, 128, 255, 64, 0, 0, 0, 0])).unwrap();
        let images = load_idx_images(&path, None).unwrap();
        assert_eq!(images.len(), 2);
        assert_eq!(images[0].pixels[0], 0.0);
        assert_eq!(images[0].pixels[2], 1.0);
        assert!((images[0].pixels[1] - 128.0 / 255.0).abs() < 1e-6);
        assert!(images[1].pixels.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn limit_truncates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("imgs.idx");
        fs::write(&path, idx_bytes(2, 1, 2, &[1, 2, 3, 4])).unwrap();
        assert_eq!(load_idx_images(&path, Some(1)).unwrap().len(), 1);
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("imgs.idx");
        let mut bytes = idx_bytes(1, 1, 1, &[7]);
        bytes[3] = 0x01; // label magic instead of image magic
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_idx_images(&path, None),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn short_read_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("imgs.idx");
        fs::write(&path, idx_bytes(3, 28, 28, &[0; 100])).unwrap();
        assert!(matches!(
            load_idx_images(&path, None),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
