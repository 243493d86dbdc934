//! Deterministic file IO: binary PGM/PPM images and the raw tensor format.
//!
//! The raw tensor format is used for bit-exact fixtures: a 16-byte magic
//! (`HFPTENSR` padded with zero bytes), three little-endian `u32` dims
//! (height, width, channels), then the payload as little-endian `f64`,
//! row-major and channel-interleaved.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::{BinaryMask, FeatureGrid, Image, ProbMask};

pub const TENSOR_MAGIC: [u8; 16] = *b"HFPTENSR\0\0\0\0\0\0\0\0";

/// Loads a binary PGM (P5) or PPM (P6) image with maxval 255 and scales the
/// payload to `[0, 1]`.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let bytes = fs::read(path.as_ref())?;
    decode_pnm(&bytes)
}

pub fn decode_pnm(bytes: &[u8]) -> Result<Image> {
    let mut cur = Cursor {
        bytes,
        pos: 0,
        last_token_pos: 0,
    };
    let magic = cur.take(2)?;
    let channels = match magic {
        b"P5" => 1,
        b"P6" => 3,
        _ => return Err(Error::decode(0, "expected P5 or P6 magic")),
    };
    let width = cur.read_header_int("width")?;
    let height = cur.read_header_int("height")?;
    let maxval = cur.read_header_int("maxval")?;
    if maxval != 255 {
        return Err(Error::decode(
            cur.last_token_pos,
            format!("unsupported maxval {maxval}, only 255 is supported"),
        ));
    }
    // Exactly one whitespace byte separates the header from the payload.
    cur.expect_single_whitespace()?;
    let expected = height * width * channels;
    let payload = cur.rest();
    if payload.len() < expected {
        return Err(Error::decode(
            bytes.len(),
            format!(
                "truncated payload: expected {expected} bytes, found {}",
                payload.len()
            ),
        ));
    }
    let data = payload[..expected]
        .iter()
        .map(|&b| f64::from(b) / 255.0)
        .collect();
    Image::new(height, width, channels, data)
}

/// Writes an image as binary PGM (1 channel) or PPM (3 channels) with
/// maxval 255; values are scaled by 255 and rounded.
pub fn save_image(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    fs::write(path.as_ref(), encode_pnm(img))?;
    Ok(())
}

pub fn encode_pnm(img: &Image) -> Vec<u8> {
    let magic = if img.channels == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(
        img.data
            .iter()
            .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8),
    );
    out
}

/// Loads a mask stored as PGM and reads it as a probability map.
pub fn load_prob_mask(path: impl AsRef<Path>) -> Result<ProbMask> {
    let img = load_image(path)?;
    if img.channels != 1 {
        return Err(Error::dimension("mask files must be single-channel PGM"));
    }
    ProbMask::new(img.height, img.width, img.data)
}

/// Loads a PGM ground-truth mask, binarizing at 0.5.
pub fn load_binary_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let mask = load_prob_mask(path)?;
    let data = mask.data.iter().map(|&v| u8::from(v > 0.5)).collect();
    BinaryMask::new(mask.height, mask.width, data)
}

pub fn save_tensor(path: impl AsRef<Path>, grid: &FeatureGrid) -> Result<()> {
    fs::write(path.as_ref(), encode_tensor(grid))?;
    Ok(())
}

pub fn encode_tensor(grid: &FeatureGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 12 + grid.data.len() * 8);
    out.extend_from_slice(&TENSOR_MAGIC);
    out.extend_from_slice(&(grid.height as u32).to_le_bytes());
    out.extend_from_slice(&(grid.width as u32).to_le_bytes());
    out.extend_from_slice(&(grid.channels as u32).to_le_bytes());
    for v in &grid.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<FeatureGrid> {
    let bytes = fs::read(path.as_ref())?;
    decode_tensor(&bytes)
}

pub fn decode_tensor(bytes: &[u8]) -> Result<FeatureGrid> {
    if bytes.len() < 28 {
        return Err(Error::decode(bytes.len(), "tensor file shorter than header"));
    }
    if bytes[..16] != TENSOR_MAGIC {
        return Err(Error::decode(0, "bad tensor magic"));
    }
    let dim = |i: usize| {
        u32::from_le_bytes(bytes[16 + 4 * i..20 + 4 * i].try_into().unwrap()) as usize
    };
    let (h, w, c) = (dim(0), dim(1), dim(2));
    let expected = h * w * c;
    let payload = &bytes[28..];
    if payload.len() < expected * 8 {
        return Err(Error::decode(
            bytes.len(),
            format!("truncated tensor payload: expected {expected} f64 values"),
        ));
    }
    let data = payload[..expected * 8]
        .chunks_exact(8)
        .map(|ch| f64::from_le_bytes(ch.try_into().unwrap()))
        .collect();
    FeatureGrid::new(h, w, c, data)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    // Start offset of the most recent header token, so errors about its
    // value (e.g. an unsupported maxval) name the right byte.
    last_token_pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::decode(self.pos, "unexpected end of file"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn rest(&self) -> &'a [u8] {
        &self.bytes[self.pos..]
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_whitespace_and_comments(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(b) = self.peek() {
                    self.pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn expect_single_whitespace(&mut self) -> Result<()> {
        match self.peek() {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(Error::decode(
                self.pos,
                "expected whitespace before pixel payload",
            )),
        }
    }

    fn read_header_int(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        self.last_token_pos = self.pos;
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::decode(start, format!("expected integer for {what}")));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse::<usize>()
            .map_err(|_| Error::decode(start, format!("invalid {what}: {text}")))
    }
}
