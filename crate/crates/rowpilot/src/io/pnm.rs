//! Binary netpbm parsing: 16-bit big-endian PGM (P5) for depth frames and
//! 8-bit PPM (P6) for RGB frames.

use thiserror::Error;

use crate::depth::{DepthFrame, MAX_DEPTH_MM};
use crate::fallback::RgbFrame;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PnmError {
    #[error("malformed header at byte {offset}")]
    MalformedHeader { offset: usize },
    #[error("maxval {maxval} at byte {offset}, expected {expected}")]
    WrongMaxval {
        maxval: u64,
        offset: usize,
        expected: u64,
    },
    #[error("pixel data truncated at byte {offset}, {missing} bytes missing")]
    TruncatedData { offset: usize, missing: usize },
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn expect_magic(&mut self, magic: &[u8; 2]) -> Result<(), PnmError> {
        if self.bytes.len() < 2 || &self.bytes[..2] != magic {
            return Err(PnmError::MalformedHeader { offset: 0 });
        }
        self.pos = 2;
        Ok(())
    }

    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    /// Reads a decimal header field after skipping separators.
    fn read_number(&mut self) -> Result<u64, PnmError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u64 = 0;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((self.bytes[self.pos] - b'0') as u64))
                .ok_or(PnmError::MalformedHeader { offset: start })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(PnmError::MalformedHeader { offset: start });
        }
        Ok(value)
    }

    /// Consumes the single whitespace byte that separates the maxval from
    /// the raster.
    fn expect_raster_separator(&mut self) -> Result<(), PnmError> {
        match self.bytes.get(self.pos) {
            Some(b' ' | b'\t' | b'\r' | b'\n') => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(PnmError::MalformedHeader { offset: self.pos }),
        }
    }

    fn take_raster(&mut self, needed: usize) -> Result<&'a [u8], PnmError> {
        let available = self.bytes.len() - self.pos;
        if available < needed {
            return Err(PnmError::TruncatedData {
                offset: self.bytes.len(),
                missing: needed - available,
            });
        }
        let raster = &self.bytes[self.pos..self.pos + needed];
        self.pos += needed;
        Ok(raster)
    }
}

fn read_header(
    cursor: &mut Cursor,
    magic: &[u8; 2],
    expected_maxval: u64,
) -> Result<(usize, usize, usize), PnmError> {
    cursor.expect_magic(magic)?;
    let width = cursor.read_number()?;
    let height = cursor.read_number()?;
    let maxval_offset = {
        cursor.skip_separators();
        cursor.pos
    };
    let maxval = cursor.read_number()?;
    if maxval != expected_maxval {
        return Err(PnmError::WrongMaxval {
            maxval,
            offset: maxval_offset,
            expected: expected_maxval,
        });
    }
    cursor.expect_raster_separator()?;
    // Dimensions that cannot fit in memory are reported as truncation at
    // the raster start, before anything is allocated.
    let pixels = width
        .checked_mul(height)
        .filter(|&p| p <= usize::MAX as u64 / 8)
        .ok_or(PnmError::TruncatedData {
            offset: cursor.pos,
            missing: usize::MAX,
        })?;
    Ok((width as usize, height as usize, pixels as usize))
}

/// Parses a binary 16-bit PGM (`P5`, maxval 65535, big-endian samples) into
/// a depth frame. Samples beyond the sensor range clamp to
/// [`MAX_DEPTH_MM`].
pub fn read_depth_pgm(bytes: &[u8]) -> Result<DepthFrame, PnmError> {
    let mut cursor = Cursor::new(bytes);
    let (width, height, pixels) = read_header(&mut cursor, b"P5", 65535)?;
    let raster = cursor.take_raster(pixels * 2)?;
    let data: Vec<u16> = raster
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]).min(MAX_DEPTH_MM))
        .collect();
    Ok(DepthFrame::new(height, width, data).expect("clamped samples are in range"))
}

/// Serializes a depth frame as binary 16-bit PGM with the exact header
/// `P5\n<w> <h>\n65535\n`.
pub fn write_depth_pgm(frame: &DepthFrame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", frame.width(), frame.height()).into_bytes();
    out.reserve(frame.data().len() * 2);
    for &v in frame.data() {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

/// Parses a binary 8-bit PPM (`P6`, maxval 255) into an RGB frame.
pub fn read_rgb_ppm(bytes: &[u8]) -> Result<RgbFrame, PnmError> {
    let mut cursor = Cursor::new(bytes);
    let (width, height, pixels) = read_header(&mut cursor, b"P6", 255)?;
    let raster = cursor.take_raster(pixels * 3)?;
    Ok(RgbFrame::new(height, width, raster.to_vec()))
}

/// Serializes an RGB frame as binary PPM with the exact header
/// `P6\n<w> <h>\n255\n`.
pub fn write_rgb_ppm(frame: &RgbFrame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend_from_slice(frame.data());
    out
}
