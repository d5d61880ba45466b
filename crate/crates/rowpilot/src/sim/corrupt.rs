//! Failure injection for depth frames: random dropout, glare saturation,
//! and saturation blobs.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::depth::DepthFrame;

/// Corruption model parameters. Everything is driven by `seed`, so a given
/// parameter set always produces the same output for the same input.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionParams {
    /// Per-pixel probability of losing the return entirely (value 0).
    pub dropout_rate: f64,
    /// Per-pixel probability of glare forcing the near `saturation_value_mm`.
    pub saturation_rate: f64,
    /// Depth written by saturation, millimeters.
    pub saturation_value_mm: u16,
    /// Number of saturated disks splattered over the frame.
    pub blob_count: u32,
    /// Radius of each saturated disk, pixels.
    pub blob_radius: u32,
    pub seed: u64,
}

impl Default for CorruptionParams {
    fn default() -> Self {
        Self {
            dropout_rate: 0.0,
            saturation_rate: 0.0,
            saturation_value_mm: 200,
            blob_count: 0,
            blob_radius: 20,
            seed: 0,
        }
    }
}

/// Time window of an episode during which a corruption model applies.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionWindow {
    pub start_s: f64,
    pub end_s: f64,
    pub params: CorruptionParams,
}

/// Applies dropout, per-pixel saturation, and saturation blobs. Pixels are
/// visited row-major with one uniform draw each, then blob centers are
/// drawn, so identical seeds give bit-identical frames.
pub fn corrupt(frame: &DepthFrame, params: &CorruptionParams) -> DepthFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut out = frame.clone();
    let (w, h) = (out.width(), out.height());
    let sat = params.saturation_value_mm;
    let both = params.dropout_rate + params.saturation_rate;
    {
        let data = out.data_mut();
        for v in data.iter_mut() {
            let u: f64 = rng.gen();
            if u < params.dropout_rate {
                *v = 0;
            } else if u < both {
                *v = sat;
            }
        }
    }
    let r = params.blob_radius as i64;
    for _ in 0..params.blob_count {
        let cx = rng.gen_range(0..w) as i64;
        let cy = rng.gen_range(0..h) as i64;
        let data = out.data_mut();
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy > r * r {
                    continue;
                }
                let x = cx + dx;
                let y = cy + dy;
                if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
                    continue;
                }
                data[y as usize * w + x as usize] = sat;
            }
        }
    }
    out
}
