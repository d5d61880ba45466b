//! Discrete three-class backup controller: the pluggable classifier
//! interface, two desk-scale classifier implementations (a pose oracle for
//! the simulator and a far-field centroid heuristic), the class-to-command
//! mapping, and the auto-labeling sample harvester.

use thiserror::Error;

use crate::control::{CommandSource, ControlCommand};
use crate::depth::BinaryMask;
use crate::sim::{Pose, WorldConfig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FallbackError {
    #[error("classifier implementation cannot produce a prediction")]
    ModelUnavailable,
    #[error("pose is outside the corridor")]
    OutsideCorridor,
    #[error("mask contains no far-field bits")]
    NoFarField,
}

/// Which part of the corridor the camera is pointing at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewClass {
    Left,
    Center,
    Right,
}

impl ViewClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViewClass::Left => "left",
            ViewClass::Center => "center",
            ViewClass::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "left" => Some(ViewClass::Left),
            "center" => Some(ViewClass::Center),
            "right" => Some(ViewClass::Right),
            _ => None,
        }
    }
}

/// Row-major 8-bit RGB image, three interleaved channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbFrame {
    height: usize,
    width: usize,
    data: Vec<u8>,
}

impl RgbFrame {
    pub fn new(height: usize, width: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), height * width * 3, "rgb length mismatch");
        Self {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Mirror around the vertical axis.
    pub fn flipped_horizontal(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for y in 0..self.height {
            for x in (0..self.width).rev() {
                data.extend_from_slice(&self.pixel(x, y));
            }
        }
        Self::new(self.height, self.width, data)
    }
}

/// Normalized, resized model input; values in [0, 1], three channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierInput {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl ClassifierInput {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }
}

/// Contract for drop-in image classifiers (e.g. a trained network): a
/// deterministic mapping from a preprocessed frame to a class and a
/// confidence in [0, 1].
pub trait Classifier {
    fn classify(&self, input: &ClassifierInput) -> Result<(ViewClass, f64), FallbackError>;
}

/// Magnitudes for the discrete backup commands plus the labeling bands.
#[derive(Debug, Clone, PartialEq)]
pub struct FallbackParams {
    pub turn_ang_vel: f64,
    pub turn_lin_vel: f64,
    pub center_lin_vel: f64,
    /// Offsets within this many pixels of center are labeled `Center`.
    /// Specified for the default 640 px frame width; the heuristic rescales
    /// it for other mask widths.
    pub center_band_px: f64,
    /// Half-width in radians of the heading band the pose oracle calls
    /// `Center`.
    pub oracle_center_half_angle: f64,
}

impl Default for FallbackParams {
    fn default() -> Self {
        Self {
            turn_ang_vel: 0.6,
            turn_lin_vel: 0.2,
            center_lin_vel: 0.5,
            center_band_px: 50.0,
            oracle_center_half_angle: 15.0_f64.to_radians(),
        }
    }
}

/// Frame width the default `center_band_px` was calibrated against.
const BAND_REFERENCE_WIDTH: f64 = 640.0;

/// Bilinear resize to `rh` by `rw` with channel values rescaled to [0, 1].
pub fn preprocess_frame(frame: &RgbFrame, rh: usize, rw: usize) -> ClassifierInput {
    assert!(frame.width > 0 && frame.height > 0 && rh > 0 && rw > 0);
    let sx_scale = frame.width as f64 / rw as f64;
    let sy_scale = frame.height as f64 / rh as f64;
    let clamp = |v: i64, hi: usize| v.clamp(0, hi as i64 - 1) as usize;

    let mut data = Vec::with_capacity(rh * rw * 3);
    for y in 0..rh {
        let sy = (y as f64 + 0.5) * sy_scale - 0.5;
        let y0f = sy.floor();
        let fy = sy - y0f;
        let y0 = clamp(y0f as i64, frame.height);
        let y1 = clamp(y0f as i64 + 1, frame.height);
        for x in 0..rw {
            let sx = (x as f64 + 0.5) * sx_scale - 0.5;
            let x0f = sx.floor();
            let fx = sx - x0f;
            let x0 = clamp(x0f as i64, frame.width);
            let x1 = clamp(x0f as i64 + 1, frame.width);
            let a = frame.pixel(x0, y0);
            let b = frame.pixel(x1, y0);
            let c = frame.pixel(x0, y1);
            let d = frame.pixel(x1, y1);
            for ch in 0..3 {
                let top = a[ch] as f64 * (1.0 - fx) + b[ch] as f64 * fx;
                let bot = c[ch] as f64 * (1.0 - fx) + d[ch] as f64 * fx;
                let v = (top * (1.0 - fy) + bot * fy) / 255.0;
                data.push(v as f32);
            }
        }
    }
    ClassifierInput {
        height: rh,
        width: rw,
        data,
    }
}

/// Ground-truth labeling from the simulator pose: the signed heading error
/// against the corridor axis decides the class. Pointing left of the axis
/// (positive error) means the camera faces the left row.
pub fn oracle_classify(
    pose: &Pose,
    world: &WorldConfig,
    params: &FallbackParams,
) -> Result<ViewClass, FallbackError> {
    if pose.y.abs() > world.row_spacing / 2.0 {
        return Err(FallbackError::OutsideCorridor);
    }
    let heading_error = pose.theta;
    Ok(if heading_error.abs() <= params.oracle_center_half_angle {
        ViewClass::Center
    } else if heading_error > 0.0 {
        ViewClass::Left
    } else {
        ViewClass::Right
    })
}

/// Depth-mask stand-in for the image classifier: classifies by the column
/// centroid of the far-field bits.
///
/// A far field displaced to the right means the camera points left of the
/// corridor axis, so a positive centroid offset maps to `Left`. Confidence
/// is the normalized centroid offset (its complement for `Center`).
pub fn heuristic_classify(
    mask: &BinaryMask,
    params: &FallbackParams,
) -> Result<(ViewClass, f64), FallbackError> {
    let (w, h) = (mask.width(), mask.height());
    let mut count = 0u64;
    let mut sum_x = 0u64;
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                count += 1;
                sum_x += x as u64;
            }
        }
    }
    if count == 0 {
        return Err(FallbackError::NoFarField);
    }
    let centroid = sum_x as f64 / count as f64;
    let offset = centroid - (w as f64 - 1.0) / 2.0;
    let band = params.center_band_px * w as f64 / BAND_REFERENCE_WIDTH;
    let norm = (offset.abs() / (w as f64 / 2.0)).clamp(0.0, 1.0);
    let class = classify_offset(offset, band);
    let confidence = match class {
        ViewClass::Center => 1.0 - norm,
        _ => norm,
    };
    Ok((class, confidence))
}

/// Shared sign rule for offset-based labeling: the window (or far-field
/// centroid) sitting right of center means the camera points left.
fn classify_offset(offset: f64, center_band: f64) -> ViewClass {
    if offset.abs() <= center_band {
        ViewClass::Center
    } else if offset > 0.0 {
        ViewClass::Left
    } else {
        ViewClass::Right
    }
}

/// Maps a class to the fixed backup command. Pointing left steers right
/// (negative angular) and vice versa; `Center` drives straight and faster.
pub fn discrete_command(view: ViewClass, params: &FallbackParams) -> ControlCommand {
    let (linear, angular) = match view {
        ViewClass::Center => (params.center_lin_vel, 0.0),
        ViewClass::Left => (params.turn_lin_vel, -params.turn_ang_vel),
        ViewClass::Right => (params.turn_lin_vel, params.turn_ang_vel),
    };
    ControlCommand {
        linear,
        angular,
        source: CommandSource::Fallback,
    }
}

/// Blur score: variance of the 4-neighbor Laplacian over the mean-gray
/// image, with replicated borders. Higher means sharper.
pub fn sharpness_score(frame: &RgbFrame) -> f64 {
    let (w, h) = (frame.width, frame.height);
    let gray: Vec<f64> = (0..h * w)
        .map(|i| {
            let p = &frame.data[i * 3..i * 3 + 3];
            (p[0] as f64 + p[1] as f64 + p[2] as f64) / 3.0
        })
        .collect();
    let at = |x: i64, y: i64| {
        let x = x.clamp(0, w as i64 - 1) as usize;
        let y = y.clamp(0, h as i64 - 1) as usize;
        gray[y * w + x]
    };
    let n = (h * w) as f64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let r = at(x, y - 1) + at(x, y + 1) + at(x - 1, y) + at(x + 1, y) - 4.0 * at(x, y);
            sum += r;
            sum_sq += r * r;
        }
    }
    let mean = sum / n;
    sum_sq / n - mean * mean
}

/// Harvested training sample still holding its frame; persisting it to disk
/// turns it into a [`LabeledSample`] manifest row.
#[derive(Debug, Clone)]
pub struct HarvestedSample {
    pub rgb: RgbFrame,
    pub label: ViewClass,
    pub offset_px: f64,
    pub sharpness: f64,
    pub timestamp: f64,
}

/// One row of the labeled-sample manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub path: String,
    pub label: ViewClass,
    pub offset_px: f64,
    pub sharpness: f64,
    pub timestamp: f64,
}

/// Collects synchronized RGB frames and lateral offsets, and emits the
/// sharpest frame of every window as an auto-labeled sample.
///
/// Frames whose depth detection failed carry no offset and are never
/// selected; a window without any usable frame yields nothing.
pub struct SampleHarvester {
    window: usize,
    center_band_px: f64,
    buffer: Vec<(RgbFrame, Option<f64>, f64)>,
}

impl SampleHarvester {
    pub fn new(params: &FallbackParams, window: usize) -> Self {
        assert!(window >= 1);
        Self {
            window,
            center_band_px: params.center_band_px,
            buffer: Vec::with_capacity(window),
        }
    }

    /// Buffers one frame; on every `window`-th push, drains the buffer and
    /// returns the selected sample, if any frame had a detection.
    pub fn push(
        &mut self,
        rgb: RgbFrame,
        offset: Option<f64>,
        timestamp: f64,
    ) -> Option<HarvestedSample> {
        self.buffer.push((rgb, offset, timestamp));
        if self.buffer.len() < self.window {
            return None;
        }
        let frames = std::mem::take(&mut self.buffer);
        frames
            .into_iter()
            .filter_map(|(rgb, offset, t)| offset.map(|d| (rgb, d, t)))
            .map(|(rgb, d, t)| {
                let sharpness = sharpness_score(&rgb);
                (sharpness, rgb, d, t)
            })
            .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .map(|(sharpness, rgb, offset_px, timestamp)| HarvestedSample {
                label: classify_offset(offset_px, self.center_band_px),
                rgb,
                offset_px,
                sharpness,
                timestamp,
            })
    }
}
