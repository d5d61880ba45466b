//! Flat `key = value` configuration covering every tunable parameter, with
//! documented defaults so an empty file is a valid config.

use thiserror::Error;

use crate::control::ControllerParams;
use crate::depth::DepthPipelineParams;
use crate::fallback::FallbackParams;
use crate::sim::{
    ClassifierChoice, CorruptionParams, CorruptionWindow, EpisodeConfig, Hole, Intrinsics,
    Obstacle, Pose, Scenario, WallSide, WorldConfig,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected 'key = value'")]
    Malformed { line: usize },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: value for '{key}' is not a valid {expected}")]
    TypeMismatch {
        line: usize,
        key: String,
        expected: &'static str,
    },
}

/// All parameters, flat. Fields that default to a derived value (the window
/// area threshold, the intrinsics at non-native resolutions) stay `None`
/// until set explicitly, spelled `auto` in the file format.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    // pipeline.*
    pub t_distance: f64,
    pub t_area: Option<u32>,
    pub stop_distance_mm: u16,
    pub stop_fraction: f64,
    pub stop_roi_fraction: f64,
    // controller.*
    pub max_lin_vel: f64,
    pub max_ang_vel: f64,
    pub engage_count: u32,
    pub release_count: u32,
    // fallback.*
    pub turn_lin_vel: f64,
    pub turn_ang_vel: f64,
    pub center_lin_vel: f64,
    pub center_band_px: f64,
    pub oracle_half_angle_rad: f64,
    // camera.*
    pub camera_width: usize,
    pub camera_height_px: usize,
    pub fx: Option<f64>,
    pub fy: Option<f64>,
    pub ppx: Option<f64>,
    pub ppy: Option<f64>,
    pub max_range_mm: u16,
    pub mount_height: f64,
    // world.*
    pub row_length: f64,
    pub row_spacing: f64,
    pub wall_height: f64,
    pub ground_plane: bool,
    pub holes: Vec<Hole>,
    pub obstacles: Vec<Obstacle>,
    // corruption.*
    pub dropout_rate: f64,
    pub saturation_rate: f64,
    pub saturation_value_mm: u16,
    pub blob_count: u32,
    pub blob_radius: u32,
    pub corruption_seed: u64,
    pub corruption_start_s: f64,
    pub corruption_end_s: f64,
    // episode.*
    pub dt: f64,
    pub max_steps: u32,
    pub start_x: f64,
    pub start_y: f64,
    pub start_theta: f64,
    pub classifier: ClassifierChoice,
    pub robot_radius: f64,
    pub episode_count: u32,
    pub stop_hold_steps: u32,
    // harvest.*
    pub harvest_window: u32,
}

impl Default for Config {
    fn default() -> Self {
        let pipeline = DepthPipelineParams::default();
        let controller = ControllerParams::default();
        let fb = FallbackParams::default();
        let world = WorldConfig::default();
        let episode = EpisodeConfig::default();
        let corruption = CorruptionParams::default();
        Self {
            t_distance: pipeline.t_distance as f64,
            t_area: None,
            stop_distance_mm: pipeline.stop_distance_mm,
            stop_fraction: pipeline.stop_fraction,
            stop_roi_fraction: pipeline.stop_roi_fraction,
            max_lin_vel: controller.max_lin_vel,
            max_ang_vel: controller.max_ang_vel,
            engage_count: controller.fallback_engage_count,
            release_count: controller.fallback_release_count,
            turn_lin_vel: fb.turn_lin_vel,
            turn_ang_vel: fb.turn_ang_vel,
            center_lin_vel: fb.center_lin_vel,
            center_band_px: fb.center_band_px,
            oracle_half_angle_rad: fb.oracle_center_half_angle,
            camera_width: 640,
            camera_height_px: 480,
            fx: None,
            fy: None,
            ppx: None,
            ppy: None,
            max_range_mm: 8000,
            mount_height: episode.camera_height,
            row_length: world.row_length,
            row_spacing: world.row_spacing,
            wall_height: world.wall_height,
            ground_plane: world.ground_plane,
            holes: Vec::new(),
            obstacles: Vec::new(),
            dropout_rate: corruption.dropout_rate,
            saturation_rate: corruption.saturation_rate,
            saturation_value_mm: corruption.saturation_value_mm,
            blob_count: corruption.blob_count,
            blob_radius: corruption.blob_radius,
            corruption_seed: corruption.seed,
            corruption_start_s: 0.0,
            corruption_end_s: 0.0,
            dt: episode.dt,
            max_steps: episode.max_steps,
            start_x: 0.0,
            start_y: 0.0,
            start_theta: 0.0,
            classifier: ClassifierChoice::Oracle,
            robot_radius: episode.robot_radius,
            episode_count: 5,
            stop_hold_steps: episode.stop_hold_steps,
            harvest_window: 6,
        }
    }
}

impl Config {
    /// Camera model: explicit values win, otherwise the native calibration
    /// is rescaled to the configured resolution.
    pub fn intrinsics(&self) -> Intrinsics {
        let base = Intrinsics::default();
        let sx = self.camera_width as f64 / base.width as f64;
        let sy = self.camera_height_px as f64 / base.height as f64;
        Intrinsics {
            width: self.camera_width,
            height: self.camera_height_px,
            fx: self.fx.unwrap_or(base.fx * sx),
            fy: self.fy.unwrap_or(base.fy * sy),
            ppx: self.ppx.unwrap_or(base.ppx * sx),
            ppy: self.ppy.unwrap_or(base.ppy * sy),
            max_range_mm: self.max_range_mm,
        }
    }

    /// Pipeline thresholds; an unset area threshold resolves to 1% of the
    /// camera frame pixels.
    pub fn pipeline_params(&self) -> DepthPipelineParams {
        let auto = ((self.camera_width * self.camera_height_px) as f64 * 0.01).ceil() as usize;
        DepthPipelineParams {
            t_distance: self.t_distance as f32,
            t_area: self.t_area.map(|a| a as usize).unwrap_or(auto),
            stop_distance_mm: self.stop_distance_mm,
            stop_fraction: self.stop_fraction,
            stop_roi_fraction: self.stop_roi_fraction,
        }
    }

    pub fn controller_params(&self) -> ControllerParams {
        ControllerParams {
            max_lin_vel: self.max_lin_vel,
            max_ang_vel: self.max_ang_vel,
            frame_width: self.camera_width,
            fallback_engage_count: self.engage_count,
            fallback_release_count: self.release_count,
        }
    }

    pub fn fallback_params(&self) -> FallbackParams {
        FallbackParams {
            turn_ang_vel: self.turn_ang_vel,
            turn_lin_vel: self.turn_lin_vel,
            center_lin_vel: self.center_lin_vel,
            center_band_px: self.center_band_px,
            oracle_center_half_angle: self.oracle_half_angle_rad,
        }
    }

    pub fn world(&self) -> WorldConfig {
        WorldConfig {
            row_length: self.row_length,
            row_spacing: self.row_spacing,
            wall_height: self.wall_height,
            holes: self.holes.clone(),
            obstacles: self.obstacles.clone(),
            ground_plane: self.ground_plane,
        }
    }

    /// The single corruption window the file format can express, when it is
    /// non-empty.
    pub fn corruption_window(&self) -> Option<CorruptionWindow> {
        let params = CorruptionParams {
            dropout_rate: self.dropout_rate,
            saturation_rate: self.saturation_rate,
            saturation_value_mm: self.saturation_value_mm,
            blob_count: self.blob_count,
            blob_radius: self.blob_radius,
            seed: self.corruption_seed,
        };
        let active =
            params.dropout_rate > 0.0 || params.saturation_rate > 0.0 || params.blob_count > 0;
        (active && self.corruption_end_s > self.corruption_start_s).then_some(CorruptionWindow {
            start_s: self.corruption_start_s,
            end_s: self.corruption_end_s,
            params,
        })
    }

    pub fn episode_config(&self) -> EpisodeConfig {
        EpisodeConfig {
            dt: self.dt,
            max_steps: self.max_steps,
            start: Pose::new(self.start_x, self.start_y, self.start_theta),
            robot_radius: self.robot_radius,
            camera_height: self.mount_height,
            classifier: self.classifier,
            corruption: self.corruption_window().into_iter().collect(),
            stop_hold_steps: self.stop_hold_steps,
        }
    }

    /// Assembles the full closed-loop scenario.
    pub fn scenario(&self) -> Scenario {
        Scenario {
            world: self.world(),
            intrinsics: self.intrinsics(),
            pipeline: self.pipeline_params(),
            controller: self.controller_params(),
            fallback: self.fallback_params(),
            episode: self.episode_config(),
        }
    }

    /// Serializes every key; `parse_config` on the output reproduces the
    /// config exactly.
    pub fn to_text(&self) -> String {
        let opt_f64 = |v: Option<f64>| v.map_or("auto".to_string(), |x| x.to_string());
        let opt_u32 = |v: Option<u32>| v.map_or("auto".to_string(), |x| x.to_string());
        let mut s = String::new();
        let mut push = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        push("pipeline.t_distance", self.t_distance.to_string());
        push("pipeline.t_area", opt_u32(self.t_area));
        push("pipeline.stop_distance_mm", self.stop_distance_mm.to_string());
        push("pipeline.stop_fraction", self.stop_fraction.to_string());
        push("pipeline.stop_roi_fraction", self.stop_roi_fraction.to_string());
        push("controller.max_lin_vel", self.max_lin_vel.to_string());
        push("controller.max_ang_vel", self.max_ang_vel.to_string());
        push("controller.engage_count", self.engage_count.to_string());
        push("controller.release_count", self.release_count.to_string());
        push("fallback.turn_lin_vel", self.turn_lin_vel.to_string());
        push("fallback.turn_ang_vel", self.turn_ang_vel.to_string());
        push("fallback.center_lin_vel", self.center_lin_vel.to_string());
        push("fallback.center_band_px", self.center_band_px.to_string());
        push(
            "fallback.oracle_half_angle_rad",
            self.oracle_half_angle_rad.to_string(),
        );
        push("camera.width", self.camera_width.to_string());
        push("camera.height", self.camera_height_px.to_string());
        push("camera.fx", opt_f64(self.fx));
        push("camera.fy", opt_f64(self.fy));
        push("camera.ppx", opt_f64(self.ppx));
        push("camera.ppy", opt_f64(self.ppy));
        push("camera.max_range_mm", self.max_range_mm.to_string());
        push("camera.mount_height", self.mount_height.to_string());
        push("world.row_length", self.row_length.to_string());
        push("world.row_spacing", self.row_spacing.to_string());
        push("world.wall_height", self.wall_height.to_string());
        push("world.ground_plane", self.ground_plane.to_string());
        push("world.holes", holes_to_string(&self.holes));
        push("world.obstacles", obstacles_to_string(&self.obstacles));
        push("corruption.dropout_rate", self.dropout_rate.to_string());
        push("corruption.saturation_rate", self.saturation_rate.to_string());
        push(
            "corruption.saturation_value_mm",
            self.saturation_value_mm.to_string(),
        );
        push("corruption.blob_count", self.blob_count.to_string());
        push("corruption.blob_radius", self.blob_radius.to_string());
        push("corruption.seed", self.corruption_seed.to_string());
        push("corruption.start_s", self.corruption_start_s.to_string());
        push("corruption.end_s", self.corruption_end_s.to_string());
        push("episode.dt", self.dt.to_string());
        push("episode.max_steps", self.max_steps.to_string());
        push("episode.start_x", self.start_x.to_string());
        push("episode.start_y", self.start_y.to_string());
        push("episode.start_theta", self.start_theta.to_string());
        push("episode.classifier", classifier_to_string(self.classifier));
        push("episode.robot_radius", self.robot_radius.to_string());
        push("episode.count", self.episode_count.to_string());
        push("episode.stop_hold_steps", self.stop_hold_steps.to_string());
        push("harvest.window", self.harvest_window.to_string());
        s
    }
}

fn classifier_to_string(c: ClassifierChoice) -> String {
    match c {
        ClassifierChoice::None => "none",
        ClassifierChoice::Oracle => "oracle",
        ClassifierChoice::Heuristic => "heuristic",
    }
    .to_string()
}

fn holes_to_string(holes: &[Hole]) -> String {
    holes
        .iter()
        .map(|h| {
            let side = match h.side {
                WallSide::Left => "left",
                WallSide::Right => "right",
            };
            format!("{side}:{}:{}:{}", h.start, h.length, h.height)
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn obstacles_to_string(obstacles: &[Obstacle]) -> String {
    obstacles
        .iter()
        .map(|o| format!("{}:{}:{}:{}", o.x, o.lateral, o.radius, o.height))
        .collect::<Vec<_>>()
        .join(",")
}

struct Field<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Field<'_> {
    fn mismatch(&self, expected: &'static str) -> ConfigError {
        ConfigError::TypeMismatch {
            line: self.line,
            key: self.key.to_string(),
            expected,
        }
    }

    fn f64(&self) -> Result<f64, ConfigError> {
        self.value.parse().map_err(|_| self.mismatch("number"))
    }

    fn u16(&self) -> Result<u16, ConfigError> {
        self.value.parse().map_err(|_| self.mismatch("integer"))
    }

    fn u32(&self) -> Result<u32, ConfigError> {
        self.value.parse().map_err(|_| self.mismatch("integer"))
    }

    fn u64(&self) -> Result<u64, ConfigError> {
        self.value.parse().map_err(|_| self.mismatch("integer"))
    }

    fn usize(&self) -> Result<usize, ConfigError> {
        self.value.parse().map_err(|_| self.mismatch("integer"))
    }

    fn bool(&self) -> Result<bool, ConfigError> {
        match self.value {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(self.mismatch("boolean (true/false)")),
        }
    }

    fn opt_f64(&self) -> Result<Option<f64>, ConfigError> {
        if self.value == "auto" {
            Ok(None)
        } else {
            self.f64().map(Some)
        }
    }

    fn opt_u32(&self) -> Result<Option<u32>, ConfigError> {
        if self.value == "auto" {
            Ok(None)
        } else {
            self.u32().map(Some)
        }
    }

    fn classifier(&self) -> Result<ClassifierChoice, ConfigError> {
        match self.value {
            "none" => Ok(ClassifierChoice::None),
            "oracle" => Ok(ClassifierChoice::Oracle),
            "heuristic" => Ok(ClassifierChoice::Heuristic),
            _ => Err(self.mismatch("classifier (none/oracle/heuristic)")),
        }
    }

    fn holes(&self) -> Result<Vec<Hole>, ConfigError> {
        if self.value.is_empty() {
            return Ok(Vec::new());
        }
        self.value
            .split(',')
            .map(|spec| {
                let parts: Vec<&str> = spec.split(':').collect();
                if parts.len() != 4 {
                    return Err(self.mismatch("hole list (side:start:length:height,...)"));
                }
                let side = match parts[0] {
                    "left" => WallSide::Left,
                    "right" => WallSide::Right,
                    _ => return Err(self.mismatch("hole side (left/right)")),
                };
                let nums: Result<Vec<f64>, _> =
                    parts[1..].iter().map(|p| p.parse::<f64>()).collect();
                let nums = nums
                    .map_err(|_| self.mismatch("hole list (side:start:length:height,...)"))?;
                Ok(Hole {
                    side,
                    start: nums[0],
                    length: nums[1],
                    height: nums[2],
                })
            })
            .collect()
    }

    fn obstacles(&self) -> Result<Vec<Obstacle>, ConfigError> {
        if self.value.is_empty() {
            return Ok(Vec::new());
        }
        self.value
            .split(',')
            .map(|spec| {
                let nums: Result<Vec<f64>, _> =
                    spec.split(':').map(|p| p.parse::<f64>()).collect();
                let nums = nums
                    .map_err(|_| self.mismatch("obstacle list (x:lateral:radius:height,...)"))?;
                if nums.len() != 4 {
                    return Err(self.mismatch("obstacle list (x:lateral:radius:height,...)"));
                }
                Ok(Obstacle {
                    x: nums[0],
                    lateral: nums[1],
                    radius: nums[2],
                    height: nums[3],
                })
            })
            .collect()
    }
}

/// Parses line-oriented `key = value` text with `#` comments. Every key has
/// a default, unknown keys are rejected, and type errors carry the line
/// number.
pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut cfg = Config::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or(ConfigError::Malformed { line })?;
        let field = Field {
            line,
            key: key.trim(),
            value: value.trim(),
        };
        match field.key {
            "pipeline.t_distance" => cfg.t_distance = field.f64()?,
            "pipeline.t_area" => cfg.t_area = field.opt_u32()?,
            "pipeline.stop_distance_mm" => cfg.stop_distance_mm = field.u16()?,
            "pipeline.stop_fraction" => cfg.stop_fraction = field.f64()?,
            "pipeline.stop_roi_fraction" => cfg.stop_roi_fraction = field.f64()?,
            "controller.max_lin_vel" => cfg.max_lin_vel = field.f64()?,
            "controller.max_ang_vel" => cfg.max_ang_vel = field.f64()?,
            "controller.engage_count" => cfg.engage_count = field.u32()?,
            "controller.release_count" => cfg.release_count = field.u32()?,
            "fallback.turn_lin_vel" => cfg.turn_lin_vel = field.f64()?,
            "fallback.turn_ang_vel" => cfg.turn_ang_vel = field.f64()?,
            "fallback.center_lin_vel" => cfg.center_lin_vel = field.f64()?,
            "fallback.center_band_px" => cfg.center_band_px = field.f64()?,
            "fallback.oracle_half_angle_rad" => cfg.oracle_half_angle_rad = field.f64()?,
            "camera.width" => cfg.camera_width = field.usize()?,
            "camera.height" => cfg.camera_height_px = field.usize()?,
            "camera.fx" => cfg.fx = field.opt_f64()?,
            "camera.fy" => cfg.fy = field.opt_f64()?,
            "camera.ppx" => cfg.ppx = field.opt_f64()?,
            "camera.ppy" => cfg.ppy = field.opt_f64()?,
            "camera.max_range_mm" => cfg.max_range_mm = field.u16()?,
            "camera.mount_height" => cfg.mount_height = field.f64()?,
            "world.row_length" => cfg.row_length = field.f64()?,
            "world.row_spacing" => cfg.row_spacing = field.f64()?,
            "world.wall_height" => cfg.wall_height = field.f64()?,
            "world.ground_plane" => cfg.ground_plane = field.bool()?,
            "world.holes" => cfg.holes = field.holes()?,
            "world.obstacles" => cfg.obstacles = field.obstacles()?,
            "corruption.dropout_rate" => cfg.dropout_rate = field.f64()?,
            "corruption.saturation_rate" => cfg.saturation_rate = field.f64()?,
            "corruption.saturation_value_mm" => cfg.saturation_value_mm = field.u16()?,
            "corruption.blob_count" => cfg.blob_count = field.u32()?,
            "corruption.blob_radius" => cfg.blob_radius = field.u32()?,
            "corruption.seed" => cfg.corruption_seed = field.u64()?,
            "corruption.start_s" => cfg.corruption_start_s = field.f64()?,
            "corruption.end_s" => cfg.corruption_end_s = field.f64()?,
            "episode.dt" => cfg.dt = field.f64()?,
            "episode.max_steps" => cfg.max_steps = field.u32()?,
            "episode.start_x" => cfg.start_x = field.f64()?,
            "episode.start_y" => cfg.start_y = field.f64()?,
            "episode.start_theta" => cfg.start_theta = field.f64()?,
            "episode.classifier" => cfg.classifier = field.classifier()?,
            "episode.robot_radius" => cfg.robot_radius = field.f64()?,
            "episode.count" => cfg.episode_count = field.u32()?,
            "episode.stop_hold_steps" => cfg.stop_hold_steps = field.u32()?,
            "harvest.window" => cfg.harvest_window = field.u32()?,
            other => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: other.to_string(),
                })
            }
        }
    }
    Ok(cfg)
}
