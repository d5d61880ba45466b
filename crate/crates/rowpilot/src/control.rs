//! Proportional velocity control from the detected window, plus the arbiter
//! that hands control between the depth pipeline, the discrete fallback, and
//! the emergency stop.

use thiserror::Error;

use crate::depth::{check_obstacle, detect_row_end, DepthFrame, DepthPipelineParams, Detection};
use crate::fallback::{discrete_command, FallbackParams, ViewClass};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ControlError {
    /// The depth pipeline failed and no classifier is configured; the caller
    /// must stop the platform.
    #[error("depth detection failed and no classifier is available")]
    ClassifierUnavailable,
}

/// Velocity limits and frame geometry for the control law.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerParams {
    pub max_lin_vel: f64,
    pub max_ang_vel: f64,
    /// Frame width in pixels, the `w` of the parabolic law.
    pub frame_width: usize,
    /// Consecutive depth failures before the arbiter latches fallback mode.
    pub fallback_engage_count: u32,
    /// Consecutive depth successes before control returns to the depth path.
    pub fallback_release_count: u32,
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            max_lin_vel: 1.0,
            max_ang_vel: 1.0,
            frame_width: 640,
            fallback_engage_count: 3,
            fallback_release_count: 5,
        }
    }
}

/// Which layer produced a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandSource {
    Depth,
    Fallback,
    EmergencyStop,
}

impl CommandSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandSource::Depth => "Depth",
            CommandSource::Fallback => "Fallback",
            CommandSource::EmergencyStop => "EmergencyStop",
        }
    }
}

/// Velocity command for the platform. Positive angular is counterclockwise
/// (left) in a z-up frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlCommand {
    pub linear: f64,
    pub angular: f64,
    pub source: CommandSource,
}

impl ControlCommand {
    pub fn stop() -> Self {
        Self {
            linear: 0.0,
            angular: 0.0,
            source: CommandSource::EmergencyStop,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArbiterMode {
    Depth,
    Fallback,
}

/// Hysteresis state carried between arbiter steps. Callers own sequencing;
/// the arbiter itself holds no hidden state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArbiterState {
    pub consecutive_depth_failures: u32,
    pub consecutive_depth_successes: u32,
    pub mode: ArbiterMode,
}

impl Default for ArbiterState {
    fn default() -> Self {
        Self {
            consecutive_depth_failures: 0,
            consecutive_depth_successes: 0,
            mode: ArbiterMode::Depth,
        }
    }
}

/// Signed horizontal distance in pixels between the window center and the
/// frame center. Positive means the window sits right of center.
pub fn lateral_offset(det: &Detection, frame_width: usize) -> f64 {
    det.center_x - frame_width as f64 / 2.0
}

/// Parabolic steering: zero when the window is centered, full rate at the
/// frame edge, always turning toward the window (right of center turns
/// clockwise, i.e. negative).
pub fn angular_velocity(d: f64, params: &ControllerParams) -> f64 {
    let half = params.frame_width as f64 / 2.0;
    let q = (d / half).powi(2);
    if d >= 0.0 {
        -params.max_ang_vel * q
    } else {
        params.max_ang_vel * q
    }
}

/// Parabolic throttle: maximal when the window is centered, zero at the
/// frame edge.
pub fn linear_velocity(d: f64, params: &ControllerParams) -> f64 {
    let half = params.frame_width as f64 / 2.0;
    params.max_lin_vel * (1.0 - (d / half).powi(2))
}

fn depth_command(d: f64, params: &ControllerParams) -> ControlCommand {
    ControlCommand {
        linear: linear_velocity(d, params),
        angular: angular_velocity(d, params),
        source: CommandSource::Depth,
    }
}

/// Result of one arbiter step: the command, the updated hysteresis state,
/// and the lateral offset when the depth path produced a detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArbiterStep {
    pub command: ControlCommand,
    pub state: ArbiterState,
    pub offset: Option<f64>,
}

/// One control decision for one frame.
///
/// The obstacle check overrides everything; otherwise a detection drives the
/// depth controller while the arbiter is in depth mode, and the discrete
/// fallback command covers every other case. Mode transitions are counted:
/// `fallback_engage_count` consecutive failures latch fallback mode,
/// `fallback_release_count` consecutive successes release it (an engage
/// count of 1 recovers plain per-frame switching).
pub fn arbiter_step(
    frame: &DepthFrame,
    view: Option<ViewClass>,
    state: ArbiterState,
    params: &ControllerParams,
    pipeline: &DepthPipelineParams,
    fallback: &FallbackParams,
) -> Result<(ControlCommand, ArbiterState), ControlError> {
    arbiter_step_detailed(frame, view, state, params, pipeline, fallback)
        .map(|step| (step.command, step.state))
}

/// Like [`arbiter_step`] but also reports the lateral offset used by the
/// depth path, which closed-loop logs want without recomputing the pipeline.
pub fn arbiter_step_detailed(
    frame: &DepthFrame,
    view: Option<ViewClass>,
    mut state: ArbiterState,
    params: &ControllerParams,
    pipeline: &DepthPipelineParams,
    fallback: &FallbackParams,
) -> Result<ArbiterStep, ControlError> {
    if check_obstacle(frame, pipeline) {
        state.consecutive_depth_failures = 0;
        state.consecutive_depth_successes = 0;
        return Ok(ArbiterStep {
            command: ControlCommand::stop(),
            state,
            offset: None,
        });
    }

    // The live frame width is the authoritative `w`; a mismatch with the
    // configured width is a configuration error.
    debug_assert_eq!(frame.width(), params.frame_width);
    let detection = detect_row_end(frame, pipeline);

    let fallback_command = |view: Option<ViewClass>| {
        view.map(|v| discrete_command(v, fallback))
            .ok_or(ControlError::ClassifierUnavailable)
    };

    match detection {
        Some(det) => {
            state.consecutive_depth_successes += 1;
            state.consecutive_depth_failures = 0;
            if state.mode == ArbiterMode::Fallback
                && state.consecutive_depth_successes >= params.fallback_release_count
            {
                state.mode = ArbiterMode::Depth;
                state.consecutive_depth_successes = 0;
            }
            let d = lateral_offset(&det, frame.width());
            if state.mode == ArbiterMode::Depth {
                Ok(ArbiterStep {
                    command: depth_command(d, params),
                    state,
                    offset: Some(d),
                })
            } else {
                Ok(ArbiterStep {
                    command: fallback_command(view)?,
                    state,
                    offset: Some(d),
                })
            }
        }
        None => {
            state.consecutive_depth_failures += 1;
            state.consecutive_depth_successes = 0;
            if state.mode == ArbiterMode::Depth
                && state.consecutive_depth_failures >= params.fallback_engage_count
            {
                state.mode = ArbiterMode::Fallback;
                state.consecutive_depth_failures = 0;
            }
            Ok(ArbiterStep {
                command: fallback_command(view)?,
                state,
                offset: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depth::DepthFrame;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn fig3_params() -> ControllerParams {
        ControllerParams::default() // 640 px, 1 m/s, 1 rad/s
    }

    #[test]
    fn lateral_offset_is_center_relative() {
        let det = |cx: f64| crate::depth::Detection {
            window: crate::depth::ComponentBox {
                x_min: 0,
                y_min: 0,
                x_max: 0,
                y_max: 0,
            },
            center_x: cx,
        };
        assert_eq!(lateral_offset(&det(320.0), 640), 0.0);
        assert_eq!(lateral_offset(&det(640.0), 640), 320.0);
        assert_eq!(lateral_offset(&det(160.0), 640), -160.0);
    }

    #[test]
    fn angular_curve_hits_published_points() {
        let p = fig3_params();
        assert_eq!(angular_velocity(0.0, &p), 0.0);
        assert!((angular_velocity(320.0, &p) + 1.0).abs() < 1e-12);
        assert!((angular_velocity(160.0, &p) + 0.25).abs() < 1e-12);
        assert!((angular_velocity(-320.0, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_curve_hits_published_points() {
        let p = fig3_params();
        assert!((linear_velocity(0.0, &p) - 1.0).abs() < 1e-12);
        assert_eq!(linear_velocity(320.0, &p), 0.0);
        assert_eq!(linear_velocity(-320.0, &p), 0.0);
        assert!((linear_velocity(160.0, &p) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn angular_is_odd_and_even_in_magnitude() {
        let p = fig3_params();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let d = rng.gen_range(-320.0..=320.0);
            if d == 0.0 {
                continue;
            }
            let w = angular_velocity(d, &p);
            assert_eq!(angular_velocity(-d, &p), -w);
            if d > 0.0 {
                assert!(w < 0.0, "window right of center must steer clockwise");
            }
        }
    }

    #[test]
    fn commands_saturate_at_configured_maxima() {
        let p = ControllerParams {
            max_lin_vel: 0.7,
            max_ang_vel: 1.3,
            ..fig3_params()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..1000 {
            let d = rng.gen_range(-320.0..=320.0);
            assert!(linear_velocity(d, &p).abs() <= p.max_lin_vel + 1e-12);
            assert!(angular_velocity(d, &p).abs() <= p.max_ang_vel + 1e-12);
        }
    }

    /// A frame the pipeline cannot use (single far pixel, below any sane
    /// area threshold) that still has plenty of valid, non-near depth.
    fn corrupted_frame() -> DepthFrame {
        let mut data = vec![3000u16; 64 * 64];
        data[0] = 8000;
        DepthFrame::new(64, 64, data).unwrap()
    }

    /// A frame with an obvious centered far-field window.
    fn clean_frame() -> DepthFrame {
        let mut data = vec![1000u16; 64 * 64];
        for y in 8..56 {
            for x in 24..40 {
                data[y * 64 + x] = 8000;
            }
        }
        DepthFrame::new(64, 64, data).unwrap()
    }

    /// Everything in the central ROI is close.
    fn obstacle_frame() -> DepthFrame {
        DepthFrame::filled(64, 64, 300)
    }

    fn small_params() -> (ControllerParams, DepthPipelineParams, FallbackParams) {
        (
            ControllerParams {
                frame_width: 64,
                ..ControllerParams::default()
            },
            DepthPipelineParams::for_frame_size(64, 64),
            FallbackParams::default(),
        )
    }

    #[test]
    fn obstacle_overrides_everything() {
        let (cp, pp, fp) = small_params();
        for mode in [ArbiterMode::Depth, ArbiterMode::Fallback] {
            let state = ArbiterState {
                consecutive_depth_failures: 2,
                consecutive_depth_successes: 1,
                mode,
            };
            let (cmd, next) = arbiter_step(
                &obstacle_frame(),
                Some(ViewClass::Center),
                state,
                &cp,
                &pp,
                &fp,
            )
            .unwrap();
            assert_eq!(cmd, ControlCommand::stop());
            assert_eq!(next.mode, mode);
            assert_eq!(next.consecutive_depth_failures, 0);
            assert_eq!(next.consecutive_depth_successes, 0);
        }
    }

    #[test]
    fn obstacle_stop_holds_over_random_states() {
        let (cp, pp, fp) = small_params();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let state = ArbiterState {
                consecutive_depth_failures: rng.gen_range(0..10),
                consecutive_depth_successes: rng.gen_range(0..10),
                mode: if rng.gen_bool(0.5) {
                    ArbiterMode::Depth
                } else {
                    ArbiterMode::Fallback
                },
            };
            let view = match rng.gen_range(0..4) {
                0 => None,
                1 => Some(ViewClass::Left),
                2 => Some(ViewClass::Center),
                _ => Some(ViewClass::Right),
            };
            let (cmd, _) = arbiter_step(&obstacle_frame(), view, state, &cp, &pp, &fp).unwrap();
            assert_eq!(cmd.source, CommandSource::EmergencyStop);
            assert_eq!((cmd.linear, cmd.angular), (0.0, 0.0));
        }
    }

    #[test]
    fn clean_frame_drives_the_depth_path() {
        let (cp, pp, fp) = small_params();
        let (cmd, state) = arbiter_step(
            &clean_frame(),
            None,
            ArbiterState::default(),
            &cp,
            &pp,
            &fp,
        )
        .unwrap();
        assert_eq!(cmd.source, CommandSource::Depth);
        // Window spans columns 24..=39, center 31.5, frame center 32.
        assert!(cmd.angular.abs() <= cp.max_ang_vel * (1.0f64 / 32.0).powi(2) + 1e-12);
        assert_eq!(state.consecutive_depth_successes, 1);
    }

    #[test]
    fn engage_count_latches_fallback_mode() {
        let (cp, pp, fp) = small_params();
        let mut state = ArbiterState::default();
        for step in 1..=3 {
            let (cmd, next) = arbiter_step(
                &corrupted_frame(),
                Some(ViewClass::Center),
                state,
                &cp,
                &pp,
                &fp,
            )
            .unwrap();
            assert_eq!(cmd.source, CommandSource::Fallback);
            state = next;
            if step < 3 {
                assert_eq!(state.mode, ArbiterMode::Depth);
            }
        }
        assert_eq!(state.mode, ArbiterMode::Fallback);
    }

    #[test]
    fn release_count_restores_depth_mode() {
        let (cp, pp, fp) = small_params();
        let mut state = ArbiterState {
            mode: ArbiterMode::Fallback,
            ..ArbiterState::default()
        };
        for step in 1..=5 {
            let (cmd, next) = arbiter_step(
                &clean_frame(),
                Some(ViewClass::Center),
                state,
                &cp,
                &pp,
                &fp,
            )
            .unwrap();
            state = next;
            if step < 5 {
                assert_eq!(cmd.source, CommandSource::Fallback, "step {step}");
                assert_eq!(state.mode, ArbiterMode::Fallback);
            } else {
                assert_eq!(cmd.source, CommandSource::Depth);
                assert_eq!(state.mode, ArbiterMode::Depth);
            }
        }
    }

    #[test]
    fn single_failure_in_depth_mode_does_not_latch() {
        let (cp, pp, fp) = small_params();
        let (_, after_fail) = arbiter_step(
            &corrupted_frame(),
            Some(ViewClass::Center),
            ArbiterState::default(),
            &cp,
            &pp,
            &fp,
        )
        .unwrap();
        assert_eq!(after_fail.mode, ArbiterMode::Depth);
        let (cmd, _) = arbiter_step(
            &clean_frame(),
            Some(ViewClass::Center),
            after_fail,
            &cp,
            &pp,
            &fp,
        )
        .unwrap();
        assert_eq!(cmd.source, CommandSource::Depth);
    }

    #[test]
    fn engage_count_one_switches_per_frame() {
        let (mut cp, pp, fp) = small_params();
        cp.fallback_engage_count = 1;
        cp.fallback_release_count = 1;
        let (_, state) = arbiter_step(
            &corrupted_frame(),
            Some(ViewClass::Center),
            ArbiterState::default(),
            &cp,
            &pp,
            &fp,
        )
        .unwrap();
        assert_eq!(state.mode, ArbiterMode::Fallback);
        let (cmd, state) = arbiter_step(
            &clean_frame(),
            Some(ViewClass::Center),
            state,
            &cp,
            &pp,
            &fp,
        )
        .unwrap();
        assert_eq!(state.mode, ArbiterMode::Depth);
        assert_eq!(cmd.source, CommandSource::Depth);
    }

    #[test]
    fn missing_classifier_on_depth_failure_is_an_error() {
        let (cp, pp, fp) = small_params();
        let err = arbiter_step(
            &corrupted_frame(),
            None,
            ArbiterState::default(),
            &cp,
            &pp,
            &fp,
        )
        .unwrap_err();
        assert_eq!(err, ControlError::ClassifierUnavailable);
    }
}
