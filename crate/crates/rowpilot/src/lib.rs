//! Vision-based local motion planner for corridor (crop-row) following.
//!
//! The planner is built around a depth-map pipeline: normalize the depth
//! matrix, threshold it into a near/far binary mask, extract connected
//! far-field components, and steer toward the largest one with a
//! proportional parabolic control law. When the depth pipeline cannot find
//! a usable window, a discrete three-class backup controller takes over,
//! and an obstacle check can override everything with an emergency stop.
//!
//! The crate also ships a synthetic corridor simulator (pinhole ray-cast
//! depth renderer, unicycle kinematics, depth-corruption injection) used to
//! exercise the full loop end to end, plus bit-exact file formats for depth
//! frames, RGB frames, configs, and trajectory logs.

pub mod control;
pub mod depth;
pub mod fallback;
pub mod io;
pub mod sim;

pub use control::{
    angular_velocity, arbiter_step, arbiter_step_detailed, lateral_offset, linear_velocity,
    ArbiterMode, ArbiterState, ArbiterStep, CommandSource, ControlCommand, ControlError,
    ControllerParams,
};
pub use depth::{
    check_obstacle, detect_row_end, extract_components, normalize_depth, select_window,
    threshold_far_field, BinaryMask, ComponentBox, DepthError, DepthFrame, DepthPipelineParams,
    NormalizedDepth, MAX_DEPTH_MM,
};
pub use fallback::{
    discrete_command, heuristic_classify, oracle_classify, preprocess_frame, sharpness_score,
    Classifier, ClassifierInput, FallbackError, FallbackParams, LabeledSample, RgbFrame,
    SampleHarvester, ViewClass,
};
pub use sim::{
    collides, metrics, render_depth, run_episode, run_episode_observed, step_kinematics,
    ClassifierChoice, CorruptionParams, CorruptionWindow, EpisodeConfig, EpisodeLog,
    EpisodeMetrics, EpisodeOutcome, Hole, Intrinsics, Obstacle, Pose, Scenario, SimError,
    StepRecord, WallSide, WorldConfig,
};
