//! Synthetic corridor world: pinhole ray-cast depth renderer, unicycle
//! kinematics, depth-corruption injection, and the closed-loop episode
//! runner with metrics.

mod corrupt;
mod episode;
mod kinematics;
mod render;
mod world;

pub use corrupt::{corrupt, CorruptionParams, CorruptionWindow};
pub use episode::{
    metrics, run_episode, run_episode_observed, ClassifierChoice, EpisodeConfig, EpisodeLog,
    EpisodeMetrics, EpisodeOutcome, Scenario, SimError, StepObservation, StepRecord,
};
pub use kinematics::step_kinematics;
pub use render::{box_blur, depth_to_rgb, ray_direction, render_depth};
pub use world::{
    collides, project_opening_center, wrap_angle, Hole, Intrinsics, Obstacle, Pose, WallSide,
    WorldConfig,
};
