//! Closed-loop episode runner and trajectory metrics.

use std::time::Instant;

use thiserror::Error;

use crate::control::{
    arbiter_step_detailed, ArbiterState, CommandSource, ControlCommand, ControllerParams,
};
use crate::depth::{normalize_depth, threshold_far_field, DepthFrame, DepthPipelineParams};
use crate::fallback::{heuristic_classify, oracle_classify, FallbackParams, ViewClass};
use crate::sim::corrupt::{corrupt, CorruptionParams, CorruptionWindow};
use crate::sim::kinematics::step_kinematics;
use crate::sim::render::render_depth;
use crate::sim::world::{collides, Intrinsics, Pose, WorldConfig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("cannot compute metrics of an empty log")]
    EmptyLog,
}

/// Which view classifier feeds the fallback controller during an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierChoice {
    /// No classifier configured; a depth failure aborts the episode.
    None,
    /// Ground-truth pose oracle.
    Oracle,
    /// Far-field centroid heuristic computed from the live frame.
    Heuristic,
}

/// Per-episode loop settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub dt: f64,
    pub max_steps: u32,
    pub start: Pose,
    pub robot_radius: f64,
    pub camera_height: f64,
    pub classifier: ClassifierChoice,
    pub corruption: Vec<CorruptionWindow>,
    /// Consecutive emergency-stop commands after which the episode ends as
    /// `Stopped` (the platform is parked; nothing further can change).
    pub stop_hold_steps: u32,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            dt: 1.0 / 30.0,
            max_steps: 2000,
            start: Pose::default(),
            robot_radius: 0.25,
            camera_height: 0.4,
            classifier: ClassifierChoice::Oracle,
            corruption: Vec::new(),
            stop_hold_steps: 10,
        }
    }
}

/// Everything a closed-loop run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub world: WorldConfig,
    pub intrinsics: Intrinsics,
    pub pipeline: DepthPipelineParams,
    pub controller: ControllerParams,
    pub fallback: FallbackParams,
    pub episode: EpisodeConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Self::with_resolution(640, 480)
    }
}

impl Scenario {
    /// Consistent scenario at the given render resolution; 160x120 is the
    /// fast mode used by heavy closed-loop tests.
    pub fn with_resolution(width: usize, height: usize) -> Self {
        Self {
            world: WorldConfig::default(),
            intrinsics: Intrinsics::default().scaled_to(width, height),
            pipeline: DepthPipelineParams::for_frame_size(width, height),
            controller: ControllerParams {
                frame_width: width,
                ..ControllerParams::default()
            },
            fallback: FallbackParams::default(),
            episode: EpisodeConfig::default(),
        }
    }
}

/// How an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpisodeOutcome {
    /// Drove past the end of the row.
    Completed,
    /// Robot body intersected a wall or obstacle.
    Collision,
    /// Parked by a sustained emergency stop.
    Stopped,
    /// Step budget exhausted.
    MaxSteps,
    /// Depth failed with no classifier configured.
    ClassifierUnavailable,
}

/// One control cycle as logged: time, the pose the frame was rendered from,
/// the command, and the lateral offset when the depth path had a window.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub linear: f64,
    pub angular: f64,
    pub source: CommandSource,
    pub offset: Option<f64>,
}

/// Full per-step record of an episode. Loop latencies are kept out of the
/// serialized records; they describe this host, not the trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub steps: Vec<StepRecord>,
    pub outcome: EpisodeOutcome,
    pub latencies_ms: Vec<f64>,
}

/// Aggregates of one episode log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeMetrics {
    pub completed: bool,
    pub collision: bool,
    pub mean_abs_y: f64,
    pub max_abs_y: f64,
    pub fallback_fraction: f64,
    pub mean_loop_latency_ms: f64,
}

/// What the observer callback sees each cycle before kinematics advance.
pub struct StepObservation<'a> {
    pub step: u32,
    pub t: f64,
    pub pose: Pose,
    pub frame: &'a DepthFrame,
    pub offset: Option<f64>,
    pub command: ControlCommand,
}

fn corruption_for_step(windows: &[CorruptionWindow], t: f64, step: u32) -> Option<CorruptionParams> {
    windows
        .iter()
        .find(|w| t >= w.start_s && t < w.end_s)
        .map(|w| CorruptionParams {
            seed: w
                .params
                .seed
                .wrapping_add((step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            ..w.params.clone()
        })
}

fn classify_view(
    choice: ClassifierChoice,
    frame: &DepthFrame,
    pose: &Pose,
    world: &WorldConfig,
    pipeline: &DepthPipelineParams,
    fallback: &FallbackParams,
) -> Option<ViewClass> {
    match choice {
        ClassifierChoice::None => None,
        ClassifierChoice::Oracle => oracle_classify(pose, world, fallback).ok(),
        ClassifierChoice::Heuristic => {
            let nd = normalize_depth(frame).ok()?;
            let mask = threshold_far_field(&nd, pipeline.t_distance);
            heuristic_classify(&mask, fallback).ok().map(|(c, _)| c)
        }
    }
}

/// Runs one closed-loop episode: render, corrupt, arbitrate, integrate,
/// until the row end is passed, the robot collides, a stop holds, or the
/// step budget runs out.
pub fn run_episode(scenario: &Scenario) -> EpisodeLog {
    run_episode_observed(scenario, |_| {})
}

/// [`run_episode`] with a per-step observer; the sample harvester and the
/// frame dumper hook in here.
pub fn run_episode_observed(
    scenario: &Scenario,
    mut observer: impl FnMut(&StepObservation),
) -> EpisodeLog {
    let ep = &scenario.episode;
    let mut pose = ep.start;
    let mut state = ArbiterState::default();
    let mut steps = Vec::new();
    let mut latencies_ms = Vec::new();
    let mut stop_streak = 0u32;
    let mut outcome = EpisodeOutcome::MaxSteps;

    for step in 0..ep.max_steps {
        let t = step as f64 * ep.dt;
        let mut frame = render_depth(&scenario.world, &pose, &scenario.intrinsics, ep.camera_height);
        if let Some(params) = corruption_for_step(&ep.corruption, t, step) {
            frame = corrupt(&frame, &params);
        }

        let tic = Instant::now();
        let view = classify_view(
            ep.classifier,
            &frame,
            &pose,
            &scenario.world,
            &scenario.pipeline,
            &scenario.fallback,
        );
        let result = arbiter_step_detailed(
            &frame,
            view,
            state,
            &scenario.controller,
            &scenario.pipeline,
            &scenario.fallback,
        );
        latencies_ms.push(tic.elapsed().as_secs_f64() * 1e3);

        let arb = match result {
            Ok(arb) => arb,
            Err(_) => {
                outcome = EpisodeOutcome::ClassifierUnavailable;
                latencies_ms.pop();
                break;
            }
        };
        state = arb.state;

        steps.push(StepRecord {
            t,
            x: pose.x,
            y: pose.y,
            theta: pose.theta,
            linear: arb.command.linear,
            angular: arb.command.angular,
            source: arb.command.source,
            offset: arb.offset,
        });
        observer(&StepObservation {
            step,
            t,
            pose,
            frame: &frame,
            offset: arb.offset,
            command: arb.command,
        });

        pose = step_kinematics(&pose, &arb.command, ep.dt);
        if collides(&scenario.world, &pose, ep.robot_radius) {
            outcome = EpisodeOutcome::Collision;
            break;
        }
        if pose.x > scenario.world.row_length {
            outcome = EpisodeOutcome::Completed;
            break;
        }
        if arb.command.source == CommandSource::EmergencyStop {
            stop_streak += 1;
            if stop_streak >= ep.stop_hold_steps {
                outcome = EpisodeOutcome::Stopped;
                break;
            }
        } else {
            stop_streak = 0;
        }
    }

    EpisodeLog {
        steps,
        outcome,
        latencies_ms,
    }
}

/// Aggregates a log; fails on an empty one.
pub fn metrics(log: &EpisodeLog) -> Result<EpisodeMetrics, SimError> {
    if log.steps.is_empty() {
        return Err(SimError::EmptyLog);
    }
    let n = log.steps.len() as f64;
    let mean_abs_y = log.steps.iter().map(|s| s.y.abs()).sum::<f64>() / n;
    let max_abs_y = log
        .steps
        .iter()
        .map(|s| s.y.abs())
        .fold(0.0_f64, f64::max);
    let fallback_steps = log
        .steps
        .iter()
        .filter(|s| s.source == CommandSource::Fallback)
        .count();
    let mean_loop_latency_ms = if log.latencies_ms.is_empty() {
        0.0
    } else {
        log.latencies_ms.iter().sum::<f64>() / log.latencies_ms.len() as f64
    };
    Ok(EpisodeMetrics {
        completed: log.outcome == EpisodeOutcome::Completed,
        collision: log.outcome == EpisodeOutcome::Collision,
        mean_abs_y,
        max_abs_y,
        fallback_fraction: fallback_steps as f64 / n,
        mean_loop_latency_ms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::world::Obstacle;

    fn fast_scenario() -> Scenario {
        Scenario::with_resolution(160, 120)
    }

    #[test]
    fn centered_start_completes_without_collision() {
        let log = run_episode(&fast_scenario());
        assert_eq!(log.outcome, EpisodeOutcome::Completed);
        let m = metrics(&log).unwrap();
        assert!(m.completed && !m.collision);
        assert!(m.max_abs_y < 0.2, "max |y| was {}", m.max_abs_y);
        assert_eq!(m.fallback_fraction, 0.0);
    }

    #[test]
    fn offset_start_converges_toward_the_centerline() {
        let mut sc = fast_scenario();
        sc.episode.start = Pose::new(0.0, 0.5, 0.0);
        let log = run_episode(&sc);
        assert_eq!(log.outcome, EpisodeOutcome::Completed);
        let third = log.steps.len() / 3;
        let mean_abs = |chunk: &[StepRecord]| {
            chunk.iter().map(|s| s.y.abs()).sum::<f64>() / chunk.len() as f64
        };
        let early = mean_abs(&log.steps[..third]);
        let late = mean_abs(&log.steps[log.steps.len() - third..]);
        assert!(late < early / 2.0, "early {early}, late {late}");
    }

    #[test]
    fn obstacle_ahead_parks_the_robot() {
        let mut sc = fast_scenario();
        sc.world.obstacles.push(Obstacle {
            x: 3.0,
            lateral: 0.0,
            radius: 0.2,
            height: 1.0,
        });
        let log = run_episode(&sc);
        assert_eq!(log.outcome, EpisodeOutcome::Stopped);
        let last = log.steps.last().unwrap();
        assert_eq!(last.source, CommandSource::EmergencyStop);
        assert!(last.x < 3.0);
    }

    #[test]
    fn side_hole_does_not_distract_the_detector() {
        use crate::sim::world::{Hole, WallSide};
        let mut sc = fast_scenario();
        // Small gap in the left wall, below the window area threshold.
        sc.world.holes.push(Hole {
            side: WallSide::Left,
            start: 6.0,
            length: 0.5,
            height: 0.5,
        });
        let log = run_episode(&sc);
        assert_eq!(log.outcome, EpisodeOutcome::Completed);
        let m = metrics(&log).unwrap();
        assert!(m.max_abs_y < 0.2, "max |y| was {}", m.max_abs_y);
    }

    #[test]
    fn classifier_none_with_dead_depth_fails_the_episode() {
        let mut sc = fast_scenario();
        sc.episode.classifier = ClassifierChoice::None;
        sc.episode.corruption.push(CorruptionWindow {
            start_s: 0.5,
            end_s: 1.0,
            params: CorruptionParams {
                saturation_rate: 0.85,
                saturation_value_mm: 600,
                seed: 5,
                ..CorruptionParams::default()
            },
        });
        let log = run_episode(&sc);
        assert_eq!(log.outcome, EpisodeOutcome::ClassifierUnavailable);
        assert!(!log.steps.is_empty(), "log must survive the failure");
    }

    #[test]
    fn logged_poses_stay_outside_walls_unless_collision_is_flagged() {
        for seed in 0..5u64 {
            let mut sc = fast_scenario();
            sc.episode.start = Pose::new(0.0, 0.3, (seed as f64 - 2.0) * 0.05);
            let log = run_episode(&sc);
            if log.outcome == EpisodeOutcome::Collision {
                continue;
            }
            let bound = sc.world.row_spacing / 2.0 - sc.episode.robot_radius;
            for s in &log.steps {
                assert!(s.y.abs() <= bound + 1e-9, "pose inside wall at t={}", s.t);
            }
        }
    }

    #[test]
    fn metrics_count_fallback_fraction() {
        let mk = |source: CommandSource| StepRecord {
            t: 0.0,
            x: 0.0,
            y: 0.0,
            theta: 0.0,
            linear: 0.5,
            angular: 0.0,
            source,
            offset: None,
        };
        let mut steps = vec![mk(CommandSource::Depth); 5];
        steps.extend(vec![mk(CommandSource::Fallback); 5]);
        let log = EpisodeLog {
            steps,
            outcome: EpisodeOutcome::Completed,
            latencies_ms: vec![1.0, 3.0],
        };
        let m = metrics(&log).unwrap();
        assert_eq!(m.fallback_fraction, 0.5);
        assert_eq!(m.mean_loop_latency_ms, 2.0);
        assert_eq!(m.mean_abs_y, 0.0);
    }

    #[test]
    fn metrics_match_hand_computed_values() {
        let step = |t: f64, y: f64, source: CommandSource| StepRecord {
            t,
            x: t,
            y,
            theta: 0.0,
            linear: 1.0,
            angular: 0.0,
            source,
            offset: Some(0.0),
        };
        let log = EpisodeLog {
            steps: vec![
                step(0.0, 0.4, CommandSource::Depth),
                step(0.1, -0.2, CommandSource::Fallback),
                step(0.2, 0.1, CommandSource::Depth),
                step(0.3, -0.3, CommandSource::EmergencyStop),
            ],
            outcome: EpisodeOutcome::Stopped,
            latencies_ms: vec![2.0, 4.0, 6.0, 8.0],
        };
        let m = metrics(&log).unwrap();
        assert!((m.mean_abs_y - 0.25).abs() < 1e-12);
        assert_eq!(m.max_abs_y, 0.4);
        assert_eq!(m.fallback_fraction, 0.25);
        assert_eq!(m.mean_loop_latency_ms, 5.0);
        assert!(!m.completed && !m.collision);
    }

    #[test]
    fn empty_log_has_no_metrics() {
        let log = EpisodeLog {
            steps: Vec::new(),
            outcome: EpisodeOutcome::MaxSteps,
            latencies_ms: Vec::new(),
        };
        assert_eq!(metrics(&log).unwrap_err(), SimError::EmptyLog);
    }
}
