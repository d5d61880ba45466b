//! Unicycle kinematics for the differential-drive platform.

use crate::control::ControlCommand;
use crate::sim::world::{wrap_angle, Pose};

/// Angular rates below this are integrated as straight-line motion.
const OMEGA_EPS: f64 = 1e-9;

/// Exact unicycle integration over one step: straight-line update for
/// negligible angular rate, otherwise the closed-form circular arc of
/// radius v/w.
pub fn step_kinematics(pose: &Pose, cmd: &ControlCommand, dt: f64) -> Pose {
    debug_assert!(dt > 0.0);
    let v = cmd.linear;
    let w = cmd.angular;
    if w.abs() < OMEGA_EPS {
        Pose {
            x: pose.x + v * pose.theta.cos() * dt,
            y: pose.y + v * pose.theta.sin() * dt,
            theta: pose.theta,
        }
    } else {
        let radius = v / w;
        let theta_next = pose.theta + w * dt;
        Pose {
            x: pose.x + radius * (theta_next.sin() - pose.theta.sin()),
            y: pose.y - radius * (theta_next.cos() - pose.theta.cos()),
            theta: wrap_angle(theta_next),
        }
    }
}
