//! Corridor geometry, robot pose, and the camera model.

use std::f64::consts::PI;

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut a = theta % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Robot state: position along the corridor axis, lateral offset from the
/// centerline, and heading (0 = along the axis, positive counterclockwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallSide {
    Left,
    Right,
}

/// Gap in a row wall. Rays that hit the wall plane inside the gap simply
/// pass through; the robot body still treats the wall as solid.
#[derive(Debug, Clone, PartialEq)]
pub struct Hole {
    pub side: WallSide,
    /// Start of the gap along the corridor axis, meters.
    pub start: f64,
    pub length: f64,
    /// Vertical extent of the gap, from the ground up, meters.
    pub height: f64,
}

/// Vertical cylinder standing on the ground inside the corridor.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    /// Position along the corridor axis, meters.
    pub x: f64,
    /// Lateral position, 0 = centerline, positive left.
    pub lateral: f64,
    pub radius: f64,
    pub height: f64,
}

/// Corridor world: two solid walls along the axis, optional ground plane,
/// wall gaps, and cylindrical obstacles.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub row_length: f64,
    /// Corridor width (wall-to-wall), meters.
    pub row_spacing: f64,
    pub wall_height: f64,
    pub holes: Vec<Hole>,
    pub obstacles: Vec<Obstacle>,
    pub ground_plane: bool,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self {
            row_length: 30.0,
            row_spacing: 2.5,
            wall_height: 2.0,
            holes: Vec::new(),
            obstacles: Vec::new(),
            ground_plane: true,
        }
    }
}

/// True when a disk robot of `radius` at `pose` intersects a wall or an
/// obstacle. Wall gaps are visual only and stay solid here.
pub fn collides(world: &WorldConfig, pose: &Pose, radius: f64) -> bool {
    let half = world.row_spacing / 2.0;
    if pose.x >= 0.0 && pose.x <= world.row_length && pose.y.abs() > half - radius {
        return true;
    }
    world.obstacles.iter().any(|obs| {
        let dx = pose.x - obs.x;
        let dy = pose.y - obs.lateral;
        (dx * dx + dy * dy).sqrt() < radius + obs.radius
    })
}

/// Pinhole camera model. Defaults are the depth-mode calibration of the
/// RealSense D435i at 640x480.
#[derive(Debug, Clone, PartialEq)]
pub struct Intrinsics {
    pub width: usize,
    pub height: usize,
    pub fx: f64,
    pub fy: f64,
    pub ppx: f64,
    pub ppy: f64,
    pub max_range_mm: u16,
}

impl Default for Intrinsics {
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
            fx: 387.342498779297,
            fy: 387.342498779297,
            ppx: 321.910675048828,
            ppy: 236.759078979492,
            max_range_mm: 8000,
        }
    }
}

impl Intrinsics {
    /// Rescales the default calibration to another resolution, e.g. the
    /// 160x120 fast mode, keeping the field of view.
    pub fn scaled_to(&self, width: usize, height: usize) -> Self {
        let sx = width as f64 / self.width as f64;
        let sy = height as f64 / self.height as f64;
        Self {
            width,
            height,
            fx: self.fx * sx,
            fy: self.fy * sy,
            ppx: self.ppx * sx,
            ppy: self.ppy * sy,
            max_range_mm: self.max_range_mm,
        }
    }
}

/// Image column where the corridor opening center (end of the row, on the
/// centerline, at camera height) projects, or `None` when it is behind the
/// camera. Used as the ground-truth reference for false-window statistics.
pub fn project_opening_center(world: &WorldConfig, pose: &Pose, intr: &Intrinsics) -> Option<f64> {
    let rel_x = world.row_length - pose.x;
    let rel_y = -pose.y;
    let (sin_t, cos_t) = pose.theta.sin_cos();
    // Camera basis: optical axis along the heading, image x to the right.
    let depth = rel_x * cos_t + rel_y * sin_t;
    if depth <= 0.0 {
        return None;
    }
    let right = rel_x * sin_t - rel_y * cos_t;
    Some(intr.ppx + intr.fx * right / depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_covers_both_directions() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-3.0 * PI) - PI).abs() < 1e-12);
        assert_eq!(wrap_angle(0.5), 0.5);
        assert!((wrap_angle(2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn collision_against_walls_and_obstacles() {
        let mut world = WorldConfig::default();
        world.obstacles.push(Obstacle {
            x: 3.0,
            lateral: 0.0,
            radius: 0.2,
            height: 1.0,
        });
        let r = 0.25;
        assert!(!collides(&world, &Pose::new(1.0, 0.0, 0.0), r));
        assert!(collides(&world, &Pose::new(1.0, 1.05, 0.0), r));
        assert!(collides(&world, &Pose::new(3.1, 0.1, 0.0), r));
        // Past the end of the row there is no wall.
        assert!(!collides(&world, &Pose::new(31.0, 1.3, 0.0), r));
    }

    #[test]
    fn opening_projects_to_the_principal_axis_when_aligned() {
        let world = WorldConfig::default();
        let intr = Intrinsics::default();
        let u = project_opening_center(&world, &Pose::default(), &intr).unwrap();
        assert!((u - intr.ppx).abs() < 1e-9);
        // Pointing left moves the opening to the right half of the image.
        let u = project_opening_center(&world, &Pose::new(0.0, 0.0, 0.2), &intr).unwrap();
        assert!(u > intr.ppx);
        // Behind the camera: no projection.
        assert!(project_opening_center(
            &world,
            &Pose::new(31.0, 0.0, 0.0),
            &intr
        )
        .is_none());
    }

    #[test]
    fn scaled_intrinsics_preserve_the_fov() {
        let full = Intrinsics::default();
        let fast = full.scaled_to(160, 120);
        let fov_full = 2.0 * ((full.width as f64 / 2.0) / full.fx).atan();
        let fov_fast = 2.0 * ((fast.width as f64 / 2.0) / fast.fx).atan();
        assert!((fov_full - fov_fast).abs() < 1e-12);
    }
}
