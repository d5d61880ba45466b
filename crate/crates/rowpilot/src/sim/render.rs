//! Pinhole ray-cast depth rendering of the corridor world.

use crate::depth::DepthFrame;
use crate::fallback::RgbFrame;
use crate::sim::world::{Hole, Intrinsics, Obstacle, Pose, WallSide, WorldConfig};

const RAY_EPS: f64 = 1e-9;

/// Camera-frame ray direction for pixel (u, v): x right, y down, unit z
/// along the optical axis. Depth values are z-depths, i.e. multiples of
/// this unit z component.
pub fn ray_direction(intr: &Intrinsics, u: f64, v: f64) -> (f64, f64, f64) {
    ((u - intr.ppx) / intr.fx, (v - intr.ppy) / intr.fy, 1.0)
}

struct Caster<'a> {
    world: &'a WorldConfig,
    origin: (f64, f64, f64),
    sin_t: f64,
    cos_t: f64,
}

impl Caster<'_> {
    /// World-frame direction with a unit component along the optical axis,
    /// so the intersection parameter is directly the z-depth.
    fn world_dir(&self, cam: (f64, f64, f64)) -> (f64, f64, f64) {
        let (a, b, _) = cam;
        (
            a * self.sin_t + self.cos_t,
            -a * self.cos_t + self.sin_t,
            -b,
        )
    }

    fn hits_hole(&self, side: WallSide, x: f64, z: f64) -> bool {
        self.world.holes.iter().any(|h: &Hole| {
            h.side == side && x >= h.start && x <= h.start + h.length && z <= h.height
        })
    }

    fn wall_depth(&self, dir: (f64, f64, f64), side: WallSide) -> Option<f64> {
        let wall_y = match side {
            WallSide::Left => self.world.row_spacing / 2.0,
            WallSide::Right => -self.world.row_spacing / 2.0,
        };
        if dir.1.abs() < RAY_EPS {
            return None;
        }
        let s = (wall_y - self.origin.1) / dir.1;
        if s <= RAY_EPS {
            return None;
        }
        let x = self.origin.0 + s * dir.0;
        let z = self.origin.2 + s * dir.2;
        if x < 0.0 || x > self.world.row_length || z < 0.0 || z > self.world.wall_height {
            return None;
        }
        if self.hits_hole(side, x, z) {
            return None;
        }
        Some(s)
    }

    fn ground_depth(&self, dir: (f64, f64, f64)) -> Option<f64> {
        if !self.world.ground_plane || dir.2 >= -RAY_EPS {
            return None;
        }
        let s = -self.origin.2 / dir.2;
        (s > RAY_EPS).then_some(s)
    }

    /// Nearest side-surface hit on the cylinder; rays passing above it miss.
    fn obstacle_depth(&self, dir: (f64, f64, f64), obs: &Obstacle) -> Option<f64> {
        let rel_x = self.origin.0 - obs.x;
        let rel_y = self.origin.1 - obs.lateral;
        let a = dir.0 * dir.0 + dir.1 * dir.1;
        if a < RAY_EPS * RAY_EPS {
            return None;
        }
        let b = 2.0 * (rel_x * dir.0 + rel_y * dir.1);
        let c = rel_x * rel_x + rel_y * rel_y - obs.radius * obs.radius;
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let sqrt_disc = disc.sqrt();
        for s in [(-b - sqrt_disc) / (2.0 * a), (-b + sqrt_disc) / (2.0 * a)] {
            if s <= RAY_EPS {
                continue;
            }
            let z = self.origin.2 + s * dir.2;
            if z >= 0.0 && z <= obs.height {
                return Some(s);
            }
        }
        None
    }

    fn depth_mm(&self, cam_dir: (f64, f64, f64), max_range: u16) -> u16 {
        let dir = self.world_dir(cam_dir);
        let mut nearest = f64::INFINITY;
        for side in [WallSide::Left, WallSide::Right] {
            if let Some(s) = self.wall_depth(dir, side) {
                nearest = nearest.min(s);
            }
        }
        if let Some(s) = self.ground_depth(dir) {
            nearest = nearest.min(s);
        }
        for obs in &self.world.obstacles {
            if let Some(s) = self.obstacle_depth(dir, obs) {
                nearest = nearest.min(s);
            }
        }
        if !nearest.is_finite() {
            return max_range;
        }
        let mm = (nearest * 1000.0).round();
        if mm >= max_range as f64 {
            max_range
        } else if mm < 1.0 {
            1 // keep 0 reserved for invalid returns
        } else {
            mm as u16
        }
    }
}

/// Renders the z-depth of the nearest wall/ground/obstacle intersection for
/// every pixel, in millimeters, clamped to the sensor range. Rays that
/// escape (through the open row end or a wall gap) return the maximum
/// range.
pub fn render_depth(
    world: &WorldConfig,
    pose: &Pose,
    intr: &Intrinsics,
    camera_height: f64,
) -> DepthFrame {
    let caster = Caster {
        world,
        origin: (pose.x, pose.y, camera_height),
        sin_t: pose.theta.sin(),
        cos_t: pose.theta.cos(),
    };
    let mut data = Vec::with_capacity(intr.width * intr.height);
    for v in 0..intr.height {
        for u in 0..intr.width {
            let cam = ray_direction(intr, u as f64, v as f64);
            data.push(caster.depth_mm(cam, intr.max_range_mm));
        }
    }
    DepthFrame::new(intr.height, intr.width, data).expect("rendered depths within range")
}

/// Grayscale visualization of a depth frame as an RGB image; used as the
/// synthetic camera feed for the sample harvester.
pub fn depth_to_rgb(frame: &DepthFrame, max_range_mm: u16) -> RgbFrame {
    let scale = 255.0 / max_range_mm as f64;
    let mut data = Vec::with_capacity(frame.data().len() * 3);
    for &v in frame.data() {
        let g = (v as f64 * scale).round().clamp(0.0, 255.0) as u8;
        data.extend_from_slice(&[g, g, g]);
    }
    RgbFrame::new(frame.height(), frame.width(), data)
}

/// Mean filter over a (2r+1)-square window with clamped borders. Radius 0
/// returns the frame unchanged.
pub fn box_blur(frame: &RgbFrame, radius: usize) -> RgbFrame {
    if radius == 0 {
        return frame.clone();
    }
    let (w, h) = (frame.width(), frame.height());
    let r = radius as i64;
    let mut data = Vec::with_capacity(w * h * 3);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = [0u32; 3];
            let mut n = 0u32;
            for dy in -r..=r {
                for dx in -r..=r {
                    let sx = (x + dx).clamp(0, w as i64 - 1) as usize;
                    let sy = (y + dy).clamp(0, h as i64 - 1) as usize;
                    let p = frame.pixel(sx, sy);
                    for (a, &v) in acc.iter_mut().zip(&p) {
                        *a += v as u32;
                    }
                    n += 1;
                }
            }
            data.extend(acc.iter().map(|&a| (a / n) as u8));
        }
    }
    RgbFrame::new(h, w, data)
}
