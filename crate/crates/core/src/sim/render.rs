//! Egocentric RGB-D raycaster.
//!
//! Each pixel casts the pinhole ray through the box set and the floor
//! plane and keeps the nearest hit. The depth buffer stores the Euclidean
//! ray length in meters (not planar z); pixels with no hit within
//! `camera.max_range` hold the sentinel value `max_range`. Rays that reach
//! the floor plane outside the floor extent miss: the world ends at the
//! floor boundary.

use image::RgbImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::CameraModel;
use crate::geom::{Pose, Vec3};
use crate::sim::scene::Scene;

/// Flat floor color.
pub const FLOOR_RGB: [u8; 3] = [172, 168, 160];
/// Background color for no-hit pixels.
pub const DEPTH_NO_HIT_RGB: [u8; 3] = [206, 225, 242];

/// What a pixel's ray hit; kept alongside the frame for tests and
/// debugging overlays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HitLabel {
    None,
    Floor,
    Box(u16),
}

/// Egocentric color + metric depth frame.
#[derive(Debug, Clone)]
pub struct RgbdFrame {
    pub rgb: RgbImage,
    /// Row-major, meters, Euclidean ray length; `max_range` = no hit.
    pub depth: Vec<f32>,
    /// Per-pixel hit labels, row-major.
    pub hits: Vec<HitLabel>,
    pub max_range: f32,
}

impl RgbdFrame {
    pub fn width(&self) -> u32 {
        self.rgb.width()
    }

    pub fn height(&self) -> u32 {
        self.rgb.height()
    }

    pub fn depth_at(&self, u: u32, v: u32) -> f32 {
        self.depth[(v * self.width() + u) as usize]
    }

    pub fn is_no_hit(&self, u: u32, v: u32) -> bool {
        self.depth_at(u, v) >= self.max_range
    }

    /// Depth encoded as 16-bit millimeters for PNG export; no-hit pixels
    /// saturate.
    pub fn depth_millimeters(&self) -> image::ImageBuffer<image::Luma<u16>, Vec<u16>> {
        let w = self.width();
        let h = self.height();
        let data: Vec<u16> = self
            .depth
            .iter()
            .map(|d| ((*d as f64) * 1000.0).round().min(u16::MAX as f64) as u16)
            .collect();
        image::ImageBuffer::from_vec(w, h, data).expect("dimensions match")
    }
}

/// Entry distance of a ray into an axis-aligned box, by the slab method.
fn ray_box_entry(origin: Vec3, dir: Vec3, bmin: Vec3, bmax: Vec3) -> Option<f64> {
    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    for (o, d, lo, hi) in [
        (origin.x, dir.x, bmin.x, bmax.x),
        (origin.y, dir.y, bmin.y, bmax.y),
        (origin.z, dir.z, bmin.z, bmax.z),
    ] {
        if d.abs() < 1e-12 {
            if o < lo || o > hi {
                return None;
            }
            continue;
        }
        let (mut t0, mut t1) = ((lo - o) / d, (hi - o) / d);
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        t_enter = t_enter.max(t0);
        t_exit = t_exit.min(t1);
        if t_enter > t_exit {
            return None;
        }
    }
    if t_exit < 1e-9 {
        return None;
    }
    Some(t_enter.max(1e-9))
}

/// Which axis the entry face lies on; used for a mild per-face tint so box
/// edges stay visible without any lighting model.
fn face_tint(origin: Vec3, dir: Vec3, t: f64, bmin: Vec3, bmax: Vec3) -> f64 {
    let p = origin + dir * t;
    let eps = 1e-6;
    if (p.z - bmax.z).abs() < eps || (p.z - bmin.z).abs() < eps {
        1.0
    } else if (p.x - bmin.x).abs() < eps || (p.x - bmax.x).abs() < eps {
        0.85
    } else if (p.y - bmin.y).abs() < eps || (p.y - bmax.y).abs() < eps {
        0.7
    } else {
        1.0
    }
}

/// Render the scene from `pose`. Pure: identical inputs give bit-identical
/// frames regardless of the internal parallelization.
pub fn render(scene: &Scene, pose: Pose, camera: &CameraModel) -> RgbdFrame {
    let w = camera.width;
    let h = camera.height;
    let origin = Vec3::new(pose.x, pose.y, camera.cam_height);
    let max_range = camera.max_range;

    let mut rgb = vec![0u8; (w * h * 3) as usize];
    let mut depth = vec![max_range as f32; (w * h) as usize];
    let mut hits = vec![HitLabel::None; (w * h) as usize];

    let row_len = (w * 3) as usize;
    rgb.par_chunks_mut(row_len)
        .zip(depth.par_chunks_mut(w as usize))
        .zip(hits.par_chunks_mut(w as usize))
        .enumerate()
        .for_each(|(v, ((rgb_row, depth_row), hit_row))| {
            for u in 0..w as usize {
                let dir_robot =
                    camera.pixel_ray_unchecked(u as f64 + 0.5, v as f64 + 0.5);
                let dir = dir_robot.rotated_z(pose.yaw);
                let mut best_t = f64::INFINITY;
                let mut best: HitLabel = HitLabel::None;
                // Floor plane z = 0, clipped to the floor extent.
                if dir.z < -1e-12 {
                    let t = origin.z / -dir.z;
                    let hit = origin + dir * t;
                    if scene.floor.contains(hit.xy()) {
                        best_t = t;
                        best = HitLabel::Floor;
                    }
                }
                for (k, b) in scene.boxes.iter().enumerate() {
                    if let Some(t) = ray_box_entry(origin, dir, b.min, b.max) {
                        if t < best_t {
                            best_t = t;
                            best = HitLabel::Box(k as u16);
                        }
                    }
                }
                let (d, label, color) = if best_t <= max_range {
                    match best {
                        HitLabel::Floor => (best_t, HitLabel::Floor, FLOOR_RGB),
                        HitLabel::Box(k) => {
                            let b = &scene.boxes[k as usize];
                            let tint = face_tint(origin, dir, best_t, b.min, b.max);
                            let c = [
                                (b.color[0] as f64 * tint) as u8,
                                (b.color[1] as f64 * tint) as u8,
                                (b.color[2] as f64 * tint) as u8,
                            ];
                            (best_t, HitLabel::Box(k), c)
                        }
                        HitLabel::None => (max_range, HitLabel::None, DEPTH_NO_HIT_RGB),
                    }
                } else {
                    (max_range, HitLabel::None, DEPTH_NO_HIT_RGB)
                };
                depth_row[u] = d as f32;
                hit_row[u] = label;
                rgb_row[u * 3] = color[0];
                rgb_row[u * 3 + 1] = color[1];
                rgb_row[u * 3 + 2] = color[2];
            }
        });

    RgbdFrame {
        rgb: RgbImage::from_vec(w, h, rgb).expect("buffer matches dimensions"),
        depth,
        hits,
        max_range: max_range as f32,
    }
}
