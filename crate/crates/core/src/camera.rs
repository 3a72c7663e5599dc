//! Pinhole camera model with a downward pitch.
//!
//! The camera sits at the top of the agent body, `cam_height` above the
//! floor, looking along robot +x and tilted `pitch` radians toward the
//! floor. Pixels are square; the single focal length is derived from the
//! horizontal field of view, and the vertical FOV follows from the image
//! aspect. All outputs are in the robot frame (x forward, y left, z up,
//! origin at the camera center, floor plane at z = `-cam_height`).
//!
//! Pixel coordinates are continuous: u grows rightward in `[0, width)`, v
//! grows downward in `[0, height)`, and the ray for the integer pixel
//! `(i, j)` passes through its center `(i + 0.5, j + 0.5)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{PolarAction, Vec3};

#[derive(Debug, Error, PartialEq)]
pub enum CameraError {
    #[error("invalid camera parameter: {0}")]
    InvalidParameter(String),
    #[error("pixel ({u}, {v}) outside image {width}x{height}")]
    PixelOutOfRange { u: f64, v: f64, width: u32, height: u32 },
    #[error("depth must be positive, got {0}")]
    NonPositiveDepth(f64),
}

/// Sub-pixel image coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelPoint {
    pub u: f64,
    pub v: f64,
}

/// Result of projecting a robot-frame point into the image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    /// Inside the image rectangle.
    InView(PixelPoint),
    /// In front of the camera but outside the image rectangle; the
    /// unclamped coordinates are kept for diagnostics.
    OutsideImage(PixelPoint),
    /// At or behind the camera plane.
    Behind,
}

impl Projection {
    pub fn in_view(&self) -> Option<PixelPoint> {
        match self {
            Projection::InView(p) => Some(*p),
            _ => None,
        }
    }
}

/// Pinhole intrinsics plus mounting (pitch and height above the floor).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub width: u32,
    pub height: u32,
    /// Horizontal field of view, radians.
    pub hfov: f64,
    /// Downward pitch, radians, in `[0, pi/2)`.
    pub pitch: f64,
    /// Camera height above the floor, meters.
    pub cam_height: f64,
    /// Maximum render range, meters; beyond it the depth buffer holds the
    /// no-hit sentinel.
    pub max_range: f64,
    /// Focal length in pixels, derived from `hfov`.
    focal: f64,
}

impl CameraModel {
    pub fn new(
        width: u32,
        height: u32,
        hfov: f64,
        pitch: f64,
        cam_height: f64,
        max_range: f64,
    ) -> Result<Self, CameraError> {
        if width == 0 || height == 0 {
            return Err(CameraError::InvalidParameter("zero image dimension".into()));
        }
        if !(hfov > 0.0 && hfov < std::f64::consts::PI) {
            return Err(CameraError::InvalidParameter(format!(
                "hfov {hfov} outside (0, pi)"
            )));
        }
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&pitch) {
            return Err(CameraError::InvalidParameter(format!(
                "pitch {pitch} outside [0, pi/2)"
            )));
        }
        if cam_height <= 0.0 {
            return Err(CameraError::InvalidParameter("cam_height <= 0".into()));
        }
        if max_range <= 0.0 {
            return Err(CameraError::InvalidParameter("max_range <= 0".into()));
        }
        let focal = (width as f64 / 2.0) / (hfov / 2.0).tan();
        Ok(Self {
            width,
            height,
            hfov,
            pitch,
            cam_height,
            max_range,
            focal,
        })
    }

    /// The defaults used throughout: 1920x1080, 131 degree horizontal FOV,
    /// 25 degree downward pitch, camera 1.5 m above the floor.
    pub fn default_sensor() -> Self {
        Self::new(
            1920,
            1080,
            131f64.to_radians(),
            25f64.to_radians(),
            1.5,
            10.0,
        )
        .expect("default camera parameters are valid")
    }

    pub fn focal(&self) -> f64 {
        self.focal
    }

    /// Derived vertical field of view (square pixels).
    pub fn vfov(&self) -> f64 {
        2.0 * ((self.height as f64 / 2.0) / self.focal).atan()
    }

    /// Unit direction of the ray through continuous image point `(u, v)`.
    pub fn pixel_ray(&self, u: f64, v: f64) -> Result<Vec3, CameraError> {
        if !(0.0..self.width as f64).contains(&u) || !(0.0..self.height as f64).contains(&v) {
            return Err(CameraError::PixelOutOfRange {
                u,
                v,
                width: self.width,
                height: self.height,
            });
        }
        Ok(self.pixel_ray_unchecked(u, v))
    }

    /// As [`pixel_ray`](Self::pixel_ray) without the bounds check; used by
    /// the renderer on its own pixel loop.
    pub fn pixel_ray_unchecked(&self, u: f64, v: f64) -> Vec3 {
        let du = u - self.width as f64 / 2.0;
        let dv = v - self.height as f64 / 2.0;
        // Before pitch: x forward, y left (u grows rightward), z up (v grows
        // downward).
        let dir = Vec3::new(self.focal, -du, -dv).normalized();
        dir.rotated_y(self.pitch)
    }

    /// Robot-frame point of the pixel at the given Euclidean ray length.
    pub fn backproject(&self, u: f64, v: f64, depth: f64) -> Result<Vec3, CameraError> {
        if depth <= 0.0 {
            return Err(CameraError::NonPositiveDepth(depth));
        }
        Ok(self.pixel_ray(u, v)? * depth)
    }

    /// Project a robot-frame point into the image.
    pub fn project(&self, point: Vec3) -> Projection {
        // Undo the pitch to get back to the unpitched camera frame.
        let q = point.rotated_y(-self.pitch);
        if q.x <= 1e-12 {
            return Projection::Behind;
        }
        let u = self.width as f64 / 2.0 - self.focal * q.y / q.x;
        let v = self.height as f64 / 2.0 - self.focal * q.z / q.x;
        let p = PixelPoint { u, v };
        if (0.0..self.width as f64).contains(&u) && (0.0..self.height as f64).contains(&v) {
            Projection::InView(p)
        } else {
            Projection::OutsideImage(p)
        }
    }

    /// Floor endpoint of a polar action, in the robot frame.
    pub fn action_endpoint(&self, a: PolarAction) -> Vec3 {
        let e = a.endpoint();
        Vec3::new(e.x, e.y, -self.cam_height)
    }
}
