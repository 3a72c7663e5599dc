//! Small geometry primitives shared across the crate.
//!
//! Conventions, fixed project-wide:
//! - World frame: x/y on the floor plane, z up, angles counterclockwise.
//! - Robot frame: x forward, y left, z up, origin at the agent position.
//! - Yaw 0 points along world +x; yaw is normalized to `(-pi, pi]`.

use serde::{Deserialize, Serialize};

/// Normalize an angle to `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    let mut a = a % std::f64::consts::TAU;
    if a <= -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    } else if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    }
    a
}

// ---------------------------------------------------------------------------
// Vectors
// ---------------------------------------------------------------------------

/// 2D vector / point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self / n
        }
    }

    /// Rotate counterclockwise by `angle` radians.
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl std::ops::Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

/// 3D vector / point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            Vec3::new(self.x / n, self.y / n, self.z / n)
        }
    }

    pub fn xy(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Rotate about the z axis (counterclockwise looking down -z).
    pub fn rotated_z(self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        Vec3::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }

    /// Rotate about the y axis; positive angles pitch the +x axis downward.
    pub fn rotated_y(self, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        Vec3::new(c * self.x + s * self.z, self.y, -s * self.x + c * self.z)
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

// ---------------------------------------------------------------------------
// Rectangles
// ---------------------------------------------------------------------------

/// Axis-aligned rectangle on the floor plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_rect(&self, o: &Rect) -> bool {
        self.contains(o.min) && self.contains(o.max)
    }

    /// Closest point of the rectangle to `p` (equals `p` when inside).
    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
        )
    }

    /// Euclidean distance from `p` to the rectangle (0 inside).
    pub fn distance(&self, p: Vec2) -> f64 {
        self.closest_point(p).dist(p)
    }

    /// Shrink by `m` on every side.
    pub fn shrunk(&self, m: f64) -> Rect {
        Rect::new(
            Vec2::new(self.min.x + m, self.min.y + m),
            Vec2::new(self.max.x - m, self.max.y - m),
        )
    }
}

// ---------------------------------------------------------------------------
// Poses and actions
// ---------------------------------------------------------------------------

/// Agent pose in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Radians, counterclockwise, 0 along world +x, normalized to `(-pi, pi]`.
    pub yaw: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, yaw: f64) -> Self {
        Self {
            x,
            y,
            yaw: normalize_angle(yaw),
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Map a robot-frame offset into world coordinates.
    pub fn robot_to_world(&self, local: Vec2) -> Vec2 {
        self.position() + local.rotated(self.yaw)
    }

    /// Map a world point into the robot frame.
    pub fn world_to_robot(&self, world: Vec2) -> Vec2 {
        (world - self.position()).rotated(-self.yaw)
    }
}

/// A candidate motion: rotate by `theta`, then move `r` meters forward.
///
/// `theta` is in the robot frame (0 = straight ahead, positive = left);
/// `r >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarAction {
    pub theta: f64,
    pub r: f64,
}

impl PolarAction {
    /// Rotate in place by 180 degrees.
    pub const TURN_AROUND: PolarAction = PolarAction {
        theta: std::f64::consts::PI,
        r: 0.0,
    };

    pub fn new(theta: f64, r: f64) -> Self {
        debug_assert!(r >= 0.0, "polar action radius must be non-negative");
        Self {
            theta: normalize_angle(theta),
            r,
        }
    }

    /// Robot-frame endpoint of the motion on the floor plane.
    pub fn endpoint(&self) -> Vec2 {
        Vec2::new(self.r * self.theta.cos(), self.r * self.theta.sin())
    }
}
