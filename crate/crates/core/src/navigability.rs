//! Floor navigability and per-direction collision-free reach.
//!
//! From one RGB-D frame this module produces:
//! 1. a per-pixel navigability mask (floor-plane pixels),
//! 2. a top-down local obstacle grid in the robot frame, and
//! 3. the initial candidate action set: for rays fanned across the
//!    horizontal FOV, the farthest distance the agent can travel before
//!    its radius-inflated corridor touches an occupied or unobserved cell.
//!
//! Unobserved cells block reach (conservative), with one exception: cells
//! inside `blind_radius` of the agent are assumed free when unobserved,
//! because the downward-pitched camera cannot see the floor immediately
//! under the agent. An obstacle hiding inside that ring defeats the
//! assumption; spawn clearance keeps it sound at episode start.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::camera::CameraModel;
use crate::geom::{PolarAction, Vec2};
use crate::sim::{AgentBody, RgbdFrame};

#[derive(Debug, Error, PartialEq)]
pub enum NavError {
    #[error("frame is {fw}x{fh} but camera expects {cw}x{ch}")]
    DimensionMismatch { fw: u32, fh: u32, cw: u32, ch: u32 },
    #[error("invalid navigability parameter: {0}")]
    InvalidParameter(String),
}

/// Tunables for mask construction and reach marching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NavParams {
    /// Height tolerance for floor classification, meters.
    pub h_floor: f64,
    /// Lower edge of the obstacle band, meters above the floor.
    pub h_low: f64,
    /// Upper edge of the obstacle band, meters above the floor.
    pub h_high: f64,
    /// March increment, meters.
    pub ray_step: f64,
    /// Number of reach rays across the horizontal FOV.
    pub n_rays: usize,
    /// Actions shorter than this are dropped, meters.
    pub r_min: f64,
    /// Unobserved cells closer than this are assumed free, meters.
    pub blind_radius: f64,
    /// Local grid cell size, meters.
    pub grid_cell: f64,
}

impl Default for NavParams {
    fn default() -> Self {
        Self {
            h_floor: 0.08,
            h_low: 0.1,
            h_high: 1.5,
            ray_step: 0.05,
            n_rays: 60,
            r_min: 0.3,
            blind_radius: 0.5,
            grid_cell: 0.1,
        }
    }
}

impl NavParams {
    pub fn validate(&self) -> Result<(), NavError> {
        if !(0.0 < self.h_floor && self.h_floor < self.h_low && self.h_low < self.h_high) {
            return Err(NavError::InvalidParameter(
                "need 0 < h_floor < h_low < h_high".into(),
            ));
        }
        if self.ray_step <= 0.0 || self.grid_cell <= 0.0 || self.n_rays == 0 {
            return Err(NavError::InvalidParameter(
                "ray_step, grid_cell, n_rays must be positive".into(),
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Navigability mask
// ---------------------------------------------------------------------------

/// Per-pixel floor flags; dimensions match the source frame.
#[derive(Debug, Clone, PartialEq)]
pub struct NavigabilityMask {
    pub width: u32,
    pub height: u32,
    bits: Vec<bool>,
}

impl NavigabilityMask {
    pub fn get(&self, u: u32, v: u32) -> bool {
        self.bits[(v * self.width + u) as usize]
    }

    pub fn count_true(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Stable content hash for step logs.
    pub fn sha256(&self) -> String {
        let mut packed = vec![0u8; self.bits.len().div_ceil(8)];
        for (i, b) in self.bits.iter().enumerate() {
            if *b {
                packed[i / 8] |= 1 << (i % 8);
            }
        }
        crate::hash::sha256_hex(&packed)
    }

    /// Blue overlay for debugging dumps.
    pub fn overlay(&self, rgb: &image::RgbImage) -> image::RgbImage {
        let mut out = rgb.clone();
        for v in 0..self.height.min(rgb.height()) {
            for u in 0..self.width.min(rgb.width()) {
                if self.get(u, v) {
                    let p = out.get_pixel_mut(u, v);
                    p.0 = [
                        (p.0[0] as u16 / 2) as u8,
                        (p.0[1] as u16 / 2) as u8,
                        ((p.0[2] as u16 + 255) / 2) as u8,
                    ];
                }
            }
        }
        out
    }
}

fn check_dims(frame: &RgbdFrame, camera: &CameraModel) -> Result<(), NavError> {
    if frame.width() != camera.width || frame.height() != camera.height {
        return Err(NavError::DimensionMismatch {
            fw: frame.width(),
            fh: frame.height(),
            cw: camera.width,
            ch: camera.height,
        });
    }
    Ok(())
}

/// Mark pixels whose back-projected point lies on the floor plane.
pub fn navigability_mask(
    frame: &RgbdFrame,
    camera: &CameraModel,
    params: &NavParams,
) -> Result<NavigabilityMask, NavError> {
    check_dims(frame, camera)?;
    params.validate()?;
    let w = camera.width;
    let h = camera.height;
    let mut bits = vec![false; (w * h) as usize];
    for v in 0..h {
        for u in 0..w {
            let d = frame.depth_at(u, v) as f64;
            if d >= frame.max_range as f64 {
                continue;
            }
            let p = camera.pixel_ray_unchecked(u as f64 + 0.5, v as f64 + 0.5) * d;
            if (p.z + camera.cam_height).abs() <= params.h_floor {
                bits[(v * w + u) as usize] = true;
            }
        }
    }
    Ok(NavigabilityMask {
        width: w,
        height: h,
        bits,
    })
}

// ---------------------------------------------------------------------------
// Local obstacle grid
// ---------------------------------------------------------------------------

/// Observation state of one local grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellState {
    Unknown,
    Free,
    Occupied,
}

/// Top-down occupancy evidence in the robot frame, centered on the agent.
/// Cell (0, 0) covers the square with corner at `(-half_range, -half_range)`.
#[derive(Debug, Clone)]
pub struct LocalObstacleGrid {
    pub half_range: f64,
    pub cell: f64,
    pub n: usize,
    states: Vec<CellState>,
}

impl LocalObstacleGrid {
    pub fn new_empty(half_range: f64, cell: f64) -> Self {
        let n = (2.0 * half_range / cell).ceil() as usize;
        Self {
            half_range,
            cell,
            n,
            states: vec![CellState::Unknown; n * n],
        }
    }

    pub fn index_of(&self, p: Vec2) -> Option<(usize, usize)> {
        let ix = ((p.x + self.half_range) / self.cell).floor();
        let iy = ((p.y + self.half_range) / self.cell).floor();
        if ix < 0.0 || iy < 0.0 || ix >= self.n as f64 || iy >= self.n as f64 {
            return None;
        }
        Some((ix as usize, iy as usize))
    }

    /// Robot-frame center of cell `(ix, iy)`.
    pub fn center_of(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(
            (ix as f64 + 0.5) * self.cell - self.half_range,
            (iy as f64 + 0.5) * self.cell - self.half_range,
        )
    }

    pub fn state(&self, ix: usize, iy: usize) -> CellState {
        self.states[iy * self.n + ix]
    }

    pub fn state_at(&self, p: Vec2) -> CellState {
        match self.index_of(p) {
            Some((ix, iy)) => self.state(ix, iy),
            None => CellState::Unknown,
        }
    }

    /// Set a cell's state directly; occupied marks are absorbing.
    pub fn set_state(&mut self, ix: usize, iy: usize, s: CellState) {
        let cur = &mut self.states[iy * self.n + ix];
        *cur = match (*cur, s) {
            (CellState::Occupied, _) => CellState::Occupied,
            (_, s) => s,
        };
    }

    fn mark(&mut self, p: Vec2, s: CellState) {
        if let Some((ix, iy)) = self.index_of(p) {
            self.set_state(ix, iy, s);
        }
    }

    /// Iterate observed cells as `(ix, iy, state)`.
    pub fn observed_cells(&self) -> impl Iterator<Item = (usize, usize, CellState)> + '_ {
        (0..self.n * self.n).filter_map(move |i| {
            let s = self.states[i];
            if s == CellState::Unknown {
                None
            } else {
                Some((i % self.n, i / self.n, s))
            }
        })
    }

    /// Grayscale debug image: white free, black occupied, gray unknown.
    pub fn to_image(&self) -> image::RgbImage {
        let mut img = image::RgbImage::new(self.n as u32, self.n as u32);
        for iy in 0..self.n {
            for ix in 0..self.n {
                let c = match self.state(ix, iy) {
                    CellState::Unknown => [128, 128, 128],
                    CellState::Free => [255, 255, 255],
                    CellState::Occupied => [0, 0, 0],
                };
                // Flip y so +y (robot left) points up in the image.
                img.put_pixel(ix as u32, (self.n - 1 - iy) as u32, image::Rgb(c));
            }
        }
        img
    }
}

/// Back-project the frame into a top-down occupancy grid.
///
/// Floor-band points mark their cell free; obstacle-band points (heights in
/// `[h_low, h_high]` above the floor) mark their cell occupied. Occupied
/// wins over free within a cell. Everything else stays unknown — including
/// cells occluded behind obstacles.
pub fn local_obstacle_grid(
    frame: &RgbdFrame,
    camera: &CameraModel,
    params: &NavParams,
) -> Result<LocalObstacleGrid, NavError> {
    local_obstacle_grid_within(frame, camera, params, f64::INFINITY)
}

/// As [`local_obstacle_grid`] but ignoring pixels whose ray bearing exceeds
/// `max_bearing` from straight ahead — i.e. the grid a narrower FOV would
/// have produced from the same viewpoint.
pub fn local_obstacle_grid_within(
    frame: &RgbdFrame,
    camera: &CameraModel,
    params: &NavParams,
    max_bearing: f64,
) -> Result<LocalObstacleGrid, NavError> {
    check_dims(frame, camera)?;
    params.validate()?;
    let mut grid = LocalObstacleGrid::new_empty(camera.max_range, params.grid_cell);
    let floor_z = -camera.cam_height;
    for v in 0..camera.height {
        for u in 0..camera.width {
            let d = frame.depth_at(u, v) as f64;
            if d >= frame.max_range as f64 {
                continue;
            }
            let ray = camera.pixel_ray_unchecked(u as f64 + 0.5, v as f64 + 0.5);
            if ray.y.atan2(ray.x).abs() > max_bearing {
                continue;
            }
            let p = ray * d;
            let height = p.z - floor_z;
            if height.abs() <= params.h_floor {
                // Pull floor evidence a hair toward the camera and push
                // obstacle evidence a hair away, so points on a face that
                // sits exactly on a cell boundary bin into the correct side
                // despite the f32 depth quantization.
                grid.mark((ray * (d * (1.0 - 1e-6))).xy(), CellState::Free);
            } else if height >= params.h_low && height <= params.h_high {
                grid.mark((ray * (d * (1.0 + 1e-6))).xy(), CellState::Occupied);
            }
        }
    }
    Ok(grid)
}

// ---------------------------------------------------------------------------
// Reach marching
// ---------------------------------------------------------------------------

/// Farthest collision-free travel along direction `theta` over the grid.
///
/// The corridor around each march point is the agent radius plus half a
/// cell diagonal, so any cell whose area could intersect the swept disc is
/// tested.
pub fn reach_along(
    grid: &LocalObstacleGrid,
    theta: f64,
    params: &NavParams,
    body: AgentBody,
) -> f64 {
    let corridor = body.radius + grid.cell * std::f64::consts::SQRT_2 / 2.0;
    let dir = Vec2::new(theta.cos(), theta.sin());
    let cells = (corridor / grid.cell).ceil() as i64 + 1;
    let max_t = grid.half_range - corridor - grid.cell;
    let mut t = params.ray_step;
    let mut reach = 0.0;
    'march: while t <= max_t {
        let q = dir * t;
        let (cx, cy) = match grid.index_of(q) {
            Some(c) => c,
            None => break,
        };
        for dy in -cells..=cells {
            for dx in -cells..=cells {
                let nx = cx as i64 + dx;
                let ny = cy as i64 + dy;
                if nx < 0 || ny < 0 || nx >= grid.n as i64 || ny >= grid.n as i64 {
                    break 'march;
                }
                let center = grid.center_of(nx as usize, ny as usize);
                if center.dist(q) > corridor {
                    continue;
                }
                match grid.state(nx as usize, ny as usize) {
                    CellState::Occupied => break 'march,
                    CellState::Unknown => {
                        if center.norm() > params.blind_radius {
                            break 'march;
                        }
                    }
                    CellState::Free => {}
                }
            }
        }
        reach = t;
        t += params.ray_step;
    }
    reach
}

/// The initial candidate set: one ray per FOV bin, dropped when shorter
/// than `r_min`. Actions come out in ascending-theta order.
pub fn initial_actions(
    grid: &LocalObstacleGrid,
    camera: &CameraModel,
    params: &NavParams,
    body: AgentBody,
) -> Vec<PolarAction> {
    let mut out = Vec::new();
    for k in 0..params.n_rays {
        let theta =
            -camera.hfov / 2.0 + (k as f64 + 0.5) * camera.hfov / params.n_rays as f64;
        let r = reach_along(grid, theta, params, body);
        if r >= params.r_min {
            out.push(PolarAction::new(theta, r));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Pose, Rect, Vec3};
    use crate::sim::{render, BoxObstacle, HitLabel, Scene};

    fn cam() -> CameraModel {
        CameraModel::new(320, 180, 131f64.to_radians(), 25f64.to_radians(), 1.5, 5.0).unwrap()
    }

    fn open_floor() -> Scene {
        Scene {
            floor: Rect::new(Vec2::new(-15.0, -15.0), Vec2::new(15.0, 15.0)),
            boxes: vec![],
            goals: vec![],
            start: Pose::new(0.0, 0.0, 0.0),
            seed: 0,
        }
    }

    #[test]
    fn empty_floor_mask_splits_at_horizon() {
        let camera = cam();
        let frame = render(&open_floor(), Pose::new(0.0, 0.0, 0.0), &camera);
        let mask = navigability_mask(&frame, &camera, &NavParams::default()).unwrap();
        // Analytic horizon: a row's elevation is atan((h/2 - v)/focal)
        // minus the pitch; it crosses zero at v = h/2 - focal*tan(pitch).
        let v_horizon = camera.height as f64 / 2.0
            - camera.focal() * 25f64.to_radians().tan();
        for v in 0..camera.height {
            let expect_floor = (v as f64 + 0.5) > v_horizon
                && !frame.is_no_hit(camera.width / 2, v);
            assert_eq!(
                mask.get(camera.width / 2, v),
                expect_floor,
                "row {v}, horizon {v_horizon}"
            );
        }
    }

    #[test]
    fn full_wall_means_no_floor() {
        // Close enough that no floor is visible in front of the wall and
        // the visible face sits well above the floor band.
        let mut scene = open_floor();
        scene.boxes.push(BoxObstacle {
            min: Vec3::new(0.2, -10.0, 0.0),
            max: Vec3::new(0.6, 10.0, 1.5),
            label: "wall".into(),
            color: [90, 60, 60],
        });
        let camera = cam();
        let frame = render(&scene, Pose::new(0.0, 0.0, 0.0), &camera);
        let mask = navigability_mask(&frame, &camera, &NavParams::default()).unwrap();
        assert_eq!(mask.count_true(), 0);
    }

    #[test]
    fn box_footprint_is_masked_out_floor_around_is_not() {
        let mut scene = open_floor();
        scene.boxes.push(BoxObstacle {
            min: Vec3::new(1.8, -0.4, 0.0),
            max: Vec3::new(2.4, 0.4, 0.8),
            label: "crate".into(),
            color: [70, 70, 160],
        });
        let camera = cam();
        let frame = render(&scene, Pose::new(0.0, 0.0, 0.0), &camera);
        let mask = navigability_mask(&frame, &camera, &NavParams::default()).unwrap();
        let params = NavParams::default();
        let mut floor_pixels = 0;
        for v in 0..camera.height {
            for u in 0..camera.width {
                let d = frame.depth_at(u, v) as f64;
                match frame.hits[(v * camera.width + u) as usize] {
                    HitLabel::Box(_) => {
                        // The mask is purely geometric, so the strip of box
                        // face inside the floor height band passes it; every
                        // face pixel above the band must not.
                        let p = camera.pixel_ray_unchecked(u as f64 + 0.5, v as f64 + 0.5) * d;
                        if p.z + camera.cam_height > params.h_floor {
                            assert!(!mask.get(u, v), "box pixel marked floor");
                        }
                    }
                    HitLabel::Floor => {
                        floor_pixels += 1;
                        assert!(mask.get(u, v), "floor pixel not marked");
                    }
                    HitLabel::None => assert!(!mask.get(u, v)),
                }
            }
        }
        assert!(floor_pixels > 0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let camera = cam();
        let frame = render(&open_floor(), Pose::new(0.0, 0.0, 0.0), &camera);
        let other = CameraModel::new(64, 64, 1.0, 0.3, 1.5, 5.0).unwrap();
        assert!(matches!(
            navigability_mask(&frame, &other, &NavParams::default()),
            Err(NavError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn empty_floor_grid_has_no_occupied_cells() {
        let camera = cam();
        let frame = render(&open_floor(), Pose::new(0.0, 0.0, 0.0), &camera);
        let grid = local_obstacle_grid(&frame, &camera, &NavParams::default()).unwrap();
        assert!(grid
            .observed_cells()
            .all(|(_, _, s)| s != CellState::Occupied));
    }

    #[test]
    fn single_box_occupies_cells_near_its_footprint() {
        let mut scene = open_floor();
        scene.boxes.push(BoxObstacle {
            min: Vec3::new(1.7, -0.3, 0.0),
            max: Vec3::new(2.3, 0.3, 0.9),
            label: "crate".into(),
            color: [70, 70, 160],
        });
        let camera = cam();
        let frame = render(&scene, Pose::new(0.0, 0.0, 0.0), &camera);
        let grid = local_obstacle_grid(&frame, &camera, &NavParams::default()).unwrap();
        let fp = scene.boxes[0].footprint();
        let mut occupied = 0;
        for (ix, iy, s) in grid.observed_cells() {
            if s == CellState::Occupied {
                occupied += 1;
                let c = grid.center_of(ix, iy);
                assert!(
                    fp.distance(c) <= grid.cell * std::f64::consts::SQRT_2,
                    "occupied cell {c:?} far from footprint"
                );
            }
        }
        assert!(occupied > 0);
    }

    #[test]
    fn cells_behind_a_box_stay_unknown() {
        let mut scene = open_floor();
        scene.boxes.push(BoxObstacle {
            min: Vec3::new(1.5, -1.0, 0.0),
            max: Vec3::new(2.0, 1.0, 1.5),
            label: "tall".into(),
            color: [70, 70, 160],
        });
        let camera = cam();
        let frame = render(&scene, Pose::new(0.0, 0.0, 0.0), &camera);
        let grid = local_obstacle_grid(&frame, &camera, &NavParams::default()).unwrap();
        // Directly behind the box along +x.
        assert_eq!(grid.state_at(Vec2::new(3.0, 0.0)), CellState::Unknown);
    }

    #[test]
    fn floor_pixels_never_land_in_occupied_cells() {
        // Footprints on the 0.1 lattice keep floor and obstacle evidence in
        // separate cells.
        let mut scene = open_floor();
        scene.boxes.push(BoxObstacle {
            min: Vec3::new(1.6, -0.5, 0.0),
            max: Vec3::new(2.2, 0.5, 0.9),
            label: "crate".into(),
            color: [70, 70, 160],
        });
        let camera = cam();
        let params = NavParams::default();
        let frame = render(&scene, Pose::new(0.0, 0.0, 0.0), &camera);
        let grid = local_obstacle_grid(&frame, &camera, &params).unwrap();
        let mask = navigability_mask(&frame, &camera, &params).unwrap();
        for v in 0..camera.height {
            for u in 0..camera.width {
                if !mask.get(u, v) {
                    continue;
                }
                let d = frame.depth_at(u, v) as f64;
                // Same boundary nudge the grid builder applies to floor
                // evidence.
                let p = camera.pixel_ray_unchecked(u as f64 + 0.5, v as f64 + 0.5)
                    * (d * (1.0 - 1e-6));
                assert_ne!(
                    grid.state_at(p.xy()),
                    CellState::Occupied,
                    "floor pixel ({u},{v}) in occupied cell"
                );
            }
        }
    }

    #[test]
    fn open_floor_reach_approaches_observed_range() {
        // Full sensor resolution: at low resolutions the floor rows beyond
        // ~3.5 m subsample the 0.1 m grid and leave unknown gaps, which
        // (correctly, conservatively) cap the reach early.
        let camera =
            CameraModel::new(1920, 1080, 131f64.to_radians(), 25f64.to_radians(), 1.5, 5.0)
                .unwrap();
        let params = NavParams::default();
        let body = AgentBody::default();
        let frame = render(&open_floor(), Pose::new(0.0, 0.0, 0.0), &camera);
        let grid = local_obstacle_grid(&frame, &camera, &params).unwrap();
        // Farthest observable floor: ray length capped at max_range, so the
        // horizontal reach caps at sqrt(range^2 - h^2), minus the corridor
        // slack against unobserved cells beyond it.
        let expected = ((camera.max_range * camera.max_range)
            - camera.cam_height * camera.cam_height)
            .sqrt();
        let r = reach_along(&grid, 0.0, &params, body);
        let corridor = body.radius + params.grid_cell * std::f64::consts::SQRT_2 / 2.0;
        assert!(
            r >= expected - corridor - 3.0 * params.grid_cell && r <= expected + params.ray_step,
            "reach {r}, observable floor to {expected}"
        );
    }

    #[test]
    fn wall_ahead_caps_reach_and_oblique_rays_reach_farther() {
        let mut scene = open_floor();
        scene.boxes.push(BoxObstacle {
            min: Vec3::new(1.0, -10.0, 0.0),
            max: Vec3::new(1.4, 10.0, 1.5),
            label: "wall".into(),
            color: [90, 60, 60],
        });
        let camera = cam();
        let params = NavParams::default();
        let body = AgentBody::default();
        let frame = render(&scene, Pose::new(0.0, 0.0, 0.0), &camera);
        let grid = local_obstacle_grid(&frame, &camera, &params).unwrap();
        let r0 = reach_along(&grid, 0.0, &params, body);
        // Head-on: stop near 1.0 - corridor.
        let corridor = body.radius + params.grid_cell * std::f64::consts::SQRT_2 / 2.0;
        assert!(
            (r0 - (1.0 - corridor)).abs() <= 2.0 * params.grid_cell + params.ray_step,
            "r0 = {r0}"
        );
        // Oblique rays run longer, roughly 1/cos(theta) up to corridor
        // slack. Stay within the central wedge: nearer the FOV edge the
        // corridor pokes into unobserved territory and reach is clipped
        // conservatively.
        for deg in [20.0f64, 30.0] {
            let th = deg.to_radians();
            let r = reach_along(&grid, th, &params, body);
            assert!(r > r0, "oblique reach {r} not beyond head-on {r0}");
            let expected = (1.0 - corridor) / th.cos();
            assert!(
                (r - expected).abs() <= 3.0 * params.grid_cell + params.ray_step,
                "theta {deg}: reach {r}, expected about {expected}"
            );
        }
    }

    #[test]
    fn boxed_in_corner_yields_empty_action_set() {
        let mut scene = open_floor();
        // A tight pocket of tall walls all around the agent.
        for (min, max) in [
            ((0.35, -1.0), (0.55, 1.0)),
            ((-0.55, -1.0), (-0.35, 1.0)),
            ((-0.55, 0.35), (0.55, 0.55)),
            ((-0.55, -0.55), (0.55, -0.35)),
        ] {
            scene.boxes.push(BoxObstacle {
                min: Vec3::new(min.0, min.1, 0.0),
                max: Vec3::new(max.0, max.1, 1.5),
                label: "pocket".into(),
                color: [80, 80, 80],
            });
        }
        let camera = cam();
        let params = NavParams::default();
        let frame = render(&scene, Pose::new(0.0, 0.0, 0.0), &camera);
        let grid = local_obstacle_grid(&frame, &camera, &params).unwrap();
        let actions = initial_actions(&grid, &camera, &params, AgentBody::default());
        assert!(actions.is_empty(), "got {} actions", actions.len());
    }

    #[test]
    fn shrinking_fov_never_extends_reach() {
        let mut scene = open_floor();
        scene.boxes.push(BoxObstacle {
            min: Vec3::new(1.6, -0.8, 0.0),
            max: Vec3::new(2.2, 0.8, 1.0),
            label: "crate".into(),
            color: [70, 70, 160],
        });
        let params = NavParams::default();
        let body = AgentBody::default();
        let camera = cam();
        let pose = Pose::new(0.0, 0.0, 0.0);
        let frame = render(&scene, pose, &camera);
        let grid_wide = local_obstacle_grid(&frame, &camera, &params).unwrap();
        let narrow_half = 50f64.to_radians();
        let grid_narrow =
            local_obstacle_grid_within(&frame, &camera, &params, narrow_half).unwrap();
        for k in 0..params.n_rays {
            let theta = -narrow_half + (k as f64 + 0.5) * 2.0 * narrow_half / params.n_rays as f64;
            let r_wide = reach_along(&grid_wide, theta, &params, body);
            let r_narrow = reach_along(&grid_narrow, theta, &params, body);
            assert!(
                r_narrow <= r_wide + 1e-9,
                "theta {theta}: narrow {r_narrow} > wide {r_wide}"
            );
        }
    }
}
