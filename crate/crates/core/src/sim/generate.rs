//! Seeded random scene generation.
//!
//! Layouts are rooms separated by thin walls with door gaps, furnished
//! with labeled colored boxes. All footprints snap to a 0.1 m lattice (the
//! local-grid and voxel-map cell size), which keeps grid-based invariants
//! exact. Generation is deterministic for a fixed seed and retries whole
//! layouts until validation and goal reachability pass.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{Pose, Rect, Vec2, Vec3};
use crate::sim::geodesic::geodesic_distance;
use crate::sim::motion::position_free;
use crate::sim::scene::{AgentBody, BoxObstacle, GoalObject, Scene};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("generation parameters must be positive: {0}")]
    InvalidParams(String),
    #[error("no valid layout found for seed {seed} after {attempts} attempts")]
    Exhausted { seed: u64, attempts: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    /// Rooms to partition the floor into (1 = no interior walls).
    pub n_rooms: usize,
    /// Furniture boxes to place.
    pub n_objects: usize,
    /// Side length of the square floor, meters.
    pub extent: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n_rooms: 2,
            n_objects: 5,
            extent: 9.0,
        }
    }
}

const WALL_HEIGHT: f64 = 1.5;
const WALL_THICKNESS: f64 = 0.1;
const LATTICE: f64 = 0.1;
const LAYOUT_ATTEMPTS: u32 = 40;
/// A goal closer than this to the start makes a degenerate episode.
const MIN_GOAL_GEODESIC: f64 = 2.0;
/// Start clearance; also covers the navigability blind zone under the
/// camera frustum.
const START_CLEARANCE: f64 = 0.6;

const LABELS: [&str; 10] = [
    "sofa", "chair", "table", "plant", "tv", "bed", "lamp", "shelf", "toilet", "crate",
];

const PALETTE: [(&str, [u8; 3]); 10] = [
    ("red", [198, 58, 58]),
    ("blue", [66, 88, 196]),
    ("green", [70, 168, 92]),
    ("yellow", [208, 196, 72]),
    ("purple", [148, 82, 188]),
    ("orange", [226, 138, 60]),
    ("teal", [62, 178, 178]),
    ("brown", [138, 100, 70]),
    ("pink", [226, 138, 178]),
    ("gray", [120, 120, 120]),
];

fn snap(v: f64) -> f64 {
    (v / LATTICE).round() * LATTICE
}

fn rect_gap(a: &Rect, b: &Rect) -> f64 {
    let dx = (a.min.x - b.max.x).max(b.min.x - a.max.x).max(0.0);
    let dy = (a.min.y - b.max.y).max(b.min.y - a.max.y).max(0.0);
    dx.hypot(dy)
}

fn wall_box(min: Vec2, max: Vec2, idx: usize) -> BoxObstacle {
    BoxObstacle {
        min: Vec3::new(min.x, min.y, 0.0),
        max: Vec3::new(max.x, max.y, WALL_HEIGHT),
        label: format!("wall_{idx}"),
        color: [230, 228, 220],
    }
}

fn try_layout(rng: &mut ChaCha8Rng, params: &GenParams, seed: u64) -> Option<Scene> {
    let e = params.extent;
    let floor = Rect::new(Vec2::new(0.0, 0.0), Vec2::new(e, e));
    let mut boxes: Vec<BoxObstacle> = Vec::new();

    // Dividing walls with door gaps, alternating orientation.
    for w in 0..params.n_rooms.saturating_sub(1) {
        let pos = snap(rng.random_range(0.3 * e..0.7 * e));
        let door_w = snap(rng.random_range(1.1..1.5));
        let door_lo = snap(rng.random_range(0.5..(e - door_w - 0.5)));
        let door_hi = door_lo + door_w;
        let vertical = w % 2 == 0;
        let idx = boxes.len();
        if vertical {
            if door_lo > 0.05 {
                boxes.push(wall_box(
                    Vec2::new(pos, 0.0),
                    Vec2::new(pos + WALL_THICKNESS, door_lo),
                    idx,
                ));
            }
            if door_hi < e - 0.05 {
                boxes.push(wall_box(
                    Vec2::new(pos, door_hi),
                    Vec2::new(pos + WALL_THICKNESS, e),
                    idx + 1,
                ));
            }
        } else {
            if door_lo > 0.05 {
                boxes.push(wall_box(
                    Vec2::new(0.0, pos),
                    Vec2::new(door_lo, pos + WALL_THICKNESS),
                    idx,
                ));
            }
            if door_hi < e - 0.05 {
                boxes.push(wall_box(
                    Vec2::new(door_hi, pos),
                    Vec2::new(e, pos + WALL_THICKNESS),
                    idx + 1,
                ));
            }
        }
    }

    // Furniture.
    let mut object_indices = Vec::new();
    for i in 0..params.n_objects {
        let (color_name, color) = PALETTE[i % PALETTE.len()];
        let label = LABELS[i % LABELS.len()];
        let mut placed = false;
        for _ in 0..60 {
            let w = snap(rng.random_range(0.3..0.9));
            let d = snap(rng.random_range(0.3..0.9));
            let x = snap(rng.random_range(0.3..(e - w - 0.3)));
            let y = snap(rng.random_range(0.3..(e - d - 0.3)));
            let fp = Rect::new(Vec2::new(x, y), Vec2::new(x + w, y + d));
            if boxes.iter().any(|b| rect_gap(&b.footprint(), &fp) < 0.5) {
                continue;
            }
            let h = snap(rng.random_range(0.4..1.4));
            boxes.push(BoxObstacle {
                min: Vec3::new(fp.min.x, fp.min.y, 0.0),
                max: Vec3::new(fp.max.x, fp.max.y, h),
                label: label.to_string(),
                color,
            });
            object_indices.push((boxes.len() - 1, color_name));
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }

    // Start pose in open space.
    let mut start = None;
    for _ in 0..100 {
        let p = Vec2::new(
            rng.random_range(0.7..(e - 0.7)),
            rng.random_range(0.7..(e - 0.7)),
        );
        let clear = boxes
            .iter()
            .all(|b| b.footprint().distance(p) >= START_CLEARANCE)
            && floor.shrunk(START_CLEARANCE).contains(p);
        if clear {
            start = Some(Pose::new(
                p.x,
                p.y,
                rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            ));
            break;
        }
    }
    let start = start?;

    // Goals on distinct objects.
    let n_goals = object_indices.len().min(2);
    let mut pool = object_indices.clone();
    let mut goals = Vec::new();
    for _ in 0..n_goals {
        let k = rng.random_range(0..pool.len());
        let (box_index, color_name) = pool.swap_remove(k);
        let b = &boxes[box_index];
        goals.push(GoalObject {
            label: b.label.clone(),
            description: format!("the {} {}", color_name, b.label),
            position: b.center_xy(),
            box_index,
        });
    }

    let scene = Scene {
        floor,
        boxes,
        goals,
        start,
        seed,
    };
    if scene.validate().is_err() {
        return None;
    }
    // Every goal must be reachable and far enough to be worth navigating to.
    let body = AgentBody::default();
    for g in &scene.goals {
        let d = geodesic_distance(&scene, scene.start.position(), g.position, body);
        if !d.is_finite() || d < MIN_GOAL_GEODESIC {
            return None;
        }
    }
    // The start must not sit inside the navigability blind zone of any box.
    if !position_free(&scene, scene.start.position(), START_CLEARANCE) {
        return None;
    }
    Some(scene)
}

/// Generate a random scene; deterministic for a fixed `(seed, params)`.
pub fn generate_scene(seed: u64, params: &GenParams) -> Result<Scene, GenerateError> {
    if params.n_rooms == 0 || params.n_objects == 0 || params.extent <= 2.0 {
        return Err(GenerateError::InvalidParams(format!(
            "n_rooms {}, n_objects {}, extent {}",
            params.n_rooms, params.n_objects, params.extent
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..LAYOUT_ATTEMPTS {
        if let Some(scene) = try_layout(&mut rng, params, seed) {
            return Ok(scene);
        }
    }
    Err(GenerateError::Exhausted {
        seed,
        attempts: LAYOUT_ATTEMPTS,
    })
}
