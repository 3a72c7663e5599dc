//! Agent motion with sliding or stop-on-contact collision response.
//!
//! A polar action rotates the agent in place, then translates it along the
//! new heading. Translation is integrated in [`MOTION_SUBSTEP`] increments;
//! each substep is committed only if the agent disc stays clear of every
//! box footprint (inflated by the body radius) and of the floor boundary.
//! On contact with `allow_slide` on, the remaining motion is projected onto
//! the contact tangent; two simultaneous contacts (a corner) stop the
//! motion outright.

use crate::geom::{normalize_angle, PolarAction, Pose, Vec2};
use crate::sim::scene::{AgentBody, Scene};

/// Translation substep, meters. Small enough that tunneling error stays
/// below the geodesic grid resolution.
pub const MOTION_SUBSTEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub pose: Pose,
    /// Whether any contact occurred during the translation.
    pub collided: bool,
}

/// Unit normals of every surface the disc at `p` is touching, pointing
/// away from the obstacle.
fn contact_normals(scene: &Scene, p: Vec2, radius: f64) -> Vec<Vec2> {
    let mut normals: Vec<Vec2> = Vec::new();
    let mut push = |n: Vec2| {
        if normals.iter().all(|m| m.dot(n) < 0.999) {
            normals.push(n);
        }
    };
    for b in &scene.boxes {
        let fp = b.footprint();
        let c = fp.closest_point(p);
        let d = p - c;
        let dist = d.norm();
        if dist < radius {
            if dist > 1e-12 {
                push(d / dist);
            } else {
                // Center inside the footprint: push out along the axis of
                // least penetration.
                let dx = (p.x - fp.min.x).min(fp.max.x - p.x);
                let dy = (p.y - fp.min.y).min(fp.max.y - p.y);
                if dx < dy {
                    let sign = if p.x - fp.min.x < fp.max.x - p.x { -1.0 } else { 1.0 };
                    push(Vec2::new(sign, 0.0));
                } else {
                    let sign = if p.y - fp.min.y < fp.max.y - p.y { -1.0 } else { 1.0 };
                    push(Vec2::new(0.0, sign));
                }
            }
        }
    }
    // The floor boundary behaves like a wall.
    let inner = scene.floor.shrunk(radius);
    if p.x < inner.min.x {
        push(Vec2::new(1.0, 0.0));
    }
    if p.x > inner.max.x {
        push(Vec2::new(-1.0, 0.0));
    }
    if p.y < inner.min.y {
        push(Vec2::new(0.0, 1.0));
    }
    if p.y > inner.max.y {
        push(Vec2::new(0.0, -1.0));
    }
    normals
}

/// Whether the agent disc at `p` is collision-free.
pub(crate) fn position_free(scene: &Scene, p: Vec2, radius: f64) -> bool {
    if !scene.floor.shrunk(radius).contains(p) {
        return false;
    }
    scene
        .boxes
        .iter()
        .all(|b| b.footprint().distance(p) >= radius)
}

/// Execute a polar action from `pose`. Requires `action.r >= 0`.
pub fn step(
    scene: &Scene,
    pose: Pose,
    action: PolarAction,
    body: AgentBody,
    allow_slide: bool,
) -> StepOutcome {
    debug_assert!(action.r >= 0.0);
    let yaw = normalize_angle(pose.yaw + action.theta);
    let mut pos = pose.position();
    let mut dir = Vec2::new(yaw.cos(), yaw.sin());
    let mut remaining = action.r.max(0.0);
    let mut collided = false;
    let mut stalls = 0u32;
    let max_iters = (action.r / MOTION_SUBSTEP) as u64 * 4 + 64;
    let mut iters = 0u64;
    while remaining > 1e-9 {
        iters += 1;
        if iters > max_iters || stalls > 8 {
            break;
        }
        let step_len = remaining.min(MOTION_SUBSTEP);
        let cand = pos + dir * step_len;
        let contacts = contact_normals(scene, cand, body.radius);
        if contacts.is_empty() {
            pos = cand;
            remaining -= step_len;
            stalls = 0;
            continue;
        }
        collided = true;
        if !allow_slide || contacts.len() >= 2 {
            break;
        }
        // Project the remaining motion onto the contact tangent.
        let n = contacts[0];
        let m = dir * remaining;
        let tangential = m - n * m.dot(n);
        let t_len = tangential.norm();
        if t_len < 1e-6 {
            break;
        }
        dir = tangential / t_len;
        remaining = t_len;
        stalls += 1;
    }
    StepOutcome {
        pose: Pose::new(pos.x, pos.y, yaw),
        collided,
    }
}
