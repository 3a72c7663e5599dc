//! Top-down exploration map.
//!
//! Observed free area within [`EXPLORED_RADIUS`] of the agent becomes
//! *explored*; observed free area beyond it becomes *unexplored* until the
//! agent gets close enough. Explored is absorbing, and so is occupied in
//! the parallel occupancy channel. Cells never observed stay *unseen* and
//! count as unexplored for exploration bias. Only cells actually present
//! in the frame's obstacle grid are touched — the 2 m rule does not reach
//! through walls.

use serde::{Deserialize, Serialize};

use crate::geom::{PolarAction, Pose, Vec2};
use crate::navigability::{CellState, LocalObstacleGrid};

/// Observed area within this range of the agent is marked explored.
pub const EXPLORED_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExploreState {
    Unseen,
    Unexplored,
    Explored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Occupancy {
    Unknown,
    Free,
    Occupied,
}

/// World-frame exploration grid with a parallel occupancy channel.
#[derive(Debug, Clone)]
pub struct VoxelMap {
    /// World coordinates of the min corner of cell (0, 0).
    origin: Vec2,
    cell: f64,
    width: usize,
    height: usize,
    states: Vec<ExploreState>,
    occupancy: Vec<Occupancy>,
}

impl VoxelMap {
    pub const DEFAULT_CELL: f64 = 0.1;

    pub fn new(origin: Vec2, width_m: f64, height_m: f64, cell: f64) -> Self {
        let width = (width_m / cell).ceil().max(1.0) as usize;
        let height = (height_m / cell).ceil().max(1.0) as usize;
        Self {
            origin,
            cell,
            width,
            height,
            states: vec![ExploreState::Unseen; width * height],
            occupancy: vec![Occupancy::Unknown; width * height],
        }
    }

    /// Map sized to a floor rectangle plus a margin.
    pub fn for_floor(floor: &crate::geom::Rect, cell: f64) -> Self {
        let margin = 1.0;
        Self::new(
            floor.min - Vec2::new(margin, margin),
            floor.width() + 2.0 * margin,
            floor.height() + 2.0 * margin,
            cell,
        )
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    fn index_of(&self, p: Vec2) -> Option<usize> {
        let ix = ((p.x - self.origin.x) / self.cell).floor();
        let iy = ((p.y - self.origin.y) / self.cell).floor();
        if ix < 0.0 || iy < 0.0 || ix >= self.width as f64 || iy >= self.height as f64 {
            return None;
        }
        Some(iy as usize * self.width + ix as usize)
    }

    pub fn state_at(&self, p: Vec2) -> ExploreState {
        match self.index_of(p) {
            Some(i) => self.states[i],
            None => ExploreState::Unseen,
        }
    }

    pub fn occupancy_at(&self, p: Vec2) -> Occupancy {
        match self.index_of(p) {
            Some(i) => self.occupancy[i],
            None => Occupancy::Unknown,
        }
    }

    pub fn explored_count(&self) -> usize {
        self.states
            .iter()
            .filter(|s| **s == ExploreState::Explored)
            .count()
    }

    /// World center coordinates of every cell in the given state.
    pub fn cells_in_state(&self, state: ExploreState) -> Vec<Vec2> {
        let mut out = Vec::new();
        for iy in 0..self.height {
            for ix in 0..self.width {
                if self.states[iy * self.width + ix] == state {
                    out.push(Vec2::new(
                        self.origin.x + (ix as f64 + 0.5) * self.cell,
                        self.origin.y + (iy as f64 + 0.5) * self.cell,
                    ));
                }
            }
        }
        out
    }

    /// Grow the map until it contains `p`, doubling per axis as needed.
    fn ensure_contains(&mut self, p: Vec2) {
        while self.index_of(p).is_none() {
            let grow_left = p.x < self.origin.x;
            let grow_down = p.y < self.origin.y;
            let grow_right = p.x >= self.origin.x + self.width as f64 * self.cell;
            let grow_up = p.y >= self.origin.y + self.height as f64 * self.cell;
            let new_w = if grow_left || grow_right {
                self.width * 2
            } else {
                self.width
            };
            let new_h = if grow_down || grow_up {
                self.height * 2
            } else {
                self.height
            };
            let dx = if grow_left { self.width } else { 0 };
            let dy = if grow_down { self.height } else { 0 };
            let mut states = vec![ExploreState::Unseen; new_w * new_h];
            let mut occupancy = vec![Occupancy::Unknown; new_w * new_h];
            for iy in 0..self.height {
                for ix in 0..self.width {
                    let src = iy * self.width + ix;
                    let dst = (iy + dy) * new_w + (ix + dx);
                    states[dst] = self.states[src];
                    occupancy[dst] = self.occupancy[src];
                }
            }
            self.origin = self.origin
                - Vec2::new(dx as f64 * self.cell, dy as f64 * self.cell);
            self.width = new_w;
            self.height = new_h;
            self.states = states;
            self.occupancy = occupancy;
        }
    }

    fn promote(&mut self, idx: usize, to: ExploreState) {
        let cur = self.states[idx];
        self.states[idx] = match (cur, to) {
            (ExploreState::Explored, _) => ExploreState::Explored,
            (_, s) => s,
        };
    }

    /// Fold one frame's obstacle grid (robot frame of `pose`) into the map.
    ///
    /// Returns counts of newly explored / newly unexplored / newly occupied
    /// cells for step logging.
    pub fn update(&mut self, pose: Pose, grid: &LocalObstacleGrid) -> UpdateDiff {
        let mut diff = UpdateDiff::default();
        for (ix, iy, state) in grid.observed_cells() {
            let local = grid.center_of(ix, iy);
            let world = pose.robot_to_world(local);
            self.ensure_contains(world);
            let idx = self.index_of(world).expect("grown to contain");
            match state {
                CellState::Occupied => {
                    if self.occupancy[idx] != Occupancy::Occupied {
                        self.occupancy[idx] = Occupancy::Occupied;
                        diff.occupied_added += 1;
                    }
                }
                CellState::Free => {
                    if self.occupancy[idx] == Occupancy::Unknown {
                        self.occupancy[idx] = Occupancy::Free;
                    }
                    let before = self.states[idx];
                    if local.norm() <= EXPLORED_RADIUS {
                        self.promote(idx, ExploreState::Explored);
                    } else {
                        self.promote(idx, ExploreState::Unexplored);
                    }
                    match (before, self.states[idx]) {
                        (a, b) if a == b => {}
                        (_, ExploreState::Explored) => diff.explored_added += 1,
                        (_, ExploreState::Unexplored) => diff.unexplored_added += 1,
                        _ => {}
                    }
                }
                CellState::Unknown => {}
            }
        }
        // The agent stands on its own cell; the camera cannot see it but it
        // is explored by construction.
        let own = pose.position();
        self.ensure_contains(own);
        let idx = self.index_of(own).expect("grown to contain");
        if self.states[idx] != ExploreState::Explored {
            diff.explored_added += 1;
        }
        self.promote(idx, ExploreState::Explored);
        if self.occupancy[idx] == Occupancy::Unknown {
            self.occupancy[idx] = Occupancy::Free;
        }
        diff
    }

    /// Exploration indicator for an action: true when its endpoint cell is
    /// unexplored or never observed.
    pub fn is_unexplored(&self, pose: Pose, a: PolarAction) -> bool {
        let endpoint = pose.robot_to_world(a.endpoint());
        matches!(
            self.state_at(endpoint),
            ExploreState::Unseen | ExploreState::Unexplored
        )
    }

    /// Snapshot in the debug palette: gray explored, green unexplored,
    /// black occupied, white unseen.
    pub fn to_image(&self) -> image::RgbImage {
        let mut img = image::RgbImage::new(self.width as u32, self.height as u32);
        for iy in 0..self.height {
            for ix in 0..self.width {
                let idx = iy * self.width + ix;
                let c = if self.occupancy[idx] == Occupancy::Occupied {
                    [0, 0, 0]
                } else {
                    match self.states[idx] {
                        ExploreState::Unseen => [255, 255, 255],
                        ExploreState::Unexplored => [80, 200, 80],
                        ExploreState::Explored => [150, 150, 150],
                    }
                };
                // +y up in the exported image.
                img.put_pixel(ix as u32, (self.height - 1 - iy) as u32, image::Rgb(c));
            }
        }
        img
    }
}

/// Per-update change counts, recorded in step logs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateDiff {
    pub explored_added: usize,
    pub unexplored_added: usize,
    pub occupied_added: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::navigability::LocalObstacleGrid;

    /// Local grid with all cells in the forward wedge out to `range` free.
    fn wedge_grid(range: f64, half_fov: f64) -> LocalObstacleGrid {
        let mut g = LocalObstacleGrid::new_empty(5.0, 0.1);
        let n = g.n;
        for iy in 0..n {
            for ix in 0..n {
                let c = g.center_of(ix, iy);
                if c.norm() <= range && c.y.atan2(c.x).abs() <= half_fov {
                    g.set_state(ix, iy, CellState::Free);
                }
            }
        }
        g
    }

    fn fresh_map() -> VoxelMap {
        VoxelMap::new(Vec2::new(-8.0, -8.0), 16.0, 16.0, 0.1)
    }

    #[test]
    fn near_cells_become_explored_far_cells_unexplored() {
        let mut map = fresh_map();
        let pose = Pose::new(0.0, 0.0, 0.0);
        map.update(pose, &wedge_grid(4.0, 0.8));
        assert_eq!(map.state_at(Vec2::new(1.0, 0.0)), ExploreState::Explored);
        assert_eq!(map.state_at(Vec2::new(3.0, 0.0)), ExploreState::Unexplored);
    }

    #[test]
    fn advancing_re_observation_promotes_to_explored() {
        let mut map = fresh_map();
        map.update(Pose::new(0.0, 0.0, 0.0), &wedge_grid(4.0, 0.8));
        let target = Vec2::new(3.0, 0.0);
        assert_eq!(map.state_at(target), ExploreState::Unexplored);
        // Advance 1.5 m and look again: now 1.5 m away, within 2 m.
        map.update(Pose::new(1.5, 0.0, 0.0), &wedge_grid(4.0, 0.8));
        assert_eq!(map.state_at(target), ExploreState::Explored);
    }

    #[test]
    fn explored_is_absorbing() {
        let mut map = fresh_map();
        map.update(Pose::new(2.0, 0.0, 0.0), &wedge_grid(4.0, 0.8));
        let target = Vec2::new(3.0, 0.0);
        assert_eq!(map.state_at(target), ExploreState::Explored);
        // Re-observe from far away: stays explored.
        map.update(Pose::new(-1.5, 0.0, 0.0), &wedge_grid(5.0, 0.8));
        assert_eq!(map.state_at(target), ExploreState::Explored);
    }

    #[test]
    fn own_cell_is_explored_after_any_update() {
        let mut map = fresh_map();
        let pose = Pose::new(0.3, -0.2, 1.1);
        map.update(pose, &wedge_grid(4.0, 0.8));
        assert!(!map.is_unexplored(pose, PolarAction::TURN_AROUND));
    }

    #[test]
    fn endpoint_queries_follow_the_two_meter_rule() {
        let mut map = fresh_map();
        let pose = Pose::new(0.0, 0.0, 0.0);
        map.update(pose, &wedge_grid(4.5, 0.8));
        assert!(!map.is_unexplored(pose, PolarAction::new(0.0, 1.0)));
        assert!(map.is_unexplored(pose, PolarAction::new(0.0, 3.0)));
        // Never observed at all: strongest exploration target.
        assert!(map.is_unexplored(pose, PolarAction::new(std::f64::consts::PI / 2.0, 3.0)));
    }

    #[test]
    fn explored_set_is_monotone_under_random_updates() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut map = fresh_map();
        let mut prev = 0usize;
        for _ in 0..100 {
            let pose = Pose::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.1..3.1),
            );
            map.update(pose, &wedge_grid(rng.random_range(1.0..5.0), 0.9));
            let count = map.explored_count();
            assert!(count >= prev, "explored shrank: {count} < {prev}");
            prev = count;
        }
    }

    #[test]
    fn update_is_frame_invariant_within_a_cell() {
        // Observe the same world content (a free disc around a fixed world
        // anchor) from two agent poses at the same distance from the
        // anchor, expressing the observation in each pose's own frame. The
        // resulting explored/unexplored sets must agree as sets within one
        // cell: rotated-lattice resampling may leave isolated holes, so the
        // comparison dilates rather than matching cell-by-cell.
        // The explored radius is anchored to the agent position, so the
        // rigid transform relating the two frames is a rotation about the
        // agent: same position, different yaw.
        let anchor = Vec2::new(1.8, 0.4);
        let p1 = Pose::new(0.4, -0.3, 0.6);
        let p2 = Pose::new(0.4, -0.3, -1.9);
        let build_grid = |pose: &Pose| {
            let mut g = LocalObstacleGrid::new_empty(6.0, 0.1);
            for iy in 0..g.n {
                for ix in 0..g.n {
                    let local = g.center_of(ix, iy);
                    let world = pose.robot_to_world(local);
                    if world.dist(anchor) <= 1.2 {
                        g.set_state(ix, iy, CellState::Free);
                    }
                }
            }
            g
        };
        let mut m1 = fresh_map();
        m1.update(p1, &build_grid(&p1));
        let mut m2 = fresh_map();
        m2.update(p2, &build_grid(&p2));
        let check_dilated = |from: &VoxelMap, to: &VoxelMap, state: ExploreState| {
            let cells = from.cells_in_state(state);
            assert!(!cells.is_empty());
            for c in cells {
                // Own-cell marks legitimately differ between the two runs.
                if c.dist(p1.position()) < 0.25 || c.dist(p2.position()) < 0.25 {
                    continue;
                }
                let matched = (-1..=1).any(|dy: i32| {
                    (-1..=1).any(|dx: i32| {
                        to.state_at(c + Vec2::new(dx as f64 * 0.1, dy as f64 * 0.1)) == state
                    })
                });
                assert!(matched, "{state:?} cell at {c:?} unmatched within one cell");
            }
        };
        for state in [ExploreState::Explored, ExploreState::Unexplored] {
            check_dilated(&m1, &m2, state);
            check_dilated(&m2, &m1, state);
        }
    }

    #[test]
    fn update_touches_nothing_outside_the_observed_wedge() {
        let mut map = fresh_map();
        let pose = Pose::new(0.5, 0.5, 0.7);
        let half_fov = 0.8;
        let range = 3.0;
        map.update(pose, &wedge_grid(range, half_fov));
        for iy in 0..160 {
            for ix in 0..160 {
                let p = Vec2::new(-8.0 + (ix as f64 + 0.5) * 0.1, -8.0 + (iy as f64 + 0.5) * 0.1);
                if map.state_at(p) == ExploreState::Unseen {
                    continue;
                }
                let local = pose.world_to_robot(p);
                let in_wedge = local.norm() <= range + 0.15
                    && local.y.atan2(local.x).abs() <= half_fov + 0.15;
                let own_cell = p.dist(pose.position()) <= 0.15;
                assert!(
                    in_wedge || own_cell,
                    "cell at {p:?} touched outside the wedge"
                );
            }
        }
    }
}
