//! Ground-truth shortest paths over an inflated occupancy grid.
//!
//! Distances are computed on a fine grid (0.05 m cells) inflated by the
//! agent radius, 8-connected with diagonal cost sqrt(2). Endpoints that
//! fall on blocked cells (e.g. a goal at a box center) are snapped to the
//! nearest free cell within [`SNAP_RADIUS`] meters. Unreachable targets
//! yield `f64::INFINITY`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::geom::Vec2;
use crate::sim::scene::{AgentBody, Scene};

/// Grid resolution in meters; keeps path-length error under a few percent
/// at room scale.
pub const GEODESIC_RESOLUTION: f64 = 0.05;

/// How far endpoint snapping may move a blocked endpoint.
pub const SNAP_RADIUS: f64 = 1.0;

/// Binary occupancy grid over the floor extent, inflated by the agent
/// radius. The floor boundary counts as an obstacle.
#[derive(Debug, Clone)]
pub struct NavGrid {
    origin: Vec2,
    res: f64,
    width: usize,
    height: usize,
    blocked: Vec<bool>,
}

impl NavGrid {
    pub fn build(scene: &Scene, body: AgentBody, res: f64) -> Self {
        let origin = scene.floor.min;
        let width = (scene.floor.width() / res).ceil() as usize + 1;
        let height = (scene.floor.height() / res).ceil() as usize + 1;
        let inner = scene.floor.shrunk(body.radius);
        let footprints: Vec<_> = scene.boxes.iter().map(|b| b.footprint()).collect();
        let mut blocked = vec![false; width * height];
        for iy in 0..height {
            for ix in 0..width {
                let p = Vec2::new(
                    origin.x + (ix as f64 + 0.5) * res,
                    origin.y + (iy as f64 + 0.5) * res,
                );
                let near_boundary = !inner.contains(p);
                let near_box = footprints.iter().any(|f| f.distance(p) < body.radius);
                blocked[iy * width + ix] = near_boundary || near_box;
            }
        }
        Self {
            origin,
            res,
            width,
            height,
            blocked,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn res(&self) -> f64 {
        self.res
    }

    pub fn is_blocked(&self, ix: usize, iy: usize) -> bool {
        self.blocked[iy * self.width + ix]
    }

    fn cell_of(&self, p: Vec2) -> Option<(usize, usize)> {
        let ix = ((p.x - self.origin.x) / self.res).floor();
        let iy = ((p.y - self.origin.y) / self.res).floor();
        if ix < 0.0 || iy < 0.0 || ix >= self.width as f64 || iy >= self.height as f64 {
            return None;
        }
        Some((ix as usize, iy as usize))
    }

    fn cell_center(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + (ix as f64 + 0.5) * self.res,
            self.origin.y + (iy as f64 + 0.5) * self.res,
        )
    }

    /// Nearest free cell to `p` within [`SNAP_RADIUS`], by ring search.
    fn snap(&self, p: Vec2) -> Option<(usize, usize)> {
        let (cx, cy) = self.cell_of(p).or_else(|| {
            // Clamp points marginally outside the grid onto its border.
            let ix = (((p.x - self.origin.x) / self.res).floor() as i64)
                .clamp(0, self.width as i64 - 1) as usize;
            let iy = (((p.y - self.origin.y) / self.res).floor() as i64)
                .clamp(0, self.height as i64 - 1) as usize;
            Some((ix, iy))
        })?;
        if !self.is_blocked(cx, cy) {
            return Some((cx, cy));
        }
        let max_ring = (SNAP_RADIUS / self.res).ceil() as i64;
        let mut best: Option<((usize, usize), f64)> = None;
        let mut found_ring = i64::MAX;
        for ring in 1..=max_ring {
            // One ring past the first hit, so a diagonal neighbor in the
            // next ring cannot beat the recorded cell.
            if found_ring < i64::MAX && ring > found_ring + 1 {
                break;
            }
            for dy in -ring..=ring {
                for dx in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    let nx = cx as i64 + dx;
                    let ny = cy as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= self.width as i64 || ny >= self.height as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if self.is_blocked(nx, ny) {
                        continue;
                    }
                    let d = self.cell_center(nx, ny).dist(p);
                    if best.is_none_or(|(_, bd)| d < bd) {
                        best = Some(((nx, ny), d));
                        found_ring = found_ring.min(ring);
                    }
                }
            }
        }
        best.map(|(c, _)| c)
    }
}

/// Dijkstra distance field from a set of source points.
#[derive(Debug, Clone)]
pub struct DistanceField {
    grid: NavGrid,
    dist: Vec<f64>,
}

impl DistanceField {
    /// Multi-source field: the distance at each cell is the geodesic
    /// distance to the nearest source.
    pub fn from_sources(grid: NavGrid, sources: &[Vec2]) -> Self {
        let (w, h) = grid.dims();
        let res = grid.res();
        let mut dist = vec![f64::INFINITY; w * h];
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
        // Costs stay exact as integers in units of res and res*sqrt(2);
        // scale keeps the fixed-point keys collision-free.
        const SCALE: f64 = 1e7;
        for s in sources {
            if let Some((ix, iy)) = grid.snap(*s) {
                let idx = iy * w + ix;
                if dist[idx] > 0.0 {
                    dist[idx] = 0.0;
                    heap.push(Reverse((0, idx)));
                }
            }
        }
        let straight = res;
        let diagonal = res * std::f64::consts::SQRT_2;
        while let Some(Reverse((key, idx))) = heap.pop() {
            let d = key as f64 / SCALE;
            // Slack covers the fixed-point rounding of the heap key.
            if d > dist[idx] + 1e-6 {
                continue;
            }
            let d = dist[idx];
            let ix = (idx % w) as i64;
            let iy = (idx / w) as i64;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = ix + dx;
                    let ny = iy + dy;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let (nxu, nyu) = (nx as usize, ny as usize);
                    if grid.is_blocked(nxu, nyu) {
                        continue;
                    }
                    let step = if dx != 0 && dy != 0 { diagonal } else { straight };
                    let nd = d + step;
                    let nidx = nyu * w + nxu;
                    if nd + 1e-12 < dist[nidx] {
                        dist[nidx] = nd;
                        heap.push(Reverse(((nd * SCALE).round() as u64, nidx)));
                    }
                }
            }
        }
        Self { grid, dist }
    }

    /// Geodesic distance from `p` to the nearest source; infinity when
    /// unreachable or unsnappable.
    pub fn query(&self, p: Vec2) -> f64 {
        match self.grid.snap(p) {
            Some((ix, iy)) => self.dist[iy * self.grid.width + ix],
            None => f64::INFINITY,
        }
    }

    pub fn grid(&self) -> &NavGrid {
        &self.grid
    }
}

/// Shortest-path length between two points over the inflated grid.
pub fn geodesic_distance(scene: &Scene, from: Vec2, to: Vec2, body: AgentBody) -> f64 {
    let grid = NavGrid::build(scene, body, GEODESIC_RESOLUTION);
    let field = DistanceField::from_sources(grid, &[to]);
    field.query(from)
}
