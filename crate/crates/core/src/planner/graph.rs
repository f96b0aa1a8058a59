use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EdgeRejection, PlannerConfig, Rejection};
use crate::geom::Vec3;
use crate::worldsim::{Pose, VoxelMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub cost: f64,
}

/// Undirected roadmap; node 0 is the root and every node is connected to it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NavGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub boundary_nodes: Vec<usize>,
    /// Centers of every expansion disc so far.
    pub expansion_centers: Vec<[f64; 2]>,
}

impl NavGraph {
    /// Single-node graph at the robot pose, on the support surface.
    pub fn rooted(pose: &Pose, map: &VoxelMap) -> Self {
        let z = map.support_at(pose.x, pose.y);
        Self {
            nodes: vec![Node {
                id: 0,
                position: Vec3::new(pose.x, pose.y, z),
            }],
            edges: Vec::new(),
            boundary_nodes: vec![0],
            expansion_centers: Vec::new(),
        }
    }

    pub fn root(&self) -> Option<&Node> {
        self.nodes.first()
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.cost));
            adj[e.b].push((e.a, e.cost));
        }
        for list in &mut adj {
            list.sort_by_key(|&(n, _)| n);
        }
        adj
    }

    pub fn degree(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for e in &self.edges {
            d[e.a] += 1;
            d[e.b] += 1;
        }
        d
    }

    /// Boundary = on the sampling frontier (outer third of every expansion
    /// disc) or degree below half the median degree.
    fn recompute_boundary(&mut self, cfg: &PlannerConfig) {
        let deg = self.degree();
        let mut sorted = deg.clone();
        sorted.sort_unstable();
        let median = sorted.get(sorted.len() / 2).copied().unwrap_or(0);
        let frontier = cfg.expansion_radius() - cfg.connect_radius;
        self.boundary_nodes = self
            .nodes
            .iter()
            .filter(|n| {
                let p = n.position;
                let on_frontier = self
                    .expansion_centers
                    .iter()
                    .all(|c| (p.x - c[0]).hypot(p.y - c[1]) >= frontier);
                on_frontier || 2 * deg[n.id] < median
            })
            .map(|n| n.id)
            .collect();
    }
}

fn cell_distance(map: &VoxelMap, i: usize, j: usize, x: f64, y: f64) -> f64 {
    let r = map.resolution();
    let (x0, y0) = (i as f64 * r, j as f64 * r);
    let dx = (x0 - x).max(0.0).max(x - (x0 + r));
    let dy = (y0 - y).max(0.0).max(y - (y0 + r));
    dx.hypot(dy)
}

/// True when the footprint cylinder centred at `(x, y)` on support `z` is
/// inside the map and free between `z + max_step` and `z + clearance`.
pub fn footprint_clear(map: &VoxelMap, x: f64, y: f64, z: f64, cfg: &PlannerConfig) -> bool {
    let r = cfg.footprint_radius;
    let e = map.extent();
    if x - r < 0.0 || y - r < 0.0 || x + r > e.x || y + r > e.y {
        return false;
    }
    let res = map.resolution();
    let dims = map.dims();
    let lo = z + cfg.max_step();
    let hi = z + cfg.clearance;
    let k0 = ((lo / res).floor().max(0.0) as usize).min(dims[2]);
    let k1 = ((hi / res).ceil().max(0.0) as usize).min(dims[2]);
    let i0 = ((x - r) / res).floor().max(0.0) as usize;
    let i1 = (((x + r) / res).floor() as usize).min(dims[0] - 1);
    let j0 = ((y - r) / res).floor().max(0.0) as usize;
    let j1 = (((y + r) / res).floor() as usize).min(dims[1] - 1);
    for j in j0..=j1 {
        for i in i0..=i1 {
            if cell_distance(map, i, j, x, y) >= r {
                continue;
            }
            for k in k0..k1 {
                let (zl, zh) = (k as f64 * res, (k + 1) as f64 * res);
                if zh > lo && zl < hi && map.get([i, j, k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Projects a 2D sample onto the support surface of its column.
pub fn project_sample(xy: [f64; 2], map: &VoxelMap, cfg: &PlannerConfig) -> Result<Vec3, Rejection> {
    let e = map.extent();
    let [x, y] = xy;
    if !(0.0..e.x).contains(&x) || !(0.0..e.y).contains(&y) {
        return Err(Rejection::OutsideMap);
    }
    let v = map.voxel_of(Vec3::new(x, y, 0.0));
    let (support, ceiling) = map.column(v[0], v[1]).ok_or(Rejection::NoTerrain)?;
    if ceiling - support < cfg.clearance {
        return Err(Rejection::LowCeiling);
    }
    if !footprint_clear(map, x, y, support, cfg) {
        return Err(Rejection::Collision);
    }
    Ok(Vec3::new(x, y, support))
}

/// Cost of a traversable straight edge between two projected nodes.
pub fn check_edge(a: Vec3, b: Vec3, map: &VoxelMap, cfg: &PlannerConfig) -> Result<f64, EdgeRejection> {
    let h = a.horizontal_distance(b);
    if h > cfg.connect_radius {
        return Err(EdgeRejection::TooLong);
    }
    if (b.z - a.z).abs() > h * cfg.max_slope() {
        return Err(EdgeRejection::TooSteep);
    }
    let res = map.resolution();
    let n = (h / (res / 2.0)).ceil() as usize;
    for s in 1..n {
        let t = s as f64 / n as f64;
        let p = a + (b - a) * t;
        let v = map.voxel_of(p);
        let Some((support, _)) = map.column(v[0], v[1]) else {
            return Err(EdgeRejection::Swept);
        };
        if (support - p.z).abs() > cfg.max_step() + res / 2.0 || !footprint_clear(map, p.x, p.y, p.z, cfg) {
            return Err(EdgeRejection::Swept);
        }
    }
    Ok((b - a).norm())
}

/// [`expand_graph_with`] without extra candidate points.
pub fn expand_graph(g: &mut NavGraph, around: [f64; 2], map: &VoxelMap, cfg: &PlannerConfig, rng: &mut ChaCha8Rng) {
    expand_graph_with(g, around, map, cfg, rng, &[]);
}

/// Samples the disc around `around`, projects and connects the survivors.
/// `extra` points are tried before the random samples. New nodes that end up
/// outside the root's component are dropped.
pub fn expand_graph_with(
    g: &mut NavGraph,
    around: [f64; 2],
    map: &VoxelMap,
    cfg: &PlannerConfig,
    rng: &mut ChaCha8Rng,
    extra: &[[f64; 2]],
) {
    let radius = cfg.expansion_radius();
    let mut samples: Vec<[f64; 2]> = extra
        .iter()
        .filter(|p| (p[0] - around[0]).hypot(p[1] - around[1]) <= radius)
        .copied()
        .collect();
    for _ in 0..cfg.samples_per_expansion {
        let r = radius * rng.random::<f64>().sqrt();
        let th = rng.random::<f64>() * std::f64::consts::TAU;
        samples.push([around[0] + r * th.cos(), around[1] + r * th.sin()]);
    }
    g.expansion_centers.push(around);

    let base = g.nodes.len();
    let mut fresh: Vec<Vec3> = Vec::new();
    for s in samples {
        let crowded = g
            .nodes
            .iter()
            .map(|n| n.position)
            .chain(fresh.iter().copied())
            .any(|p| (p.x - s[0]).hypot(p.y - s[1]) < cfg.sample_spacing);
        if crowded {
            continue;
        }
        if let Ok(p) = project_sample(s, map, cfg) {
            fresh.push(p);
        }
    }

    // Connect fresh nodes to everything before them.
    let all: Vec<Vec3> = g.nodes.iter().map(|n| n.position).chain(fresh.iter().copied()).collect();
    let mut new_edges = Vec::new();
    for (k, p) in fresh.iter().enumerate() {
        let id = base + k;
        for (other, q) in all.iter().enumerate().take(id) {
            if p.horizontal_distance(*q) > cfg.connect_radius {
                continue;
            }
            if let Ok(cost) = check_edge(*q, *p, map, cfg) {
                new_edges.push(Edge { a: other, b: id, cost });
            }
        }
    }

    // Keep the fresh nodes reachable from the root.
    let mut adj = vec![Vec::new(); all.len()];
    for e in g.edges.iter().chain(&new_edges) {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let mut seen = vec![false; all.len()];
    let mut stack = vec![0];
    if !all.is_empty() {
        seen[0] = true;
    }
    while let Some(n) = stack.pop() {
        for &m in &adj[n] {
            if !seen[m] {
                seen[m] = true;
                stack.push(m);
            }
        }
    }
    let mut remap = vec![usize::MAX; all.len()];
    for (i, r) in remap.iter_mut().enumerate().take(base) {
        *r = i;
    }
    for (k, p) in fresh.iter().enumerate() {
        if seen[base + k] {
            let id = g.nodes.len();
            remap[base + k] = id;
            g.nodes.push(Node { id, position: *p });
        }
    }
    for e in new_edges {
        let (a, b) = (remap[e.a], remap[e.b]);
        if a != usize::MAX && b != usize::MAX {
            g.edges.push(Edge { a, b, cost: e.cost });
        }
    }
    g.recompute_boundary(cfg);
}
