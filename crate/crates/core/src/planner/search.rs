use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand_chacha::ChaCha8Rng;

use super::graph::{expand_graph_with, NavGraph};
use super::{PlannedPath, PlannerConfig, PlannerError};
use crate::projection::Waypoint;
use crate::worldsim::{RobotState, VoxelMap};

#[derive(PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.cost.total_cmp(&self.cost).then(o.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn path_to(pred: &[Option<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut out = vec![to];
    let mut cur = to;
    while cur != from {
        match pred[cur] {
            Some(p) => {
                out.push(p);
                cur = p;
            }
            None => break,
        }
    }
    out.reverse();
    out
}

/// Single-source shortest paths by edge length. Equal-cost alternatives keep
/// the lexicographically smallest node-id sequence.
pub fn dijkstra(g: &NavGraph, from: usize) -> (Vec<f64>, Vec<Option<usize>>) {
    let adj = g.adjacency();
    let n = g.nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[from] = 0.0;
    heap.push(Entry { cost: 0.0, node: from });
    while let Some(Entry { cost, node }) = heap.pop() {
        if done[node] || cost > dist[node] {
            continue;
        }
        done[node] = true;
        for &(m, w) in &adj[node] {
            if done[m] {
                continue;
            }
            let c = cost + w;
            if c < dist[m] {
                dist[m] = c;
                pred[m] = Some(node);
                heap.push(Entry { cost: c, node: m });
            } else if c == dist[m] && pred[m].is_some_and(|p| p != node) {
                let mut via_new = path_to(&pred, from, node);
                via_new.push(m);
                if via_new < path_to(&pred, from, m) {
                    pred[m] = Some(node);
                }
            }
        }
    }
    (dist, pred)
}

fn assemble(g: &NavGraph, ids: Vec<usize>, reached: bool, replans: usize) -> PlannedPath {
    let adj = g.adjacency();
    let mut cost = 0.0;
    for w in ids.windows(2) {
        cost += adj[w[0]].iter().find(|(m, _)| *m == w[1]).map_or(f64::INFINITY, |e| e.1);
    }
    PlannedPath {
        waypoints: ids.iter().map(|&i| g.nodes[i].position).collect(),
        node_ids: ids,
        cost,
        reached_goal: reached,
        replans,
    }
}

/// Minimum-length path, or `None` when `to` is unreachable. `from == to`
/// yields the single-node path with cost 0.
pub fn shortest_path(g: &NavGraph, from: usize, to: usize) -> Option<PlannedPath> {
    let (dist, pred) = dijkstra(g, from);
    dist[to]
        .is_finite()
        .then(|| assemble(g, path_to(&pred, from, to), true, 0))
}

fn nearest(g: &NavGraph, ids: impl Iterator<Item = usize>, goal: crate::geom::Vec3) -> Option<usize> {
    ids.min_by(|&a, &b| {
        (g.nodes[a].position - goal)
            .norm()
            .total_cmp(&(g.nodes[b].position - goal).norm())
            .then(a.cmp(&b))
    })
}

/// Plans from the graph root to the goal, expanding around the reachable
/// boundary node nearest the goal until it is within tolerance or the
/// replan cap is spent. An empty graph is first rooted at the robot and
/// expanded once around it.
pub fn plan_to_waypoint(
    g: &mut NavGraph,
    robot: &RobotState,
    goal: &Waypoint,
    map: &VoxelMap,
    cfg: &PlannerConfig,
    rng: &mut ChaCha8Rng,
) -> Result<PlannedPath, PlannerError> {
    cfg.validate()?;
    let target = goal.position;
    let e = map.extent();
    if !(0.0..=e.x).contains(&target.x) || !(0.0..=e.y).contains(&target.y) || !(0.0..=e.z).contains(&target.z) {
        return Err(PlannerError::GoalOutsideMap(target));
    }
    let seed_points = [[target.x, target.y]];
    if g.nodes.is_empty() {
        *g = NavGraph::rooted(&robot.pose, map);
    }
    if g.expansion_centers.is_empty() {
        let root = g.nodes[0].position;
        expand_graph_with(g, [root.x, root.y], map, cfg, rng, &seed_points);
    }
    let mut replans = 0;
    loop {
        let (dist, pred) = dijkstra(g, 0);
        let reachable = |i: &usize| dist[*i].is_finite();
        let close = (0..g.nodes.len())
            .filter(reachable)
            .filter(|&i| (g.nodes[i].position - target).norm() <= cfg.goal_tolerance);
        if let Some(best) = nearest(g, close, target) {
            return Ok(assemble(g, path_to(&pred, 0, best), true, replans));
        }
        let frontier = nearest(g, g.boundary_nodes.iter().copied().filter(reachable), target)
            .or_else(|| nearest(g, (0..g.nodes.len()).filter(reachable), target))
            .unwrap_or(0);
        if replans == cfg.replan_cap {
            return Ok(assemble(g, path_to(&pred, 0, frontier), false, replans));
        }
        let p = g.nodes[frontier].position;
        expand_graph_with(g, [p.x, p.y], map, cfg, rng, &seed_points);
        replans += 1;
    }
}
