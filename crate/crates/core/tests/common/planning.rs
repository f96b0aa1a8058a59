//! Planner fixtures and oracles.

use std::collections::VecDeque;

use navcon_core::geom::Vec3;
use navcon_core::planner::{check_edge, plan_to_waypoint, NavGraph, PlannedPath, PlannerConfig};
use navcon_core::projection::{Waypoint, WaypointStatus};
use navcon_core::worldsim::{Footprint, Pose, RobotState, VoxelMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FP: Footprint = Footprint {
    width: 0.5,
    length: 1.1,
    height: 0.7,
};

pub fn robot_at(x: f64, y: f64, yaw: f64) -> RobotState {
    RobotState {
        pose: Pose { x, y, yaw },
        footprint: FP,
        max_speed: 1.0,
        max_angular: 2.0,
    }
}

pub fn cfg() -> PlannerConfig {
    PlannerConfig::for_robot(&FP, 0)
}

pub fn goal(p: Vec3) -> Waypoint {
    Waypoint {
        position: p,
        status: WaypointStatus::Hit,
        hit_voxel: None,
        standoff_applied: 0.0,
        clamped: false,
    }
}

/// Flat map with the bottom voxel layer occupied.
pub fn flat(res: f64, size: [f64; 3]) -> VoxelMap {
    let dims = [
        (size[0] / res).round() as usize,
        (size[1] / res).round() as usize,
        (size[2] / res).round() as usize,
    ];
    let mut m = VoxelMap::empty(res, dims);
    for j in 0..dims[1] {
        for i in 0..dims[0] {
            m.set([i, j, 0], true);
        }
    }
    m
}

pub fn fill(m: &mut VoxelMap, lo: [usize; 3], hi: [usize; 3]) {
    for k in lo[2]..hi[2] {
        for j in lo[1]..hi[1] {
            for i in lo[0]..hi[0] {
                m.set([i, j, k], true);
            }
        }
    }
}

/// Occupied columns above the floor layer, as xy rectangles.
pub fn obstacle_cells(m: &VoxelMap) -> Vec<[f64; 4]> {
    let r = m.resolution();
    let d = m.dims();
    let mut out = Vec::new();
    for j in 0..d[1] {
        for i in 0..d[0] {
            if (1..d[2]).any(|k| m.get([i, j, k])) {
                out.push([i as f64 * r, j as f64 * r, (i + 1) as f64 * r, (j + 1) as f64 * r]);
            }
        }
    }
    out
}

pub fn rect_distance(c: &[f64; 4], x: f64, y: f64) -> f64 {
    let dx = (c[0] - x).max(0.0).max(x - c[2]);
    let dy = (c[1] - y).max(0.0).max(y - c[3]);
    dx.hypot(dy)
}

/// Footprint-inflated grid reachability on cells of size `res`: a cell is
/// free when its centre keeps the footprint radius from every obstacle
/// column and the map edge; moves are 8-connected without corner cutting.
pub fn grid_bfs_reachable(m: &VoxelMap, radius: f64, start: [f64; 2], goal: [f64; 2], tol: f64) -> bool {
    let r = m.resolution();
    let d = m.dims();
    let e = m.extent();
    let obstacles = obstacle_cells(m);
    let free: Vec<bool> = (0..d[0] * d[1])
        .map(|idx| {
            let (i, j) = (idx % d[0], idx / d[0]);
            let (x, y) = ((i as f64 + 0.5) * r, (j as f64 + 0.5) * r);
            x >= radius
                && y >= radius
                && x <= e.x - radius
                && y <= e.y - radius
                && obstacles.iter().all(|c| rect_distance(c, x, y) >= radius)
        })
        .collect();
    let cell = |p: [f64; 2]| ((p[0] / r) as usize, (p[1] / r) as usize);
    let (si, sj) = cell(start);
    if !free[si + d[0] * sj] {
        return false;
    }
    let mut seen = vec![false; free.len()];
    let mut q = VecDeque::from([(si, sj)]);
    seen[si + d[0] * sj] = true;
    let ok = |i: i64, j: i64| i >= 0 && j >= 0 && (i as usize) < d[0] && (j as usize) < d[1] && free[i as usize + d[0] * j as usize];
    while let Some((i, j)) = q.pop_front() {
        let (x, y) = ((i as f64 + 0.5) * r, (j as f64 + 0.5) * r);
        if (x - goal[0]).hypot(y - goal[1]) <= tol {
            return true;
        }
        for (di, dj) in [(-1i64, -1i64), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)] {
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            if !ok(ni, nj) || (di != 0 && dj != 0 && !(ok(i as i64 + di, j as i64) && ok(i as i64, j as i64 + dj))) {
                continue;
            }
            let k = ni as usize + d[0] * nj as usize;
            if !seen[k] {
                seen[k] = true;
                q.push_back((ni as usize, nj as usize));
            }
        }
    }
    false
}

/// Dense swept-footprint check for an edge: every point on the segment keeps
/// the footprint radius from obstacle columns.
pub fn swept_clear_oracle(m: &VoxelMap, a: Vec3, b: Vec3, radius: f64) -> bool {
    let obstacles = obstacle_cells(m);
    (0..=200).all(|s| {
        let p = a + (b - a) * (s as f64 / 200.0);
        obstacles.iter().all(|c| rect_distance(c, p.x, p.y) >= radius - 1e-9)
    })
}

pub fn assert_path_consistent(g: &NavGraph, p: &PlannedPath) {
    let mut cost = 0.0;
    for w in p.node_ids.windows(2) {
        let e = g
            .edges
            .iter()
            .find(|e| (e.a == w[0] && e.b == w[1]) || (e.a == w[1] && e.b == w[0]))
            .expect("consecutive waypoints must be adjacent");
        cost += e.cost;
    }
    assert_eq!(cost, p.cost);
    let (a, b) = (p.waypoints.first().unwrap(), p.waypoints.last().unwrap());
    assert!(p.cost >= (*b - *a).norm() - 1e-12);
}

pub fn assert_edges_valid(g: &NavGraph, m: &VoxelMap, c: &PlannerConfig) {
    for e in &g.edges {
        let (a, b) = (g.nodes[e.a].position, g.nodes[e.b].position);
        assert!(e.cost > 0.0);
        assert_eq!(check_edge(a, b, m, c), Ok(e.cost));
        assert!((b.z - a.z).abs() <= a.horizontal_distance(b) * 30f64.to_radians().tan() + 1e-12);
    }
}

/// 6 x 6 m map at 0.25 m cells with 1 m blocks placed on a coarse grid.
pub fn block_map(rng: &mut ChaCha8Rng) -> (VoxelMap, Vec<[usize; 2]>) {
    let mut m = flat(0.25, [6.0, 6.0, 2.0]);
    let mut free = Vec::new();
    for cj in 0..6 {
        for ci in 0..6 {
            if rng.random::<f64>() < 0.3 {
                fill(&mut m, [ci * 4, cj * 4, 1], [ci * 4 + 4, cj * 4 + 4, 8]);
            } else {
                free.push([ci, cj]);
            }
        }
    }
    (m, free)
}

/// Plans between random free cells of `n` random block maps and checks
/// reachability, path cost and every edge against the oracles. Returns the
/// (reachable, unreachable) split.
pub fn reachability_trials(seed: u64, n: usize) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trials = 0;
    let (mut reachable, mut unreachable) = (0, 0);
    while trials < n {
        let (m, free) = block_map(&mut rng);
        if free.len() < 2 {
            continue;
        }
        let s = free[rng.random_range(0..free.len())];
        let t = free[rng.random_range(0..free.len())];
        if s == t {
            continue;
        }
        trials += 1;
        let c = PlannerConfig::for_robot(&FP, trials as u64);
        assert_eq!(c.sample_spacing, m.resolution());
        let start = [s[0] as f64 + 0.5, s[1] as f64 + 0.5];
        let target = Vec3::new(t[0] as f64 + 0.5, t[1] as f64 + 0.5, 0.25);
        let oracle = grid_bfs_reachable(&m, c.footprint_radius, start, [target.x, target.y], c.goal_tolerance);
        let mut g = NavGraph::default();
        let mut prng = ChaCha8Rng::seed_from_u64(c.seed);
        let p = plan_to_waypoint(&mut g, &robot_at(start[0], start[1], 0.0), &goal(target), &m, &c, &mut prng).unwrap();
        assert_eq!(p.reached_goal, oracle, "trial {trials}: start {s:?} goal {t:?}");
        assert_path_consistent(&g, &p);
        assert_edges_valid(&g, &m, &c);
        if oracle {
            reachable += 1;
        } else {
            unreachable += 1;
        }
    }
    (reachable, unreachable)
}


/// Plans from each bundled scene's start pose to random supported goals,
/// round robin over scenes, until `feasible` plans reach their goal; follows
/// each one. Returns (followed successfully, feasible plans, infeasible draws).
pub fn bundled_follow_trials(seed: u64, feasible: usize) -> (usize, usize, usize) {
    use navcon_core::evalharness::load_scene_dir;
    use navcon_core::planner::{follow_path, project_sample, FollowerConfig};
    let scenes: Vec<_> = load_scene_dir(format!("{}/scenes", navcon_core::DATA_DIR))
        .unwrap()
        .into_values()
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ok, mut planned, mut infeasible) = (0, 0, 0);
    let mut k = 0;
    while planned < feasible {
        let w = &scenes[k % scenes.len()];
        k += 1;
        let robot = w.scene.start_state();
        let c = PlannerConfig::for_robot(&robot.footprint, rng.random());
        let e = w.map.extent();
        let xy = [rng.random_range(0.5..e.x - 0.5), rng.random_range(0.5..e.y - 0.5)];
        let Ok(target) = project_sample(xy, &w.map, &c) else {
            infeasible += 1;
            continue;
        };
        let mut g = NavGraph::default();
        let mut prng = ChaCha8Rng::seed_from_u64(c.seed);
        let p = plan_to_waypoint(&mut g, &robot, &goal(target), &w.map, &c, &mut prng).unwrap();
        if !p.reached_goal {
            infeasible += 1;
            continue;
        }
        planned += 1;
        if follow_path(&p, &robot, &FollowerConfig::default()).success {
            ok += 1;
        }
    }
    (ok, planned, infeasible)
}
