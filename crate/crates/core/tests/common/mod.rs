//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod planning;
pub mod snippets;
use navcon_core::geom::Vec3;
use navcon_core::projection::Ray;
use navcon_core::worldsim::VoxelMap;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_voxel_map(rng: &mut ChaCha8Rng, res: f64, n: usize, density: f64) -> VoxelMap {
    let mut map = VoxelMap::empty(res, [n, n, n]);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                if rng.random::<f64>() < density {
                    map.set([i, j, k], true);
                }
            }
        }
    }
    map
}

pub fn random_ray(rng: &mut ChaCha8Rng, extent: f64) -> Ray {
    loop {
        let o = Vec3::new(
            rng.random::<f64>() * extent,
            rng.random::<f64>() * extent,
            rng.random::<f64>() * extent,
        );
        let d = Vec3::new(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        );
        if let Some(r) = Ray::new(o, d) {
            return r;
        }
    }
}

pub struct March {
    pub first: Option<[usize; 3]>,
    /// Some pair of consecutive samples changed voxel along two or more axes
    /// while a voxel between them is occupied, so the march cannot tell
    /// whether the ray clipped it.
    pub ambiguous: bool,
}

/// Samples the ray every `step` meters and reports the first sample that
/// lands in an occupied voxel.
pub fn march(ray: &Ray, map: &VoxelMap, step: f64) -> March {
    let res = map.resolution();
    let mut prev: Option<[i64; 3]> = None;
    let mut ambiguous = false;
    let mut t = 0.0;
    loop {
        let p = ray.at(t);
        let v = [
            (p.x / res).floor() as i64,
            (p.y / res).floor() as i64,
            (p.z / res).floor() as i64,
        ];
        if let Some(a) = prev {
            let changed: Vec<usize> = (0..3).filter(|&i| a[i] != v[i]).collect();
            if changed.len() > 1 {
                for mask in 1..(1u32 << changed.len()) - 1 {
                    let mut w = a;
                    for (b, &i) in changed.iter().enumerate() {
                        if mask >> b & 1 == 1 {
                            w[i] = v[i];
                        }
                    }
                    ambiguous |= map.get_signed(w);
                }
            }
        }
        if !map.in_bounds(v) {
            return March { first: None, ambiguous };
        }
        let u = [v[0] as usize, v[1] as usize, v[2] as usize];
        if map.get(u) {
            return March { first: Some(u), ambiguous };
        }
        prev = Some(v);
        t += step;
    }
}

pub struct OracleTally {
    pub rays: usize,
    pub excluded: usize,
    pub mismatched: usize,
}

/// Compares `raycast_first_hit` against marching at `res / divisor` over
/// `maps` random maps with `rays_per_map` rays each. Rays within 1e-9 of a
/// voxel edge or corner and rays the march cannot resolve are excluded.
pub fn raycast_oracle_tally(seed: u64, maps: usize, rays_per_map: usize, divisor: f64) -> OracleTally {
    use navcon_core::projection::raycast::{grazes_corner, raycast_first_hit, RaycastResult};
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = OracleTally {
        rays: 0,
        excluded: 0,
        mismatched: 0,
    };
    for _ in 0..maps {
        let map = random_voxel_map(&mut rng, 1.0, 8, 0.08);
        for _ in 0..rays_per_map {
            let ray = random_ray(&mut rng, 8.0);
            tally.rays += 1;
            let m = march(&ray, &map, map.resolution() / divisor);
            if m.ambiguous || grazes_corner(&ray, &map, f64::INFINITY) {
                tally.excluded += 1;
                continue;
            }
            let fast = match raycast_first_hit(&ray, &map, f64::INFINITY).unwrap() {
                RaycastResult::Hit { voxel, .. } => Some(voxel),
                RaycastResult::Boundary { .. } => None,
            };
            if fast != m.first {
                tally.mismatched += 1;
            }
        }
    }
    tally
}

pub mod scenes {
    use navcon_core::navlang::{parse_str, validate_program};
    use navcon_core::navruntime::{execute_program, ExecConfig, ExecutionTrace, NavResult};
    use navcon_core::projection::Mode;
    use navcon_core::worldsim::{parse_scene, render_views, World};
    use serde_json::{json, Value};

    pub fn obj(id: &str, label: &str, attrs: &[&str], min: [f64; 3], max: [f64; 3]) -> Value {
        json!({"id": id, "label": label, "attributes": attrs, "box": {"min": min, "max": max}})
    }

    pub fn with_synonyms(mut o: Value, syn: &[&str]) -> Value {
        o["synonyms"] = json!(syn);
        o
    }

    /// 20 x 20 x 4 m flat scene at 0.1 m resolution.
    pub fn world(objects: Vec<Value>, start: [f64; 3]) -> World {
        world_with(objects, start, json!({}))
    }

    /// As [`world`], with extra top-level scene fields merged in.
    pub fn world_with(objects: Vec<Value>, start: [f64; 3], extra: Value) -> World {
        let mut v = json!({
            "name": "test",
            "map_extent": [20.0, 20.0, 4.0],
            "voxel_resolution": 0.1,
            "terrain": {"type": "flat"},
            "objects": objects,
            "robot_start": {"x": start[0], "y": start[1], "yaw": start[2]},
        });
        if let Value::Object(m) = extra {
            for (k, x) in m {
                v[k] = x;
            }
        }
        World::new(parse_scene(&v.to_string()).unwrap())
    }

    /// Parses, validates and executes a program body placed inside
    /// `def execute_command(image):`.
    pub fn run_body(w: &World, mode: Mode, body: &str) -> (NavResult, ExecutionTrace) {
        let src = format!(
            "def execute_command(image):\n{}",
            body.lines().map(|l| format!("    {l}\n")).collect::<String>()
        );
        run_source(w, mode, &src)
    }

    /// Three outlets, one per camera, at (local u, bearing): left (500, 61°),
    /// front (550, -36°), right (100, -56°). Left to right the middle one is
    /// `outlet_front`; sorting local coordinates puts `outlet_left` there.
    pub fn cross_frame_outlets() -> World {
        let o = |id: &str, x: f64, y: f64| obj(id, "outlet", &[], [x - 0.15, y - 0.15, 0.45], [x + 0.15, y + 0.15, 0.75]);
        world(
            vec![
                o("outlet_left", 12.25, 14.0),
                o("outlet_front", 14.0, 7.125),
                o("outlet_right", 12.75, 6.0),
            ],
            [10.0, 10.0, 0.0],
        )
    }

    pub const OUTLET_BODY: &str = "image_patch = ImagePatch(image)
outlet_patches = image_patch.find('outlet')
outlet_patches.sort(key=lambda x: x.horizontal_center)
middle_outlet = outlet_patches[len(outlet_patches) // 2]
return {'function': 'navigate_to_object', 'inputs': (middle_outlet.horizontal_center, middle_outlet.vertical_center), 'box': [middle_outlet.left, middle_outlet.lower, middle_outlet.right, middle_outlet.upper]}";

    /// Object whose detected patch is exactly the returned box.
    pub fn picked_object(r: &NavResult, t: &ExecutionTrace) -> Option<String> {
        let b = r.rect()?;
        t.patch_registry.iter().filter(|p| p.bounds == b).find_map(|p| p.source_object.clone())
    }

    pub fn run_source(w: &World, mode: Mode, src: &str) -> (NavResult, ExecutionTrace) {
        let ast = parse_str(src).unwrap_or_else(|e| panic!("{e}\n{src}"));
        let report = validate_program(&ast);
        assert!(report.ok, "{:?}\n{src}", report.diagnostics);
        let views = render_views(w, &w.scene.start_state());
        execute_program(&ast, w, &views, &ExecConfig::new(mode))
    }
}
