use serde::{Deserialize, Serialize};

use super::scene::SceneSpec;
use crate::geom::{Aabb, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    SceneDerived,
    Explicit,
}

/// Dense occupancy grid; voxel `(i, j, k)` spans `[i*res, (i+1)*res)` on each axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelMap {
    resolution: f64,
    dims: [usize; 3],
    bits: Vec<u64>,
    pub provenance: Provenance,
}

/// Snaps `q` to the nearest integer when it is within rounding noise of it.
fn snap(q: f64) -> f64 {
    if (q - q.round()).abs() < 1e-9 {
        q.round()
    } else {
        q
    }
}

impl VoxelMap {
    pub fn empty(resolution: f64, dims: [usize; 3]) -> Self {
        let n = dims[0] * dims[1] * dims[2];
        Self {
            resolution,
            dims,
            bits: vec![0; n.div_ceil(64)],
            provenance: Provenance::Explicit,
        }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn extent(&self) -> Vec3 {
        Vec3::new(
            self.dims[0] as f64 * self.resolution,
            self.dims[1] as f64 * self.resolution,
            self.dims[2] as f64 * self.resolution,
        )
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::new(Vec3::default(), self.extent())
    }

    /// Linear index `x + nx * (y + ny * z)`.
    pub fn index(&self, v: [usize; 3]) -> usize {
        v[0] + self.dims[0] * (v[1] + self.dims[1] * v[2])
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn in_bounds(&self, v: [i64; 3]) -> bool {
        (0..3).all(|i| v[i] >= 0 && (v[i] as usize) < self.dims[i])
    }

    pub fn get(&self, v: [usize; 3]) -> bool {
        let i = self.index(v);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn get_signed(&self, v: [i64; 3]) -> bool {
        self.in_bounds(v) && self.get([v[0] as usize, v[1] as usize, v[2] as usize])
    }

    pub fn set(&mut self, v: [usize; 3], occupied: bool) {
        let i = self.index(v);
        if occupied {
            self.bits[i / 64] |= 1 << (i % 64);
        } else {
            self.bits[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn count_occupied(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn voxel_box(&self, v: [usize; 3]) -> Aabb {
        let r = self.resolution;
        Aabb::new(
            Vec3::new(v[0] as f64 * r, v[1] as f64 * r, v[2] as f64 * r),
            Vec3::new((v[0] + 1) as f64 * r, (v[1] + 1) as f64 * r, (v[2] + 1) as f64 * r),
        )
    }

    /// Voxel containing `p`, clamped to the grid.
    pub fn voxel_of(&self, p: Vec3) -> [usize; 3] {
        let mut out = [0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            let q = (p.axis(i) / self.resolution).floor();
            *o = (q.max(0.0) as usize).min(self.dims[i] - 1);
        }
        out
    }

    /// Half-open index range of voxels overlapping `[lo, hi]` with positive length.
    fn axis_range(&self, lo: f64, hi: f64, axis: usize) -> std::ops::Range<usize> {
        let a = snap(lo / self.resolution).floor().max(0.0) as usize;
        let b = snap(hi / self.resolution).ceil().max(0.0) as usize;
        a.min(self.dims[axis])..b.min(self.dims[axis])
    }

    /// True when voxel `v` overlaps `b` with positive volume.
    pub fn box_contains_voxel(&self, b: &Aabb, v: [usize; 3]) -> bool {
        self.axis_range(b.min.x, b.max.x, 0).contains(&v[0])
            && self.axis_range(b.min.y, b.max.y, 1).contains(&v[1])
            && self.axis_range(b.min.z, b.max.z, 2).contains(&v[2])
    }

    /// Marks every voxel overlapping `b` with positive volume.
    pub fn fill_box(&mut self, b: &Aabb) {
        let xr = self.axis_range(b.min.x, b.max.x, 0);
        let yr = self.axis_range(b.min.y, b.max.y, 1);
        let zr = self.axis_range(b.min.z, b.max.z, 2);
        for k in zr {
            for j in yr.clone() {
                for i in xr.clone() {
                    self.set([i, j, k], true);
                }
            }
        }
    }

    /// Occupied run structure of one column: `(support, ceiling)` where support
    /// is the top of the contiguous run starting at the bottom layer and ceiling
    /// is the bottom of the next occupied voxel above it. `None` when the bottom
    /// voxel is free.
    pub fn column(&self, i: usize, j: usize) -> Option<(f64, f64)> {
        let nz = self.dims[2];
        if !self.get([i, j, 0]) {
            return None;
        }
        let mut k = 0;
        while k < nz && self.get([i, j, k]) {
            k += 1;
        }
        let support = k as f64 * self.resolution;
        let mut c = k;
        while c < nz && !self.get([i, j, c]) {
            c += 1;
        }
        let ceiling = if c < nz {
            c as f64 * self.resolution
        } else {
            f64::INFINITY
        };
        Some((support, ceiling))
    }

    /// Terrain support height under `(x, y)`; 0 for a free bottom voxel.
    pub fn support_at(&self, x: f64, y: f64) -> f64 {
        let v = self.voxel_of(Vec3::new(x, y, 0.0));
        self.column(v[0], v[1]).map_or(0.0, |c| c.0)
    }

    /// Run-length encoding over the linear index order; runs alternate
    /// free/occupied and always start with a (possibly empty) free run.
    pub fn rle(&self) -> Vec<u64> {
        let mut runs = Vec::new();
        let mut current = false;
        let mut n = 0u64;
        for i in 0..self.len() {
            let bit = self.bits[i / 64] >> (i % 64) & 1 == 1;
            if bit != current {
                runs.push(n);
                n = 0;
                current = bit;
            }
            n += 1;
        }
        runs.push(n);
        runs
    }

    pub fn from_rle(resolution: f64, dims: [usize; 3], runs: &[u64]) -> Option<Self> {
        let mut map = Self::empty(resolution, dims);
        let mut i = 0usize;
        for (r, &n) in runs.iter().enumerate() {
            let occupied = r % 2 == 1;
            for _ in 0..n {
                if i >= map.len() {
                    return None;
                }
                if occupied {
                    map.bits[i / 64] |= 1 << (i % 64);
                }
                i += 1;
            }
        }
        (i == map.len()).then_some(map)
    }
}

/// Voxelizes terrain and objects: a voxel is occupied iff it overlaps a solid
/// with positive volume.
pub fn build_voxel_map(scene: &SceneSpec) -> VoxelMap {
    let res = scene.voxel_resolution;
    let e = scene.map_extent;
    let dims = [
        (e.x / res).round() as usize,
        (e.y / res).round() as usize,
        (e.z / res).round() as usize,
    ];
    let mut map = VoxelMap::empty(res, dims);
    map.provenance = Provenance::SceneDerived;
    for b in scene.terrain_boxes() {
        map.fill_box(&b);
    }
    for o in &scene.objects {
        map.fill_box(&o.bbox);
    }
    map
}
