//! Sample-and-project graph planning over a voxel map, boundary replanning,
//! and pure-pursuit path following.

mod follow;
mod graph;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Vec3;
use crate::worldsim::Footprint;

pub use follow::{follow_path, FollowOutcome, FollowerConfig};
pub use graph::{check_edge, expand_graph, expand_graph_with, footprint_clear, project_sample, Edge, NavGraph, Node};
pub use search::{dijkstra, plan_to_waypoint, shortest_path};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Minimum horizontal spacing between graph nodes, m.
    pub sample_spacing: f64,
    pub connect_radius: f64,
    pub max_slope_deg: f64,
    /// Free height required above the support surface, m.
    pub clearance: f64,
    /// Radius of the swept collision cylinder, m.
    pub footprint_radius: f64,
    pub samples_per_expansion: usize,
    pub replan_cap: usize,
    pub goal_tolerance: f64,
    pub seed: u64,
}

impl PlannerConfig {
    pub fn for_robot(fp: &Footprint, seed: u64) -> Self {
        Self {
            sample_spacing: fp.width / 2.0,
            connect_radius: 2.0 * fp.length,
            max_slope_deg: 30.0,
            clearance: fp.height + 0.1,
            footprint_radius: fp.width / 2.0,
            samples_per_expansion: 200,
            replan_cap: 10,
            goal_tolerance: 0.5,
            seed,
        }
    }

    /// Radius of the disc sampled by one expansion.
    pub fn expansion_radius(&self) -> f64 {
        3.0 * self.connect_radius
    }

    pub fn max_slope(&self) -> f64 {
        self.max_slope_deg.to_radians().tan()
    }

    /// Terrain rise tolerated inside the footprint: the slope limit applied
    /// across the footprint radius.
    pub fn max_step(&self) -> f64 {
        self.footprint_radius * self.max_slope()
    }

    pub fn validate(&self) -> Result<(), PlannerError> {
        let positive = [
            self.sample_spacing,
            self.connect_radius,
            self.max_slope_deg,
            self.clearance,
            self.footprint_radius,
            self.goal_tolerance,
        ];
        if positive.iter().all(|v| *v > 0.0 && v.is_finite()) && self.samples_per_expansion > 0 && self.replan_cap >= 1 {
            Ok(())
        } else {
            Err(PlannerError::InvalidConfig)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    #[error("outside map")]
    OutsideMap,
    #[error("no terrain")]
    NoTerrain,
    #[error("insufficient clearance")]
    LowCeiling,
    #[error("footprint collision")]
    Collision,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeRejection {
    #[error("edge longer than connect radius")]
    TooLong,
    #[error("slope limit exceeded")]
    TooSteep,
    #[error("swept footprint collides")]
    Swept,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlannerError {
    #[error("goal {0:?} outside map")]
    GoalOutsideMap(Vec3),
    #[error("planner config values must be positive and the replan cap at least 1")]
    InvalidConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedPath {
    pub waypoints: Vec<Vec3>,
    pub node_ids: Vec<usize>,
    pub cost: f64,
    pub reached_goal: bool,
    /// Boundary replans performed before returning.
    pub replans: usize,
}
