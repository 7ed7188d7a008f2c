//! Separated subfamilies, dyadic cubes, arc filtrations and the weight
//! construction, checked against the inequalities they are meant to satisfy.

mod build;
mod intervals;
mod lab;
mod separation;

pub use build::{build_cubes, check_cubes, Cube, CubeFamily, CubeInvariants};
pub use intervals::{preimage, LoopSet};
pub use lab::{default_separation, families_summary, run_lab, Arc, CheckStats, FamilyReport, Flatness, LabConfig, LabReport, LabTotals, WeightStats};
pub use separation::{class_m, partition_separated, scale_class, Partition, ScaleClass};
