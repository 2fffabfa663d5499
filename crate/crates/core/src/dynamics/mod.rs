//! The Liouville field `Y = fX + g∂_s`, its skeleton, and the dynamics near it.

mod field;
mod flow;
mod skeleton;

pub use field::{liouville_field, liouville_field_closed_form, liouville_field_solve, LiouvilleField, Provenance};
pub use flow::{integrate_y, strong_normal_direction, NormalBundleSample, Trajectory, TrajectoryPoint};
pub use skeleton::{
    normal_expansion, normal_expansion_fd, normal_hyperbolicity, skeleton_graph, skeleton_solve, sync_check,
    NormalHyperbolicity, SkeletonGraph, SkeletonSample, SyncReport, SKELETON_MAX_ITERS, SKELETON_TOL,
};
