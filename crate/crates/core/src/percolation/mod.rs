//! Spread-out Bernoulli bond percolation on finite windows of the Cayley graph.

pub mod estimate;
pub mod kernel;
pub mod renorm;
pub mod sample;
pub mod stats;
pub mod window;

pub use estimate::{
    estimate_lambda_c, giant_component_law_check, majority_supercritical, seed_threshold, GiantReport, GiantRow,
    LambdaCEstimate, LAMBDA_MAX,
};
pub use sample::{
    candidate_pairs, cluster_stats, cluster_stats_edges, sample_rescaled, sample_spread_out, ClusterReport, Model,
    NeighborBall, PercolationSample, SampleHeader,
};
pub use stats::{family_independence, independence_test, FamilyResult, IndependenceTest, Table2, TestKind};
pub use window::{Boundary, Window, WindowKind, WindowSpec, DEFAULT_VERTEX_CAP};
pub use kernel::{kernel_norm_lower_bound, unit_ball_proxy, KernelBound};
pub use renorm::{
    far_edge_pairs, iid_edge_grid, k_computed, lattice_edges, lss_threshold_check, overlap_check, renormalize,
    translate_overlap, translation_axes, BoxLattice, EdgeGrid, LatticeEdge, LssReport, OverlapCheck, OverlapReport,
    OverlapStatus, PairTest, RenormConfig, RenormResult, RenormSummary,
};
