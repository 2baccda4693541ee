//! Power-law classification of pairwise time-series correlations and
//! percolation-threshold networks.
//!
//! The pipeline: load a panel of equal-unit series ([`panel`]), classify
//! every unordered pair by fitting its cumulative Manhattan distance as
//! a power law ([`plcs`]), compute the ultrametric-distance baseline
//! ([`ud`]), then condense the matrices into networks on the percolation
//! threshold, with a minimum spanning tree for comparison ([`net`]).
//! [`synth`] generates pairs of known class and runs the noise
//! robustness experiment.

pub mod error;
pub mod net;
pub mod pairs;
pub mod panel;
pub mod plcs;
pub mod stats;
pub mod synth;
pub mod ud;

pub use error::{Error, ErrorClass, Result};
pub use net::{
    build_graph, mst, npt, sort_edges, Channel, Edge, Preference, ThresholdNetwork, WeightedGraph,
};
pub use pairs::{PairCell, PairMatrix};
pub use panel::{load_panel, AnalysisWindow, SeriesPanel};
pub use plcs::{
    cumulative_md, fit_power_law, loglog_points, plcs_matrix, plcs_pair, CumulativeMd, FitResult,
    PlcsConfig, Tail,
};
pub use synth::{
    gamma_recovery, generate_pair, robustness_experiment, RobustnessReport, RobustnessRow,
    SynthKind, SynthSpec, RECOVERY_TARGETS,
};
pub use ud::{pearson, ud, ud_from_pearson, ud_matrix, UdVariant};
