//! Duality engine for tournaments: for a pattern digraph H and a budget k,
//! either construct k disjoint certified copies of H (arc-disjoint immersions
//! or vertex-disjoint topological minors) or construct a certified hitting
//! set (arcs or vertices). Layout widths (cutwidth / pathwidth) are measured
//! on the layouts actually used, and all reported size bounds are stated in
//! terms of those measured widths.
//!
//! Module map:
//! - [`digraph`]: tournaments, pattern digraphs, strong components, condensation.
//! - [`layouts`]: cutwidth orderings and interval decompositions.
//! - [`embed`]: exhaustive immersion / topological-minor search and verification.
//! - [`pack`]: disjoint-packing constructions and transversal independent sets.
//! - [`hit`]: the recursive hitting constructions and the top-level dispatcher.
//! - [`oracle`]: naive brute-force ground truth, used by tests and `verify --deep`.
//! - [`gen`], [`formats`]: seeded generators and the text file formats.

pub mod digraph;
pub mod embed;
pub mod error;
pub mod formats;
pub mod gen;
pub mod hit;
pub mod layouts;
pub mod oracle;
pub mod pack;

pub use digraph::{Arc, Digraph, Pattern, StrongDecomposition, Tournament};
pub use embed::{Budget, Model, ModelKind, SearchResult};
pub use error::Error;
pub use hit::{erdos_posa, BoundReport, EpConfig, EpOutcome, EpResult, HittingCertificate};
pub use pack::{Disjointness, PackingCertificate};
