//! Visualisation toolkit for abstract argumentation frameworks.
//!
//! The crate covers the full experiment pipeline: framework representation
//! and the APX/TGF interchange formats ([`graph_core`]), seeded synthetic
//! generators ([`generators`]), the dense linear algebra they need
//! ([`numerics`]), HOPE node embeddings ([`hope`]), exact t-SNE ([`tsne`]),
//! a from-scratch graph convolutional network for graph-level embeddings
//! ([`gcn`]), cluster-separation metrics ([`metrics`]), deterministic
//! SVG/CSV rendering ([`viz`]) and the orchestration used by the `argviz`
//! binary ([`pipeline`]).
//!
//! Everything is deterministic: all randomness flows from explicit seeds and
//! identical inputs produce byte-identical outputs.

pub mod gcn;
pub mod generators;
pub mod graph_core;
pub mod hope;
pub mod metrics;
pub mod numerics;
pub mod pipeline;
pub mod tsne;
pub mod viz;
