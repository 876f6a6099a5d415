//! Stand-off linguistic annotation in the GMT (Generic Mapping Tool) XML
//! format: document model and validation, lossless XML I/O, anchoring of
//! segments to primary data, a data category registry, merge and diff of
//! annotation layers, and conversion to and from annotation graphs.

pub mod ag;
pub mod anchoring;
pub mod cli;
pub mod exec;
pub mod merge;
pub mod model;
pub mod registry;
pub mod synth;
pub mod validate;
pub mod xml;

pub use exec::Exec;
pub use merge::{anchor_key, diff, merge, DiffReport, MergePolicy, ParallelPolicy};
pub use model::{
    collect_referenced_ids, find_node, select_preferred_alternative, AltSet, Alternative, Bracket, Feature,
    FeatureValue, GmtDocument, NodeItem, NodePath, Relation, SegmentRef, StructNode,
};
pub use validate::{validate_all, validate_structure, Finding, Severity, ValidationReport};
pub use xml::{parse_gmt, serialize_gmt};
