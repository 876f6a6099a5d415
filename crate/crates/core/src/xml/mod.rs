//! GMT XML reading and writing.
//!
//! | element | model |
//! |---|---|
//! | `struct` (`type`, `id`/`ID`, `ref`) | [`StructNode`](crate::model::StructNode) |
//! | `feat` (`type`, text / nested `feat` / `target`) | [`Feature`](crate::model::Feature) |
//! | `alt` | one member of an [`AltSet`](crate::model::AltSet); adjacent `alt`s share a set |
//! | `rel` (`type`, `target`) | [`Relation`](crate::model::Relation) |
//! | `seg` (`target`, `targets`, `startsAt`/`endsAt`, `startPosition`/`endPosition`) | [`SegmentRef`](crate::model::SegmentRef) |
//! | `startsAt target` + `endsAt target` | landmark endpoints |
//! | `brack` | [`Bracket`](crate::model::Bracket) |
//! | `gmt` (`type`) | document container when there is not exactly one root |
//! | any other leaf with text | feature named after the element |

mod read;
pub(crate) mod tree;
mod write;

pub use read::{parse_gmt, Diagnostic, GmtParseError, ParseDiagnostics};
pub use tree::XmlError;
pub use write::{serialize_gmt, SerializeError};

pub(crate) use write::{escape_attr, DECLARATION};

/// Root element wrapping zero or several top-level nodes.
pub const CONTAINER: &str = "gmt";
