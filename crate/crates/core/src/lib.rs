//! Offline compression of reduced ordered binary decision diagrams.
//!
//! The codec in [`codec`] writes a shortest-edge spanning tree of the
//! diagram as a bit string and lists only the remaining edges explicitly.
//! [`naive`] is a plain child-list baseline with the same backends.

pub mod bdd;
pub mod builder;
pub mod codec;
mod error;
pub mod generate;
pub mod naive;
pub mod order;
pub mod spanning;
pub mod text;

pub use bdd::{Assignment, Bdd, Diagram, Mismatch, Node, NodeId, NodeKind, Slot, ValidationReport, Violation};
pub use builder::{apply, from_truth_table, negate, reduce, BoolOp, Builder};
pub use codec::{decode, encode, Backend, CodecConfig, EncodedStreams};
pub use error::{Error, Result};
pub use naive::{naive_decode, naive_encode};
pub use spanning::{build_spanning_tree, SpanningTree};
pub use text::{read_bdd_text, write_bdd_text};
