//! Leaderboard: validated submissions in an append-only store, rendered to
//! static tables with Pareto-frontier marks on the score-vs-cost plane.

pub mod entry;
pub mod render;
pub mod store;

pub use entry::{classify_submission, Openness, SubmissionMeta, TagError, Tooling};
pub use render::{render, RenderBundle, TABLE_HEADER};
pub use store::{read_bundle, Rejection, Store, StoreError, StoredEntry};
