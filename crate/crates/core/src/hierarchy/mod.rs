//! Dendrograms and agglomerative construction.
//!
//! | Linkage    | Works on            | Monotone | Algorithm              |
//! |------------|---------------------|----------|------------------------|
//! | `Single`   | dissimilarities     | yes      | nearest-neighbour chain |
//! | `Complete` | dissimilarities     | yes      | nearest-neighbour chain |
//! | `Ward`     | squared, sqrt shown | yes      | nearest-neighbour chain |
//! | `Median`   | squared, sqrt shown | no       | global minimum search  |

mod agglomerate;
mod dendrogram;
mod random;

pub use agglomerate::{agglomerate, agglomerate_contiguous, agglomerate_naive, Linkage};
pub use dendrogram::{Dendrogram, Merge, NodeRef, Side};
pub use random::random_dendrogram;
pub(crate) use dendrogram::{assemble, Orientation, Part, RawMerge};
