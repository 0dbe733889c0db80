use rand::Rng;

use super::dendrogram::{assemble, Dendrogram, Orientation, Part, RawMerge};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Random ranked topology on `n` terminals labelled `1..n`: repeatedly joins
/// two uniformly chosen clusters in random orientation. Heights equal ranks.
pub fn random_dendrogram<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Dendrogram<T>> {
    if n == 0 {
        return Err(Error::Degenerate("no terminals".into()));
    }
    let mut parts: Vec<Part> = (0..n).map(Part::Leaf).collect();
    let mut raw = Vec::with_capacity(n - 1);
    while parts.len() > 1 {
        let a = parts.swap_remove(rng.random_range(0..parts.len()));
        let b = parts.swap_remove(rng.random_range(0..parts.len()));
        raw.push(RawMerge {
            a,
            b,
            height: T::of_usize(raw.len() + 1),
        });
        parts.push(Part::Step(raw.len() - 1));
    }
    assemble((1..=n).map(|i| i.to_string()).collect(), raw, false, Orientation::AsGiven)
}
