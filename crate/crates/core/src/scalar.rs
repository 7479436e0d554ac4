//! Floating-point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::Range;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar usable by the models, estimators and audits (`f32` or `f64`).
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from `f64`, used for literals and sampled values.
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar converts to f64")
    }

    /// Bit pattern used to recognise identical alternatives across records.
    fn identity_bits(self) -> u64 {
        // normalise -0.0 so that it matches 0.0
        let x = self.as_f64();
        if x == 0.0 {
            0
        } else {
            x.to_bits()
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Leaves at or below this many items are summed sequentially.
const LEAF: usize = 256;

/// Deterministic tree reduction over `range`.
///
/// The split points depend only on the range, so the result is bitwise
/// identical regardless of how many worker threads execute the two halves.
pub fn tree_reduce<R, L, C>(range: Range<usize>, leaf: &L, combine: &C) -> R
where
    R: Send,
    L: Fn(Range<usize>) -> R + Sync,
    C: Fn(R, R) -> R + Sync,
{
    let len = range.end - range.start;
    if len <= LEAF {
        return leaf(range);
    }
    let mid = range.start + len / 2;
    let (left, right) = rayon::join(
        || tree_reduce(range.start..mid, leaf, combine),
        || tree_reduce(mid..range.end, leaf, combine),
    );
    combine(left, right)
}

/// Pairwise sum of `f(i)` for `i` in `0..n`.
pub fn pairwise_sum<T: Scalar, F>(n: usize, f: F) -> T
where
    F: Fn(usize) -> T + Sync,
{
    if n == 0 {
        return T::zero();
    }
    tree_reduce(0..n, &|r: Range<usize>| r.map(&f).fold(T::zero(), |acc, x| acc + x), &|a, b| a + b)
}
