//! Fixed-boundary chunking for parallel scans.
//!
//! Scans over configuration space split the index range at boundaries that
//! depend only on the range length, and partial results are combined in
//! chunk order. Output is therefore identical no matter how many workers
//! rayon schedules.

use rayon::prelude::*;
use std::ops::Range;

pub(crate) const CHUNK: usize = 1 << 14;

pub(crate) fn ranges(len: usize) -> Vec<Range<usize>> {
    (0..len.div_ceil(CHUNK))
        .map(|c| (c * CHUNK)..(((c + 1) * CHUNK).min(len)))
        .collect()
}

/// Map each fixed chunk to a partial value in parallel, then fold the
/// partials sequentially in chunk order.
pub(crate) fn scan<P, M, F>(len: usize, map: M, init: P, fold: F) -> P
where
    P: Send,
    M: Fn(Range<usize>) -> P + Sync + Send,
    F: Fn(P, P) -> P,
{
    ranges(len)
        .into_par_iter()
        .map(map)
        .collect::<Vec<P>>()
        .into_iter()
        .fold(init, fold)
}
