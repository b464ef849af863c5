//! Execution helpers shared by the data-parallel stages.
//!
//! With the `parallel` feature the mappers can fan out over rayon; without
//! it they degrade to plain sequential loops with identical results. Every
//! caller maps independent indices to owned values, so ordering and output
//! do not depend on the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `0..n` through `f`, preserving index order in the output. Runs on
/// rayon when `par` is set and the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub(crate) fn dispatch_map<T, F>(n: usize, par: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if par {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn dispatch_map<T, F>(n: usize, _par: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Default execution for public entry points.
pub(crate) fn maybe_par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    dispatch_map(n, true, f)
}
