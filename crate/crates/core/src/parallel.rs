//! Data-parallel map with a sequential fallback.
//!
//! All hot loops in this crate (population evaluation, oracle enumeration,
//! tuner design points) funnel through [`map_slice`]. With the `parallel`
//! feature (default) it runs on rayon; without it, a plain iterator. Both
//! paths preserve input order, so results never depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over a slice.
#[cfg(feature = "parallel")]
pub fn map_slice<T: Sync, U: Send, F: Fn(&T) -> U + Sync + Send>(items: &[T], f: F) -> Vec<U> {
    items.par_iter().map(f).collect()
}

/// Order-preserving map over a slice (sequential build).
#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, U, F: Fn(&T) -> U>(items: &[T], f: F) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Sequential reference implementation of [`map_slice`], kept available in
/// every build so benchmarks can compare the two paths directly.
pub fn map_slice_seq<T, U, F: Fn(&T) -> U>(items: &[T], f: F) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Runs `f` on a thread pool capped at `threads` workers (0 keeps the
/// default pool). Without the `parallel` feature the cap is meaningless
/// and `f` simply runs on the calling thread.
#[cfg(feature = "parallel")]
pub fn with_threads<U: Send>(threads: usize, f: impl FnOnce() -> U + Send) -> U {
    if threads == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to build thread pool")
            .install(f)
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<U>(_threads: usize, f: impl FnOnce() -> U) -> U {
    f()
}
