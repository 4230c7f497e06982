//! Thin dispatch layer between rayon and sequential execution.
//!
//! Every scan in the crate funnels through these helpers, so disabling the
//! `parallel` feature swaps in the sequential fallbacks without touching
//! call sites. Results are merged in input order either way, keeping
//! reports byte-for-byte reproducible.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over a slice of inputs.
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// First Some(..) in input order; later candidates do not override earlier.
pub fn find_map_first<T, R, F>(items: &[T], f: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().find_map_first(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().find_map(|t| f(t))
    }
}

/// Sequential twins used by the benchmark suite for comparison.
pub mod seq {
    pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
    where
        F: Fn(&T) -> R,
    {
        items.iter().map(f).collect()
    }

    pub fn find_map_first<T, R, F>(items: &[T], f: F) -> Option<R>
    where
        F: Fn(&T) -> Option<R>,
    {
        items.iter().find_map(|t| f(t))
    }
}
