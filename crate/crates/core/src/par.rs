//! Thin dispatch layer between rayon and plain iterators.
//!
//! Every helper returns results in input order, so reductions performed by
//! callers over the returned vectors are independent of the thread count.
//! Building without the `parallel` feature swaps in the sequential versions.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over an integer range, preserving order.
pub fn map_range<R, F>(range: Range<i64>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(i64) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        range.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        range.map(f).collect()
    }
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
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

/// Maps `f` over fixed-size chunks of `items`. The closure receives the chunk
/// and the index of its first element.
pub fn map_chunks<T, R, F>(items: &[T], chunk: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&[T], usize) -> R + Sync + Send,
{
    assert!(chunk > 0);
    #[cfg(feature = "parallel")]
    {
        items
            .par_chunks(chunk)
            .enumerate()
            .map(|(i, c)| f(c, i * chunk))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items
            .chunks(chunk)
            .enumerate()
            .map(|(i, c)| f(c, i * chunk))
            .collect()
    }
}

/// Sorts finite floats ascending. Equal values are indistinguishable, so an
/// unstable sort yields the same array as a stable one.
pub fn sort_floats(values: &mut [f64]) {
    #[cfg(feature = "parallel")]
    {
        values.par_sort_unstable_by(f64::total_cmp);
    }
    #[cfg(not(feature = "parallel"))]
    {
        values.sort_unstable_by(f64::total_cmp);
    }
}

/// Whether the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
