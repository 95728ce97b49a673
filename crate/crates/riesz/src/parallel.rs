//! Deterministic map over an index range.
//!
//! Work items are pure functions of their index; results land in a `Vec` in
//! index order, so the caller's reduction sees the same operand sequence no
//! matter how many workers ran the map. With the `parallel` feature the map
//! runs on the current rayon pool; otherwise it is a plain loop.

use alloc::vec::Vec;

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
