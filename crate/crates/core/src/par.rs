//! Batch evaluation over many structures. With the `parallel` feature
//! (default) the batch is spread over a rayon pool; without it the same entry
//! points run sequentially, so callers never need to care.

use crate::conditions::{check_all, ConditionReport};
use crate::structure::LieHermitianStructure;
use crate::Result;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, in parallel when the `parallel` feature is on.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

/// Condition reports for a batch of structures, in input order.
pub fn census(items: &[LieHermitianStructure], tol: f64) -> Vec<Result<ConditionReport>> {
    par_map(items, |s| check_all(s, tol))
}

/// Sequential reference implementation of [`census`], kept unconditionally
/// compiled so the two can be compared for agreement and speed.
pub fn census_seq(items: &[LieHermitianStructure], tol: f64) -> Vec<Result<ConditionReport>> {
    items.iter().map(|s| check_all(s, tol)).collect()
}
