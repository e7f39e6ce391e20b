//! Data-parallel map over independent trial indices.
//!
//! With the `parallel` feature (default) the map fans out on a rayon pool;
//! without it the same API runs sequentially. Results are always returned
//! in index order and every trial derives its randomness from its own index,
//! so output is bitwise identical for any worker count, including zero.

/// Applies `f` to every index in `0..count`, returning results in order.
///
/// `workers` caps the rayon pool size; `0` means rayon's default. Without
/// the `parallel` feature `workers` is ignored and the map is sequential.
#[cfg(feature = "parallel")]
pub fn indexed_map<T, F>(count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    use rayon::prelude::*;
    if workers == 1 {
        return (0..count).map(f).collect();
    }
    let run = || (0..count).into_par_iter().map(&f).collect();
    match workers {
        0 => run(),
        w => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map(|pool| pool.install(run))
            .unwrap_or_else(|_| (0..count).map(&f).collect()),
    }
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn indexed_map<T, F>(count: usize, _workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    (0..count).map(f).collect()
}
