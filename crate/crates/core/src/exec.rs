//! Trial-level parallelism with a sequential fallback.
//!
//! With the `parallel` feature, indexed maps run on the current rayon pool.
//! Without it (or with `parallel = false` at the call site) they run in order
//! on the calling thread. Results are always returned in index order, so any
//! reduction performed over them is independent of scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n` and collects the results in index order.
pub fn map_indexed<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Whether this build can run work in parallel at all.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_in_index_order() {
        let seq = map_indexed(200, false, |i| i * i);
        let par = map_indexed(200, true, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[13], 169);
    }
}
