//! Data-parallel map with a sequential fallback. Results always come back
//! in index order, so callers that fold them are deterministic in either
//! mode.

/// How enumeration work is scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parallelism {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is on, otherwise
    /// runs sequentially.
    Parallel,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Parallel
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    /// Whether work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Parallel
    }
}

/// `(0..n).map(f)` collected in order.
pub fn map_range<R, F>(mode: Parallelism, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// Number of worker threads `mode` will use.
pub fn threads(mode: Parallelism) -> usize {
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        return rayon::current_num_threads();
    }
    let _ = mode;
    1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = map_range(Parallelism::Sequential, 1000, |i| i * i);
        let par = map_range(Parallelism::Parallel, 1000, |i| i * i);
        assert_eq!(seq, par);
    }
}
