//! Execution strategy for the data-parallel inner loops.
//!
//! The per-arc uselessness tests, the per-leaf backward scans and the
//! per-root solve iterations are independent, so they can run on a rayon
//! pool. With the `parallel` feature disabled (or `Sequential` requested)
//! everything runs on the calling thread; results are identical either way.

/// How to run an independent batch of subproblems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Sequential,
    /// Rayon work-stealing. Falls back to sequential execution when the
    /// crate is built without the `parallel` feature.
    Parallel,
}

impl Strategy {
    /// Parallel when compiled in, sequential otherwise.
    pub const fn auto() -> Strategy {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::auto()
    }
}

/// Maps `test` over `items`, sequentially or on the rayon pool.
pub(crate) fn map_flags<T, F>(strategy: Strategy, items: &[T], test: F) -> Vec<bool>
where
    T: Sync,
    F: Fn(&T) -> bool + Sync,
{
    match strategy {
        Strategy::Parallel => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                return items.par_iter().map(&test).collect();
            }
            #[cfg(not(feature = "parallel"))]
            items.iter().map(test).collect()
        }
        Strategy::Sequential => items.iter().map(test).collect(),
    }
}

/// Finds the first item (in slice order) whose mapped value is `Some`,
/// returning that value. Rayon's `find_first` keeps the sequential answer.
pub(crate) fn find_map_first<T, R, F>(strategy: Strategy, items: &[T], f: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync,
{
    match strategy {
        Strategy::Parallel => {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                return items.par_iter().find_map_first(&f);
            }
            #[cfg(not(feature = "parallel"))]
            items.iter().find_map(f)
        }
        Strategy::Sequential => items.iter().find_map(f),
    }
}
