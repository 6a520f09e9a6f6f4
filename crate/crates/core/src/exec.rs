//! Data-parallel execution with a sequential fallback.
//!
//! Every batch operation in the crate funnels through [`Exec::map`], which
//! returns results in input order. With the `parallel` feature the work is
//! spread over a rayon pool; without it (or with [`Exec::Sequential`]) the
//! same closure runs on the calling thread. Reductions always happen after
//! collection, in input order, so the worker count never changes a value.

/// Execution policy for batch work.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    /// Run on the calling thread.
    Sequential,
    /// Use the global rayon pool (or a dedicated pool of `workers` threads).
    #[default]
    Parallel,
    /// Dedicated pool with a fixed number of threads.
    Workers(usize),
}

impl Exec {
    /// Policy for a user-supplied worker count (`0` or `1` means sequential).
    pub fn with_workers(workers: usize) -> Self {
        match workers {
            0 | 1 => Exec::Sequential,
            n => Exec::Workers(n),
        }
    }

    /// Map `f` over `items`, preserving order.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Exec::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            #[cfg(feature = "parallel")]
            Exec::Workers(n) => {
                use rayon::prelude::*;
                match rayon::ThreadPoolBuilder::new().num_threads(*n).build() {
                    Ok(pool) => pool.install(|| items.par_iter().map(f).collect()),
                    Err(_) => items.iter().map(f).collect(),
                }
            }
            #[cfg(not(feature = "parallel"))]
            _ => items.iter().map(f).collect(),
        }
    }

    /// Like [`Exec::map`] but stops at the first error (in input order).
    pub fn try_map<T, R, E, F>(&self, items: &[T], f: F) -> Result<Vec<R>, E>
    where
        T: Sync,
        R: Send,
        E: Send,
        F: Fn(&T) -> Result<R, E> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }
}
