//! Independent-job execution: sequential, or data-parallel on rayon when the
//! `parallel` feature is enabled.
//!
//! Every job here is a pure function of its input, so results are identical
//! whichever path runs them; output order always follows input order.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool, or a dedicated pool of `threads` workers.
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
    Threads(usize),
}

impl Execution {
    /// `1` means sequential, `0` means the default parallel pool.
    pub fn from_workers(workers: usize) -> Self {
        match workers {
            0 => Execution::Parallel,
            1 => Execution::Sequential,
            n => Execution::Threads(n),
        }
    }

    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => par_map(items, f),
            #[cfg(feature = "parallel")]
            Execution::Threads(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(|| par_map(items, f)),
                Err(_) => par_map(items, f),
            },
            #[cfg(not(feature = "parallel"))]
            _ => items.iter().map(f).collect(),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}
