//! Data-parallel execution over independent trials.

use serde::{Deserialize, Serialize};

/// How independent work items are scheduled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecMode {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled, otherwise runs sequentially.
    #[default]
    Parallel,
}

/// `f(0), …, f(count − 1)` in index order.
pub fn map_indices<T, F>(count: u64, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..count).map(f).collect(),
        ExecMode::Parallel => parallel_map(count, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = map_indices(100, ExecMode::Sequential, |i| i * i);
        let par = map_indices(100, ExecMode::Parallel, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }
}
