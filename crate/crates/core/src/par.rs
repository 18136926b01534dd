//! Order-preserving map over independent work items, parallel when the
//! `parallel` feature is on and sequential otherwise.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool; same as `Sequential` without the `parallel` feature.
    #[default]
    Parallel,
}

/// `(0..count).map(f)` collected in index order.
pub fn map_indexed<R, F>(count: usize, execution: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if execution == Execution::Parallel {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = execution;
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_order() {
        let seq = map_indexed(100, Execution::Sequential, |i| i * i);
        let par = map_indexed(100, Execution::Parallel, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }
}
