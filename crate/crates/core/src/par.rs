//! Switch between rayon and sequential iteration.

/// Expands to the first form when the `parallel` feature is enabled and to
/// the second otherwise.
#[macro_export]
macro_rules! if_rayon {
    ($rayon_value:expr, $else_value:expr) => {{
        #[cfg(feature = "parallel")]
        {
            #[allow(unused_imports)]
            use rayon::prelude::*;
            $rayon_value
        }
        #[cfg(not(feature = "parallel"))]
        {
            $else_value
        }
    }};
}

/// Maps `f` over `0..n` and collects the results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if_rayon!((0..n).into_par_iter().map(f).collect(), (0..n).map(f).collect())
}

/// Number of worker threads the parallel backend would use.
pub fn workers() -> usize {
    if_rayon!(rayon::current_num_threads(), 1)
}
