//! Data-parallel map helpers.
//!
//! With the `parallel` feature the maps run on the rayon pool; without it they
//! run sequentially. Either way the output vector is in input order, so every
//! reduction done on it downstream happens in a fixed index order and results
//! are bit-identical across thread counts.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, collecting in index order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Map `f` over a slice, collecting in input order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Send + Sync,
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

/// Fallible map over `0..n`; the first error in index order wins.
pub fn try_map_range<R, E, F>(n: usize, f: F) -> Result<Vec<R>, E>
where
    R: Send,
    E: Send,
    F: Fn(usize) -> Result<R, E> + Send + Sync,
{
    map_range(n, f).into_iter().collect()
}

/// Fallible map over a slice; the first error in input order wins.
pub fn try_map_slice<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Send + Sync,
{
    map_slice(items, f).into_iter().collect()
}

/// Number of worker threads the maps above will use.
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Size the global pool. A no-op in sequential builds or once the pool exists.
pub fn init_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
    }
}

/// Run `f` with the maps above confined to `n` worker threads, leaving the
/// global pool alone. Sequential builds just call `f`.
pub fn with_threads<R: Send>(n: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_preserve_order() {
        let v = map_range(1000, |i| i * 3);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 3 * i));
        let s: Vec<u32> = (0..50).collect();
        assert_eq!(map_slice(&s, |x| x + 1), (1..51).collect::<Vec<_>>());
    }

    #[test]
    fn first_error_in_index_order() {
        let r: Result<Vec<usize>, usize> = try_map_range(100, |i| if i % 7 == 3 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(3));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let f = || map_range(257, |i| (i as f64).sqrt().sin());
        let one = with_threads(1, f);
        let many = with_threads(4, f);
        assert_eq!(one, many);
        assert_eq!(with_threads(1, threads), 1);
    }
}
