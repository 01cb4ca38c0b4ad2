//! Data-parallel helpers. With the `parallel` feature the exhaustive loops
//! run on rayon; [`sequential`] (or building without the feature) takes the
//! plain iterator path. Both paths return identical results: first-match
//! searches always report the lowest index.

use std::cell::Cell;
use std::ops::Range;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Run `f` with every helper in this module on the sequential path.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let prev = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|c| c.set(prev));
    out
}

pub fn is_sequential() -> bool {
    !cfg!(feature = "parallel") || FORCE_SEQUENTIAL.with(|c| c.get())
}

/// Run `f` with a worker count: `Some(1)` is sequential, `Some(n)` a
/// dedicated pool of `n` threads, `None` the global pool.
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(1) => sequential(f),
        #[cfg(feature = "parallel")]
        Some(n) if n > 1 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

pub(crate) fn find_map_first<T, F>(range: Range<u64>, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !is_sequential() {
        use rayon::prelude::*;
        return range.into_par_iter().find_map_first(f);
    }
    range.into_iter().find_map(f)
}

pub(crate) fn find_map_first_in<I, T, F>(items: &[I], f: F) -> Option<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !is_sequential() {
        use rayon::prelude::*;
        return items.par_iter().find_map_first(f);
    }
    items.iter().find_map(f)
}

pub(crate) fn map_collect<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !is_sequential() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    range.into_iter().map(f).collect()
}

pub(crate) fn map_collect_in<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !is_sequential() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_match_is_lowest_index_on_both_paths() {
        let f = |i: u64| (i % 7 == 3 && i > 100).then_some(i);
        let par = find_map_first(0..10_000, f);
        let seq = sequential(|| find_map_first(0..10_000, f));
        assert_eq!(par, Some(101));
        assert_eq!(seq, Some(101));
    }

    #[test]
    fn sequential_flag_is_scoped() {
        sequential(|| assert!(is_sequential()));
        if cfg!(feature = "parallel") {
            assert!(!is_sequential());
        }
    }
}
