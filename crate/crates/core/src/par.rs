//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the helpers dispatch to rayon. Without it, or
//! inside [`sequential`], they run on the calling thread. Every helper keeps
//! output order equal to index order.

use std::cell::Cell;
use std::ops::Range;

thread_local! {
    static FORCE_SEQ: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with all helpers on this thread forced onto the sequential path.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    struct Reset(bool);
    impl Drop for Reset {
        fn drop(&mut self) {
            FORCE_SEQ.with(|c| c.set(self.0));
        }
    }
    let prev = FORCE_SEQ.with(|c| c.replace(true));
    let _reset = Reset(prev);
    f()
}

/// True when the helpers will use rayon from this thread.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQ.with(Cell::get)
}

pub fn map_range<T, F>(range: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    range.map(f).collect()
}

pub fn map_slice<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

pub fn sum_range<F>(range: Range<u64>, f: F) -> u64
where
    F: Fn(u64) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).sum();
    }
    range.map(f).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_parallel_agree() {
        let par = map_range(0..1000, |i| i * i % 97);
        let seq = sequential(|| map_range(0..1000, |i| i * i % 97));
        assert_eq!(par, seq);
        assert!(!sequential(is_parallel));
    }

    #[test]
    fn sequential_scope_resets() {
        sequential(|| ());
        assert_eq!(is_parallel(), cfg!(feature = "parallel"));
    }
}
