//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) index maps run on the rayon pool;
//! without it, or inside [`sequential`], they run on the calling thread.
//! Results are always returned in index order, so output is identical in
//! both modes.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with all index maps issued from this thread forced sequential.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let prev = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|c| c.set(prev));
    out
}

/// True when maps issued from this thread will use the rayon pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.with(|c| c.get())
}

/// `(0..n).map(f).collect()`, parallel when enabled.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// Fills a row-major `rows x cols` buffer, one row per task.
pub fn fill_rows<T, F>(rows: usize, cols: usize, f: F) -> Vec<T>
where
    T: Send + Copy + Default,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let mut out = vec![T::default(); rows * cols];
    if cols == 0 {
        return out;
    }
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            out.par_chunks_mut(cols)
                .enumerate()
                .for_each(|(i, row)| f(i, row));
            return out;
        }
    }
    out.chunks_mut(cols).enumerate().for_each(|(i, row)| f(i, row));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_range(100, |i| (i as f64).sqrt());
        let b = sequential(|| map_range(100, |i| (i as f64).sqrt()));
        assert_eq!(a, b);
        assert!(!sequential(is_parallel));
    }

    #[test]
    fn rows_in_order() {
        let m = fill_rows(3, 2, |i, row: &mut [usize]| {
            row[0] = i;
            row[1] = 10 * i;
        });
        assert_eq!(m, vec![0, 0, 1, 10, 2, 20]);
    }
}
