//! Thin dispatch layer between sequential loops and rayon data-parallel ones.
//!
//! Every batch kernel in the crate computes each output element independently
//! from immutable inputs, so the parallel and sequential paths are
//! bit-identical. Reductions are done sequentially over per-element results
//! (or with `max`, which is order-independent).

/// Execution mode for batch kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Parallelism::Rayon
        }
        #[cfg(not(feature = "parallel"))]
        {
            Parallelism::Sequential
        }
    }
}

/// Maps `0..n` through `f`, preserving index order in the output.
pub(crate) fn map_indexed<T, F>(par: Parallelism, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match par {
        Parallelism::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
    }
}

/// Applies `f(chunk_index, chunk)` to disjoint consecutive chunks of `data`.
pub(crate) fn for_each_chunk_mut<T, F>(par: Parallelism, data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    debug_assert!(chunk > 0);
    match par {
        Parallelism::Sequential => {
            for (i, c) in data.chunks_mut(chunk).enumerate() {
                f(i, c);
            }
        }
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
        }
    }
}

/// Maximum of `f(i)` over `0..n`; `f` must return finite values.
pub(crate) fn max_indexed<F>(par: Parallelism, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    match par {
        Parallelism::Sequential => (0..n).map(f).fold(f64::NEG_INFINITY, f64::max),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            (0..n)
                .into_par_iter()
                .map(f)
                .reduce(|| f64::NEG_INFINITY, f64::max)
        }
    }
}
