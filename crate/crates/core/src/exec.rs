//! Block-parallel evaluation with a deterministic reduction order.
//!
//! Work is split into fixed-size blocks of trial indices. Blocks are evaluated
//! in parallel (feature `parallel`) or sequentially, collected in index order
//! and folded left to right, so floating point sums are identical for every
//! thread count.

use std::ops::Range;

/// Trials per work block. Fixed, independent of the thread count.
pub const BLOCK_SIZE: u64 = 4096;

/// Splits `range` into [`BLOCK_SIZE`] blocks and maps each one with `f`.
/// The returned vector is ordered by block start.
pub fn map_blocks<T, F>(range: Range<u64>, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let blocks = blocks(range);
    run(blocks, threads, f)
}

fn blocks(range: Range<u64>) -> Vec<Range<u64>> {
    let mut out = Vec::new();
    let mut start = range.start;
    while start < range.end {
        let end = (start + BLOCK_SIZE).min(range.end);
        out.push(start..end);
        start = end;
    }
    out
}

#[cfg(feature = "parallel")]
fn run<T, F>(blocks: Vec<Range<u64>>, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if threads == 1 || blocks.len() <= 1 {
        return blocks.into_iter().map(f).collect();
    }
    let work = || blocks.into_par_iter().map(&f).collect::<Vec<_>>();
    if threads == 0 {
        work()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run<T, F>(blocks: Vec<Range<u64>>, _threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    blocks.into_iter().map(f).collect()
}

/// Resolves a thread request: explicit value, else `BIDIR_RELAY_THREADS`,
/// else 0 (let the pool decide).
pub fn resolve_threads(requested: Option<usize>) -> usize {
    requested
        .or_else(|| {
            std::env::var("BIDIR_RELAY_THREADS")
                .ok()
                .and_then(|v| v.trim().parse().ok())
        })
        .unwrap_or(0)
}
