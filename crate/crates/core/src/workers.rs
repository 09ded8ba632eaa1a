//! Deterministic fan-out of index ranges across worker threads.
//!
//! Heavy enumerations split `0..len` into contiguous chunks, run each
//! chunk on its own thread and reassemble the per-chunk results in chunk
//! order. Outputs therefore never depend on scheduling, only on the
//! split, which is itself a pure function of `len` and the worker count.

use std::env;
use std::ops::Range;
use std::thread;

/// Environment variable controlling the worker count.
pub const WORKERS_ENV: &str = "HILBTAUT_WORKERS";

/// Parses a worker-count override; positive integers only.
pub fn parse_workers(raw: &str) -> Option<usize> {
    match raw.trim().parse::<usize>() {
        Ok(k) if k >= 1 => Some(k),
        _ => None,
    }
}

/// Worker count: the `HILBTAUT_WORKERS` override when set (falling back
/// to 1 when unparsable), otherwise the available parallelism capped
/// at 8.
pub fn worker_count() -> usize {
    match env::var(WORKERS_ENV) {
        Ok(raw) => parse_workers(&raw).unwrap_or(1),
        Err(_) => thread::available_parallelism()
            .map(|p| p.get().min(8))
            .unwrap_or(1),
    }
}

/// Splits `0..len` into at most `workers` contiguous near-even chunks.
/// Empty input yields no chunks; no chunk is ever empty.
pub fn split_even(len: usize, workers: usize) -> Vec<Range<usize>> {
    if len == 0 {
        return Vec::new();
    }
    let w = workers.max(1).min(len);
    let base = len / w;
    let extra = len % w;
    let mut out = Vec::with_capacity(w);
    let mut start = 0;
    for i in 0..w {
        let size = base + usize::from(i < extra);
        out.push(start..start + size);
        start += size;
    }
    out
}

/// Maps `f` over the chunks of `0..len`, one thread per chunk, and
/// returns the results in chunk order. A single chunk runs inline.
pub fn map_ranges<R, F>(len: usize, workers: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync,
{
    let chunks = split_even(len, workers);
    if chunks.len() <= 1 {
        return chunks.into_iter().map(f).collect();
    }
    thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|r| scope.spawn(|| f(r)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_covers_the_range_without_gaps() {
        for len in 0..40usize {
            for w in 1..10usize {
                let chunks = split_even(len, w);
                let mut next = 0;
                for c in &chunks {
                    assert_eq!(c.start, next);
                    assert!(c.end > c.start);
                    next = c.end;
                }
                assert_eq!(next, len);
                let sizes: Vec<_> = chunks.iter().map(|c| c.len()).collect();
                if let (Some(min), Some(max)) = (sizes.iter().min(), sizes.iter().max()) {
                    assert!(max - min <= 1);
                }
            }
        }
    }

    #[test]
    fn mapped_chunks_reassemble_in_order() {
        let serial: Vec<usize> = (0..100).map(|i| i * i).collect();
        for w in [1, 2, 3, 7, 64] {
            let chunked = map_ranges(100, w, |r| r.map(|i| i * i).collect::<Vec<_>>());
            let flat: Vec<usize> = chunked.into_iter().flatten().collect();
            assert_eq!(flat, serial);
        }
    }

    #[test]
    fn worker_override_parses_strictly() {
        assert_eq!(parse_workers("4"), Some(4));
        assert_eq!(parse_workers(" 12 "), Some(12));
        assert_eq!(parse_workers("0"), None);
        assert_eq!(parse_workers("-3"), None);
        assert_eq!(parse_workers("two"), None);
    }
}
