//! Deterministic summation.
//!
//! Quadrature weights, 3D grid reductions and CG dot products all funnel
//! through these helpers. Sums are evaluated in fixed chunk order with
//! Neumaier compensation, so results are bit-identical across runs and
//! independent of the rayon worker count (parallel reductions combine the
//! same per-chunk partials in index order).

use crate::scalar::Real;
use rayon::prelude::*;

/// Chunk length for the fixed-order blocked reduction.
///
/// Small enough that each block stays in cache, large enough that the
/// sequential combine of block partials is negligible.
pub const SUM_CHUNK: usize = 4096;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct Accumulator<T: Real> {
    sum: T,
    comp: T,
}

impl<T: Real> Default for Accumulator<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }
}

impl<T: Real> Accumulator<T> {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Compensated sequential sum of an iterator.
pub fn sum_iter<T: Real>(iter: impl IntoIterator<Item = T>) -> T {
    let mut acc = Accumulator::new();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}

/// Deterministic sum of a slice: per-chunk compensated sums combined in
/// index order. Identical output for any thread count.
pub fn sum_slice<T: Real>(xs: &[T]) -> T {
    if xs.len() <= SUM_CHUNK {
        return sum_iter(xs.iter().copied());
    }
    let partials: Vec<T> = xs
        .par_chunks(SUM_CHUNK)
        .map(|c| sum_iter(c.iter().copied()))
        .collect();
    sum_iter(partials)
}

/// Deterministic dot product with the same chunking contract as [`sum_slice`].
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len(), "dot: length mismatch");
    if a.len() <= SUM_CHUNK {
        let mut acc = Accumulator::new();
        for (x, y) in a.iter().zip(b) {
            acc.add(*x * *y);
        }
        return acc.value();
    }
    let partials: Vec<T> = a
        .par_chunks(SUM_CHUNK)
        .zip(b.par_chunks(SUM_CHUNK))
        .map(|(ca, cb)| {
            let mut acc = Accumulator::new();
            for (x, y) in ca.iter().zip(cb) {
                acc.add(*x * *y);
            }
            acc.value()
        })
        .collect();
    sum_iter(partials)
}

/// Deterministic sum of `f(i)` over `0..n`, chunked as in [`sum_slice`].
pub fn sum_indexed<T: Real, F: Fn(usize) -> T + Sync>(n: usize, f: F) -> T {
    if n <= SUM_CHUNK {
        let mut acc = Accumulator::new();
        for i in 0..n {
            acc.add(f(i));
        }
        return acc.value();
    }
    let nchunks = n.div_ceil(SUM_CHUNK);
    let partials: Vec<T> = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * SUM_CHUNK;
            let hi = (lo + SUM_CHUNK).min(n);
            let mut acc = Accumulator::new();
            for i in lo..hi {
                acc.add(f(i));
            }
            acc.value()
        })
        .collect();
    sum_iter(partials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        // 1 + 1e-16 repeated: naive f64 sum loses the small terms.
        let mut xs = vec![1.0f64];
        xs.extend(std::iter::repeat(1e-16).take(1_000_000));
        let s = sum_slice(&xs);
        assert!((s - (1.0 + 1e-10)).abs() < 1e-24);
    }

    #[test]
    fn chunked_matches_sequential() {
        let xs: Vec<f64> = (0..20_000)
            .map(|i| (i as f64 * 0.37).sin() / (1.0 + i as f64))
            .collect();
        let a = sum_slice(&xs);
        let b = sum_iter(xs.iter().copied());
        assert_eq!(a, b);
    }

    #[test]
    fn dot_is_deterministic_across_pools() {
        let n = 50_000;
        let a: Vec<f64> = (0..n).map(|i| ((i * 7919) % 104729) as f64 * 1e-5).collect();
        let b: Vec<f64> = (0..n).map(|i| ((i * 104729) % 7919) as f64 * 1e-3).collect();
        let d1 = dot(&a, &b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let d2 = pool.install(|| dot(&a, &b));
        assert_eq!(d1, d2);
    }
}
