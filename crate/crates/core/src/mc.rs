//! Deterministic Monte Carlo drivers.
//!
//! Work is cut into fixed-size chunks and chunk `c` always draws from stream
//! `(seed, stream_base + c)`. Chunk results are merged in index order, so every
//! estimate is bit-identical whatever the number of worker threads.

use crate::rng::RandomStream;

pub const CHUNK_SIZE: usize = 4096;

/// Monte Carlo estimate of an expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub n: usize,
    pub mean: f64,
    /// Standard error of `mean`.
    pub se: f64,
    pub seed: u64,
}

impl McEstimate {
    /// Distance from `target` in units of standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.se == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / self.se
        }
    }

    pub fn within_se(&self, target: f64, k: f64) -> bool {
        self.z_score(target) <= k
    }
}

/// Running mean and centred second moment (Welford), mergeable.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn estimate(&self, seed: u64) -> McEstimate {
        McEstimate {
            n: self.count,
            mean: self.mean,
            se: (self.variance() / self.count.max(1) as f64).sqrt(),
            seed,
        }
    }
}

fn chunk_bounds(n: usize) -> Vec<(usize, usize)> {
    (0..n.div_ceil(CHUNK_SIZE))
        .map(|c| {
            let lo = c * CHUNK_SIZE;
            (lo, (lo + CHUNK_SIZE).min(n))
        })
        .collect()
}

/// Applies `f(stream, len)` to each chunk and returns the results in chunk order.
pub fn map_chunks<A, F>(n: usize, seed: u64, stream_base: u64, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut RandomStream, usize) -> A + Sync + Send,
{
    let bounds = chunk_bounds(n);
    let run = |(c, (lo, hi)): (usize, (usize, usize))| {
        let mut rng = RandomStream::new(seed, stream_base + c as u64);
        f(&mut rng, hi - lo)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        bounds.into_par_iter().enumerate().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        bounds.into_iter().enumerate().map(run).collect()
    }
}

/// One draw per replica; replica `r` uses stream `(seed, r)`.
pub fn map_replicas<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream, usize) -> T + Sync + Send,
{
    let run = |r: usize| {
        let mut rng = RandomStream::new(seed, r as u64);
        f(&mut rng, r)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(run).collect()
    }
}

/// Draws `n` samples from `sample` in stream-chunked order.
pub fn collect_samples<T, F>(n: usize, seed: u64, stream_base: u64, sample: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream) -> T + Sync + Send,
{
    map_chunks(n, seed, stream_base, |rng, len| {
        (0..len).map(|_| sample(rng)).collect::<Vec<T>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Estimates `E[g_j(X)]` for `k` functionals computed from the same draw.
///
/// `f` receives a stream and an output slice of length `k` to fill.
pub fn estimate_means<F>(n: usize, seed: u64, stream_base: u64, k: usize, f: F) -> Vec<McEstimate>
where
    F: Fn(&mut RandomStream, &mut [f64]) + Sync + Send,
{
    let parts = map_chunks(n, seed, stream_base, |rng, len| {
        let mut acc = vec![Moments::default(); k];
        let mut buf = vec![0.0; k];
        for _ in 0..len {
            f(rng, &mut buf);
            for (a, &v) in acc.iter_mut().zip(&buf) {
                a.push(v);
            }
        }
        acc
    });
    let mut total = vec![Moments::default(); k];
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    total.iter().map(|m| m.estimate(seed)).collect()
}

pub fn estimate_mean<F>(n: usize, seed: u64, stream_base: u64, f: F) -> McEstimate
where
    F: Fn(&mut RandomStream) -> f64 + Sync + Send,
{
    estimate_means(n, seed, stream_base, 1, |rng, out| out[0] = f(rng))[0]
}
