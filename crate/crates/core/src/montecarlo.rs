//! Monte Carlo estimate of `f(n, p)` from uniform samples of the unit balls.
//!
//! Uniform points on `B_p^n` come from the p-generalized normal: with
//! `G_i ~ Gamma(1/p, 1)`, independent signs and `w ~ Exp(1)`,
//! `x_i = ±(G_i / (Σ G_j + w))^{1/p}` is uniform on the ball.
//!
//! Each run is split into `streams` substreams. Substream `i` draws from a
//! ChaCha8 generator seeded with `seed` on stream `i`, and the per-stream
//! accumulators are merged in stream order, so a given `(seed, streams)` pair
//! reproduces the same estimate bit for bit under any execution backend.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pball::{conjugate, Dimension, Exponent};

/// Offset separating the `y`-side substreams of the factored estimator.
const SECOND_SIDE: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MCConfig {
    samples: u64,
    seed: u64,
    streams: u32,
}

impl MCConfig {
    pub fn new(samples: u64, seed: u64, streams: u32) -> Result<Self> {
        if samples == 0 || streams == 0 {
            return Err(Error::Argument("samples and streams must be positive".into()));
        }
        if !samples.is_multiple_of(streams as u64) {
            return Err(Error::Argument(format!("samples ({samples}) must be divisible by streams ({streams})")));
        }
        Ok(Self { samples, seed, streams })
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn streams(&self) -> u32 {
        self.streams
    }

    fn per_stream(&self) -> u64 {
        self.samples / self.streams as u64
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl MCEstimate {
    /// `|mean − target| ≤ sigmas · std_error`.
    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.std_error
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        let d = v - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.count == 0 {
            return;
        }
        let total = self.count + other.count;
        let d = other.mean - self.mean;
        let w = other.count as f64 / total as f64;
        self.mean += d * w;
        self.m2 += other.m2 + d * d * self.count as f64 * w;
        self.count = total;
    }

    pub fn estimate(&self) -> MCEstimate {
        let std_error =
            if self.count > 1 { (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt() } else { 0.0 };
        MCEstimate { mean: self.mean, std_error, samples: self.count }
    }
}

/// Draws uniform points from `B_p^n`.
#[derive(Debug, Clone)]
pub struct BallSampler {
    n: usize,
    inv_p: f64,
    gamma: Option<Gamma<f64>>,
}

impl BallSampler {
    pub fn new(n: Dimension, p: Exponent) -> Self {
        let gamma =
            if p.is_infinite() { None } else { Some(Gamma::new(p.inv_p(), 1.0).expect("shape 1/p lies in (0, 1]")) };
        Self { n: n.get() as usize, inv_p: p.inv_p(), gamma }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Fill `out` (length `n`) with one uniform point.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        let Some(gamma) = &self.gamma else {
            for x in out.iter_mut() {
                *x = 2.0 * rng.random::<f64>() - 1.0;
            }
            return;
        };
        let mut total: f64 = Exp1.sample(rng);
        for x in out.iter_mut() {
            let g: f64 = gamma.sample(rng);
            total += g;
            *x = if rng.random::<bool>() { g } else { -g };
        }
        let inv_p = self.inv_p;
        for x in out.iter_mut() {
            let r = (x.abs() / total).powf(inv_p);
            *x = r.copysign(*x);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.sample_into(rng, &mut out);
        out
    }
}

/// One uniform point from `B_p^n`.
pub fn sample_ball<R: Rng + ?Sized>(n: Dimension, p: Exponent, rng: &mut R) -> Vec<f64> {
    BallSampler::new(n, p).sample(rng)
}

/// Generator for substream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_streams<F>(config: &MCConfig, exec: Execution, stream_offset: u64, body: F) -> Accumulator
where
    F: Fn(&mut ChaCha8Rng, u64, &mut Accumulator) + Sync + Send,
{
    let per_stream = config.per_stream();
    let parts = exec.map_range(config.streams as usize, |i| {
        let mut rng = stream_rng(config.seed, stream_offset + i as u64);
        let mut acc = Accumulator::default();
        body(&mut rng, per_stream, &mut acc);
        acc
    });
    let mut total = Accumulator::default();
    for part in &parts {
        total.merge(part);
    }
    total
}

/// Mean of `⟨x, y⟩²` over independent uniform pairs `x ∈ B_p^n`, `y ∈ B_q^n`.
pub fn estimate_f(n: Dimension, p: Exponent, config: &MCConfig) -> MCEstimate {
    estimate_f_with(n, p, config, Execution::default())
}

pub fn estimate_f_with(n: Dimension, p: Exponent, config: &MCConfig, exec: Execution) -> MCEstimate {
    let xs = BallSampler::new(n, p);
    let ys = BallSampler::new(n, conjugate(p));
    run_streams(config, exec, 0, |rng, count, acc| {
        let mut x = vec![0.0; xs.dim()];
        let mut y = vec![0.0; ys.dim()];
        for _ in 0..count {
            xs.sample_into(rng, &mut x);
            ys.sample_into(rng, &mut y);
            let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            acc.push(dot * dot);
        }
    })
    .estimate()
}

/// Mean of `‖x‖²/n` over uniform `x ∈ B_p^n`, an estimate of `E[x₁²]`.
fn coordinate_second_moment(n: Dimension, p: Exponent, config: &MCConfig, exec: Execution, offset: u64) -> MCEstimate {
    let sampler = BallSampler::new(n, p);
    let scale = 1.0 / n.as_f64();
    run_streams(config, exec, offset, |rng, count, acc| {
        let mut x = vec![0.0; sampler.dim()];
        for _ in 0..count {
            sampler.sample_into(rng, &mut x);
            acc.push(x.iter().map(|v| v * v).sum::<f64>() * scale);
        }
    })
    .estimate()
}

/// `n · E[x₁²] · E[y₁²]` from independent samples of each ball; `samples`
/// points are drawn on each side.
pub fn estimate_f_factored(n: Dimension, p: Exponent, config: &MCConfig) -> MCEstimate {
    estimate_f_factored_with(n, p, config, Execution::default())
}

pub fn estimate_f_factored_with(n: Dimension, p: Exponent, config: &MCConfig, exec: Execution) -> MCEstimate {
    let mx = coordinate_second_moment(n, p, config, exec, 0);
    let my = coordinate_second_moment(n, conjugate(p), config, exec, SECOND_SIDE);
    factored_estimate(n, &mx, &my)
}

/// Combines two independent factor estimates; the variance of the product of
/// independent means is `a²σ_b² + b²σ_a² + σ_a²σ_b²`.
pub fn factored_estimate(n: Dimension, mx: &MCEstimate, my: &MCEstimate) -> MCEstimate {
    let m = n.as_f64();
    let (a, b, sa, sb) = (mx.mean, my.mean, mx.std_error, my.std_error);
    MCEstimate {
        mean: m * a * b,
        std_error: m * (a * a * sb * sb + b * b * sa * sa + sa * sa * sb * sb).sqrt(),
        samples: mx.samples.min(my.samples),
    }
}

/// Empirical coordinate moments of the sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerMoments {
    pub first: MCEstimate,
    pub second: MCEstimate,
    /// `E[x₂²]`, present for `n ≥ 2`.
    pub second_alt: Option<MCEstimate>,
    /// Largest `Σ|x_i|^p` seen (`max |x_i|` for `p = ∞`).
    pub max_norm: f64,
}

pub fn sampler_moments(n: Dimension, p: Exponent, config: &MCConfig, exec: Execution) -> SamplerMoments {
    let sampler = BallSampler::new(n, p);
    let per_stream = config.per_stream();
    let parts = exec.map_range(config.streams as usize, |i| {
        let mut rng = stream_rng(config.seed, i as u64);
        let mut acc = [Accumulator::default(); 3];
        let mut max_norm = 0.0f64;
        let mut x = vec![0.0; sampler.dim()];
        for _ in 0..per_stream {
            sampler.sample_into(&mut rng, &mut x);
            acc[0].push(x[0]);
            acc[1].push(x[0] * x[0]);
            if x.len() > 1 {
                acc[2].push(x[1] * x[1]);
            }
            let norm = if p.is_infinite() {
                x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            } else {
                x.iter().map(|v| v.abs().powf(p.p())).sum()
            };
            max_norm = max_norm.max(norm);
        }
        (acc, max_norm)
    });
    let mut acc = [Accumulator::default(); 3];
    let mut max_norm = 0.0f64;
    for (part, m) in &parts {
        for (a, b) in acc.iter_mut().zip(part) {
            a.merge(b);
        }
        max_norm = max_norm.max(*m);
    }
    SamplerMoments {
        first: acc[0].estimate(),
        second: acc[1].estimate(),
        second_alt: (n.get() > 1).then(|| acc[2].estimate()),
        max_norm,
    }
}
