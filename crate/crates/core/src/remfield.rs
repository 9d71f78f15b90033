//! Deterministic Gaussian energy landscape on the hypercube, with the
//! classical statistics of its extremes.
//!
//! Values are produced on demand from a counter-based generator keyed on
//! (seed, configuration), so a landscape occupies O(1) memory at any size
//! and every evaluation is a pure function of its arguments. Full-space
//! scans are capped at `n = 30` spins; beyond that this is the wrong tool.

use crate::chunks;
use crate::error::{Error, Result};
use crate::rng;

/// Largest spin count for which full scans are allowed.
pub const MAX_SPINS: u32 = 30;

/// A real-valued potential on the configurations of `n` spins.
///
/// Configurations are indexed by the integers `0..2^n`, bit `j` holding
/// spin `j` (spin value `1 - 2*bit`). Neighbors differ in exactly one bit.
pub trait EnergyLandscape: Sync {
    fn spins(&self) -> u32;
    fn energy(&self, sigma: usize) -> f64;

    fn dim(&self) -> usize {
        1usize << self.spins()
    }
}

/// Seed-keyed Gaussian landscape: independent N(0, n) values at each of the
/// `2^n` configurations, reproducible bit-for-bit from `(seed, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemField {
    seed: u64,
    n: u32,
}

impl RemField {
    pub fn new(seed: u64, n: u32) -> Result<Self> {
        if n == 0 || n > MAX_SPINS {
            return Err(Error::SpinCountOutOfRange { n, max: MAX_SPINS });
        }
        Ok(Self { seed, n })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Landscape standard deviation, `sqrt(n)`.
    pub fn scale(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// Exact census of the extreme-deviation set `{sigma : U(sigma) < -delta*n}`,
    /// by full scan. The member list is truncated to `member_cap` entries;
    /// the count is always exact.
    pub fn extreme_set(&self, delta: f64, member_cap: usize) -> Result<ExtremeSet> {
        if delta <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "delta",
                requirement: "> 0",
                value: delta,
            });
        }
        let threshold = -delta * self.n as f64;
        let (count, mut members) = chunks::scan(
            self.dim(),
            |range| {
                let mut cnt = 0usize;
                let mut mem = Vec::new();
                for sigma in range {
                    if self.energy(sigma) < threshold {
                        cnt += 1;
                        if mem.len() < member_cap {
                            mem.push(sigma);
                        }
                    }
                }
                (cnt, mem)
            },
            (0usize, Vec::new()),
            |(c0, mut m0), (c1, m1)| {
                m0.extend(m1);
                (c0 + c1, m0)
            },
        );
        members.truncate(member_cap);
        Ok(ExtremeSet {
            delta,
            count,
            members,
            n: self.n,
            seed: self.seed,
        })
    }

    /// Complete list of extreme-set members (no cap).
    pub fn extreme_set_full(&self, delta: f64) -> Result<ExtremeSet> {
        self.extreme_set(delta, usize::MAX)
    }

    /// Finite-size pressure `(1/n) ln( 2^{-n} sum_sigma e^{beta U(sigma)} )`,
    /// evaluated with log-sum-exp stabilization.
    pub fn empirical_pressure(&self, beta: f64) -> f64 {
        let (max, _) = self.max_min_weight(beta);
        // second pass: sum of exp(beta*U - max), chunked in fixed order
        let sum = chunks::scan(
            self.dim(),
            |range| {
                let mut s = 0.0;
                for sigma in range {
                    s += (beta * self.energy(sigma) - max).exp();
                }
                s
            },
            0.0f64,
            |a, b| a + b,
        );
        let n = self.n as f64;
        (max + sum.ln() - n * std::f64::consts::LN_2) / n
    }

    fn max_min_weight(&self, beta: f64) -> (f64, f64) {
        chunks::scan(
            self.dim(),
            |range| {
                let mut hi = f64::NEG_INFINITY;
                let mut lo = f64::INFINITY;
                for sigma in range {
                    let w = beta * self.energy(sigma);
                    hi = hi.max(w);
                    lo = lo.min(w);
                }
                (hi, lo)
            },
            (f64::NEG_INFINITY, f64::INFINITY),
            |(h0, l0), (h1, l1)| (h0.max(h1), l0.min(l1)),
        )
    }

    /// Exact minimum over all configurations, with its argmin (ties broken
    /// toward the smaller index) and the large-`n` asymptote of the minimum
    /// for comparison.
    pub fn min_energy(&self) -> MinEnergy {
        let (value, argmin) = chunks::scan(
            self.dim(),
            |range| {
                let mut best = f64::INFINITY;
                let mut arg = 0usize;
                for sigma in range {
                    let u = self.energy(sigma);
                    if u < best {
                        best = u;
                        arg = sigma;
                    }
                }
                (best, arg)
            },
            (f64::INFINITY, 0usize),
            |(v0, a0), (v1, a1)| if v1 < v0 { (v1, a1) } else { (v0, a0) },
        );
        let n = self.n as f64;
        let bc = crate::analytic::beta_c();
        MinEnergy {
            value,
            argmin,
            asymptote: -bc * n + (n * std::f64::consts::LN_2).ln() / (2.0 * bc),
        }
    }

    /// Exact maximum of |U| over all configurations.
    pub fn max_abs_energy(&self) -> f64 {
        let (hi, lo) = self.max_min_weight(1.0);
        hi.abs().max(lo.abs())
    }

    /// Landscape average `2^{-n} sum_sigma U(sigma)`.
    pub fn mean_energy(&self) -> f64 {
        let sum = chunks::scan(
            self.dim(),
            |range| range.map(|sigma| self.energy(sigma)).sum::<f64>(),
            0.0f64,
            |a, b| a + b,
        );
        sum / self.dim() as f64
    }
}

impl EnergyLandscape for RemField {
    fn spins(&self) -> u32 {
        self.n
    }

    #[inline]
    fn energy(&self, sigma: usize) -> f64 {
        assert!(
            sigma < self.dim(),
            "configuration index {sigma} out of range for n = {}",
            self.n
        );
        self.scale() * rng::keyed_normal(self.seed, sigma as u64)
    }
}

/// Census of the configurations below the level `-delta * n`.
#[derive(Debug, Clone)]
pub struct ExtremeSet {
    pub delta: f64,
    /// Exact number of configurations below the level.
    pub count: usize,
    /// Member indices, possibly truncated by the cap.
    pub members: Vec<usize>,
    pub n: u32,
    pub seed: u64,
}

/// Exact landscape minimum together with the limiting asymptote
/// `-beta_c n + ln(n ln 2)/(2 beta_c)`.
#[derive(Debug, Clone, Copy)]
pub struct MinEnergy {
    pub value: f64,
    pub argmin: usize,
    pub asymptote: f64,
}
