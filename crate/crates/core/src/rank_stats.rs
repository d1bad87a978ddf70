//! Rank statistics of alternating and symmetric matrices over GF(2), and
//! the exact bounds built on them.
//!
//! Every bound here is an exact [`Dyadic`]; `2^{s log2 n}` is always written
//! as `n^s` so no logarithm is ever evaluated.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::pair_count;
use crate::error::{ensure_capacity, Error, Result};
use crate::exact::Dyadic;
use crate::gf2::rank_words;
use crate::rng;

/// Largest `n` for the default exhaustive census.
pub const MAX_CENSUS_VERTICES: usize = 7;

/// Largest `n` accepted when the long-running census is requested.
pub const MAX_LONG_CENSUS_VERTICES: usize = 8;

/// Largest matrix order for rank-tail sampling.
pub const MAX_SAMPLE_ORDER: usize = 512;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Exact number of alternating forms on `F_2^n` of each rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankCensus {
    pub n: usize,
    pub counts: BTreeMap<usize, u64>,
}

impl RankCensus {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn count(&self, r: usize) -> u64 {
        self.counts.get(&r).copied().unwrap_or(0)
    }
}

/// Census by enumerating every symmetric zero-diagonal matrix.
///
/// Matrix `code` has entry `(i, j) = (j, i)` set when bit `p` of `code` is
/// set, where `p` runs over the strict upper triangle column by column.
/// (This is deliberately not the pair order used for graph labels.)
pub fn alternating_census(n: usize) -> Result<RankCensus> {
    ensure_capacity(
        "vertex count for census",
        MAX_CENSUS_VERTICES as u64,
        n as u64,
    )?;
    census_unchecked(n)
}

/// As [`alternating_census`], also accepting `n = 8` (2^28 matrices).
pub fn alternating_census_long(n: usize) -> Result<RankCensus> {
    ensure_capacity(
        "vertex count for long census",
        MAX_LONG_CENSUS_VERTICES as u64,
        n as u64,
    )?;
    census_unchecked(n)
}

fn census_unchecked(n: usize) -> Result<RankCensus> {
    let m = pair_count(n);
    let entries: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    const CHUNK: u64 = 1 << 14;
    let total = 1u64 << m;
    let hist = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut h = vec![0u64; n + 1];
            let mut rows = vec![0u64; n];
            for code in c * CHUNK..((c + 1) * CHUNK).min(total) {
                rows.iter_mut().for_each(|w| *w = 0);
                for (p, &(i, j)) in entries.iter().enumerate() {
                    if code >> p & 1 == 1 {
                        rows[i] |= 1 << j;
                        rows[j] |= 1 << i;
                    }
                }
                h[rank_words(&mut rows)] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; n + 1],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    let counts = hist
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .collect();
    Ok(RankCensus { n, counts })
}

/// Exponent `r(n-r) + r + r(r-1)/2` of the alternating-form count bound.
pub fn alt_count_bound_exponent(n: usize, r: usize) -> Result<u64> {
    if r % 2 == 1 {
        return Err(Error::input(format!(
            "rank {r} is odd; alternating forms have even rank"
        )));
    }
    if r > n {
        return Err(Error::input(format!("rank {r} exceeds n={n}")));
    }
    Ok((r * (n - r) + r + r * r.saturating_sub(1) / 2) as u64)
}

/// `2^{r(n-r) + r + r(r-1)/2}`, an upper bound on the number of rank-`r`
/// alternating forms on `F_2^n`.
pub fn alt_count_bound(n: usize, r: usize) -> Result<BigUint> {
    Ok(BigUint::from(1u8) << alt_count_bound_exponent(n, r)?)
}

fn check_deficiency(n: usize, s: usize) -> Result<()> {
    if s > n {
        return Err(Error::input(format!(
            "rank deficiency s={s} must lie in 0..={n}"
        )));
    }
    Ok(())
}

/// `n^s 2^{-s(s-1)/2}`, bounding `P(rank M <= n - s)` for uniform symmetric `M`.
pub fn rank_tail_bound(n: usize, s: usize) -> Result<Dyadic> {
    check_deficiency(n, s)?;
    let num = num_traits::pow(BigInt::from(n), s);
    Ok(Dyadic::new(num, (s * s.saturating_sub(1) / 2) as u64))
}

/// `2^n n^s 2^{-s(s-1)/2}`: the uniform mass of the ball `B_{n-s}`.
fn ball_mass_bound(n: usize, s: usize) -> Result<Dyadic> {
    Ok(&rank_tail_bound(n, s)? * &Dyadic::pow2(n as i64))
}

/// `max(0, 1 - 2^n n^s 2^{-s(s-1)/2})`, the lower bound on `d_n(n - s)`.
pub fn lowertail_bound(n: usize, s: usize) -> Result<Dyadic> {
    Ok((&Dyadic::one() - &ball_mass_bound(n, s)?).clamp_nonnegative())
}

/// `2^{m+n} n^s 2^{-s(s-1)/2}`, bounding `|B_{n-s}|`.
pub fn ball_volume_bound(n: usize, s: usize) -> Result<Dyadic> {
    Ok(&ball_mass_bound(n, s)? * &Dyadic::pow2(pair_count(n) as i64))
}

/// One deficiency level of a rank-tail estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailRow {
    pub s: usize,
    /// Samples with rank at most `n - s`.
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `sqrt(p(1-p)/trials)` for the point estimate `p`.
    pub std_error: f64,
    pub bound: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// `rank_histogram[r]` = number of samples of rank `r`.
    pub rank_histogram: Vec<u64>,
    pub rows: Vec<TailRow>,
}

/// Wilson score interval for `hits` successes in `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Rank of a uniformly random symmetric `n x n` matrix (diagonal included).
///
/// Row `i` is drawn as whole random words masked to columns `>= i`; the
/// entries left of the diagonal are copied from earlier rows.
pub fn sample_symmetric_rank<R: RngCore>(n: usize, rng: &mut R) -> usize {
    let stride = n.div_ceil(64);
    let mut m = vec![0u64; n * stride];
    for i in 0..n {
        for w in 0..stride {
            let lo = w * 64;
            let mut word = rng.next_u64();
            if i >= lo + 64 {
                word = 0;
            } else if i > lo {
                word &= !0u64 << (i - lo);
            }
            m[i * stride + w] = word;
        }
        if !n.is_multiple_of(64) {
            m[i * stride + stride - 1] &= (1u64 << (n % 64)) - 1;
        }
        for j in 0..i {
            if m[j * stride + i / 64] >> (i % 64) & 1 == 1 {
                m[i * stride + j / 64] |= 1 << (j % 64);
            }
        }
    }
    dense_rank(&mut m, n, stride)
}

fn dense_rank(m: &mut [u64], n: usize, stride: usize) -> usize {
    let mut rank = 0;
    for c in 0..n {
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (rank..n).find(|&r| m[r * stride + w] & bit != 0) else {
            continue;
        };
        if p != rank {
            for k in 0..stride {
                m.swap(p * stride + k, rank * stride + k);
            }
        }
        for r in rank + 1..n {
            if m[r * stride + w] & bit != 0 {
                for k in w..stride {
                    m[r * stride + k] ^= m[rank * stride + k];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Monte-Carlo estimate of `P(rank M <= n - s)` for every `s`, from one rank
/// histogram. Batches draw from independent streams of `seed`, so the result
/// does not depend on the thread count.
pub fn sample_symmetric_rank_tail(n: usize, trials: u64, seed: u64) -> Result<TailEstimate> {
    ensure_capacity(
        "matrix order for rank sampling",
        MAX_SAMPLE_ORDER as u64,
        n as u64,
    )?;
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let rank_histogram = rng::batches(trials)
        .into_par_iter()
        .map(|(stream, count)| {
            let mut rng = rng::stream(seed, stream);
            let mut h = vec![0u64; n + 1];
            for _ in 0..count {
                h[sample_symmetric_rank(n, &mut rng)] += 1;
            }
            h
        })
        .reduce(
            || vec![0u64; n + 1],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );

    let rows = (0..=n)
        .map(|s| {
            let hits: u64 = rank_histogram[..=n - s].iter().sum();
            let p = hits as f64 / trials as f64;
            let (ci_low, ci_high) = wilson_interval(hits, trials, Z_95);
            Ok(TailRow {
                s,
                hits,
                estimate: p,
                ci_low,
                ci_high,
                std_error: (p * (1.0 - p) / trials as f64).sqrt(),
                bound: rank_tail_bound(n, s)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TailEstimate {
        n,
        trials,
        seed,
        rank_histogram,
        rows,
    })
}
