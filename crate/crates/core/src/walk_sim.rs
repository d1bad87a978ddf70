//! Seeded simulation of the inversion walk and its variants, exact
//! evolution of the time-`t` law by convolution, and profile assembly.
//!
//! All runs start from the reference tournament (the zero vector).

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::{
    clique_vector, clique_words, pair_count, CayleyBfs, VertexSet, MAX_VERTICES,
};
use crate::error::{ensure_capacity, Error, Result};
use crate::exact::Dyadic;
use crate::gf2::Gf2Vector;
use crate::rank_stats::lowertail_bound;
use crate::restricted::k_subsets;
use crate::rng;
use crate::spectral::{
    exact_tv, full_spectrum, l2_tv_upper, rank_grouped_l2_sum, uppertail_bound, KahanSum,
    MAX_SPECTRUM_VERTICES,
};

/// Largest `n` for the exact rational evolution.
pub const MAX_RATIONAL_EVOLUTION_VERTICES: usize = 4;
/// Largest `n` for the floating-point evolution.
pub const MAX_FLOAT_EVOLUTION_VERTICES: usize = 6;
/// Largest `n` for Monte-Carlo statistics that index the whole state space.
pub const MAX_MC_VERTICES: usize = 5;
/// Largest hypercube dimension for the frequency statistic.
pub const MAX_MC_HYPERCUBE_DIM: usize = 10;
/// Largest hypercube dimension for the coordinate statistic.
pub const MAX_HYPERCUBE_DIM: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    /// Invert a uniform subset of `0..n`.
    Full { n: usize },
    /// Invert a uniform `k`-subset of `0..n`.
    Restricted { n: usize, k: usize },
    /// Lazy walk on `F_2^m`: hold with probability 1/2, else flip a uniform coordinate.
    LazyHypercube { m: usize },
}

impl Variant {
    /// Length of the state vector.
    pub fn dimension(&self) -> usize {
        match *self {
            Variant::Full { n } | Variant::Restricted { n, .. } => pair_count(n),
            Variant::LazyHypercube { m } => m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Variant::Full { n } => {
                ensure_capacity("vertex count", MAX_VERTICES as u64, n as u64)?;
                if n == 0 {
                    return Err(Error::input("n must be at least 1"));
                }
            }
            Variant::Restricted { n, k } => {
                ensure_capacity("vertex count", MAX_VERTICES as u64, n as u64)?;
                if n == 0 || k > n {
                    return Err(Error::input(format!(
                        "k must lie in 0..=n, got n={n}, k={k}"
                    )));
                }
            }
            Variant::LazyHypercube { m } => {
                ensure_capacity("hypercube dimension", 64, m as u64)?;
                if m == 0 {
                    return Err(Error::input("m must be at least 1"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WalkConfig {
    pub variant: Variant,
    pub t_max: u32,
    pub trials: u64,
    pub seed: u64,
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        self.variant.validate()?;
        if self.trials == 0 {
            return Err(Error::input("trials must be at least 1"));
        }
        Ok(())
    }
}

/// One drawn move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Invert(VertexSet),
    Stay,
    Flip(usize),
}

/// Draws the next move of `variant`.
pub fn draw_move<R: Rng + ?Sized>(variant: &Variant, rng: &mut R) -> Move {
    match *variant {
        Variant::Full { n } => {
            let mask = if n == 64 {
                rng.next_u64()
            } else {
                rng.next_u64() & ((1u64 << n) - 1)
            };
            Move::Invert(VertexSet::from_mask(n, mask).expect("mask within n bits"))
        }
        Variant::Restricted { n, k } => {
            // partial Fisher-Yates
            let mut perm: Vec<u8> = (0..n as u8).collect();
            let mut mask = 0u64;
            for i in 0..k {
                let j = rng.gen_range(i..n);
                perm.swap(i, j);
                mask |= 1 << perm[i];
            }
            Move::Invert(VertexSet::from_mask(n, mask).expect("mask within n bits"))
        }
        Variant::LazyHypercube { m } => {
            if rng.gen::<bool>() {
                Move::Flip(rng.gen_range(0..m))
            } else {
                Move::Stay
            }
        }
    }
}

/// One step of the walk, in place.
///
/// # Panics
/// If `state` does not have the variant's dimension.
pub fn step<R: Rng + ?Sized>(state: &mut Gf2Vector, variant: &Variant, rng: &mut R) {
    assert_eq!(
        state.len(),
        variant.dimension(),
        "state length does not match the variant"
    );
    match draw_move(variant, rng) {
        Move::Invert(x) => {
            let n = match *variant {
                Variant::Full { n } | Variant::Restricted { n, .. } => n,
                Variant::LazyHypercube { .. } => unreachable!(),
            };
            if x.len() >= 2 {
                *state ^= &clique_vector(n, x).expect("subset of 0..n");
            }
        }
        Move::Stay => {}
        Move::Flip(i) => state.flip(i),
    }
}

/// Word-packed stepper for small state spaces.
struct WordWalk {
    variant: Variant,
    cliques: Vec<u64>,
}

impl WordWalk {
    fn new(variant: Variant) -> Result<Self> {
        let cliques = match variant {
            Variant::Full { n } | Variant::Restricted { n, .. } => clique_words(n)?,
            Variant::LazyHypercube { .. } => Vec::new(),
        };
        Ok(WordWalk { variant, cliques })
    }

    fn step<R: Rng + ?Sized>(&self, z: u64, rng: &mut R) -> u64 {
        match draw_move(&self.variant, rng) {
            Move::Invert(x) => z ^ self.cliques[x.mask() as usize],
            Move::Stay => z,
            Move::Flip(i) => z ^ (1 << i),
        }
    }

    fn run<R: Rng + ?Sized>(&self, t: u32, rng: &mut R) -> u64 {
        (0..t).fold(0, |z, _| self.step(z, rng))
    }
}

/// Runs `trials` independent walks of length `t` and folds the end states
/// of every batch into an accumulator. Batches use their own streams and
/// are merged in batch order.
fn run_batches<A, F, M>(
    variant: Variant,
    t: u32,
    trials: u64,
    seed: u64,
    init: A,
    fold: F,
    merge: M,
) -> Result<A>
where
    A: Clone + Send + Sync,
    F: Fn(&mut A, u64) + Sync,
    M: Fn(&mut A, A),
{
    let walk = WordWalk::new(variant)?;
    let parts: Vec<A> = rng::batches(trials)
        .into_par_iter()
        .map(|(id, count)| {
            let mut r = rng::stream(seed, id);
            let mut acc = init.clone();
            for _ in 0..count {
                let z = walk.run(t, &mut r);
                fold(&mut acc, z);
            }
            acc
        })
        .collect();
    let mut total = init;
    for p in parts {
        merge(&mut total, p);
    }
    Ok(total)
}

/// Exact law at time `t` as integer counts over `2^{n t}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalLaw {
    pub n: usize,
    pub t: u32,
    pub counts: Vec<BigUint>,
}

impl RationalLaw {
    pub fn den_log2(&self) -> u64 {
        self.n as u64 * self.t as u64
    }

    pub fn prob(&self, z: usize) -> Dyadic {
        Dyadic::new(self.counts[z].clone(), self.den_log2())
    }

    pub fn total(&self) -> Dyadic {
        Dyadic::new(self.counts.iter().sum::<BigUint>(), self.den_log2())
    }

    /// Total variation distance to the uniform law on `F_2^m`.
    pub fn tv_to_uniform(&self) -> Dyadic {
        let m = pair_count(self.n) as u64;
        // |count/2^{nt} - 1/2^m| = |count 2^m - 2^{nt}| / 2^{m + nt}
        let uniform = BigUint::one() << self.den_log2();
        let total: BigUint = self
            .counts
            .iter()
            .map(|c| {
                let scaled = c << m;
                if scaled >= uniform {
                    scaled - &uniform
                } else {
                    &uniform - scaled
                }
            })
            .sum();
        Dyadic::new(total, m + self.den_log2() + 1)
    }
}

/// Distinct generators with their multiplicities among all `2^n` subsets.
fn step_measure(n: usize) -> Result<Vec<(u64, u64)>> {
    let mut words = clique_words(n)?;
    words.sort_unstable();
    let mut out: Vec<(u64, u64)> = Vec::new();
    for w in words {
        match out.last_mut() {
            Some((v, c)) if *v == w => *c += 1,
            _ => out.push((w, 1)),
        }
    }
    Ok(out)
}

/// The time-`t` law by `t`-fold convolution of the step measure, exactly.
pub fn exact_evolution_rational(n: usize, t: u32) -> Result<RationalLaw> {
    ensure_capacity(
        "vertex count for exact rational evolution",
        MAX_RATIONAL_EVOLUTION_VERTICES as u64,
        n as u64,
    )?;
    let size = 1usize << pair_count(n);
    let measure = step_measure(n)?;
    let mut counts = vec![BigUint::zero(); size];
    counts[0] = BigUint::one();
    for _ in 0..t {
        let mut next = vec![BigUint::zero(); size];
        for (z, c) in counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &(v, mult) in &measure {
                next[z ^ v as usize] += c * mult;
            }
        }
        counts = next;
    }
    Ok(RationalLaw { n, t, counts })
}

/// The time-`t` law by convolution in floating point.
pub fn exact_evolution(n: usize, t: u32) -> Result<Vec<f64>> {
    ensure_capacity(
        "vertex count for floating-point evolution",
        MAX_FLOAT_EVOLUTION_VERTICES as u64,
        n as u64,
    )?;
    let size = 1usize << pair_count(n);
    let scale = 2f64.powi(-(n as i32));
    let measure: Vec<(usize, f64)> = step_measure(n)?
        .into_iter()
        .map(|(v, c)| (v as usize, c as f64 * scale))
        .collect();
    let mut law = vec![0.0; size];
    law[0] = 1.0;
    for _ in 0..t {
        law = (0..size)
            .into_par_iter()
            .map(|z| {
                let mut k = KahanSum::default();
                for &(v, p) in &measure {
                    k.add(law[z ^ v] * p);
                }
                k.value()
            })
            .collect();
    }
    Ok(law)
}

/// `1/2 sum_z |p(z) - 1/len|`.
pub fn tv_to_uniform(law: &[f64]) -> f64 {
    let u = 1.0 / law.len() as f64;
    let mut k = KahanSum::default();
    for &p in law {
        k.add((p - u).abs());
    }
    0.5 * k.value()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum McMode {
    /// Empirical histogram of end states against the stationary law.
    Frequency,
    /// `1 - pi(B_t)`: a lower bound on the distance.
    Support,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mode: McMode,
    pub t: u32,
    pub trials: u64,
    pub seed: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `sqrt(states / trials)`; the plug-in TV is biased upwards by at most
    /// about this much. Present in frequency mode.
    pub bias_bound: Option<f64>,
    /// Number of stationary states.
    pub states: u64,
    /// Simulated end states found outside `B_t` (support mode; must be 0).
    pub support_violations: Option<u64>,
}

fn small_state_space(variant: &Variant) -> Result<()> {
    match *variant {
        Variant::Full { n } | Variant::Restricted { n, .. } => ensure_capacity(
            "vertex count for Monte-Carlo statistics",
            MAX_MC_VERTICES as u64,
            n as u64,
        ),
        Variant::LazyHypercube { m } => ensure_capacity(
            "hypercube dimension for Monte-Carlo statistics",
            MAX_MC_HYPERCUBE_DIM as u64,
            m as u64,
        ),
    }
}

/// Membership table of the states the variant can reach from 0.
fn reachable_states(variant: &Variant) -> Result<Vec<bool>> {
    let dim = variant.dimension();
    let gens: Vec<u64> = match *variant {
        Variant::Full { n } => clique_words(n)?,
        Variant::Restricted { n, k } => {
            let words = clique_words(n)?;
            k_subsets(n, k).map(|x| words[x.mask() as usize]).collect()
        }
        Variant::LazyHypercube { m } => (0..m).map(|i| 1u64 << i).collect(),
    };
    let mut seen = vec![false; 1 << dim];
    seen[0] = true;
    let mut stack = vec![0u64];
    while let Some(z) = stack.pop() {
        for &g in &gens {
            let y = (z ^ g) as usize;
            if !seen[y] {
                seen[y] = true;
                stack.push(y as u64);
            }
        }
    }
    Ok(seen)
}

/// Monte-Carlo distance statistic at time `t`.
///
/// Frequency mode compares the empirical law of the end state with the
/// uniform law on the reachable subgroup; the interval is the estimate
/// widened by the bias bound. Support mode (full variant only) reports the
/// exact value `1 - |B_t| / 2^m` and counts simulated end states outside
/// `B_t`.
pub fn mc_tv_estimate(config: &WalkConfig, t: u32, mode: McMode) -> Result<McEstimate> {
    config.validate()?;
    small_state_space(&config.variant)?;
    let variant = config.variant;
    let dim = variant.dimension();
    match mode {
        McMode::Frequency => {
            let reachable = reachable_states(&variant)?;
            let states = reachable.iter().filter(|&&r| r).count() as u64;
            let hist = run_batches(
                variant,
                t,
                config.trials,
                config.seed,
                vec![0u64; 1 << dim],
                |h, z| h[z as usize] += 1,
                |h, p| h.iter_mut().zip(p).for_each(|(a, b)| *a += b),
            )?;
            let u = 1.0 / states as f64;
            let n = config.trials as f64;
            let mut k = KahanSum::default();
            for (z, &c) in hist.iter().enumerate() {
                let target = if reachable[z] { u } else { 0.0 };
                k.add((c as f64 / n - target).abs());
            }
            let estimate = 0.5 * k.value();
            let bias = (states as f64 / n).sqrt();
            Ok(McEstimate {
                mode,
                t,
                trials: config.trials,
                seed: config.seed,
                estimate,
                ci_low: (estimate - bias).max(0.0),
                ci_high: (estimate + bias).min(1.0),
                bias_bound: Some(bias),
                states,
                support_violations: None,
            })
        }
        McMode::Support => {
            let n = match variant {
                Variant::Full { n } => n,
                _ => {
                    return Err(Error::input(
                        "support mode is defined for the full variant only",
                    ))
                }
            };
            let bfs = CayleyBfs::from_reference(n)?;
            let ball = bfs.ball_size(t);
            let estimate = (&Dyadic::one() - &Dyadic::new(ball as i64, dim as u64)).to_f64();
            let violations = run_batches(
                variant,
                t,
                config.trials,
                config.seed,
                0u64,
                |v, z| *v += (bfs.distance_word(z) > t) as u64,
                |v, p| *v += p,
            )?;
            Ok(McEstimate {
                mode,
                t,
                trials: config.trials,
                seed: config.seed,
                estimate,
                ci_low: estimate,
                ci_high: estimate,
                bias_bound: None,
                states: 1 << dim,
                support_violations: Some(violations),
            })
        }
    }
}

/// Hamming-weight statistic of the end state against the stationary weight
/// law `Bin(m, 1/2)`; a lower bound on the distance for the full and
/// hypercube variants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightStatistic {
    pub t: u32,
    pub trials: u64,
    pub seed: u64,
    pub histogram: Vec<u64>,
    pub statistic: f64,
    /// `sqrt((m + 1) / trials)`.
    pub bias_bound: f64,
    pub mean_weight: f64,
}

fn binomial_half_pmf(m: usize) -> Vec<f64> {
    let mut p = vec![0.0; m + 1];
    p[0] = 2f64.powi(-(m as i32));
    for w in 0..m {
        p[w + 1] = p[w] * (m - w) as f64 / (w + 1) as f64;
    }
    p
}

fn histogram_tv(hist: &[u64], trials: u64, target: &[f64]) -> f64 {
    let n = trials as f64;
    let mut k = KahanSum::default();
    for (c, p) in hist.iter().zip(target) {
        k.add((*c as f64 / n - p).abs());
    }
    0.5 * k.value()
}

/// Simulates `trials` walks of length `t` from 0 and summarises the end
/// states by Hamming weight. Works for any size the variant allows.
pub fn weight_statistic(config: &WalkConfig, t: u32) -> Result<WeightStatistic> {
    config.validate()?;
    let variant = config.variant;
    if let Variant::Restricted { .. } = variant {
        return Err(Error::input(
            "the weight statistic compares against Bin(m, 1/2), which is stationary only for the full and hypercube variants",
        ));
    }
    let dim = variant.dimension();
    let parts: Vec<Vec<u64>> = rng::batches(config.trials)
        .into_par_iter()
        .map(|(id, count)| {
            let mut r = rng::stream(config.seed, id);
            let mut hist = vec![0u64; dim + 1];
            for _ in 0..count {
                let mut z = Gf2Vector::zeros(dim);
                for _ in 0..t {
                    step(&mut z, &variant, &mut r);
                }
                hist[z.weight()] += 1;
            }
            hist
        })
        .collect();
    let mut histogram = vec![0u64; dim + 1];
    for p in parts {
        histogram.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
    let statistic = histogram_tv(&histogram, config.trials, &binomial_half_pmf(dim));
    let mean_weight = histogram
        .iter()
        .enumerate()
        .map(|(w, &c)| w as f64 * c as f64)
        .sum::<f64>()
        / config.trials as f64;
    Ok(WeightStatistic {
        t,
        trials: config.trials,
        seed: config.seed,
        histogram,
        statistic,
        bias_bound: ((dim + 1) as f64 / config.trials as f64).sqrt(),
        mean_weight,
    })
}

/// Everything `simulate` reports for one configuration and time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: WalkConfig,
    pub t: u32,
    pub frequency: Option<McEstimate>,
    pub support: Option<McEstimate>,
    pub weight: Option<WeightStatistic>,
}

/// Runs every statistic that applies to the configuration.
pub fn simulate(config: &WalkConfig, t: u32) -> Result<SimulationReport> {
    config.validate()?;
    let small = small_state_space(&config.variant).is_ok();
    let frequency = small
        .then(|| mc_tv_estimate(config, t, McMode::Frequency))
        .transpose()?;
    let support = match config.variant {
        Variant::Full { .. } if small => Some(mc_tv_estimate(config, t, McMode::Support)?),
        _ => None,
    };
    let weight = match config.variant {
        Variant::Restricted { .. } => None,
        _ => Some(weight_statistic(config, t)?),
    };
    Ok(SimulationReport {
        config: *config,
        t,
        frequency,
        support,
        weight,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub t: u32,
    pub d_exact: Option<f64>,
    pub d_l2_upper: f64,
    pub d_paper_upper: Option<f64>,
    pub d_paper_lower: Option<f64>,
    pub d_mc_estimate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MissingColumn {
    pub column: &'static str,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutoffProfile {
    pub n: usize,
    pub rows: Vec<ProfileRow>,
    pub missing: Vec<MissingColumn>,
}

/// Per-`t` distance profile of the full walk for `t = 0..=t_max`.
///
/// `d_exact` comes from the spectrum when `n <= 7`; `d_l2_upper` is the
/// spectral `L^2` bound (or, for larger `n`, its rank-grouped estimate),
/// capped at 1; `d_paper_upper` is `C 2^{-(t-n)}` for `t >= n` and
/// `d_paper_lower` the ball bound at `t <= n`. With `mc = Some((trials,
/// seed))` and `n <= 5` the frequency estimate fills `d_mc_estimate`.
pub fn cutoff_profile(n: usize, t_max: u32, mc: Option<(u64, u64)>) -> Result<CutoffProfile> {
    ensure_capacity("vertex count", MAX_VERTICES as u64, n as u64)?;
    if n < 2 {
        return Err(Error::input("the profile needs n >= 2"));
    }
    let m = pair_count(n);
    let mut missing = Vec::new();
    let spectrum = if n <= MAX_SPECTRUM_VERTICES {
        Some(full_spectrum(n)?)
    } else {
        missing.push(MissingColumn {
            column: "d_exact",
            reason: format!("exact spectrum limited to n <= {MAX_SPECTRUM_VERTICES}"),
        });
        missing.push(MissingColumn {
            column: "d_l2_upper",
            reason: "replaced by the rank-grouped estimate of the L2 sum".into(),
        });
        None
    };
    let mc = match mc {
        Some(_) if n > MAX_MC_VERTICES => {
            missing.push(MissingColumn {
                column: "d_mc_estimate",
                reason: format!("frequency estimate limited to n <= {MAX_MC_VERTICES}"),
            });
            None
        }
        Some(x) => Some(x),
        None => {
            missing.push(MissingColumn {
                column: "d_mc_estimate",
                reason: "no Monte-Carlo trials requested".into(),
            });
            None
        }
    };
    let rows = (0..=t_max)
        .into_par_iter()
        .map(|t| {
            let d_exact = match &spectrum {
                Some(_) if t == 0 => Some(1.0 - 2f64.powi(-(m as i32))),
                Some(s) => Some(exact_tv(s, t)?),
                None => None,
            };
            let l2 = match &spectrum {
                Some(s) => l2_tv_upper(s, t),
                None => 0.5 * rank_grouped_l2_sum(n, t as u64).to_f64().sqrt(),
            };
            let d_paper_upper = (t as usize >= n).then(|| uppertail_bound(t - n as u32));
            let d_paper_lower = if t as usize <= n {
                Some(lowertail_bound(n, n - t as usize)?.to_f64())
            } else {
                None
            };
            let d_mc_estimate = match mc {
                Some((trials, seed)) => {
                    let config = WalkConfig {
                        variant: Variant::Full { n },
                        t_max,
                        trials,
                        seed,
                    };
                    Some(mc_tv_estimate(&config, t, McMode::Frequency)?.estimate)
                }
                None => None,
            };
            Ok(ProfileRow {
                t,
                d_exact,
                d_l2_upper: l2.min(1.0),
                d_paper_upper,
                d_paper_lower,
                d_mc_estimate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CutoffProfile { n, rows, missing })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypercubeRow {
    pub t: u32,
    /// Weight statistic from simulation.
    pub statistic: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Exact distance of the weight chain, which equals the distance of the
    /// walk itself since the time-`t` law is exchangeable.
    pub exact: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypercubeProfile {
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    /// `(m/2) ln m`.
    pub cutoff: f64,
    pub rows: Vec<HypercubeRow>,
}

/// `round(factor (m/2) ln m)`.
pub fn hypercube_time(m: usize, factor: f64) -> u32 {
    (factor * 0.5 * m as f64 * (m as f64).ln()).round() as u32
}

/// `0` and geometric multiples `2^{j/2}`, `j = -4..=4`, of `(m/2) ln m`.
pub fn default_hypercube_grid(m: usize) -> Vec<u32> {
    let mut ts = vec![0];
    ts.extend((-4..=4).map(|j| hypercube_time(m, 2f64.powf(j as f64 / 2.0))));
    ts.sort_unstable();
    ts.dedup();
    ts
}

/// Exact distance to `Bin(m, 1/2)` of the weight chain after `t` steps.
pub fn ehrenfest_tv(m: usize, t: u32) -> f64 {
    let mut law = vec![0.0; m + 1];
    law[0] = 1.0;
    let mf = m as f64;
    for _ in 0..t {
        let mut next = vec![0.0; m + 1];
        for (w, &p) in law.iter().enumerate() {
            next[w] += 0.5 * p;
            if w < m {
                next[w + 1] += 0.5 * p * (m - w) as f64 / mf;
            }
            if w > 0 {
                next[w - 1] += 0.5 * p * w as f64 / mf;
            }
        }
        law = next;
    }
    let target = binomial_half_pmf(m);
    0.5 * law
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

/// Coordinate statistic of the lazy hypercube walk at each requested time.
pub fn hypercube_profile(
    m: usize,
    trials: u64,
    t_points: &[u32],
    seed: u64,
) -> Result<HypercubeProfile> {
    ensure_capacity("hypercube dimension", MAX_HYPERCUBE_DIM as u64, m as u64)?;
    let rows = t_points
        .iter()
        .map(|&t| {
            let config = WalkConfig {
                variant: Variant::LazyHypercube { m },
                t_max: t,
                trials,
                seed,
            };
            let w = weight_statistic(&config, t)?;
            Ok(HypercubeRow {
                t,
                statistic: w.statistic,
                ci_low: (w.statistic - w.bias_bound).max(0.0),
                ci_high: (w.statistic + w.bias_bound).min(1.0),
                exact: ehrenfest_tv(m, t),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HypercubeProfile {
        m,
        trials,
        seed,
        cutoff: 0.5 * m as f64 * (m as f64).ln(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::exact_tv_dyadic;

    fn full(n: usize, trials: u64, seed: u64) -> WalkConfig {
        WalkConfig {
            variant: Variant::Full { n },
            t_max: 0,
            trials,
            seed,
        }
    }

    #[test]
    fn small_subsets_do_not_move() {
        let mut z = Gf2Vector::from_word(10, 0b1011001);
        let before = z.clone();
        let n = 5;
        for x in [0u64, 1, 2, 4, 16] {
            let s = VertexSet::from_mask(n, x).unwrap();
            assert_eq!(clique_vector(n, s).unwrap().weight(), 0);
        }
        // k = 1 and k = 0 walks are the identity
        let mut r = rng::stream(3, 0);
        for k in [0, 1] {
            for _ in 0..20 {
                step(&mut z, &Variant::Restricted { n, k }, &mut r);
            }
        }
        assert_eq!(z, before);
    }

    #[test]
    fn k_equals_n_adds_all_ones() {
        let mut r = rng::stream(1, 0);
        let z0 = Gf2Vector::from_word(10, 0b11);
        let mut z = z0.clone();
        step(&mut z, &Variant::Restricted { n: 5, k: 5 }, &mut r);
        assert_eq!(z, &z0 ^ &Gf2Vector::ones(10));
    }

    #[test]
    fn restricted_draws_have_size_k_and_cover_all_subsets() {
        let mut r = rng::stream(9, 0);
        let mut seen = std::collections::BTreeMap::new();
        for _ in 0..20_000 {
            match draw_move(&Variant::Restricted { n: 6, k: 3 }, &mut r) {
                Move::Invert(x) => {
                    assert_eq!(x.len(), 3);
                    *seen.entry(x.mask()).or_insert(0u32) += 1;
                }
                other => panic!("unexpected move {other:?}"),
            }
        }
        assert_eq!(seen.len(), 20);
        // 1000 expected per subset; 5 sigma is about 150
        assert!(
            seen.values().all(|&c| (850..=1150).contains(&c)),
            "{seen:?}"
        );
    }

    #[test]
    fn evolution_examples() {
        let law = exact_evolution_rational(3, 0).unwrap();
        assert_eq!(law.prob(0), Dyadic::one());
        let law = exact_evolution_rational(3, 1).unwrap();
        assert_eq!(law.prob(0), Dyadic::pow2(-1));
        for z in [1, 2, 4, 7] {
            assert_eq!(law.prob(z), Dyadic::pow2(-3));
        }
        for z in [3, 5, 6] {
            assert!(law.prob(z).is_zero());
        }
        assert_eq!(law.tv_to_uniform(), Dyadic::new(3, 3));
    }

    #[test]
    fn rational_matches_fourier_and_float() {
        for n in 2..=4 {
            let spectrum = full_spectrum(n).unwrap();
            for t in 1..=12 {
                let law = exact_evolution_rational(n, t).unwrap();
                assert_eq!(law.total(), Dyadic::one());
                assert_eq!(law.tv_to_uniform(), exact_tv_dyadic(&spectrum, t).unwrap());
                let float = exact_evolution(n, t).unwrap();
                for (z, p) in float.iter().enumerate() {
                    assert!((p - law.prob(z).to_f64()).abs() <= 1e-12);
                }
                assert!((tv_to_uniform(&float) - exact_tv(&spectrum, t).unwrap()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn float_evolution_conserves_mass() {
        for n in 5..=6 {
            for t in [1, 3, 7] {
                let law = exact_evolution(n, t).unwrap();
                assert!((law.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
        }
        assert!(matches!(exact_evolution(7, 1), Err(Error::Capacity { .. })));
        assert!(matches!(
            exact_evolution_rational(5, 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn support_stays_in_ball() {
        for n in 2..=5 {
            let bfs = CayleyBfs::from_reference(n).unwrap();
            for t in 0..=bfs.diameter() + 1 {
                let law = exact_evolution(n, t).unwrap();
                for (z, &p) in law.iter().enumerate() {
                    if bfs.distance_word(z as u64) > t {
                        assert_eq!(p, 0.0, "n={n} t={t} z={z:#x}");
                    }
                }
            }
        }
    }

    #[test]
    fn support_mode_examples() {
        let e = mc_tv_estimate(&full(3, 100, 1), 0, McMode::Support).unwrap();
        assert_eq!(e.estimate, 1.0 - 1.0 / 8.0);
        let e = mc_tv_estimate(&full(3, 1000, 1), 1, McMode::Support).unwrap();
        assert_eq!(e.estimate, 3.0 / 8.0);
        assert_eq!(e.support_violations, Some(0));
    }

    #[test]
    fn frequency_mode_near_exact() {
        let e = mc_tv_estimate(&full(3, 1_000_000, 11), 2, McMode::Frequency).unwrap();
        let bias = e.bias_bound.unwrap();
        assert!((e.estimate - 3.0 / 16.0).abs() <= bias, "{e:?}");
        assert_eq!(e.states, 8);
    }

    #[test]
    fn frequency_mode_restricted_uses_subgroup() {
        // n=4, k=3: H_3 = ker d has dimension 3; every step has odd weight,
        // so at even t the walk sits on the even half
        let config = WalkConfig {
            variant: Variant::Restricted { n: 4, k: 3 },
            t_max: 0,
            trials: 200_000,
            seed: 5,
        };
        let e = mc_tv_estimate(&config, 30, McMode::Frequency).unwrap();
        assert_eq!(e.states, 8);
        assert!((e.estimate - 0.5).abs() <= e.bias_bound.unwrap(), "{e:?}");
    }

    #[test]
    fn mc_is_thread_count_independent() {
        let config = full(4, 10_000, 42);
        let a = mc_tv_estimate(&config, 3, McMode::Frequency).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| mc_tv_estimate(&config, 3, McMode::Frequency).unwrap());
        assert_eq!(a, b);
        let w = WalkConfig {
            variant: Variant::LazyHypercube { m: 12 },
            ..config
        };
        let a = weight_statistic(&w, 7).unwrap();
        let b = pool.install(|| weight_statistic(&w, 7).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn profile_rows_are_consistent() {
        let p = cutoff_profile(4, 10, Some((20_000, 3))).unwrap();
        assert_eq!(p.rows.len(), 11);
        for row in &p.rows {
            let d = row.d_exact.unwrap();
            assert!((0.0..=1.0).contains(&d));
            assert!(d <= row.d_l2_upper + 1e-12);
            if let Some(u) = row.d_paper_upper {
                assert!(d <= u);
            }
            if let Some(l) = row.d_paper_lower {
                assert!(d >= l);
            }
            assert!(row.d_mc_estimate.is_some());
        }
        let p = cutoff_profile(9, 12, None).unwrap();
        assert!(p.rows.iter().all(|r| r.d_exact.is_none()));
        assert!(p.missing.iter().any(|c| c.column == "d_exact"));
    }

    #[test]
    fn hypercube_examples() {
        assert_eq!(hypercube_time(15, 0.2), 4);
        assert_eq!(hypercube_time(15, 3.0), 61);
        let p = hypercube_profile(15, 20_000, &[0, 4, 61], 7).unwrap();
        assert!(p.rows[0].statistic > 0.999);
        assert!(p.rows[1].statistic > 0.9);
        assert!(p.rows[2].statistic < 0.05);
        for r in &p.rows {
            assert!((r.statistic - r.exact).abs() <= 3.0 * (16.0f64 / 20_000.0).sqrt());
        }
        assert!((ehrenfest_tv(15, 0) - (1.0 - 2f64.powi(-15))).abs() < 1e-15);
        let grid = default_hypercube_grid(15);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn invalid_configs() {
        assert!(matches!(full(0, 1, 0).validate(), Err(Error::Input(_))));
        assert!(matches!(full(3, 0, 0).validate(), Err(Error::Input(_))));
        let c = WalkConfig {
            variant: Variant::Restricted { n: 4, k: 5 },
            ..full(4, 1, 0)
        };
        assert!(c.validate().is_err());
        assert!(matches!(
            mc_tv_estimate(&full(6, 10, 0), 1, McMode::Frequency),
            Err(Error::Capacity { .. })
        ));
    }
}
