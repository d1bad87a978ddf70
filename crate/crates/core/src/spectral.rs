//! Eigenvalues of the inversion walk and the distances they control.
//!
//! The character `chi_A` of `F_2^m` is an eigenfunction of the walk with
//! eigenvalue `lambda_A = 2^-n sum_x (-1)^{q_A(x)}`, where `q_A(x)` counts
//! (mod 2) the edges of the graph `H_A` inside the support of `x`. The
//! integer character sum `S_A = 2^n lambda_A` is the stored primitive;
//! floating point only enters when a distance or bound is evaluated.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::{clique_words, pair_count, EdgeIndex};
use crate::error::{ensure_capacity, Error, Result};
use crate::exact::Dyadic;
use crate::gf2::{rank_words, walsh_hadamard_f64, Gf2Matrix, Gf2Vector, SignedTable};

/// Largest `n` for tables indexed by every graph on `n` vertices.
pub const MAX_SPECTRUM_VERTICES: usize = 7;

/// Largest `n` for the direct `2^n` character-sum enumeration.
pub const MAX_ENUMERATION_VERTICES: usize = 30;

/// Largest `n` for the big-integer TV route.
pub const MAX_EXACT_RATIONAL_VERTICES: usize = 4;

/// A probability below `-NEGATIVE_MASS_TOLERANCE` from the Fourier route is
/// treated as an internal inconsistency.
pub const NEGATIVE_MASS_TOLERANCE: f64 = 1e-12;

/// Upper estimate for the pre-cutoff `L^2` sum.
pub const PRE_CUTOFF_SUM_LIMIT: f64 = 2.252;

/// Resulting bound on the distance one step before the cutoff.
pub const PRE_CUTOFF_ALPHA: f64 = 0.751;

/// A graph `H_A` on `0..n`, i.e. a character label `A` in `F_2^m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphLabel {
    n: usize,
    edges: Gf2Vector,
}

impl GraphLabel {
    pub fn new(n: usize, edges: Gf2Vector) -> Result<Self> {
        if edges.len() != pair_count(n) {
            return Err(Error::input(format!(
                "edge vector length {} does not match m={} for n={n}",
                edges.len(),
                pair_count(n)
            )));
        }
        Ok(GraphLabel { n, edges })
    }

    pub fn empty(n: usize) -> Self {
        GraphLabel {
            n,
            edges: Gf2Vector::zeros(pair_count(n)),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let idx = EdgeIndex::new(n);
        let mut v = Gf2Vector::zeros(idx.m());
        for &(i, j) in edges {
            v.flip(idx.try_index(i, j)?);
        }
        Ok(GraphLabel { n, edges: v })
    }

    /// Label whose edge vector is the low `m` bits of `code` (`m <= 64`).
    pub fn from_index(n: usize, code: u64) -> Result<Self> {
        let m = pair_count(n);
        ensure_capacity("pair count for packed labels", 64, m as u64)?;
        if m < 64 && code >> m != 0 {
            return Err(Error::input(format!(
                "label {code:#x} has bits beyond m={m}"
            )));
        }
        Ok(GraphLabel {
            n,
            edges: Gf2Vector::from_word(m, code),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &Gf2Vector {
        &self.edges
    }

    /// Neighbourhood bitmask of each vertex (`n <= 64`).
    pub fn adjacency_words(&self) -> Vec<u64> {
        let idx = EdgeIndex::new(self.n);
        let mut rows = vec![0u64; self.n];
        for p in self.edges.iter_ones() {
            let (i, j) = idx.pair(p);
            rows[i] |= 1 << j;
            rows[j] |= 1 << i;
        }
        rows
    }
}

/// `q_A(x)`: parity of the number of edges of `H_A` inside `supp(x)`.
pub fn quad_form_eval(a: &GraphLabel, x: &Gf2Vector) -> Result<bool> {
    if x.len() != a.n {
        return Err(Error::input(format!(
            "point has length {}, expected n={}",
            x.len(),
            a.n
        )));
    }
    let idx = EdgeIndex::new(a.n);
    Ok(a.edges.iter_ones().fold(false, |acc, p| {
        let (i, j) = idx.pair(p);
        acc ^ (x.get(i) && x.get(j))
    }))
}

/// Polarisation `B(x, y) = q(x+y) + q(x) + q(y) + q(0)` of `q_A`, which is
/// the GF(2) adjacency matrix of `H_A`.
pub fn polarisation_matrix(a: &GraphLabel) -> Gf2Matrix {
    let idx = EdgeIndex::new(a.n);
    let mut b = Gf2Matrix::zeros(a.n, a.n);
    for p in a.edges.iter_ones() {
        let (i, j) = idx.pair(p);
        b.set(i, j, true);
        b.set(j, i, true);
    }
    b
}

/// `r(A)`, the rank of the polarisation of `q_A`.
pub fn alternating_rank(a: &GraphLabel) -> usize {
    polarisation_matrix(a).rank()
}

/// `S_A = sum_{x in F_2^n} (-1)^{q_A(x)}` by Gray-code enumeration of `x`.
pub fn character_sum(a: &GraphLabel) -> Result<i64> {
    ensure_capacity(
        "vertex count for character-sum enumeration",
        MAX_ENUMERATION_VERTICES as u64,
        a.n as u64,
    )?;
    let adj = a.adjacency_words();
    let mut x = 0u64;
    let mut q = false;
    let mut sum: i64 = 1;
    for step in 1u64..1 << a.n {
        let i = step.trailing_zeros() as usize;
        // q(x + e_i) = q(x) + B(x, e_i) since q(e_i) = 0
        q ^= (adj[i] & x).count_ones() & 1 == 1;
        x ^= 1 << i;
        sum += if q { -1 } else { 1 };
    }
    Ok(sum)
}

/// `lambda_A = S_A / 2^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Eigenvalue {
    n: u32,
    sum: i64,
}

impl Eigenvalue {
    pub fn new(n: usize, sum: i64) -> Self {
        Eigenvalue { n: n as u32, sum }
    }

    pub fn sum(&self) -> i64 {
        self.sum
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn to_dyadic(&self) -> Dyadic {
        Dyadic::new(self.sum, self.n as u64)
    }

    pub fn to_f64(&self) -> f64 {
        self.sum as f64 / 2f64.powi(self.n as i32)
    }
}

pub fn eigenvalue_exact(a: &GraphLabel) -> Result<Eigenvalue> {
    Ok(Eigenvalue::new(a.n, character_sum(a)?))
}

/// `(S_A, r(A))` for every graph `A` on `0..n`, indexed by the packed edge
/// vector of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumTable {
    n: usize,
    sums: Vec<i64>,
    ranks: Vec<u8>,
}

impl SpectrumTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        pair_count(self.n)
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    pub fn sums(&self) -> &[i64] {
        &self.sums
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn eigenvalue(&self, a: usize) -> Eigenvalue {
        Eigenvalue::new(self.n, self.sums[a])
    }

    pub fn rank(&self, a: usize) -> usize {
        self.ranks[a] as usize
    }

    pub fn label(&self, a: usize) -> GraphLabel {
        GraphLabel::from_index(self.n, a as u64).expect("index below 2^m")
    }

    /// Number of labels of each alternating rank.
    pub fn rank_histogram(&self) -> BTreeMap<usize, u64> {
        let mut h = BTreeMap::new();
        for &r in &self.ranks {
            *h.entry(r as usize).or_insert(0) += 1;
        }
        h
    }

    /// Multiplicity of each character sum `S_A` over all `A`.
    pub fn sum_histogram(&self) -> BTreeMap<i64, u64> {
        let mut h = BTreeMap::new();
        for &s in &self.sums {
            *h.entry(s).or_insert(0) += 1;
        }
        h
    }

    /// Multiplicity of each `|S_A|` over `A != 0`.
    fn nontrivial_abs_histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for &s in &self.sums[1..] {
            *h.entry(s.unsigned_abs()).or_insert(0) += 1;
        }
        h
    }
}

/// Every eigenvalue of the walk on `n`-vertex tournaments.
///
/// The step measure counts `x in F_2^n` by the clique vector `v_x` it
/// produces; its Walsh-Hadamard transform is `S_A` for all `A` at once. A
/// seeded sample of labels is re-derived by direct enumeration and any
/// disagreement is a verification error.
pub fn full_spectrum(n: usize) -> Result<SpectrumTable> {
    ensure_capacity(
        "vertex count for full spectrum",
        MAX_SPECTRUM_VERTICES as u64,
        n as u64,
    )?;
    let m = pair_count(n);
    let mut step_counts = SignedTable::zeros(m as u32)?;
    for w in clique_words(n)? {
        step_counts.values_mut()[w as usize] += 1;
    }
    let sums = step_counts.walsh_hadamard()?.into_values();

    let pairs: Vec<(usize, usize)> = EdgeIndex::new(n).pairs().collect();
    let mut ranks = vec![0u8; 1 << m];
    ranks
        .par_chunks_mut(1 << 12)
        .enumerate()
        .for_each(|(chunk, out)| {
            let base = chunk << 12;
            let mut rows = vec![0u64; n];
            for (k, r) in out.iter_mut().enumerate() {
                let a = base + k;
                rows.iter_mut().for_each(|w| *w = 0);
                for (p, &(i, j)) in pairs.iter().enumerate() {
                    if a >> p & 1 == 1 {
                        rows[i] |= 1 << j;
                        rows[j] |= 1 << i;
                    }
                }
                *r = rank_words(&mut rows) as u8;
            }
        });

    let table = SpectrumTable { n, sums, ranks };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EC7_0000 + n as u64);
    let mut probes: Vec<usize> = vec![0, table.len() - 1];
    probes.extend((0..64).map(|_| rng.gen_range(0..table.len())));
    for a in probes {
        let label = table.label(a);
        let direct = character_sum(&label)?;
        if direct != table.sums[a] {
            return Err(Error::verification(format!(
                "n={n}, A={a:#x}: transform gives S_A={}, enumeration gives {direct}",
                table.sums[a]
            )));
        }
        if alternating_rank(&label) != table.rank(a) {
            return Err(Error::verification(format!(
                "n={n}, A={a:#x}: rank mismatch"
            )));
        }
    }
    Ok(table)
}

/// Compensated (Kahan) summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

/// Deterministic compensated sum: fixed chunks summed in parallel, chunk
/// totals combined in order.
pub(crate) fn stable_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    const CHUNK: usize = 1 << 14;
    let partials: Vec<f64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut k = KahanSum::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                k.add(term(i));
            }
            k.value()
        })
        .collect();
    let mut k = KahanSum::default();
    for p in partials {
        k.add(p);
    }
    k.value()
}

/// `1/2 sqrt(sum_{A != 0} lambda_A^{2t})`, accumulated in the log domain.
/// At `t = 0` every term is 1 (including `lambda_A = 0`).
pub fn l2_tv_upper(spectrum: &SpectrumTable, t: u32) -> f64 {
    let n = spectrum.n as f64;
    let logs: Vec<f64> = spectrum
        .nontrivial_abs_histogram()
        .into_iter()
        .filter_map(|(abs, count)| {
            let c = (count as f64).ln();
            match (abs, t) {
                (_, 0) => Some(c),
                (0, _) => None,
                _ => Some(c + 2.0 * t as f64 * ((abs as f64).ln() - n * std::f64::consts::LN_2)),
            }
        })
        .collect();
    if logs.is_empty() {
        return 0.0;
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    0.5 * (0.5 * lse).exp()
}

/// `d_n(t)` from the Fourier expansion of the time-`t` law, `t >= 1`.
///
/// The deviation `mu_t(z) - 2^-m = 2^-m sum_{A != 0} lambda_A^t chi_A(z)` is
/// one inverse transform of `{lambda_A^t}`; the start state is the
/// reference tournament, which by vertex transitivity is also the worst case.
/// The `t = 0` law needs `0^0 = 1` in that expansion and is rejected.
pub fn exact_tv(spectrum: &SpectrumTable, t: u32) -> Result<f64> {
    if t == 0 {
        return Err(Error::input(
            "exact_tv is defined for t >= 1 (the t = 0 law is a point mass)",
        ));
    }
    let m = spectrum.m();
    let scale = 2f64.powi(-(spectrum.n as i32));
    let mut dev: Vec<f64> = spectrum
        .sums
        .par_iter()
        .enumerate()
        .map(|(a, &s)| {
            if a == 0 {
                0.0
            } else {
                (s as f64 * scale).powi(t as i32)
            }
        })
        .collect();
    walsh_hadamard_f64(&mut dev);
    let base = 2f64.powi(-(m as i32));
    if let Some((z, d)) = dev
        .iter()
        .enumerate()
        .find(|(_, &d)| base * (1.0 + d) < -NEGATIVE_MASS_TOLERANCE)
    {
        return Err(Error::verification(format!(
            "n={}, t={t}: negative probability {} at state {z:#x}",
            spectrum.n,
            base * (1.0 + d)
        )));
    }
    Ok(0.5 * base * stable_sum(dev.len(), |z| dev[z].abs()))
}

/// `d_n(t)` as an exact dyadic rational for `n <= 4`, `t >= 1`.
pub fn exact_tv_dyadic(spectrum: &SpectrumTable, t: u32) -> Result<Dyadic> {
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};

    ensure_capacity(
        "vertex count for exact rational TV",
        MAX_EXACT_RATIONAL_VERTICES as u64,
        spectrum.n as u64,
    )?;
    if t == 0 {
        return Err(Error::input(
            "exact_tv is defined for t >= 1 (the t = 0 law is a point mass)",
        ));
    }
    let n = spectrum.n as u64;
    let m = spectrum.m() as u64;
    let powers: Vec<BigInt> = spectrum
        .sums
        .iter()
        .map(|&s| num_traits::pow(BigInt::from(s), t as usize))
        .collect();
    // mu_t(z) = counts[z] / 2^{m + n t}
    let uniform = BigInt::from(1) << (n * t as u64);
    let mut total = BigInt::zero();
    for z in 0..powers.len() {
        let mut count = BigInt::zero();
        for (a, p) in powers.iter().enumerate() {
            if (a & z).count_ones() % 2 == 0 {
                count += p;
            } else {
                count -= p;
            }
        }
        if count.is_negative() {
            return Err(Error::verification(format!(
                "n={n}, t={t}: negative mass at {z:#x}"
            )));
        }
        total += (count - &uniform).abs();
    }
    Ok(Dyadic::new(total, m + n * t as u64 + 1))
}

/// `C_0 = sum_{r >= 2 even} 2^{-r(r-1)/2}` and `C = sqrt(C_0) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UpperTailConstant {
    pub c0: f64,
    pub c: f64,
}

pub fn uppertail_constant() -> UpperTailConstant {
    let mut c0 = 0.0;
    let mut r = 2i32;
    loop {
        let term = 2f64.powi(-(r * (r - 1) / 2));
        if c0 + term == c0 {
            break;
        }
        c0 += term;
        r += 2;
    }
    UpperTailConstant {
        c0,
        c: 0.5 * c0.sqrt(),
    }
}

/// `C 2^{-c}`, the bound on `d_n(n + c)`.
pub fn uppertail_bound(c: u32) -> f64 {
    uppertail_constant().c * 2f64.powi(-(c as i32))
}

/// `sum_{r even, 2 <= r <= n} 2^{r(n-r) + r + r(r-1)/2 - r t}`: the bound on
/// `sum_{A != 0} |lambda_A|^{2t}` obtained by grouping labels by rank and
/// using the alternating-form count bound.
pub fn rank_grouped_l2_sum(n: usize, t: u64) -> Dyadic {
    (2..=n)
        .step_by(2)
        .map(|r| {
            let (r, n, t) = (r as i64, n as i64, t as i64);
            Dyadic::pow2(r * (n - r) + r + r * (r - 1) / 2 - r * t)
        })
        .sum()
}

/// `sum_{A != 0} lambda_A^{2t}` exactly.
pub fn exact_l2_sum(spectrum: &SpectrumTable, t: u32) -> Dyadic {
    let n = spectrum.n as u64;
    spectrum
        .nontrivial_abs_histogram()
        .into_iter()
        .map(|(abs, count)| {
            let term = Dyadic::new(abs as i64, n).pow(2 * t);
            &term * &Dyadic::from_int(count as i64)
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreCutoffL2 {
    pub n: usize,
    /// `sum_{A != 0} lambda_A^{2(n-1)}`, when the spectrum is enumerable.
    pub exact_sum: Option<Dyadic>,
    /// Rank-grouped estimate of the same sum.
    pub estimate: Dyadic,
    /// `sqrt(estimate) / 2`.
    pub alpha: f64,
}

/// The `L^2` sum one step before the cutoff, with its rank-grouped estimate.
///
/// For `n <= 7` pass the spectrum to get the exact sum as well. Fails if the
/// exact sum exceeds the estimate, the estimate reaches
/// [`PRE_CUTOFF_SUM_LIMIT`], or the distance bound reaches
/// [`PRE_CUTOFF_ALPHA`].
pub fn pre_cutoff_l2_sum(n: usize, spectrum: Option<&SpectrumTable>) -> Result<PreCutoffL2> {
    if n < 1 {
        return Err(Error::input("pre-cutoff sum needs n >= 1"));
    }
    let t = n as u64 - 1;
    let estimate = rank_grouped_l2_sum(n, t);
    let exact_sum = match spectrum {
        Some(s) if s.n != n => {
            return Err(Error::input(format!(
                "spectrum is for n={}, not n={n}",
                s.n
            )));
        }
        Some(s) => Some(exact_l2_sum(s, t as u32)),
        None => None,
    };
    let alpha = 0.5 * estimate.to_f64().sqrt();
    if let Some(exact) = &exact_sum {
        if exact > &estimate {
            return Err(Error::verification(format!(
                "n={n}: exact sum {exact} exceeds estimate {estimate}"
            )));
        }
    }
    if estimate.to_f64() >= PRE_CUTOFF_SUM_LIMIT || alpha >= PRE_CUTOFF_ALPHA {
        return Err(Error::verification(format!(
            "n={n}: estimate {} too large",
            estimate.to_f64()
        )));
    }
    Ok(PreCutoffL2 {
        n,
        exact_sum,
        estimate,
        alpha,
    })
}

/// `1 - max_{A != 0} |lambda_A|`, exactly.
pub fn spectral_gap(spectrum: &SpectrumTable) -> Result<Dyadic> {
    let top = spectrum.sums[1..]
        .iter()
        .map(|s| s.unsigned_abs())
        .max()
        .ok_or_else(|| Error::input("spectral gap needs n >= 2"))?;
    Ok(&Dyadic::one() - &Dyadic::new(top as i64, spectrum.n as u64))
}
