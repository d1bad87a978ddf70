//! The `k`-restricted walk: the subgroup `H_k` spanned by `k`-clique
//! vectors, its parity description, and restricted eigenvalues.
//!
//! For `n >= 4` and `2 <= k <= n - 2` the subgroup depends only on `k mod 4`:
//!
//! | `k mod 4` | `V_k`                 | dimension   |
//! |-----------|-----------------------|-------------|
//! | 2         | everything            | `m`         |
//! | 0         | `ker e`               | `m - 1`     |
//! | 3         | `ker d`               | `m - n + 1` |
//! | 1         | `ker d` and `ker e`   | `m - n`     |
//!
//! where `d` is the degree-parity map and `e` the edge-count parity. The
//! checks below compute both sides independently.

use num_rational::Ratio;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::encoding::{clique_vector, pair_count, EdgeIndex, VertexSet, MAX_VERTICES};
use crate::error::{ensure_capacity, Error, Result};
use crate::gf2::{span_dim, Gf2Matrix, Gf2Vector};
use crate::rng;
use crate::spectral::GraphLabel;

/// Column budget for inclusion matrices and subset enumerations.
pub const MAX_SUBSETS: u64 = 1 << 22;

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

/// All `k`-subsets of `0..n` in colexicographic order.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = VertexSet> {
    assert!(n <= MAX_VERTICES);
    let limit: u128 = 1u128 << n;
    let mut next: Option<u128> = if k <= n { Some((1u128 << k) - 1) } else { None };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack: next integer with the same popcount
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nxt = (((r ^ cur) >> 2) / c) | r;
            (nxt < limit).then_some(nxt)
        };
        Some(VertexSet::from_mask(n, cur as u64).expect("mask below 2^n"))
    })
}

fn check_subset_budget(n: usize, k: usize) -> Result<()> {
    ensure_capacity("vertex count", MAX_VERTICES as u64, n as u64)?;
    if k > n {
        return Err(Error::input(format!("k={k} exceeds n={n}")));
    }
    ensure_capacity("number of k-subsets", MAX_SUBSETS, binomial(n, k))
}

/// Pair-by-`k`-subset containment matrix; column `X` is `v_X`.
#[derive(Clone, Debug)]
pub struct InclusionMatrix {
    pub n: usize,
    pub k: usize,
    pub columns: Vec<VertexSet>,
    pub matrix: Gf2Matrix,
}

pub fn inclusion_matrix(n: usize, k: usize) -> Result<InclusionMatrix> {
    check_subset_budget(n, k)?;
    let columns: Vec<VertexSet> = k_subsets(n, k).collect();
    let vectors = columns
        .iter()
        .map(|&x| clique_vector(n, x))
        .collect::<Result<Vec<_>>>()?;
    let matrix = Gf2Matrix::from_columns(pair_count(n), &vectors)?;
    Ok(InclusionMatrix {
        n,
        k,
        columns,
        matrix,
    })
}

fn check_theorem_range(n: usize, k: usize) -> Result<()> {
    if n < 4 || k < 2 || k + 2 > n {
        return Err(Error::input(format!(
            "(n={n}, k={k}) is outside n >= 4, 2 <= k <= n-2; use boundary_dims for k in {{0, 1, n-1, n}}"
        )));
    }
    Ok(())
}

/// GF(2) rank of the inclusion matrix from Wilson's formula:
/// `sum over j in {0,1,2} with C(k-j, 2-j) odd of C(n,j) - C(n,j-1)`.
pub fn wilson_rank(n: usize, k: usize) -> Result<usize> {
    check_theorem_range(n, k)?;
    let rank = (0..=2usize)
        .filter(|&j| binomial(k - j, 2 - j) % 2 == 1)
        .map(|j| binomial(n, j) - if j == 0 { 0 } else { binomial(n, j - 1) })
        .sum::<u64>();
    Ok(rank as usize)
}

/// `dim H_k` by elimination on the inclusion matrix; any `0 <= k <= n`.
pub fn hk_dimension(n: usize, k: usize) -> Result<usize> {
    Ok(inclusion_matrix(n, k)?.matrix.rank())
}

/// Degree parities and edge-count parity of an edge set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParityFingerprint {
    pub degree_parity: Gf2Vector,
    pub edge_parity: bool,
}

impl ParityFingerprint {
    pub fn is_zero(&self) -> bool {
        self.degree_parity.is_zero() && !self.edge_parity
    }
}

impl std::ops::Add for &ParityFingerprint {
    type Output = ParityFingerprint;
    fn add(self, rhs: &ParityFingerprint) -> ParityFingerprint {
        ParityFingerprint {
            degree_parity: &self.degree_parity ^ &rhs.degree_parity,
            edge_parity: self.edge_parity ^ rhs.edge_parity,
        }
    }
}

pub fn parity_fingerprint(f: &Gf2Vector, n: usize) -> Result<ParityFingerprint> {
    if f.len() != pair_count(n) {
        return Err(Error::input(format!(
            "edge set length {} != m={}",
            f.len(),
            pair_count(n)
        )));
    }
    let idx = EdgeIndex::new(n);
    let mut degree_parity = Gf2Vector::zeros(n);
    for p in f.iter_ones() {
        let (i, j) = idx.pair(p);
        degree_parity.flip(i);
        degree_parity.flip(j);
    }
    Ok(ParityFingerprint {
        degree_parity,
        edge_parity: f.weight() % 2 == 1,
    })
}

/// Vertex-pair incidence matrix of `K_n` (`n x m`): the degree-parity map.
pub fn degree_parity_matrix(n: usize) -> Gf2Matrix {
    let idx = EdgeIndex::new(n);
    let mut d = Gf2Matrix::zeros(n, idx.m());
    for (p, (i, j)) in idx.pairs().enumerate() {
        d.set(i, p, true);
        d.set(j, p, true);
    }
    d
}

/// Which parity functionals vanish on `H_k`, by `k mod 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityClass {
    /// `k = 2 mod 4`: no constraint.
    Full,
    /// `k = 0 mod 4`: even edge count.
    EvenEdges,
    /// `k = 3 mod 4`: even degrees.
    EvenDegrees,
    /// `k = 1 mod 4`: even degrees and even edge count.
    EvenDegreesAndEdges,
}

impl ParityClass {
    pub fn of(k: usize) -> Self {
        match k % 4 {
            2 => ParityClass::Full,
            0 => ParityClass::EvenEdges,
            3 => ParityClass::EvenDegrees,
            _ => ParityClass::EvenDegreesAndEdges,
        }
    }

    pub fn constrains_degrees(self) -> bool {
        matches!(
            self,
            ParityClass::EvenDegrees | ParityClass::EvenDegreesAndEdges
        )
    }

    pub fn constrains_edges(self) -> bool {
        matches!(
            self,
            ParityClass::EvenEdges | ParityClass::EvenDegreesAndEdges
        )
    }

    pub fn admits(self, fp: &ParityFingerprint) -> bool {
        !(self.constrains_degrees() && !fp.degree_parity.is_zero()
            || self.constrains_edges() && fp.edge_parity)
    }
}

/// Rows of the linear constraints cutting out `V_k` (possibly none).
pub fn vk_constraints(n: usize, k: usize) -> Gf2Matrix {
    let class = ParityClass::of(k);
    let m = pair_count(n);
    let mut rows = Vec::new();
    if class.constrains_degrees() {
        let d = degree_parity_matrix(n);
        rows.extend((0..n).map(|i| d.row(i)));
    }
    if class.constrains_edges() {
        rows.push(Gf2Vector::ones(m));
    }
    if rows.is_empty() {
        Gf2Matrix::zeros(0, m)
    } else {
        Gf2Matrix::from_rows(&rows).expect("rows share length m")
    }
}

/// Closed-form `dim V_k`.
fn vk_dimension_formula(n: usize, k: usize) -> usize {
    let m = pair_count(n);
    match ParityClass::of(k) {
        ParityClass::Full => m,
        ParityClass::EvenEdges => m - 1,
        ParityClass::EvenDegrees => m - n + 1,
        ParityClass::EvenDegreesAndEdges => m - n,
    }
}

/// Basis of `V_k` as the kernel of its constraints.
pub fn vk_basis(n: usize, k: usize) -> Vec<Gf2Vector> {
    vk_constraints(n, k).kernel_basis()
}

/// `dim V_k`, from the closed form and from the kernel of the stacked
/// constraints; the two must agree.
pub fn vk_dimension(n: usize, k: usize) -> Result<usize> {
    check_theorem_range(n, k)?;
    let formula = vk_dimension_formula(n, k);
    let kernel = vk_basis(n, k).len();
    if formula != kernel {
        return Err(Error::verification(format!(
            "(n={n}, k={k}): closed-form dim V_k = {formula} but kernel has dimension {kernel}"
        )));
    }
    Ok(formula)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HkReport {
    pub n: usize,
    pub k: usize,
    pub k_mod_4: usize,
    pub parity_class: ParityClass,
    pub wilson_rank: usize,
    pub elimination_rank: usize,
    pub vk_dim: usize,
    pub vk_dim_kernel: usize,
    /// Every generator satisfies the constraints of `V_k`.
    pub generators_in_vk: bool,
    /// All generators have even degrees.
    pub generators_degree_even: bool,
    /// All generators have an even edge count.
    pub generators_edges_even: bool,
    /// Random members of `V_k` checked for membership in the column span.
    pub membership_checked: usize,
    pub membership_passed: usize,
    pub pass: bool,
    /// One line per violated clause.
    pub failures: Vec<String>,
}

/// Checks `H_k = V_k` for one `(n, k)`:
/// (a) each generator satisfies the parity constraints of `V_k` and the
/// obstruction pattern is the one predicted by `k mod 4`;
/// (b) elimination rank, Wilson's formula and `dim V_k` coincide;
/// (c) optionally, `samples` random elements of `V_k` solve `W x = v`.
pub fn verify_hk_equals_vk(
    n: usize,
    k: usize,
    membership: Option<(usize, u64)>,
) -> Result<HkReport> {
    check_theorem_range(n, k)?;
    let class = ParityClass::of(k);
    let inc = inclusion_matrix(n, k)?;
    let mut failures = Vec::new();

    let fingerprints = inc
        .columns
        .iter()
        .map(|&x| parity_fingerprint(&clique_vector(n, x)?, n))
        .collect::<Result<Vec<_>>>()?;
    let generators_in_vk = fingerprints.iter().all(|fp| class.admits(fp));
    let generators_degree_even = fingerprints.iter().all(|fp| fp.degree_parity.is_zero());
    let generators_edges_even = fingerprints.iter().all(|fp| !fp.edge_parity);
    if !generators_in_vk {
        failures.push(format!(
            "(n={n}, k={k}): some generator violates the parity constraints of V_k"
        ));
    }
    if generators_degree_even != (k % 2 == 1) {
        failures.push(format!(
            "(n={n}, k={k}): degree-parity obstruction does not match k odd/even"
        ));
    }
    if generators_edges_even != matches!(k % 4, 0 | 1) {
        failures.push(format!(
            "(n={n}, k={k}): edge-parity obstruction does not match k mod 4"
        ));
    }

    let wilson = wilson_rank(n, k)?;
    let elimination_rank = inc.matrix.rank();
    let vk_dim = vk_dimension_formula(n, k);
    let basis = vk_basis(n, k);
    let vk_dim_kernel = basis.len();
    if !(wilson == elimination_rank && elimination_rank == vk_dim && vk_dim == vk_dim_kernel) {
        failures.push(format!(
            "(n={n}, k={k}): dimensions disagree: wilson={wilson} elimination={elimination_rank} \
             vk={vk_dim} vk_kernel={vk_dim_kernel}"
        ));
    }

    let (mut checked, mut passed) = (0, 0);
    if let Some((samples, seed)) = membership {
        let mut rng = rng::stream(seed, (n as u64) << 32 | k as u64);
        for _ in 0..samples {
            let mut v = Gf2Vector::zeros(pair_count(n));
            for b in &basis {
                if rng.next_u32() & 1 == 1 {
                    v ^= b;
                }
            }
            checked += 1;
            match inc.matrix.solve(&v)? {
                Some(x) if inc.matrix.mul_vec(&x) == v => passed += 1,
                _ => failures.push(format!(
                    "(n={n}, k={k}): V_k element {v} is not in the span of the k-cliques"
                )),
            }
        }
    }

    Ok(HkReport {
        n,
        k,
        k_mod_4: k % 4,
        parity_class: class,
        wilson_rank: wilson,
        elimination_rank,
        vk_dim,
        vk_dim_kernel,
        generators_in_vk,
        generators_degree_even,
        generators_edges_even,
        membership_checked: checked,
        membership_passed: passed,
        pass: failures.is_empty(),
        failures,
    })
}

/// [`verify_hk_equals_vk`] over every `4 <= n <= n_max`, `2 <= k <= n - 2`,
/// ordered by `(n, k)`.
pub fn hk_sweep(n_max: usize, membership: Option<(usize, u64)>) -> Result<Vec<HkReport>> {
    let pairs: Vec<(usize, usize)> = (4..=n_max)
        .flat_map(|n| (2..=n - 2).map(move |k| (n, k)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(n, k)| verify_hk_equals_vk(n, k, membership))
        .collect()
}

/// `dim H_k` for `k` in `{0, 1, n-1, n}`: `0` for `k <= 1`, `1` for `k = n`,
/// and for `k = n-1` either `n` (odd `n`) or `n - 1` (even `n`). The value
/// is re-derived from the span of the generators.
pub fn boundary_dims(n: usize, k: usize) -> Result<usize> {
    let formula = if k <= 1 {
        0
    } else if k == n {
        1
    } else if k + 1 == n {
        if n % 2 == 1 {
            n
        } else {
            n - 1
        }
    } else {
        return Err(Error::input(format!(
            "k={k} is not a boundary case for n={n}; boundary cases are 0, 1, n-1, n"
        )));
    };
    if k > n {
        return Err(Error::input(format!("k={k} exceeds n={n}")));
    }
    check_subset_budget(n, k)?;
    let gens = k_subsets(n, k)
        .map(|x| clique_vector(n, x))
        .collect::<Result<Vec<_>>>()?;
    let spanned = span_dim(&gens)?;
    if spanned != formula {
        return Err(Error::verification(format!(
            "(n={n}, k={k}): boundary formula gives {formula}, span has dimension {spanned}"
        )));
    }
    Ok(formula)
}

/// Largest `n` for the exhaustive relation search among `v_{[n] \ {i}}`.
pub const MAX_RELATION_VERTICES: usize = 20;

/// Every non-empty `S` (as a vertex mask) with `sum_{i in S} v_{[n] \ {i}} = 0`.
pub fn complement_generator_relations(n: usize) -> Result<Vec<u64>> {
    ensure_capacity(
        "vertex count for relation search",
        MAX_RELATION_VERTICES as u64,
        n as u64,
    )?;
    let full = VertexSet::full(n).mask();
    let gens = (0..n)
        .map(|i| clique_vector(n, VertexSet::from_mask(n, full & !(1 << i))?))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = Gf2Vector::zeros(pair_count(n));
    let mut relations = Vec::new();
    // Gray-code walk over all subsets S
    let mut s = 0u64;
    for step in 1u64..1 << n {
        let i = step.trailing_zeros() as usize;
        acc ^= &gens[i];
        s ^= 1 << i;
        if acc.is_zero() {
            relations.push(s);
        }
    }
    relations.sort_unstable();
    Ok(relations)
}

/// `lambda^(k)_A = E_{|X| = k} (-1)^{|E(H_A[X])|}`, exactly.
pub fn restricted_eigenvalue(a: &GraphLabel, k: usize) -> Result<Ratio<i64>> {
    let n = a.n();
    check_subset_budget(n, k)?;
    let adj = a.adjacency_words();
    let mut total: i64 = 0;
    for x in k_subsets(n, k) {
        let mask = x.mask();
        // each induced edge is seen from both endpoints
        let twice: u32 = x.iter().map(|i| (adj[i] & mask).count_ones()).sum();
        total += if (twice / 2).is_multiple_of(2) { 1 } else { -1 };
    }
    Ok(Ratio::new(total, binomial(n, k) as i64))
}
