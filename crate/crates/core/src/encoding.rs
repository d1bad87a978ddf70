//! Tournaments as vectors in `F_2^m`, clique vectors, and inversion balls.
//!
//! Vertices are `0..n`. The reference tournament orients every pair from the
//! smaller label to the larger; a tournament's code has a one at pair
//! `{i, j}` exactly when it disagrees with that orientation.

use std::collections::VecDeque;

use crate::error::{ensure_capacity, Error, Result};
use crate::gf2::Gf2Vector;

/// Vertex subsets are bitmasks, so `n` is capped at 64.
pub const MAX_VERTICES: usize = 64;

/// Largest `n` for which the `2^m` state space is enumerated exhaustively.
pub const MAX_BALL_VERTICES: usize = 6;

/// Largest `n` whose `m` pair coordinates fit in one machine word.
pub const MAX_WORD_VERTICES: usize = 11;

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic bijection between pairs `{i < j}` of `0..n` and `0..m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeIndex {
    n: usize,
}

impl EdgeIndex {
    pub fn new(n: usize) -> Self {
        EdgeIndex { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        pair_count(self.n)
    }

    /// Position of the unordered pair `{i, j}`.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        assert!(
            i != j && i < self.n && j < self.n,
            "bad pair ({i}, {j}) for n={}",
            self.n
        );
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    pub fn try_index(&self, i: usize, j: usize) -> Result<usize> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::input(format!(
                "({i}, {j}) is not a pair of distinct vertices below {}",
                self.n
            )));
        }
        Ok(self.index(i, j))
    }

    /// Inverse of [`EdgeIndex::index`]; returns `(i, j)` with `i < j`.
    pub fn pair(&self, pos: usize) -> (usize, usize) {
        assert!(pos < self.m(), "pair position {pos} out of range");
        let mut rest = pos;
        let mut i = 0;
        while rest >= self.n - i - 1 {
            rest -= self.n - i - 1;
            i += 1;
        }
        (i, i + 1 + rest)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }
}

/// A subset of `0..n` stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_VERTICES);
        VertexSet(if n == 64 { !0 } else { (1u64 << n) - 1 })
    }

    pub fn from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::capacity(
                "vertex count",
                MAX_VERTICES as u64,
                n as u64,
            ));
        }
        if mask & !VertexSet::full(n).0 != 0 {
            return Err(Error::input(format!(
                "vertex {} out of range for n={n}",
                63 - (mask & !VertexSet::full(n).0).leading_zeros()
            )));
        }
        Ok(VertexSet(mask))
    }

    pub fn from_vertices(n: usize, vertices: &[usize]) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::capacity(
                "vertex count",
                MAX_VERTICES as u64,
                n as u64,
            ));
        }
        let mut mask = 0u64;
        for &v in vertices {
            if v >= n {
                return Err(Error::input(format!("vertex {v} out of range for n={n}")));
            }
            mask |= 1 << v;
        }
        Ok(VertexSet(mask))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(v)
        })
    }
}

/// `v_X`: ones exactly on the pairs inside `X`.
pub fn clique_vector(n: usize, x: VertexSet) -> Result<Gf2Vector> {
    VertexSet::from_mask(n, x.mask())?;
    let idx = EdgeIndex::new(n);
    let mut v = Gf2Vector::zeros(idx.m());
    let verts: Vec<usize> = x.iter().collect();
    for (a, &i) in verts.iter().enumerate() {
        for &j in &verts[a + 1..] {
            v.set(idx.index(i, j), true);
        }
    }
    Ok(v)
}

/// `v_X` packed into a word, for every mask `X` of `0..n`, indexed by mask.
pub(crate) fn clique_words(n: usize) -> Result<Vec<u64>> {
    ensure_capacity(
        "vertex count for word-packed states",
        MAX_WORD_VERTICES as u64,
        n as u64,
    )?;
    let idx = EdgeIndex::new(n);
    // row_bits[i] = pairs {i, j} with j > i
    let mut table = vec![0u64; 1 << n];
    for mask in 1usize..1 << n {
        let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << top);
        let mut w = table[rest];
        let mut r = rest;
        while r != 0 {
            let i = r.trailing_zeros() as usize;
            r &= r - 1;
            w |= 1 << idx.index(i, top);
        }
        table[mask] = w;
    }
    Ok(table)
}

/// A tournament on `0..n` encoded against the reference orientation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TournamentCode {
    n: usize,
    z: Gf2Vector,
}

impl TournamentCode {
    /// The reference tournament (`i -> j` whenever `i < j`).
    pub fn reference(n: usize) -> Self {
        TournamentCode {
            n,
            z: Gf2Vector::zeros(pair_count(n)),
        }
    }

    pub fn from_vector(n: usize, z: Gf2Vector) -> Result<Self> {
        if z.len() != pair_count(n) {
            return Err(Error::input(format!(
                "code length {} does not match m={} for n={n}",
                z.len(),
                pair_count(n)
            )));
        }
        Ok(TournamentCode { n, z })
    }

    /// Encode the tournament in which `i` beats `j` iff `beats(i, j)`, queried
    /// for `i < j`.
    pub fn from_orientation(n: usize, mut beats: impl FnMut(usize, usize) -> bool) -> Self {
        let idx = EdgeIndex::new(n);
        let z = Gf2Vector::from_fn(idx.m(), |p| {
            let (i, j) = idx.pair(p);
            !beats(i, j)
        });
        TournamentCode { n, z }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self) -> &Gf2Vector {
        &self.z
    }

    /// Whether the arc between `i` and `j` points from `i` to `j`.
    pub fn beats(&self, i: usize, j: usize) -> bool {
        let flipped = self.z.get(EdgeIndex::new(self.n).index(i, j));
        (i < j) != flipped
    }

    /// Reverse every arc inside `x`.
    pub fn invert(&self, x: VertexSet) -> Result<TournamentCode> {
        let v = clique_vector(self.n, x)?;
        Ok(TournamentCode {
            n: self.n,
            z: &self.z ^ &v,
        })
    }
}

/// The distinct non-zero clique vectors of `K_n`, packed, ascending.
fn distinct_generators(n: usize) -> Result<Vec<u64>> {
    let mut gens: Vec<u64> = clique_words(n)?.into_iter().filter(|&w| w != 0).collect();
    gens.sort_unstable();
    gens.dedup();
    Ok(gens)
}

/// Breadth-first distances in the Cayley graph of `F_2^m` generated by all
/// clique vectors.
#[derive(Clone, Debug)]
pub struct CayleyBfs {
    n: usize,
    start: u64,
    dist: Vec<u8>,
}

impl CayleyBfs {
    pub fn new(n: usize, start: &Gf2Vector) -> Result<Self> {
        ensure_capacity(
            "vertex count for exhaustive state space",
            MAX_BALL_VERTICES as u64,
            n as u64,
        )?;
        let m = pair_count(n);
        if start.len() != m {
            return Err(Error::input(format!(
                "state length {} != m={m}",
                start.len()
            )));
        }
        let start = start.to_word().expect("m <= 15 fits one word");
        let gens = distinct_generators(n)?;
        let mut dist = vec![u8::MAX; 1 << m];
        dist[start as usize] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(z) = queue.pop_front() {
            let d = dist[z as usize];
            for &g in &gens {
                let y = (z ^ g) as usize;
                if dist[y] == u8::MAX {
                    dist[y] = d + 1;
                    queue.push_back(y as u64);
                }
            }
        }
        Ok(CayleyBfs { n, start, dist })
    }

    pub fn from_reference(n: usize) -> Result<Self> {
        CayleyBfs::new(n, &Gf2Vector::zeros(pair_count(n)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn start(&self) -> Gf2Vector {
        Gf2Vector::from_word(pair_count(self.n), self.start)
    }

    pub fn distance(&self, z: &Gf2Vector) -> u32 {
        self.distance_word(z.to_word().expect("state fits one word"))
    }

    pub(crate) fn distance_word(&self, z: u64) -> u32 {
        self.dist[z as usize] as u32
    }

    /// Largest distance from the start.
    pub fn diameter(&self) -> u32 {
        self.dist.iter().copied().max().unwrap_or(0) as u32
    }

    /// `|B_t|` for `t = 0..=diameter`.
    pub fn ball_sizes(&self) -> Vec<u64> {
        let mut layers = vec![0u64; self.diameter() as usize + 1];
        for &d in &self.dist {
            layers[d as usize] += 1;
        }
        let mut acc = 0;
        layers
            .into_iter()
            .map(|c| {
                acc += c;
                acc
            })
            .collect()
    }

    pub fn ball_size(&self, t: u32) -> u64 {
        self.dist.iter().filter(|&&d| d as u32 <= t).count() as u64
    }

    pub fn in_ball(&self, z: &Gf2Vector, t: u32) -> bool {
        self.distance(z) <= t
    }

    /// Members of `B_t`, in increasing packed order.
    pub fn ball(&self, t: u32) -> Vec<Gf2Vector> {
        let m = pair_count(self.n);
        self.dist
            .iter()
            .enumerate()
            .filter(|(_, &d)| d as u32 <= t)
            .map(|(z, _)| Gf2Vector::from_word(m, z as u64))
            .collect()
    }
}

/// `B_t` around the reference tournament.
pub fn inversion_ball(n: usize, t: u32) -> Result<Vec<Gf2Vector>> {
    Ok(CayleyBfs::from_reference(n)?.ball(t))
}

pub fn ball_size(n: usize, t: u32) -> Result<u64> {
    Ok(CayleyBfs::from_reference(n)?.ball_size(t))
}

/// Minimum number of inversions taking `z1` to `z2`.
pub fn inversion_distance(n: usize, z1: &Gf2Vector, z2: &Gf2Vector) -> Result<u32> {
    let bfs = CayleyBfs::new(n, z1)?;
    if z2.len() != z1.len() {
        return Err(Error::input("states have different lengths"));
    }
    Ok(bfs.distance(z2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_index_is_bijective_and_lexicographic() {
        for n in 0..12 {
            let idx = EdgeIndex::new(n);
            let pairs: Vec<_> = idx.pairs().collect();
            assert_eq!(pairs.len(), idx.m());
            for (p, &(i, j)) in pairs.iter().enumerate() {
                assert_eq!(idx.index(i, j), p);
                assert_eq!(idx.index(j, i), p);
                assert_eq!(idx.pair(p), (i, j));
            }
        }
        assert!(EdgeIndex::new(4).try_index(2, 2).is_err());
        assert!(EdgeIndex::new(4).try_index(1, 4).is_err());
    }

    #[test]
    fn clique_vector_examples() {
        assert!(clique_vector(5, VertexSet::EMPTY).unwrap().is_zero());
        for v in 0..5 {
            let x = VertexSet::from_vertices(5, &[v]).unwrap();
            assert!(clique_vector(5, x).unwrap().is_zero());
        }
        let x = VertexSet::from_vertices(3, &[1, 2]).unwrap();
        let v = clique_vector(3, x).unwrap();
        assert_eq!(
            v.iter_ones().collect::<Vec<_>>(),
            vec![EdgeIndex::new(3).index(1, 2)]
        );
        assert_eq!(
            clique_vector(5, VertexSet::full(5)).unwrap(),
            Gf2Vector::ones(10)
        );
        let x = VertexSet::from_vertices(7, &[0, 2, 3, 6]).unwrap();
        assert_eq!(clique_vector(7, x).unwrap().weight(), 6);
        assert!(matches!(
            VertexSet::from_vertices(3, &[3]),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            clique_vector(3, VertexSet(0b1000)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn clique_words_agree_with_clique_vector() {
        for n in 0..=7 {
            let words = clique_words(n).unwrap();
            for (mask, &w) in words.iter().enumerate() {
                let v = clique_vector(n, VertexSet(mask as u64)).unwrap();
                assert_eq!(v.to_word(), Some(w));
            }
        }
        assert!(clique_words(12).is_err());
    }

    #[test]
    fn invert_examples() {
        let t0 = TournamentCode::reference(3);
        let tri = t0.invert(VertexSet::full(3)).unwrap();
        assert_eq!(tri.z(), &Gf2Vector::ones(3));
        assert!(!tri.beats(0, 1) && tri.beats(1, 0));
        assert_eq!(tri.invert(VertexSet::full(3)).unwrap(), t0);
    }

    #[test]
    fn orientation_round_trip() {
        let t = TournamentCode::from_orientation(5, |i, j| (i + j) % 3 != 0);
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_ne!(t.beats(i, j), t.beats(j, i));
                }
                if i < j {
                    assert_eq!(t.beats(i, j), (i + j) % 3 != 0);
                }
            }
        }
    }

    #[test]
    fn ball_examples() {
        assert_eq!(inversion_ball(4, 0).unwrap(), vec![Gf2Vector::zeros(6)]);
        // n = 3: zero, the three single edges, the full triangle
        let b1 = inversion_ball(3, 1).unwrap();
        assert_eq!(b1.len(), 5);
        let mut expected: Vec<u64> = vec![0, 0b001, 0b010, 0b100, 0b111];
        expected.sort();
        assert_eq!(
            b1.iter().map(|v| v.to_word().unwrap()).collect::<Vec<_>>(),
            expected
        );
        assert_eq!(ball_size(3, 99).unwrap(), 8);
        assert!(matches!(ball_size(7, 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn ball_sizes_monotone_and_exhaustive() {
        for n in 1..=6 {
            let bfs = CayleyBfs::from_reference(n).unwrap();
            let sizes = bfs.ball_sizes();
            assert!(sizes.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(*sizes.last().unwrap(), 1u64 << pair_count(n));
        }
    }

    #[test]
    fn four_cycle_distance_is_two() {
        let idx = EdgeIndex::new(4);
        let c4 = Gf2Vector::from_fn(6, |p| {
            let e = idx.pair(p);
            [(0, 1), (1, 2), (2, 3), (0, 3)].contains(&e)
        });
        // oracle: no single clique vector equals C4, some pair of them does
        let gens: Vec<Gf2Vector> = (0..16u64)
            .map(|x| clique_vector(4, VertexSet(x)).unwrap())
            .collect();
        assert!(!gens.contains(&c4));
        assert!(gens.iter().any(|a| gens.iter().any(|b| (a ^ b) == c4)));
        let d = inversion_distance(4, &Gf2Vector::zeros(6), &c4).unwrap();
        assert_eq!(d, 2);
        assert!(d <= CayleyBfs::from_reference(4).unwrap().diameter());
    }

    #[test]
    fn distance_examples() {
        let z = Gf2Vector::from_word(3, 0b101);
        assert_eq!(inversion_distance(3, &z, &z).unwrap(), 0);
        assert_eq!(
            inversion_distance(3, &Gf2Vector::zeros(3), &Gf2Vector::unit(3, 1)).unwrap(),
            1
        );
    }

    proptest! {
        #[test]
        fn inversions_commute_and_are_involutions(
            z in any::<u64>(), x in 0u64..256, y in 0u64..256,
        ) {
            let n = 8;
            let t = TournamentCode::from_vector(n, Gf2Vector::from_word(28, z)).unwrap();
            let (x, y) = (VertexSet(x), VertexSet(y));
            let xy = t.invert(x).unwrap().invert(y).unwrap();
            let yx = t.invert(y).unwrap().invert(x).unwrap();
            prop_assert_eq!(&xy, &yx);
            prop_assert_eq!(t.invert(x).unwrap().invert(x).unwrap(), t);
        }

        #[test]
        fn distance_is_symmetric(a in 0u64..1024, b in 0u64..1024) {
            let (a, b) = (Gf2Vector::from_word(10, a), Gf2Vector::from_word(10, b));
            prop_assert_eq!(
                inversion_distance(5, &a, &b).unwrap(),
                inversion_distance(5, &b, &a).unwrap()
            );
        }
    }
}
