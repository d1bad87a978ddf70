//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the report is always printed.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use invwalk_core::encoding::{pair_count, CayleyBfs};
use invwalk_core::rank_stats::{
    alt_count_bound, alternating_census, ball_volume_bound, sample_symmetric_rank_tail,
};
use invwalk_core::restricted::{boundary_dims, complement_generator_relations, hk_sweep};
use invwalk_core::rng;
use invwalk_core::spectral::{
    alternating_rank, character_sum, exact_tv, exact_tv_dyadic, full_spectrum, pre_cutoff_l2_sum,
    rank_grouped_l2_sum, spectral_gap, uppertail_constant, GraphLabel, PRE_CUTOFF_ALPHA,
    PRE_CUTOFF_SUM_LIMIT,
};
use invwalk_core::walk_sim::{
    exact_evolution, exact_evolution_rational, hypercube_profile, hypercube_time, tv_to_uniform,
};
use invwalk_core::Dyadic;
use num_bigint::BigUint;
use rand::Rng;

const AGREEMENT_TOL: f64 = 1e-12;
const MONOTONE_SLACK: f64 = 1e-12;
const C0_EXPECTED: f64 = 0.51566;
const C0_TOL: f64 = 5e-6;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Pairs `i < j` in lexicographic order, listed by nested loops.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// `S_A` by summing `(-1)^{edges of H_A inside x}` over every `x`.
fn naive_sum(n: usize, a: u64) -> i64 {
    let ps = pairs(n);
    (0u64..1 << n)
        .map(|x| {
            let inside = ps
                .iter()
                .enumerate()
                .filter(|&(p, &(i, j))| a >> p & 1 == 1 && x >> i & 1 == 1 && x >> j & 1 == 1)
                .count();
            if inside % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .sum()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let spectrum = match full_spectrum(3) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    let elapsed = start.elapsed();
    let mismatches = (0..spectrum.len())
        .filter(|&a| spectrum.sums()[a] != naive_sum(3, a as u64))
        .count();
    let mut multiset = BTreeMap::new();
    for a in 0..spectrum.len() {
        *multiset.entry(spectrum.sums()[a]).or_insert(0) += 1;
    }
    // lambda = S / 8: {1 x1, 1/2 x6, 0 x1}
    let expected = BTreeMap::from([(0i64, 1), (4, 6), (8, 1)]);
    outcome(
        mismatches == 0 && multiset == expected && elapsed < Duration::from_secs(1),
        format!("S_A multiset {multiset:?}, oracle mismatches {mismatches}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut violations = 0u64;
    let mut checked = 0u64;
    for n in 2..=6 {
        let spectrum = full_spectrum(n).expect("n <= 6");
        for a in 0..spectrum.len() {
            let s = spectrum.sums()[a];
            let r = spectrum.rank(a) as i32;
            if s != naive_sum(n, a as u64) && n <= 4 {
                violations += 1;
            }
            // |S|^2 <= 2^{2n - r}
            if (s as i128).pow(2) > 1i128 << (2 * n as i32 - r) {
                violations += 1;
            }
            checked += 1;
        }
    }
    let mut r = rng::stream(2024, 7);
    let m7 = pair_count(7);
    for _ in 0..100_000 {
        let a = GraphLabel::from_index(7, r.gen::<u64>() & ((1 << m7) - 1)).unwrap();
        let s = character_sum(&a).unwrap();
        let rank = alternating_rank(&a) as i32;
        if (s as i128).pow(2) > 1i128 << (14 - rank) {
            violations += 1;
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && elapsed < Duration::from_secs(120),
        format!("{checked} labels, {violations} violations, {elapsed:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let spectrum = full_spectrum(3).unwrap();
    let mut worst = 0.0f64;
    let mut exact_ok = true;
    for t in 1..=10u32 {
        let expected = Dyadic::new(3, 2 + t as u64);
        let fourier_rational = exact_tv_dyadic(&spectrum, t).unwrap();
        let conv_rational = exact_evolution_rational(3, t).unwrap().tv_to_uniform();
        exact_ok &= fourier_rational == expected && conv_rational == expected;
        let fourier = exact_tv(&spectrum, t).unwrap();
        let conv = tv_to_uniform(&exact_evolution(3, t).unwrap());
        worst = worst
            .max((fourier - conv).abs())
            .max((fourier - expected.to_f64()).abs());
    }
    let mut monotone = true;
    for n in 2..=6 {
        let s = full_spectrum(n).unwrap();
        let mut prev = 1.0 - 2f64.powi(-(pair_count(n) as i32));
        let mut prev_exact: Option<Dyadic> = None;
        for t in 1..=3 * n as u32 {
            let d = exact_tv(&s, t).unwrap();
            monotone &= d <= prev + MONOTONE_SLACK;
            prev = d;
            if n <= 4 {
                let e = exact_tv_dyadic(&s, t).unwrap();
                if let Some(p) = &prev_exact {
                    monotone &= &e <= p;
                }
                prev_exact = Some(e);
            }
        }
    }
    outcome(
        exact_ok && worst <= AGREEMENT_TOL && monotone,
        format!("exact d_3 match {exact_ok}, max float disagreement {worst:e}, non-increasing n<=6: {monotone}"),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let c = uppertail_constant();
    let mut violations = Vec::new();
    let mut tightest = 0.0f64;
    for n in 4..=7 {
        let s = full_spectrum(n).unwrap();
        for cc in 0..=8u32 {
            let d = exact_tv(&s, n as u32 + cc).unwrap();
            let bound = c.c * 2f64.powi(-(cc as i32));
            tightest = tightest.max(d / bound);
            if d > bound {
                violations.push((n, cc));
            }
        }
    }
    let elapsed = start.elapsed();
    let c0_ok = (c.c0 - C0_EXPECTED).abs() < C0_TOL;
    outcome(
        violations.is_empty() && c0_ok && elapsed < Duration::from_secs(600),
        format!(
            "C0 = {:.6}, C = {:.6}, violations {violations:?}, max d/bound {tightest:.4}, {elapsed:.2?}",
            c.c0, c.c
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut worst_estimate = 0.0f64;
    for n in 2..=64 {
        worst_estimate = worst_estimate.max(rank_grouped_l2_sum(n, n as u64 - 1).to_f64());
    }
    let mut exact_ok = true;
    let mut worst_alpha = 0.0f64;
    for n in 2..=7 {
        let s = full_spectrum(n).unwrap();
        match pre_cutoff_l2_sum(n, Some(&s)) {
            Ok(p) => {
                let exact = p.exact_sum.expect("spectrum supplied");
                exact_ok &= exact <= p.estimate;
                worst_alpha = worst_alpha.max(0.5 * exact.to_f64().sqrt());
            }
            Err(_) => exact_ok = false,
        }
    }
    outcome(
        worst_estimate < PRE_CUTOFF_SUM_LIMIT && exact_ok && worst_alpha < PRE_CUTOFF_ALPHA,
        format!("max estimate n<=64 {worst_estimate:.6}, exact <= estimate n<=7: {exact_ok}, max 1/2 sqrt(exact) {worst_alpha:.6}"),
    )
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 1..=7 {
        let census = alternating_census(n).unwrap();
        let m = pair_count(n);
        ok &= census.total() as u128 == 1u128 << m;
        for r in (0..=n).step_by(2) {
            ok &= BigUint::from(census.count(r)) <= alt_count_bound(n, r).unwrap();
        }
        ok &= census.counts.keys().all(|r| r % 2 == 0);
        if (2..=6).contains(&n) {
            let spectral: BTreeMap<usize, u64> = full_spectrum(n).unwrap().rank_histogram();
            let same = spectral == census.counts;
            ok &= same;
            if !same {
                notes.push(format!("n={n} histogram mismatch"));
            }
        }
    }
    let n7 = alternating_census(7).unwrap();
    outcome(
        ok,
        format!("n=7 census {:?} {}", n7.counts, notes.join("; ")),
    )
}

fn criterion_7() -> Outcome {
    let n = 20;
    let mut ok = true;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut levels = 0;
    for seed in [1u64, 2, 3] {
        let est = sample_symmetric_rank_tail(n, 100_000, seed).unwrap();
        for row in &est.rows {
            let bound = row.bound.to_f64();
            if bound >= 1.0 {
                continue;
            }
            levels += 1;
            let margin = row.estimate - (bound + 3.0 * row.std_error);
            worst_margin = worst_margin.max(margin);
            ok &= margin <= 0.0;
        }
    }
    outcome(ok, format!("{levels} (seed, s) levels with bound < 1, max excess over bound + 3 se: {worst_margin:e}"))
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut sizes = Vec::new();
    for n in 2..=5 {
        let bfs = CayleyBfs::from_reference(n).unwrap();
        let diameter = bfs.diameter();
        for t in 0..=diameter.max(n as u32) {
            if t as usize <= n {
                let bound = ball_volume_bound(n, n - t as usize).unwrap();
                ok &= Dyadic::from_int(bfs.ball_size(t) as i64) <= bound;
            }
            let law = exact_evolution(n, t).unwrap();
            for (z, &p) in law.iter().enumerate() {
                let outside =
                    bfs.distance(&invwalk_core::Gf2Vector::from_word(pair_count(n), z as u64)) > t;
                if outside && p != 0.0 {
                    ok = false;
                }
            }
        }
        sizes.push((n, bfs.ball_sizes()));
    }
    outcome(
        ok,
        format!("ball sizes {sizes:?}; support contained in B_t"),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let reports = match hk_sweep(10, Some((100, 9))) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let failing: Vec<(usize, usize)> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| (r.n, r.k))
        .collect();
    let all_members = reports
        .iter()
        .all(|r| r.membership_checked == 100 && r.membership_passed == 100);
    let mut boundary_ok = true;
    for n in 2..=12usize {
        let expect_n_minus_1 = if n % 2 == 1 { n } else { n - 1 };
        for (k, expected) in [(0, 0), (1, 0), (n - 1, expect_n_minus_1), (n, 1)] {
            // k <= 1 wins when it coincides with n - 1 or n
            let expected = if k <= 1 { 0 } else { expected };
            boundary_ok &= boundary_dims(n, k).ok() == Some(expected);
        }
        // at n = 2 the complements are single vertices and every generator is zero
        if n >= 3 {
            let expected: Vec<u64> = if n % 2 == 0 {
                vec![(1 << n) - 1]
            } else {
                vec![]
            };
            boundary_ok &= complement_generator_relations(n).unwrap() == expected;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failing.is_empty() && all_members && boundary_ok && elapsed < Duration::from_secs(300),
        format!(
            "{} (n,k) pairs, failing {failing:?}, membership 100/100 each: {all_members}, boundary n<=12: {boundary_ok}, {elapsed:.2?}",
            reports.len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let gaps: Vec<(usize, Dyadic)> = (3..=7)
        .map(|n| (n, spectral_gap(&full_spectrum(n).unwrap()).unwrap()))
        .collect();
    let ok = gaps.iter().all(|(_, g)| *g == Dyadic::pow2(-1));
    outcome(
        ok,
        format!(
            "gaps {:?}",
            gaps.iter()
                .map(|(n, g)| format!("n={n}: {g}"))
                .collect::<Vec<_>>()
        ),
    )
}

fn criterion_11() -> Outcome {
    let m = 15;
    let early = hypercube_time(m, 0.2);
    let late = hypercube_time(m, 3.0);
    let p = hypercube_profile(m, 100_000, &[early, late], 15).unwrap();
    let (a, b) = (&p.rows[0], &p.rows[1]);
    outcome(
        a.statistic > 0.9 && b.statistic < 0.05,
        format!(
            "t={early}: {:.4} (exact {:.4}), t={late}: {:.4} (exact {:.2e})",
            a.statistic, a.exact, b.statistic, b.exact
        ),
    )
}

fn run_cli(args: &[&str], threads: &str) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_invwalk"))
        .arg("--threads")
        .arg(threads)
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

fn criterion_12() -> Outcome {
    let invocations: &[&[&str]] = &[
        &["spectrum", "--n", "4"],
        &["tv", "--n", "5", "--t-max", "15"],
        &[
            "profile", "--n", "4", "--t-max", "8", "--trials", "20000", "--seed", "3",
        ],
        &["hk", "--n", "8", "--k", "5", "--seed", "4"],
        &[
            "hk-sweep",
            "--n-max",
            "7",
            "--samples",
            "20",
            "--boundary-n-max",
            "8",
        ],
        &["altcount", "--n", "5"],
        &["ranktail", "--n", "16", "--trials", "10000", "--seed", "5"],
        &["ball", "--n", "4"],
        &[
            "simulate",
            "--variant",
            "full",
            "--n",
            "4",
            "--t",
            "3",
            "--trials",
            "20000",
            "--seed",
            "6",
        ],
        &[
            "simulate",
            "--variant",
            "k",
            "--n",
            "5",
            "--k",
            "3",
            "--t",
            "4",
            "--trials",
            "20000",
            "--seed",
            "6",
        ],
        &[
            "simulate",
            "--variant",
            "hypercube",
            "--m",
            "12",
            "--t",
            "20",
            "--trials",
            "20000",
            "--seed",
            "6",
        ],
    ];
    let mut differing = Vec::new();
    for args in invocations {
        let a = run_cli(args, "1");
        let b = run_cli(args, "4");
        let c = run_cli(args, "4");
        if a.0 != Some(0) || a != b || b != c {
            differing.push(args[0]);
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} invocations byte-identical across --threads 1/4 and repeats; differing {differing:?}", invocations.len()),
    )
}

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("exact spectrum n=3", criterion_1),
        ("Gauss-sum rank bound", criterion_2),
        ("exact TV curve and monotonicity", criterion_3),
        ("upper tail above t = n", criterion_4),
        ("L2 sum one step before t = n", criterion_5),
        ("alternating-form census", criterion_6),
        ("symmetric rank tail n=20", criterion_7),
        ("inversion balls and support", criterion_8),
        ("H_k = V_k sweep n<=10 and boundary cases", criterion_9),
        ("spectral gap 1/2", criterion_10),
        ("lazy hypercube baseline m=15", criterion_11),
        ("byte-identical CLI output", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[{status}] criterion {:>2}: {name} ({:.2?}) :: {}",
            i + 1,
            start.elapsed(),
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
