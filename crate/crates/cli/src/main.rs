//! `invwalk`: command-line front end for the inversion-walk toolkit.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use invwalk_core::encoding::{pair_count, CayleyBfs};
use invwalk_core::rank_stats::{
    alt_count_bound_exponent, alternating_census, alternating_census_long, ball_volume_bound,
    sample_symmetric_rank_tail,
};
use invwalk_core::restricted::{
    boundary_dims, complement_generator_relations, hk_sweep, verify_hk_equals_vk,
};
use invwalk_core::spectral::{exact_tv_dyadic, full_spectrum, MAX_EXACT_RATIONAL_VERTICES};
use invwalk_core::walk_sim::{cutoff_profile, simulate, Variant, WalkConfig};
use invwalk_core::{Dyadic, Error};

use output::{cell, emit, opt_cell, render_csv, render_json, Format, Header, Table};

#[derive(Parser, Debug)]
#[command(
    name = "invwalk",
    version,
    about = "Spectra, mixing profiles and subgroup checks for the random inversion walk on tournaments"
)]
struct Cli {
    /// Worker threads (default: all cores). Does not change any output.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Every eigenvalue S_A / 2^n with the rank of A.
    Spectrum(SpectrumArgs),
    /// Exact total-variation distance and bounds over a range of t.
    Tv(TvArgs),
    /// Cutoff profile: exact distance, L2 bound and the two tail bounds.
    Profile(ProfileArgs),
    /// Check that the k-clique subgroup equals its parity description.
    Hk(HkArgs),
    /// `hk` for every 4 <= n <= n-max, 2 <= k <= n-2, plus boundary cases.
    HkSweep(HkSweepArgs),
    /// Census of alternating forms by rank against the count bound.
    Altcount(AltcountArgs),
    /// Sampled rank tail of random symmetric matrices.
    Ranktail(RanktailArgs),
    /// Inversion-ball sizes against the volume bound.
    Ball(BallArgs),
    /// Seeded simulation of the walk or one of its variants.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    #[arg(long)]
    n: usize,
    /// Include one row per label in JSON output (CSV always has them).
    #[arg(long)]
    rows: bool,
}

#[derive(Args, Debug, Serialize)]
struct TvArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    t_min: u32,
    #[arg(long)]
    t_max: u32,
}

#[derive(Args, Debug, Serialize)]
struct ProfileArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t_max: u32,
    /// Monte-Carlo trials for the frequency estimate column (n <= 5).
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Shorthand for `--format csv --out PATH`.
    #[arg(long)]
    #[serde(skip)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct HkArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Random members of V_k to test for membership.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct HkSweepArgs {
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest n for the boundary cases k in {0, 1, n-1, n}.
    #[arg(long, default_value_t = 12)]
    boundary_n_max: usize,
}

#[derive(Args, Debug, Serialize)]
struct AltcountArgs {
    #[arg(long)]
    n: usize,
    /// Allow n = 8 (2^28 matrices).
    #[arg(long)]
    long: bool,
}

#[derive(Args, Debug, Serialize)]
struct RanktailArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct BallArgs {
    #[arg(long)]
    n: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum VariantArg {
    Full,
    K,
    Hypercube,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    variant: VariantArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    t: u32,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Shorthand for `--format json --out PATH`.
    #[arg(long)]
    #[serde(skip)]
    json: Option<PathBuf>,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) => 2,
            Error::Capacity { .. } | Error::Overflow(_) => 3,
            Error::Verification(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(flag: &str, msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: format!("invalid input for {flag}: {msg}"),
    }
}

/// A rendered artifact and whether it reports a failed verification.
struct Artifact {
    text: String,
    verified: bool,
}

fn finish(
    header: Header,
    format: Format,
    table: Option<Table>,
    json: Value,
) -> Result<Artifact, Failure> {
    let text = match (format, table) {
        (Format::Csv, Some(t)) => render_csv(&header, &t),
        (Format::Csv, None) => {
            return Err(input_error(
                "--format",
                format!("`{}` has no CSV form; use json", header.command),
            ));
        }
        (Format::Json, _) => render_json(&header, json),
    };
    Ok(Artifact {
        text,
        verified: true,
    })
}

fn dyadic_cell(d: &Dyadic) -> String {
    cell(d.to_f64())
}

fn run_spectrum(args: &SpectrumArgs, format: Format) -> Result<Artifact, Failure> {
    let spectrum = full_spectrum(args.n)?;
    let header = Header::new("spectrum", args, format);
    let mut table = Table::new(&["A", "rank", "S_A", "lambda"]);
    if format == Format::Csv {
        for a in 0..spectrum.len() {
            table.push(vec![
                format!("{a:#x}"),
                cell(spectrum.rank(a)),
                cell(spectrum.sums()[a]),
                cell(spectrum.eigenvalue(a).to_f64()),
            ]);
        }
    }
    let mut result = json!({
        "n": args.n,
        "m": spectrum.m(),
        "sum_histogram": spectrum.sum_histogram().into_iter().map(|(s, c)| json!({"S_A": s, "count": c})).collect::<Vec<_>>(),
        "rank_histogram": spectrum.rank_histogram().into_iter().map(|(r, c)| json!({"rank": r, "count": c})).collect::<Vec<_>>(),
    });
    if args.rows {
        result["rows"] = (0..spectrum.len())
            .map(|a| {
                json!({
                    "A": format!("{a:#x}"),
                    "rank": spectrum.rank(a),
                    "S_A": spectrum.sums()[a],
                    "lambda": spectrum.eigenvalue(a).to_dyadic(),
                })
            })
            .collect();
    }
    finish(header, format, Some(table), result)
}

fn run_tv(args: &TvArgs, format: Format) -> Result<Artifact, Failure> {
    if args.t_min > args.t_max {
        return Err(input_error("--t-min", "must not exceed --t-max"));
    }
    let profile = cutoff_profile(args.n, args.t_max, None)?;
    let spectrum = if args.n <= MAX_EXACT_RATIONAL_VERTICES {
        Some(full_spectrum(args.n)?)
    } else {
        None
    };
    let header = Header::new("tv", args, format);
    let mut table = Table::new(&["t", "d_exact", "l2_upper", "paper_upper", "paper_lower"]);
    let mut rows = Vec::new();
    for row in profile.rows.iter().filter(|r| r.t >= args.t_min) {
        table.push(vec![
            cell(row.t),
            opt_cell(row.d_exact),
            cell(row.d_l2_upper),
            opt_cell(row.d_paper_upper),
            opt_cell(row.d_paper_lower),
        ]);
        let rational = match &spectrum {
            Some(_) if row.t == 0 => {
                Some(&Dyadic::one() - &Dyadic::pow2(-(pair_count(args.n) as i64)))
            }
            Some(s) => Some(exact_tv_dyadic(s, row.t)?),
            None => None,
        };
        rows.push(json!({
            "t": row.t,
            "d_exact": row.d_exact,
            "d_exact_rational": rational,
            "l2_upper": row.d_l2_upper,
            "paper_upper": row.d_paper_upper,
            "paper_lower": row.d_paper_lower,
        }));
    }
    let result = json!({"n": args.n, "rows": rows, "missing": profile.missing});
    finish(header, format, Some(table), result)
}

fn run_profile(args: &ProfileArgs, format: Format) -> Result<Artifact, Failure> {
    let mc = args.trials.map(|t| (t, args.seed));
    if args.trials == Some(0) {
        return Err(input_error("--trials", "must be at least 1"));
    }
    let profile = cutoff_profile(args.n, args.t_max, mc)?;
    let header = Header::new("profile", args, format);
    let mut table = Table::new(&[
        "t",
        "d_exact",
        "d_l2_upper",
        "d_paper_upper",
        "d_paper_lower",
        "d_mc_estimate",
    ]);
    for row in &profile.rows {
        table.push(vec![
            cell(row.t),
            opt_cell(row.d_exact),
            cell(row.d_l2_upper),
            opt_cell(row.d_paper_upper),
            opt_cell(row.d_paper_lower),
            opt_cell(row.d_mc_estimate),
        ]);
    }
    let result = serde_json::to_value(&profile).expect("profile serializes");
    finish(header, format, Some(table), result)
}

fn boundary_case(n: usize, k: usize) -> bool {
    k <= 1 || k + 1 >= n
}

fn run_hk(args: &HkArgs, format: Format) -> Result<Artifact, Failure> {
    let header = Header::new("hk", args, format);
    if boundary_case(args.n, args.k) && args.k <= args.n {
        let dim = boundary_dims(args.n, args.k)?;
        let result =
            json!({"n": args.n, "k": args.k, "boundary": true, "dimension": dim, "pass": true});
        return finish(header, format, None, result);
    }
    let report = verify_hk_equals_vk(args.n, args.k, Some((args.samples, args.seed)))?;
    let pass = report.pass;
    let mut artifact = finish(
        header,
        format,
        None,
        serde_json::to_value(&report).expect("report serializes"),
    )?;
    artifact.verified = pass;
    Ok(artifact)
}

fn run_hk_sweep(args: &HkSweepArgs, format: Format) -> Result<Artifact, Failure> {
    if args.n_max < 4 {
        return Err(input_error("--n-max", "must be at least 4"));
    }
    let reports = hk_sweep(args.n_max, Some((args.samples, args.seed)))?;
    let mut boundary = Vec::new();
    let mut boundary_pass = true;
    for n in 2..=args.boundary_n_max {
        let mut ks: Vec<usize> = vec![0, 1, n - 1, n];
        ks.dedup();
        let dims = ks
            .iter()
            .map(|&k| Ok(json!({"k": k, "dimension": boundary_dims(n, k)?})))
            .collect::<Result<Vec<_>, Error>>()?;
        let relations = complement_generator_relations(n)?;
        let expected: Vec<u64> = if n % 2 == 0 {
            vec![(1u64 << n) - 1]
        } else {
            vec![]
        };
        // at n = 2 the complements are single vertices, so every subset is a relation
        let relation_ok = n < 3 || relations == expected;
        boundary_pass &= relation_ok;
        boundary.push(json!({
            "n": n,
            "dims": dims,
            "complement_relations": relations.iter().map(|r| format!("{r:#x}")).collect::<Vec<_>>(),
            "relation_as_expected": relation_ok,
        }));
    }
    let pass = boundary_pass && reports.iter().all(|r| r.pass);
    let header = Header::new("hk-sweep", args, format);
    let mut table = Table::new(&[
        "n",
        "k",
        "k_mod_4",
        "wilson_rank",
        "elimination_rank",
        "vk_dim",
        "generators_in_vk",
        "membership_checked",
        "membership_passed",
        "pass",
    ]);
    for r in &reports {
        table.push(vec![
            cell(r.n),
            cell(r.k),
            cell(r.k_mod_4),
            cell(r.wilson_rank),
            cell(r.elimination_rank),
            cell(r.vk_dim),
            cell(r.generators_in_vk),
            cell(r.membership_checked),
            cell(r.membership_passed),
            cell(r.pass),
        ]);
    }
    let result = json!({"pass": pass, "pairs": reports, "boundary": boundary});
    let mut artifact = finish(header, format, Some(table), result)?;
    artifact.verified = pass;
    Ok(artifact)
}

fn run_altcount(args: &AltcountArgs, format: Format) -> Result<Artifact, Failure> {
    let census = if args.long {
        alternating_census_long(args.n)?
    } else {
        alternating_census(args.n)?
    };
    let m = pair_count(args.n) as u32;
    let total_ok = census.total() as u128 == 1u128 << m;
    let header = Header::new("altcount", args, format);
    let mut table = Table::new(&["r", "count", "bound_log2", "dominated"]);
    let mut rows = Vec::new();
    let mut all_dominated = true;
    for r in (0..=args.n).step_by(2) {
        let count = census.count(r);
        let exp = alt_count_bound_exponent(args.n, r)?;
        let dominated = exp >= 64 || count <= 1u64 << exp;
        all_dominated &= dominated;
        table.push(vec![cell(r), cell(count), cell(exp), cell(dominated)]);
        rows.push(json!({"r": r, "count": count, "bound_log2": exp, "dominated": dominated}));
    }
    let result = json!({
        "n": args.n,
        "total": census.total(),
        "total_is_2_pow_m": total_ok,
        "rows": rows,
    });
    let mut artifact = finish(header, format, Some(table), result)?;
    artifact.verified = total_ok && all_dominated;
    Ok(artifact)
}

fn run_ranktail(args: &RanktailArgs, format: Format) -> Result<Artifact, Failure> {
    if args.trials == 0 {
        return Err(input_error("--trials", "must be at least 1"));
    }
    let est = sample_symmetric_rank_tail(args.n, args.trials, args.seed)?;
    let header = Header::new("ranktail", args, format);
    let mut table = Table::new(&["s", "hits", "estimate", "ci_low", "ci_high", "bound"]);
    for r in &est.rows {
        table.push(vec![
            cell(r.s),
            cell(r.hits),
            cell(r.estimate),
            cell(r.ci_low),
            cell(r.ci_high),
            dyadic_cell(&r.bound),
        ]);
    }
    finish(
        header,
        format,
        Some(table),
        serde_json::to_value(&est).expect("estimate serializes"),
    )
}

fn run_ball(args: &BallArgs, format: Format) -> Result<Artifact, Failure> {
    let bfs = CayleyBfs::from_reference(args.n)?;
    let sizes = bfs.ball_sizes();
    let header = Header::new("ball", args, format);
    let mut table = Table::new(&["t", "ball_size", "bound"]);
    let mut rows = Vec::new();
    let mut dominated = true;
    for (t, &size) in sizes.iter().enumerate() {
        let bound = if t <= args.n {
            Some(ball_volume_bound(args.n, args.n - t)?)
        } else {
            None
        };
        if let Some(b) = &bound {
            dominated &= &Dyadic::from_int(size as i64) <= b;
        }
        table.push(vec![
            cell(t),
            cell(size),
            opt_cell(bound.as_ref().map(|b| b.to_f64())),
        ]);
        rows.push(json!({"t": t, "ball_size": size, "bound": bound}));
    }
    let result = json!({
        "n": args.n,
        "m": pair_count(args.n),
        "diameter": bfs.diameter(),
        "rows": rows,
        "bound_dominates": dominated,
    });
    let mut artifact = finish(header, format, Some(table), result)?;
    artifact.verified = dominated;
    Ok(artifact)
}

fn run_simulate(args: &SimulateArgs, format: Format) -> Result<Artifact, Failure> {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| input_error(flag, "is required for this variant"))
    };
    let variant = match args.variant {
        VariantArg::Full => Variant::Full {
            n: need(args.n, "--n")?,
        },
        VariantArg::K => Variant::Restricted {
            n: need(args.n, "--n")?,
            k: need(args.k, "--k")?,
        },
        VariantArg::Hypercube => Variant::LazyHypercube {
            m: need(args.m, "--m")?,
        },
    };
    if args.trials == 0 {
        return Err(input_error("--trials", "must be at least 1"));
    }
    let config = WalkConfig {
        variant,
        t_max: args.t,
        trials: args.trials,
        seed: args.seed,
    };
    let report = simulate(&config, args.t)?;
    let header = Header::new("simulate", args, format);
    finish(
        header,
        format,
        None,
        serde_json::to_value(&report).expect("report serializes"),
    )
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(input_error("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| input_error("--threads", e))?;
    }
    let mut out = cli.out.clone();
    let mut shorthand =
        |path: &Option<PathBuf>, flag: &str, fmt: Format| -> Result<Option<Format>, Failure> {
            match path {
                Some(p) => {
                    if out.is_some() {
                        return Err(input_error(flag, "conflicts with --out"));
                    }
                    if cli.format.is_some_and(|f| f != fmt) {
                        return Err(input_error(flag, "conflicts with --format"));
                    }
                    out = Some(p.clone());
                    Ok(Some(fmt))
                }
                None => Ok(None),
            }
        };
    let artifact = match &cli.command {
        Command::Profile(a) => {
            let forced = shorthand(&a.csv, "--csv", Format::Csv)?;
            let format = forced.or(cli.format).unwrap_or(Format::Csv);
            run_profile(a, format)?
        }
        Command::Simulate(a) => {
            let forced = shorthand(&a.json, "--json", Format::Json)?;
            let format = forced.or(cli.format).unwrap_or(Format::Json);
            run_simulate(a, format)?
        }
        Command::Spectrum(a) => run_spectrum(a, cli.format.unwrap_or(Format::Csv))?,
        Command::Tv(a) => run_tv(a, cli.format.unwrap_or(Format::Csv))?,
        Command::Hk(a) => run_hk(a, cli.format.unwrap_or(Format::Json))?,
        Command::HkSweep(a) => run_hk_sweep(a, cli.format.unwrap_or(Format::Json))?,
        Command::Altcount(a) => run_altcount(a, cli.format.unwrap_or(Format::Csv))?,
        Command::Ranktail(a) => run_ranktail(a, cli.format.unwrap_or(Format::Csv))?,
        Command::Ball(a) => run_ball(a, cli.format.unwrap_or(Format::Csv))?,
    };
    emit(&artifact.text, out.as_deref()).map_err(|e| Failure {
        code: 1,
        message: format!("cannot write output: {e}"),
    })?;
    if !artifact.verified {
        return Err(Failure {
            code: 4,
            message: "verification failed; see the report".into(),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
