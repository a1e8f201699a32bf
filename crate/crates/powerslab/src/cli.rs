//! Command-line interface: every analysis is exposed as a subcommand that
//! prints one report table to stdout in JSON (default), CSV, or Markdown.
//!
//! Exit codes: `0` success, `1` invalid arguments (message on stderr,
//! nothing on stdout), `2` configuration or computation failure.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::factor::FactorCache;
use crate::interval::Interval;
use crate::linnik::{criterion_lhs, make_linnik_table, LinnikConstants};
use crate::report::{serialize, Cell, ColumnKind, Format, Meta, Provenance, ReportTable};
use crate::romanov::{
    density_lower_bound, density_lower_bound_with_csv, make_romanov_table, RomanovConfig,
};
use crate::sigma::compute_c0;
use crate::spectra::{estimate_ak, truncation_cap};

const DEFAULT_PRIME_LIMIT: u64 = 10_000_000;
const DEFAULT_TOL: f64 = 1e-6;
const SAMPLE_SEED: u64 = 0x706f_7765;
/// Hard cap on empirical sieve sizes (the bit sieve stays near 12 MB).
const MAX_SIEVE: u64 = 100_000_000;

#[derive(Copy, Clone, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Md,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Md => Format::Md,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "powerslab",
    version,
    about = "Sieve-theoretic bounds for primes plus powers of two",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    /// Output format for the report table.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: FormatArg,
    /// Worker threads (default: available parallelism). Results are
    /// identical for every thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for the persistent factorization cache
    /// (fallback: the POWERSLAB_CACHE_DIR environment variable).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the reference constants with their enclosures.
    Constants {
        /// Sieve bound for the twin-prime-constant product.
        #[arg(long, default_value_t = DEFAULT_PRIME_LIMIT)]
        prime_limit: u64,
    },
    /// Estimate the power-sum constant A(k) at truncation level L.
    Ak {
        /// Number of powers of two per representation (1..=4).
        #[arg(long)]
        k: u32,
        /// Largest exponent kept (default: the per-k truncation cap).
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_PRIME_LIMIT)]
        prime_limit: u64,
    },
    /// Two-primes-plus-K-powers criterion.
    Linnik {
        #[command(subcommand)]
        cmd: LinnikCmd,
    },
    /// Residue-class density lower bounds.
    Romanov {
        #[command(subcommand)]
        cmd: RomanovCmd,
    },
    /// Finite-range experiments.
    Empirical {
        #[command(subcommand)]
        cmd: EmpiricalCmd,
    },
}

#[derive(Subcommand)]
enum LinnikCmd {
    /// Evaluate the criterion at a given K and sieve constant.
    Check {
        /// Total number of powers of two (2..=8).
        #[arg(long = "K")]
        k_total: u32,
        /// Assume the Riemann Hypothesis cutoff.
        #[arg(long)]
        grh: bool,
        /// Sieve constant level C1.
        #[arg(long, default_value_t = 6.7814)]
        c1: f64,
        #[arg(long, default_value_t = DEFAULT_PRIME_LIMIT)]
        prime_limit: u64,
    },
    /// Maximal admissible C1 for K = 2..=8, both assumptions.
    Table {
        /// Bisection tolerance.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_PRIME_LIMIT)]
        prime_limit: u64,
    },
}

#[derive(Subcommand)]
enum RomanovCmd {
    /// Density lower bound at one sieve-constant level.
    Bound {
        /// Modulus exponent: classes are taken mod 2^m − 1.
        #[arg(long, default_value_t = 24)]
        m: u32,
        /// Sieve constant level C1 (>= 2).
        #[arg(long)]
        c1: f64,
        /// Second-moment table file for m != 24: lines of `divisor value`.
        #[arg(long)]
        s_table: Option<PathBuf>,
        /// Second-moment constant for m != 24.
        #[arg(long)]
        c3: Option<f64>,
        /// Stream per-class statistics (classes with at least one valid
        /// pair) to this CSV file; forces a single-threaded scan.
        #[arg(long)]
        per_class_csv: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PRIME_LIMIT)]
        prime_limit: u64,
    },
    /// Density lower bounds at the six published C1 levels.
    Table {
        #[arg(long, default_value_t = DEFAULT_PRIME_LIMIT)]
        prime_limit: u64,
    },
}

#[derive(Subcommand)]
enum EmpiricalCmd {
    /// Observed density of integers representable as a prime plus
    /// k powers of two.
    Romanov {
        /// Scan range upper end.
        #[arg(long)]
        limit: u64,
        /// Powers of two per representation.
        #[arg(long, default_value_t = 1)]
        k_powers: u32,
        /// Report densities at these points (default: only at --limit).
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
    },
    /// Goldbach pair counts against the Hardy-Littlewood prediction.
    Goldbach {
        /// Single even number to analyse.
        #[arg(long, conflicts_with_all = ["sample", "min", "max"])]
        n: Option<u64>,
        /// Analyse this many pseudo-randomly sampled even numbers instead.
        #[arg(long, requires = "min", requires = "max")]
        sample: Option<u64>,
        /// Sampling range lower end.
        #[arg(long)]
        min: Option<u64>,
        /// Sampling range upper end.
        #[arg(long)]
        max: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_PRIME_LIMIT)]
        prime_limit: u64,
    },
    /// Count primes p <= n in a residue class with p + h also prime.
    Gaps {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        h: u64,
        /// Restrict to a residue class modulo this value.
        #[arg(long = "mod", default_value_t = 1)]
        modulus: u64,
        /// Residue of the class (must be coprime to the modulus).
        #[arg(long = "res", default_value_t = 0)]
        residue: u64,
    },
}

/// Entry point used by `main`: parse `std::env::args` and run.
pub fn run_main() -> i32 {
    run(std::env::args())
}

/// Parse `argv`, execute the command, print the report, return the exit
/// code. Nothing is written to stdout on failure.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("powerslab: --threads must be at least 1");
            return 1;
        }
        // Ignore the error: the global pool can already exist in-process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let started = std::time::Instant::now();
    match execute(&cli) {
        Ok((table, mut meta)) => {
            meta.runtime_ms = started.elapsed().as_millis();
            match serialize(&table, cli.format.into(), &meta) {
                Ok(text) => {
                    print!("{text}");
                    0
                }
                Err(e) => {
                    eprintln!("powerslab: {e}");
                    2
                }
            }
        }
        Err(e) => {
            eprintln!("powerslab: {e}");
            match e {
                Error::InvalidArgument(_) => 1,
                _ => 2,
            }
        }
    }
}

fn open_cache(cli: &Cli) -> Result<Option<FactorCache>> {
    let dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("POWERSLAB_CACHE_DIR").map(PathBuf::from));
    dir.as_deref().map(FactorCache::open).transpose()
}

fn execute(cli: &Cli) -> Result<(ReportTable, Meta)> {
    let cache = open_cache(cli)?;
    let result = match &cli.command {
        Command::Constants { prime_limit } => cmd_constants(*prime_limit),
        Command::Ak { k, l, prime_limit } => cmd_ak(*k, *l, *prime_limit, cache.as_ref()),
        Command::Linnik { cmd } => match cmd {
            LinnikCmd::Check {
                k_total,
                grh,
                c1,
                prime_limit,
            } => cmd_linnik_check(*k_total, *grh, *c1, *prime_limit),
            LinnikCmd::Table { tol, prime_limit } => cmd_linnik_table(*tol, *prime_limit),
        },
        Command::Romanov { cmd } => match cmd {
            RomanovCmd::Bound {
                m,
                c1,
                s_table,
                c3,
                per_class_csv,
                prime_limit,
            } => cmd_romanov_bound(
                *m,
                *c1,
                s_table.as_deref(),
                *c3,
                per_class_csv.as_deref(),
                *prime_limit,
                cache.as_ref(),
                cli.threads,
            ),
            RomanovCmd::Table { prime_limit } => {
                cmd_romanov_table(*prime_limit, cache.as_ref(), cli.threads)
            }
        },
        Command::Empirical { cmd } => match cmd {
            EmpiricalCmd::Romanov {
                limit,
                k_powers,
                checkpoints,
            } => cmd_empirical_romanov(*limit, *k_powers, checkpoints),
            EmpiricalCmd::Goldbach {
                n,
                sample,
                min,
                max,
                prime_limit,
            } => cmd_empirical_goldbach(*n, *sample, *min, *max, *prime_limit),
            EmpiricalCmd::Gaps {
                n,
                h,
                modulus,
                residue,
            } => cmd_empirical_gaps(*n, *h, *modulus, *residue),
        },
    };
    if let Some(cache) = &cache {
        cache.save()?;
    }
    result
}

fn meta_with(extra: &[(&str, serde_json::Value)]) -> Meta {
    let mut meta = Meta::new(0);
    for (k, v) in extra {
        meta = meta.with(k, v.clone());
    }
    meta
}

fn cmd_constants(prime_limit: u64) -> Result<(ReportTable, Meta)> {
    let c0 = compute_c0(prime_limit)?;
    let constants = LinnikConstants::reference(c0);
    let mut table = ReportTable::new(
        "Reference constants",
        &[
            ("name", ColumnKind::Text),
            ("lo", ColumnKind::Real),
            ("hi", ColumnKind::Real),
        ],
    );
    let mut push = |name: &str, iv: Interval, prov: Provenance| {
        table.push_row(
            vec![
                Cell::Text(name.to_string()),
                Cell::Real(iv.lo()),
                Cell::Real(iv.hi()),
            ],
            prov,
        );
    };
    push("C0", constants.c0, Provenance::PaperReproduction);
    push("R0", constants.r0, Provenance::PaperReproduction);
    push("C1_grh", constants.c1_grh, Provenance::PaperReproduction);
    push(
        "C1_unconditional",
        constants.c1_uncond,
        Provenance::PaperReproduction,
    );
    for (i, bracket) in constants.a_brackets.iter().enumerate() {
        push(
            &format!("A{}", i + 1),
            *bracket,
            Provenance::PaperReproduction,
        );
    }
    push(
        "C3",
        Interval::point(crate::romanov::C3_M24),
        Provenance::PaperReproduction,
    );
    for (g, s) in crate::romanov::S_TABLE_M24 {
        push(
            &format!("S{g}"),
            Interval::point(s),
            Provenance::PaperReproduction,
        );
    }
    push("log2", constants.log2, Provenance::Derived);
    push(
        "epsilon",
        Interval::point(constants.epsilon),
        Provenance::Heuristic,
    );
    let meta = meta_with(&[
        ("prime_limit", prime_limit.into()),
        ("epsilon", constants.epsilon.into()),
    ]);
    Ok((table, meta))
}

fn cmd_ak(
    k: u32,
    l: Option<u32>,
    prime_limit: u64,
    cache: Option<&FactorCache>,
) -> Result<(ReportTable, Meta)> {
    let l = match l {
        Some(l) => l,
        None => truncation_cap(k)?,
    };
    let c0 = compute_c0(prime_limit)?;
    let est = estimate_ak(k, l, c0, cache)?;
    let bracket = est
        .paper_bracket
        .expect("every accepted k has a published bracket");
    let mut table = ReportTable::new(
        "Power-sum constant estimate",
        &[
            ("k", ColumnKind::Int),
            ("L", ColumnKind::Int),
            ("S_lo", ColumnKind::Real),
            ("S_hi", ColumnKind::Real),
            ("A_lo", ColumnKind::Real),
            ("A_hi", ColumnKind::Real),
            ("paper_lo", ColumnKind::Real),
            ("paper_hi", ColumnKind::Real),
        ],
    );
    table.push_row(
        vec![
            Cell::Int(k as i64),
            Cell::Int(l as i64),
            Cell::Real(est.s_value.lo()),
            Cell::Real(est.s_value.hi()),
            Cell::Real(est.estimate.lo()),
            Cell::Real(est.estimate.hi()),
            Cell::Real(bracket.lo()),
            Cell::Real(bracket.hi()),
        ],
        Provenance::Derived,
    );
    let meta = meta_with(&[
        ("prime_limit", prime_limit.into()),
        ("truncation_cap", truncation_cap(k)?.into()),
    ]);
    Ok((table, meta))
}

fn assumption_name(grh: bool) -> &'static str {
    if grh {
        "grh"
    } else {
        "unconditional"
    }
}

fn cmd_linnik_check(k_total: u32, grh: bool, c1: f64, prime_limit: u64) -> Result<(ReportTable, Meta)> {
    let c0 = compute_c0(prime_limit)?;
    let constants = LinnikConstants::reference(c0);
    let r = criterion_lhs(k_total, c1, grh, &constants)?;
    let mut table = ReportTable::new(
        "Criterion evaluation",
        &[
            ("K", ColumnKind::Int),
            ("assumption", ColumnKind::Text),
            ("C1", ColumnKind::Real),
            ("C2prime", ColumnKind::Real),
            ("lhs", ColumnKind::Real),
            ("satisfied", ColumnKind::Text),
        ],
    );
    table.push_row(
        vec![
            Cell::Int(r.k as i64),
            Cell::Text(assumption_name(grh).to_string()),
            Cell::Real(r.c1),
            Cell::Real(r.c2prime),
            Cell::Real(r.lhs),
            Cell::Text(r.satisfied.to_string()),
        ],
        Provenance::Derived,
    );
    let meta = meta_with(&[
        ("prime_limit", prime_limit.into()),
        ("epsilon", constants.epsilon.into()),
    ]);
    Ok((table, meta))
}

fn cmd_linnik_table(tol: f64, prime_limit: u64) -> Result<(ReportTable, Meta)> {
    let c0 = compute_c0(prime_limit)?;
    let constants = LinnikConstants::reference(c0);
    let table = make_linnik_table(&constants, tol)?;
    let meta = meta_with(&[
        ("prime_limit", prime_limit.into()),
        ("tol", tol.into()),
        ("epsilon", constants.epsilon.into()),
    ]);
    Ok((table, meta))
}

fn parse_s_table(path: &std::path::Path) -> Result<BTreeMap<u32, f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let entry = (|| -> Option<(u32, f64)> {
            let g = parts.next()?.parse().ok()?;
            let v = parts.next()?.parse().ok()?;
            parts.next().is_none().then_some((g, v))
        })();
        let (g, v) = entry.ok_or_else(|| {
            Error::config(format!(
                "{}:{}: expected `divisor value`, got {line:?}",
                path.display(),
                i + 1
            ))
        })?;
        if map.insert(g, v).is_some() {
            return Err(Error::config(format!(
                "{}: duplicate divisor {g}",
                path.display()
            )));
        }
    }
    Ok(map)
}

#[allow(clippy::too_many_arguments)]
fn cmd_romanov_bound(
    m: u32,
    c1: f64,
    s_table_path: Option<&std::path::Path>,
    c3: Option<f64>,
    per_class_csv: Option<&std::path::Path>,
    prime_limit: u64,
    cache: Option<&FactorCache>,
    threads: Option<usize>,
) -> Result<(ReportTable, Meta)> {
    let c0 = compute_c0(prime_limit)?;
    let config = match (s_table_path, c3) {
        (None, None) if m == 24 => RomanovConfig::default_m24(c1, c0, cache)?,
        (None, _) | (_, None) if m != 24 => {
            return Err(Error::config(format!(
                "no published second-moment data for m = {m}: supply both --s-table and --c3"
            )));
        }
        (Some(path), Some(c3)) => RomanovConfig::custom(m, c1, c3, parse_s_table(path)?, c0, cache)?,
        _ => {
            return Err(Error::config(
                "--s-table and --c3 must be given together",
            ));
        }
    };
    let result = match per_class_csv {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            let r = density_lower_bound_with_csv(&config, &mut file)?;
            std::io::Write::flush(&mut file)?;
            r
        }
        None => density_lower_bound(&config, threads)?,
    };
    let mut table = ReportTable::new(
        "Density lower bound",
        &[
            ("m", ColumnKind::Int),
            ("ell", ColumnKind::Int),
            ("C1", ColumnKind::Real),
            ("C3", ColumnKind::Real),
            ("phi_ell", ColumnKind::Int),
            ("d_lower", ColumnKind::Real),
            ("nonzero_classes", ColumnKind::Int),
        ],
    );
    let provenance = if m == 24 && s_table_path.is_none() {
        Provenance::PaperReproduction
    } else {
        Provenance::Derived
    };
    table.push_row(
        vec![
            Cell::Int(result.m as i64),
            Cell::Int(result.ell as i64),
            Cell::Real(result.c1),
            Cell::Real(result.c3),
            Cell::Int(result.phi_ell as i64),
            Cell::Real(result.d_lower),
            Cell::Int(result.class_count_nonzero as i64),
        ],
        provenance,
    );
    let meta = meta_with(&[
        ("prime_limit", prime_limit.into()),
        ("default_m", 24.into()),
    ]);
    Ok((table, meta))
}

fn cmd_romanov_table(
    prime_limit: u64,
    cache: Option<&FactorCache>,
    threads: Option<usize>,
) -> Result<(ReportTable, Meta)> {
    let c0 = compute_c0(prime_limit)?;
    let table = make_romanov_table(c0, cache, threads)?;
    let meta = meta_with(&[
        ("prime_limit", prime_limit.into()),
        ("default_m", 24.into()),
    ]);
    Ok((table, meta))
}

fn cmd_empirical_romanov(
    limit: u64,
    k_powers: u32,
    checkpoints: &[u64],
) -> Result<(ReportTable, Meta)> {
    if limit > MAX_SIEVE {
        return Err(Error::invalid(format!(
            "limit {limit} exceeds the sieve cap {MAX_SIEVE}"
        )));
    }
    let owned_default = [limit];
    let checkpoints = if checkpoints.is_empty() {
        &owned_default[..]
    } else {
        checkpoints
    };
    let sieve = crate::primes::sieve_primes(limit.max(4))?;
    let profile = crate::empirical::density_profile(limit, k_powers, checkpoints, &sieve)?;
    let mut table = ReportTable::new(
        "Observed representable density",
        &[("N", ColumnKind::Int), ("density", ColumnKind::Real)],
    );
    for (n, d) in profile {
        table.push_row(
            vec![Cell::Int(n as i64), Cell::Real(d)],
            Provenance::Heuristic,
        );
    }
    let meta = meta_with(&[
        ("k_powers", k_powers.into()),
        ("sieve_limit", limit.max(4).into()),
    ]);
    Ok((table, meta))
}

fn cmd_empirical_goldbach(
    n: Option<u64>,
    sample: Option<u64>,
    min: Option<u64>,
    max: Option<u64>,
    prime_limit: u64,
) -> Result<(ReportTable, Meta)> {
    let c0 = compute_c0(prime_limit)?;
    let mut table = ReportTable::new(
        "Goldbach pair counts",
        &[
            ("N", ColumnKind::Int),
            ("G", ColumnKind::Int),
            ("hl_ratio", ColumnKind::Real),
        ],
    );
    let mut push = |n: u64, sieve: &crate::primes::PrimeSieve| -> Result<()> {
        let g = crate::empirical::goldbach_g(n, sieve)?;
        let ratio = crate::empirical::hl_ratio(n, c0, sieve)?;
        table.push_row(
            vec![
                Cell::Int(n as i64),
                Cell::Int(g as i64),
                Cell::Real(ratio),
            ],
            Provenance::Heuristic,
        );
        Ok(())
    };
    let meta = match (n, sample) {
        (Some(n), None) => {
            if n > MAX_SIEVE {
                return Err(Error::invalid(format!(
                    "n = {n} exceeds the sieve cap {MAX_SIEVE}"
                )));
            }
            let sieve = crate::primes::sieve_primes(n.max(4))?;
            push(n, &sieve)?;
            meta_with(&[("prime_limit", prime_limit.into())])
        }
        (None, Some(count)) => {
            let (min, max) = (min.unwrap(), max.unwrap());
            if min < 10_000 || max <= min || max > MAX_SIEVE {
                return Err(Error::invalid(format!(
                    "sampling range [{min}, {max}] must satisfy 10000 <= min < max <= {MAX_SIEVE}"
                )));
            }
            if count == 0 || count > 10_000 {
                return Err(Error::invalid("--sample must be in 1..=10000"));
            }
            let sieve = crate::primes::sieve_primes(max)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
            for _ in 0..count {
                let even = rng.gen_range(min.div_ceil(2)..=max / 2) * 2;
                push(even, &sieve)?;
            }
            meta_with(&[
                ("prime_limit", prime_limit.into()),
                ("sample_seed", SAMPLE_SEED.into()),
            ])
        }
        _ => {
            return Err(Error::invalid(
                "give exactly one of --n or --sample (with --min/--max)",
            ));
        }
    };
    Ok((table, meta))
}

fn cmd_empirical_gaps(n: u64, h: u64, modulus: u64, residue: u64) -> Result<(ReportTable, Meta)> {
    if n.saturating_add(h) > MAX_SIEVE {
        return Err(Error::invalid(format!(
            "n + h exceeds the sieve cap {MAX_SIEVE}"
        )));
    }
    let sieve = crate::primes::sieve_primes((n + h).max(4))?;
    let count = crate::empirical::gap_count(n, h, modulus, residue, &sieve)?;
    let mut table = ReportTable::new(
        "Prime gap counts",
        &[
            ("N", ColumnKind::Int),
            ("h", ColumnKind::Int),
            ("mod", ColumnKind::Int),
            ("res", ColumnKind::Int),
            ("count", ColumnKind::Int),
        ],
    );
    table.push_row(
        vec![
            Cell::Int(n as i64),
            Cell::Int(h as i64),
            Cell::Int(modulus as i64),
            Cell::Int(residue as i64),
            Cell::Int(count as i64),
        ],
        Provenance::Heuristic,
    );
    let meta = meta_with(&[("sieve_limit", (n + h).max(4).into())]);
    Ok((table, meta))
}
