//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Criterion 6 documents two clauses that are not attainable at desk-scale
//! truncation levels; its test states exactly which clauses fail and why.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use powerslab::factor::{divisors, euler_phi, factorize};
use powerslab::interval::Interval;
use powerslab::linnik::{boundary_c1, criterion_lhs, max_c1, LinnikConstants};
use powerslab::romanov::{
    density_lower_bound, density_lower_bound_multi, pintz_density_factor, pintz_threshold,
    Pipeline, RomanovConfig, TABLE_C1_LEVELS,
};
use powerslab::sigma::compute_c0;
use powerslab::spectra::{build_distribution, correlate_r, estimate_ak, truncation_cap};

use rand::{Rng, SeedableRng};

fn c0_fast() -> Interval {
    compute_c0(1_000_000).expect("twin-prime constant")
}

fn synthetic_config(m: u32, c1: f64) -> RomanovConfig {
    let divs = divisors(&factorize(m as u64).unwrap());
    let s_table: BTreeMap<u32, f64> = divs
        .iter()
        .map(|&g| (g as u32, 1.0 + g as f64 / 100.0))
        .collect();
    RomanovConfig::custom(m, c1, 3.0, s_table, c0_fast(), None).unwrap()
}

#[test]
fn criterion_1_density_table_reproduction() {
    let published = [0.10788, 0.11011, 0.12532, 0.19871, 0.25007, 0.34583];
    let base = RomanovConfig::default_m24(TABLE_C1_LEVELS[0], c0_fast(), None).unwrap();
    let start = Instant::now();
    let results = density_lower_bound_multi(&base, &TABLE_C1_LEVELS, None).unwrap();
    let elapsed = start.elapsed();
    for (r, &want) in results.iter().zip(&published) {
        assert!(
            (r.d_lower - want).abs() < 2e-4,
            "C1 = {}: d_lower = {}, published {want}",
            r.c1,
            r.d_lower
        );
    }
    // budget is per level; the shared scan covers all six at once
    assert!(
        elapsed.as_secs() < 600,
        "density scan took {elapsed:?}, budget 10 min per level"
    );
    println!(
        "PASS criterion 1: six published density lower bounds reproduced within 2e-4 \
         ({} ms for all six levels)",
        elapsed.as_millis()
    );
}

#[test]
fn criterion_2_threshold_table_reproduction() {
    let constants = LinnikConstants::reference(c0_fast());
    let published: [(u32, bool, f64); 9] = [
        (6, true, 7.589),
        (5, true, 5.859),
        (4, true, 4.608),
        (3, true, 3.613),
        (7, false, 6.762), // computes from the 5(log 2)/18 cutoff; printed row reads 6.737
        (6, false, 5.672),
        (5, false, 4.782),
        (4, false, 4.069),
        (3, false, 3.398),
    ];
    let start = Instant::now();
    for &(k, grh, want) in &published {
        let got = max_c1(k, grh, &constants, 1e-6).unwrap();
        assert!(
            (got - want).abs() <= 2e-3,
            "K = {k}, grh = {grh}: max C1 = {got}, published {want}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 1, "threshold sweep took {elapsed:?}");

    // the published unconditional K = 7 row must also be emitted verbatim,
    // annotated as inconsistent with the cutoff the rest of the table uses
    let table = powerslab::linnik::make_linnik_table(&constants, 1e-6).unwrap();
    let mut saw_printed = false;
    for row in &table.rows {
        let rendered: Vec<String> = row.iter().map(|c| c.render()).collect();
        if rendered[0] == "7" && rendered[2] == "6.73700" {
            saw_printed = true;
            assert!(
                rendered[3].contains("0.4"),
                "printed K = 7 row must carry the discrepancy annotation"
            );
        }
    }
    assert!(saw_printed, "published 6.737 row missing from the table");
    println!(
        "PASS criterion 2: nine threshold values reproduced within 2e-3; \
         unconditional K=7 emitted both computed (6.762) and printed (6.737) with annotation"
    );
}

#[test]
fn criterion_3_headline_theorem_check() {
    let constants = LinnikConstants::reference(c0_fast());
    let start = Instant::now();
    let r = criterion_lhs(6, 6.7814, true, &constants).unwrap();
    let elapsed = start.elapsed();
    assert!(r.lhs <= 0.865, "lhs = {}", r.lhs);
    assert!(r.satisfied);
    assert!(elapsed.as_secs() < 1);
    println!(
        "PASS criterion 3: K=6 criterion under GRH at C1 = 6.7814 gives lhs = {:.5} <= 0.865",
        r.lhs
    );
}

#[test]
fn criterion_4_k2_thresholds() {
    let config = RomanovConfig::default_m24(3.02, c0_fast(), None).unwrap();
    let r = density_lower_bound(&config, None).unwrap();
    assert!(r.d_lower > 0.25, "d_lower(3.02) = {}", r.d_lower);
    assert_eq!(pintz_threshold(r.d_lower, 1).unwrap(), Some(2));

    let constants = LinnikConstants::reference(c0_fast());
    let grh_boundary = boundary_c1(2, true, &constants).unwrap();
    let uncond_boundary = boundary_c1(2, false, &constants).unwrap();
    assert!(
        (grh_boundary - 2.856).abs() <= 2e-3,
        "K=2 GRH boundary = {grh_boundary}"
    );
    assert!(
        (uncond_boundary - 2.826).abs() <= 2e-3,
        "K=2 unconditional boundary = {uncond_boundary}"
    );
    println!(
        "PASS criterion 4: d(C1 = 3.02) = {:.5} > 1/4 so K = 2 suffices; \
         criterion-side K=2 boundaries {:.3} (GRH) / {:.3} (unconditional)",
        r.d_lower, grh_boundary, uncond_boundary
    );
}

#[test]
fn criterion_5_constants() {
    let c0 = compute_c0(10_000_000).unwrap();
    assert!(c0.contains(0.6601618158468696), "C0 = {c0}");
    assert!(c0.width() < 1e-5, "width = {}", c0.width());

    let fl = factorize((1u64 << 24) - 1).unwrap();
    assert_eq!(
        fl.factors,
        vec![(3, 2), (5, 1), (7, 1), (13, 1), (17, 1), (241, 1)]
    );
    assert_eq!(euler_phi(&fl), 6_635_520);
    println!(
        "PASS criterion 5: C0 in [{:.10}, {:.10}] (width {:.2e}); phi(2^24 - 1) = 6635520 \
         from the certified factorization",
        c0.lo(),
        c0.hi(),
        c0.width()
    );
}

#[test]
fn criterion_6_power_sum_estimates() {
    let c0 = c0_fast();
    let mut mids = Vec::new();
    for k in 1..=4u32 {
        let l = truncation_cap(k).unwrap();
        let est = estimate_ak(k, l, c0, None).unwrap();
        mids.push((k, l, est.estimate.midpoint()));
    }
    let mut failures = Vec::new();

    // clause (i): every estimate exceeds the trivial diagonal bound
    for &(k, l, mid) in &mids {
        let floor = 2f64.powi(-(2 * k as i32) - 1);
        assert!(mid > floor, "A({k}) at L = {l}: {mid} <= {floor}");
    }
    println!("PASS criterion 6(i): every estimate exceeds 2^(-2k-1)");

    // clause (ii): k = 1 at L = 64 within 0.01 of the published bracket
    let (_, _, a1) = mids[0];
    let bracket = (0.27835, 0.27926);
    let dist = (bracket.0 - a1).max(a1 - bracket.1).max(0.0);
    if dist <= 0.01 {
        println!("PASS criterion 6(ii): A(1) at L = 64 within 0.01 of the published bracket");
    } else {
        println!(
            "FAIL criterion 6(ii): A(1) at L = 64 is {a1:.5}, which is {dist:.5} away from \
             the published bracket ({}, {}) — truncation at L = 64 has not converged \
             (the tail beyond the cap still carries ~0.027 of the limit value)",
            bracket.0, bracket.1
        );
        failures.push("6(ii) k=1 truncation gap");
    }

    // clause (iii): estimates decreasing in k at the per-k default caps
    let decreasing = mids.windows(2).all(|w| w[0].2 > w[1].2);
    if decreasing {
        println!("PASS criterion 6(iii): estimates decrease in k at the default caps");
    } else {
        let vals: Vec<String> = mids
            .iter()
            .map(|&(k, l, m)| format!("A({k})@L={l}: {m:.4}"))
            .collect();
        println!(
            "FAIL criterion 6(iii): estimates at the per-k caps are not monotone in k \
             [{}] — the caps truncate each k at a different point of its convergence \
             curve, and no feasible cap choice makes the sequence monotone",
            vals.join(", ")
        );
        failures.push("6(iii) non-monotone at default caps");
    }

    assert!(
        failures.is_empty(),
        "criterion 6 clauses not attainable at desk scale: {failures:?}"
    );
}

#[test]
fn criterion_7_oracle_suites() {
    // (a) the density-factor inequality on random integer sequences
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=50);
        let b: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=5)).collect();
        let m: u64 = b.iter().sum();
        if m == 0 {
            continue;
        }
        let d = b.iter().map(|&x| x * x).sum::<u64>() as f64 / m as f64;
        let positive = b.iter().filter(|&&x| x > 0).count() as f64;
        assert!(positive >= pintz_density_factor(d).unwrap() * m as f64 - 1e-9);
    }
    println!("PASS criterion 7(a): density-factor inequality on 10^4 random sequences");

    // (b) residue pipeline vs. quadruple-loop brute force, small moduli
    for m in [2u32, 3, 4, 6] {
        let config = synthetic_config(m, 2.0);
        let ell = config.ell;
        let gcd = |mut a: u64, mut b: u64| {
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        };
        let mut reps: Vec<Vec<u32>> = vec![Vec::new(); ell as usize];
        for kappa in 0..ell {
            if gcd(kappa, ell) != 1 {
                continue;
            }
            for alpha in 0..m {
                reps[((kappa + (1u64 << alpha)) % ell) as usize].push(alpha);
            }
        }
        let log2 = Interval::ln2();
        let lambda = config.c0.hi() * config.c1 * config.c3 / (m as f64 * log2.lo());
        let scale = 1.0 / (config.phi_ell as f64 * m as f64 * log2.hi());
        let mut brute = 0.0;
        for alphas in &reps {
            if alphas.is_empty() {
                continue;
            }
            let mut t = 0.0;
            for &a1 in alphas {
                for &a2 in alphas {
                    let diff = a1.abs_diff(a2);
                    let g = if diff == 0 {
                        m
                    } else {
                        gcd(diff as u64, m as u64) as u32
                    };
                    t += config.s_table[&g];
                }
            }
            let d = 1.0 + lambda * t / alphas.len() as f64;
            brute += pintz_density_factor(d).unwrap() * alphas.len() as f64 * scale;
        }
        let mine = density_lower_bound(&config, None).unwrap().d_lower;
        assert!(
            (mine - brute).abs() <= 1e-12 * brute,
            "m = {m}: {mine} vs brute {brute}"
        );
    }
    println!("PASS criterion 7(b): pipeline equals quadruple-loop brute force for m in {{2,3,4,6}}");

    // (c) first-moment mass identity, including the full m = 24 scan
    for m in [2u32, 3, 4, 6, 8, 12, 24] {
        let config = if m == 24 {
            RomanovConfig::default_m24(2.0, c0_fast(), None).unwrap()
        } else {
            synthetic_config(m, 2.0)
        };
        let pipeline = Pipeline::new(&config).unwrap();
        let total: u64 = (0..config.ell)
            .map(|k| pipeline.valid_alphas(k).count_ones() as u64)
            .sum();
        assert_eq!(total, config.phi_ell * m as u64, "m = {m}");
    }
    println!("PASS criterion 7(c): sum of first moments equals phi(ell)*m for all listed m");

    // (d) correlation counts vs. exhaustive tuple enumeration, k <= 2, L <= 6
    for k in 1..=2u32 {
        for l in 1..=6u32 {
            let dist = build_distribution(k, l).unwrap();
            let r = correlate_r(&dist);
            let mut exhaustive: BTreeMap<i128, u64> = BTreeMap::new();
            let tuples = (l as u64 + 1).pow(2 * k);
            for code in 0..tuples {
                let mut c = code;
                let mut pos = 0i128;
                let mut neg = 0i128;
                for slot in 0..2 * k {
                    let a = (c % (l as u64 + 1)) as u32;
                    c /= l as u64 + 1;
                    if slot < k {
                        pos += 1i128 << a;
                    } else {
                        neg += 1i128 << a;
                    }
                }
                if pos != neg {
                    *exhaustive.entry(pos - neg).or_insert(0) += 1;
                }
            }
            assert_eq!(r, exhaustive, "k = {k}, L = {l}");
        }
    }
    println!("PASS criterion 7(d): correlation counts equal exhaustive enumeration (k <= 2, L <= 6)");

    // (e) representation counts vs. the subtract-and-test oracle
    let sieve = powerslab::primes::sieve_primes(10_000).unwrap();
    for n in 2..=10_000u64 {
        let oracle = sieve
            .iter()
            .take_while(|&p| p < n)
            .filter(|&p| (n - p).is_power_of_two())
            .count() as u64;
        assert_eq!(
            powerslab::empirical::rep_count(n, 1, &sieve).unwrap(),
            oracle,
            "n = {n}"
        );
    }
    println!("PASS criterion 7(e): rep_count matches the subtract-and-test oracle to 10^4");
}

#[test]
fn criterion_8_empirical_sanity() {
    let start = Instant::now();
    let sieve = powerslab::primes::sieve_primes(1_000_000).unwrap();

    let profile =
        powerslab::empirical::density_profile(1_000_000, 1, &[20, 1_000_000], &sieve).unwrap();
    assert_eq!(profile[0], (20, 0.85), "d(20) must be exactly 17/20");
    assert!(
        profile[1].1 > 0.12532,
        "observed density {} must exceed the proven lower bound",
        profile[1].1
    );

    let (failures, first) =
        powerslab::empirical::scan_k2_decompositions(1_000_000, &sieve).unwrap();
    assert_eq!(failures, 0, "first failure at {first:?}");

    assert_eq!(powerslab::empirical::goldbach_g(6, &sieve).unwrap(), 1);
    assert_eq!(powerslab::empirical::goldbach_g(10, &sieve).unwrap(), 3);
    assert_eq!(
        powerslab::empirical::gap_count(10, 2, 1, 0, &sieve).unwrap(),
        2
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "empirical suite took {elapsed:?}");
    println!(
        "PASS criterion 8: d(20) = 0.85 exactly, d(10^6) = {:.5} > 0.12532, \
         every even n in [8, 10^6] splits as two primes plus two powers of two \
         ({} ms total)",
        profile[1].1,
        elapsed.as_millis()
    );
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_powerslab"))
        .args(args)
        .env_remove("POWERSLAB_CACHE_DIR")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

fn without_runtime(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("\"runtime_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_9_byte_determinism() {
    let commands: Vec<Vec<&str>> = vec![
        vec!["constants", "--prime-limit", "1000000"],
        vec!["ak", "--k", "2", "--l", "16", "--prime-limit", "1000000"],
        vec!["linnik", "check", "--K", "6", "--grh", "--prime-limit", "1000000"],
        vec!["linnik", "table", "--prime-limit", "1000000"],
        vec!["romanov", "bound", "--c1", "3.02", "--prime-limit", "1000000"],
        vec!["romanov", "table", "--prime-limit", "1000000"],
        vec!["empirical", "romanov", "--limit", "100000", "--checkpoints", "20,100000"],
        vec![
            "empirical", "goldbach", "--sample", "3", "--min", "10000", "--max", "20000",
            "--prime-limit", "1000000",
        ],
        vec!["empirical", "gaps", "--n", "10000", "--h", "2", "--mod", "3", "--res", "2"],
    ];
    for cmd in &commands {
        let (code_a, out_a, err_a) = run_cli(cmd);
        let (code_b, out_b, _) = run_cli(cmd);
        assert_eq!(code_a, 0, "{cmd:?} failed: {err_a}");
        assert_eq!(code_b, 0);
        assert_eq!(
            without_runtime(&out_a),
            without_runtime(&out_b),
            "{cmd:?} differs across runs"
        );

        // worker count must not influence any byte of the report
        let mut csv_one = cmd.clone();
        csv_one.extend(["--format", "csv", "--threads", "1"]);
        let mut csv_three = cmd.clone();
        csv_three.extend(["--format", "csv", "--threads", "3"]);
        let (code_one, out_one, _) = run_cli(&csv_one);
        let (code_three, out_three, _) = run_cli(&csv_three);
        assert_eq!(code_one, 0);
        assert_eq!(code_three, 0);
        assert_eq!(out_one, out_three, "{cmd:?} differs across thread counts");
    }
    println!(
        "PASS criterion 9: all {} commands byte-identical across runs and worker counts",
        commands.len()
    );
}
