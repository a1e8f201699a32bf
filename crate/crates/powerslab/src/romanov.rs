//! Residue-class lower bounds for the density of integers representable
//! as a prime plus a power of two (Romanov's constant), following the
//! Elsholtz–Schlage-Puchta moment method modulo `ℓ = 2^m − 1`.
//!
//! For each residue class `k (mod ℓ)` the first moment counts pairs
//! `(κ, α)` with `gcd(κ, ℓ) = 1` and `κ + 2^α ≡ k`; the second moment is
//! bounded through the tabulated `S(t)` constants. Pintz's lemma turns
//! the moment ratio `D` into a positive-proportion factor `f(D)`, and the
//! class shares aggregate into a lower bound for the density.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factor::{divisors, euler_phi, FactorCache};
use crate::interval::Interval;
use crate::report::{Cell, ColumnKind, Provenance, ReportTable};

/// Largest supported modulus exponent: the coprimality bitmap for
/// `ℓ = 2^m − 1` stays under a gigabyte and masks fit in `u32`.
pub const MAX_M: u32 = 30;

/// Second-moment constant for `m = 24`.
pub const C3_M24: f64 = 3.73922;

/// Published `S(t)` upper bounds for the divisors of 24.
pub const S_TABLE_M24: [(u32, f64); 8] = [
    (1, 1.01609),
    (2, 1.04568),
    (3, 1.02545),
    (4, 1.06517),
    (6, 1.08269),
    (8, 1.06864),
    (12, 1.12771),
    (24, 1.14370),
];

/// Configuration of one density run.
#[derive(Debug, Clone)]
pub struct RomanovConfig {
    pub m: u32,
    /// `2^m − 1`.
    pub ell: u64,
    pub c1: f64,
    pub c3: f64,
    /// Divisor of `m` → upper bound on `S(divisor)`.
    pub s_table: BTreeMap<u32, f64>,
    pub c0: Interval,
    /// `φ(ell)`, recomputed from the certified factorization of `ell`.
    pub phi_ell: u64,
}

impl RomanovConfig {
    /// Config for the shipped `m = 24` data.
    pub fn default_m24(c1: f64, c0: Interval, cache: Option<&FactorCache>) -> Result<Self> {
        Self::custom(24, c1, C3_M24, S_TABLE_M24.iter().copied().collect(), c0, cache)
    }

    /// Config with a user-supplied `S`-table and `C₃` (required whenever
    /// `m ≠ 24`: no other published data ships with the tool).
    pub fn custom(
        m: u32,
        c1: f64,
        c3: f64,
        s_table: BTreeMap<u32, f64>,
        c0: Interval,
        cache: Option<&FactorCache>,
    ) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(Error::unsupported(format!(
                "m = {m} outside supported range 1..={MAX_M}"
            )));
        }
        if c1 < 2.0 {
            return Err(Error::invalid(format!(
                "C1 = {c1} < 2: the sieve constant satisfies C1 >= 2"
            )));
        }
        if !c3.is_finite() || c3 <= 0.0 {
            return Err(Error::config(format!("C3 = {c3} must be positive")));
        }
        let ell = (1u64 << m) - 1;
        let fl = match cache {
            Some(c) => c.factorize(ell)?,
            None => crate::factor::factorize(ell)?,
        };
        let divs = divisors(&fl_of_m(m)?);
        let keys: Vec<u32> = s_table.keys().copied().collect();
        if keys != divs.iter().map(|&d| d as u32).collect::<Vec<_>>() {
            return Err(Error::config(format!(
                "S-table keys {keys:?} must be exactly the divisors {divs:?} of m = {m}"
            )));
        }
        if let Some((&g, &v)) = s_table.iter().find(|&(_, &v)| !v.is_finite() || v <= 0.0) {
            return Err(Error::config(format!("S({g}) = {v} must be positive")));
        }
        Ok(RomanovConfig {
            m,
            ell,
            c1,
            c3,
            s_table,
            c0,
            phi_ell: euler_phi(&fl),
        })
    }
}

fn fl_of_m(m: u32) -> Result<crate::factor::FactorList> {
    crate::factor::factorize(m as u64)
}

/// The factor `f(D) = (⌈D⌉ + ⌊D⌋ − D)/(⌈D⌉·⌊D⌋)` from Pintz's lemma:
/// a sequence with mean-square ratio `D` has at least `f(D)·M` positive
/// terms, where `M` is its sum.
pub fn pintz_density_factor(d: f64) -> Result<f64> {
    if !(d >= 1.0) {
        return Err(Error::invalid(format!("D = {d} < 1")));
    }
    let (fl, ce) = (d.floor(), d.ceil());
    Ok((ce + fl - d) / (ce * fl))
}

/// `K = 2k` when the density bound clears 1/4 strictly, else `None`:
/// a set of lower density above 1/4 (after halving) makes every large
/// even number a sum of two of its elements, giving two primes plus
/// `2k` powers of two.
pub fn pintz_threshold(d_lower: f64, k: u32) -> Result<Option<u32>> {
    if !(0.0..=0.5).contains(&d_lower) {
        return Err(Error::invalid(format!(
            "d_lower = {d_lower} outside [0, 0.5]"
        )));
    }
    if k == 0 {
        return Err(Error::invalid("k = 0"));
    }
    Ok((d_lower > 0.25).then_some(2 * k))
}

/// Per-class statistics.
#[derive(Debug, Clone, Copy)]
pub struct ClassStats {
    pub k: u64,
    /// Bit `α` set ⇔ `gcd(k − 2^α, ell) = 1`.
    pub alpha_mask: u32,
    /// First moment: number of valid `(κ, α)` pairs, `= popcount(mask)`.
    pub n1: u32,
    /// Second-moment weight `Σ_{α₁,α₂} S(gcd(α₁−α₂, m))`.
    pub t: f64,
    /// Moment ratio bound `D ≥ 1`.
    pub d: f64,
    /// Pintz factor `f(D)`.
    pub f_d: f64,
    /// Contribution to the density lower bound.
    pub share: f64,
}

/// Precomputed working data for scanning all residue classes of one config.
pub struct Pipeline<'a> {
    config: &'a RomanovConfig,
    /// Coprimality bitmap: bit `x` set ⇔ `gcd(x, ell) = 1`.
    coprime: Vec<u64>,
    /// `d ∈ [0, m)` → `S(gcd(d, m))`, with `gcd(0, m) = m`.
    s_by_diff: Vec<f64>,
    /// `C₀_hi·C₁·C₃/(m·log2_lo)`: multiplier turning `T/N₁` into `D − 1`.
    lambda: f64,
    /// `1/(φ(ℓ)·m·log2_hi)`: share normalization.
    share_scale: f64,
}

fn gcd_u32(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl<'a> Pipeline<'a> {
    pub fn new(config: &'a RomanovConfig) -> Result<Self> {
        let ell = config.ell;
        // Sieve the coprimality bitmap: clear multiples of every prime
        // dividing ell (including 0, a multiple of all of them).
        let mut coprime = vec![u64::MAX; (ell / 64 + 1) as usize];
        for (p, _) in crate::factor::factorize(ell)?.factors {
            let mut x = 0u64;
            while x < ell {
                coprime[(x / 64) as usize] &= !(1u64 << (x % 64));
                x += p;
            }
        }
        let m = config.m;
        let mut s_by_diff = Vec::with_capacity(m as usize);
        for d in 0..m {
            let g = if d == 0 { m } else { gcd_u32(d, m) };
            s_by_diff.push(config.s_table[&g]);
        }
        let log2 = Interval::ln2();
        Ok(Pipeline {
            config,
            coprime,
            s_by_diff,
            lambda: config.c0.hi() * config.c1 * config.c3 / (m as f64 * log2.lo()),
            share_scale: 1.0 / (config.phi_ell as f64 * m as f64 * log2.hi()),
        })
    }

    fn is_coprime(&self, x: u64) -> bool {
        self.coprime[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    /// Mask of exponents `α` admitting a valid pair for class `k`:
    /// bit `α` ⇔ `gcd((k − 2^α) mod ell, ell) = 1`. The cofactor `κ` is
    /// determined by `α`, so the first moment is the popcount.
    pub fn valid_alphas(&self, k: u64) -> u32 {
        debug_assert!(k < self.config.ell);
        let ell = self.config.ell;
        let mut mask = 0u32;
        for alpha in 0..self.config.m {
            let pow = 1u64 << alpha; // 2^α mod ell, exact since α < m
            let x = if k >= pow { k - pow } else { k + ell - pow };
            if self.is_coprime(x) {
                mask |= 1 << alpha;
            }
        }
        mask
    }

    /// Second-moment weight of a mask: over all ordered pairs of set bits,
    /// `Σ S(gcd(α₁ − α₂, m))` with the diagonal contributing `S(m)`.
    /// Grouped by cyclic difference, summed in ascending difference order.
    pub fn class_t(&self, mask: u32) -> f64 {
        let m = self.config.m;
        let wrap = (1u32 << m) - 1;
        let mut t = 0.0;
        for d in 0..m {
            let rot = if d == 0 {
                mask
            } else {
                ((mask << d) | (mask >> (m - d))) & wrap
            };
            let pairs = (mask & rot).count_ones();
            t += pairs as f64 * self.s_by_diff[d as usize];
        }
        t
    }

    /// Moment-ratio bound `D = 1 + λ·T/N₁` (conservative endpoints: the
    /// larger `D`, the smaller the class contribution).
    pub fn class_d(&self, n1: u32, t: f64) -> f64 {
        debug_assert!(n1 >= 1);
        1.0 + self.lambda * t / n1 as f64
    }

    /// Full per-class statistics; `None` when the class admits no valid
    /// pair (its share is zero).
    pub fn class_stats(&self, k: u64) -> Result<Option<ClassStats>> {
        let mask = self.valid_alphas(k);
        if mask == 0 {
            return Ok(None);
        }
        let n1 = mask.count_ones();
        let t = self.class_t(mask);
        let d = self.class_d(n1, t);
        let f_d = pintz_density_factor(d)?;
        Ok(Some(ClassStats {
            k,
            alpha_mask: mask,
            n1,
            t,
            d,
            f_d,
            share: f_d * n1 as f64 * self.share_scale,
        }))
    }
}

/// Result of one density run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DensityResult {
    pub m: u32,
    pub ell: u64,
    pub c1: f64,
    pub c3: f64,
    pub phi_ell: u64,
    pub d_lower: f64,
    pub class_count_nonzero: u64,
    pub runtime_ms: u128,
}

const CHUNK_BITS: u32 = 16;

struct ChunkPartial {
    sums: Vec<f64>,
    nonzero: u64,
}

/// Scan every residue class once and evaluate the density lower bound at
/// several sieve-constant levels simultaneously (the expensive per-class
/// work is identical across levels).
///
/// Classes are processed in ascending order within fixed 2^16-sized
/// chunks and chunk partial sums are folded in chunk order, so the result
/// is bit-identical for any worker count — and bit-identical to what a
/// separate single-level run produces.
pub fn density_lower_bound_multi(
    base: &RomanovConfig,
    c1_levels: &[f64],
    threads_hint: Option<usize>,
) -> Result<Vec<DensityResult>> {
    let start = Instant::now();
    for &c1 in c1_levels {
        if c1 < 2.0 {
            return Err(Error::invalid(format!("C1 = {c1} < 2")));
        }
    }
    let pipeline = Pipeline::new(base)?;
    let lambdas: Vec<f64> = c1_levels
        .iter()
        .map(|&c1| pipeline.lambda / base.c1 * c1)
        .collect();
    let ell = base.ell;
    let n_chunks = (ell >> CHUNK_BITS) + u64::from(ell & ((1 << CHUNK_BITS) - 1) != 0);

    let process_chunk = |memo: &mut HashMap<u32, (u32, f64)>, chunk: u64| -> Result<ChunkPartial> {
        let lo = chunk << CHUNK_BITS;
        let hi = (lo + (1 << CHUNK_BITS)).min(ell);
        let mut sums = vec![0.0f64; lambdas.len()];
        let mut nonzero = 0u64;
        for k in lo..hi {
            let mask = pipeline.valid_alphas(k);
            if mask == 0 {
                continue;
            }
            nonzero += 1;
            let (n1, t) = *memo
                .entry(mask)
                .or_insert_with(|| (mask.count_ones(), pipeline.class_t(mask)));
            let n1f = n1 as f64;
            for (sum, &lambda) in sums.iter_mut().zip(&lambdas) {
                let d = 1.0 + lambda * t / n1f;
                let f_d = pintz_density_factor(d)?;
                *sum += f_d * n1f * pipeline.share_scale;
            }
        }
        Ok(ChunkPartial { sums, nonzero })
    };

    let partials: Vec<ChunkPartial> = if threads_hint == Some(1) {
        let mut memo = HashMap::new();
        (0..n_chunks)
            .map(|c| process_chunk(&mut memo, c))
            .collect::<Result<_>>()?
    } else {
        (0..n_chunks)
            .into_par_iter()
            .map_init(HashMap::new, |memo, c| process_chunk(memo, c))
            .collect::<std::result::Result<_, _>>()?
    };

    let mut totals = vec![0.0f64; c1_levels.len()];
    let mut nonzero = 0u64;
    for partial in &partials {
        for (total, &s) in totals.iter_mut().zip(&partial.sums) {
            *total += s;
        }
        nonzero += partial.nonzero;
    }
    let runtime_ms = start.elapsed().as_millis();

    c1_levels
        .iter()
        .zip(&totals)
        .map(|(&c1, &d_lower)| {
            if !(0.0..=0.5).contains(&d_lower) {
                return Err(Error::config(format!(
                    "density bound {d_lower} outside [0, 0.5]: configuration is inconsistent"
                )));
            }
            Ok(DensityResult {
                m: base.m,
                ell: base.ell,
                c1,
                c3: base.c3,
                phi_ell: base.phi_ell,
                d_lower,
                class_count_nonzero: nonzero,
                runtime_ms,
            })
        })
        .collect()
}

/// Density lower bound at the config's own `C₁`.
pub fn density_lower_bound(
    config: &RomanovConfig,
    threads_hint: Option<usize>,
) -> Result<DensityResult> {
    Ok(density_lower_bound_multi(config, &[config.c1], threads_hint)?
        .pop()
        .expect("one level in, one result out"))
}

/// Like [`density_lower_bound`], but stream per-class statistics for every
/// class with at least one valid pair as CSV rows to `out`. Runs
/// single-threaded so rows appear in ascending class order.
pub fn density_lower_bound_with_csv(
    config: &RomanovConfig,
    out: &mut dyn Write,
) -> Result<DensityResult> {
    let start = Instant::now();
    let pipeline = Pipeline::new(config)?;
    writeln!(out, "k,n1,t,d,f_d,share")?;
    let mut memo: HashMap<u32, (u32, f64)> = HashMap::new();
    let mut d_lower = 0.0f64;
    let mut nonzero = 0u64;
    for k in 0..config.ell {
        let mask = pipeline.valid_alphas(k);
        if mask == 0 {
            continue;
        }
        nonzero += 1;
        let (n1, t) = *memo
            .entry(mask)
            .or_insert_with(|| (mask.count_ones(), pipeline.class_t(mask)));
        let d = pipeline.class_d(n1, t);
        let f_d = pintz_density_factor(d)?;
        let share = f_d * n1 as f64 * pipeline.share_scale;
        d_lower += share;
        writeln!(out, "{k},{n1},{t},{d},{f_d},{share}")?;
    }
    if !(0.0..=0.5).contains(&d_lower) {
        return Err(Error::config(format!(
            "density bound {d_lower} outside [0, 0.5]: configuration is inconsistent"
        )));
    }
    Ok(DensityResult {
        m: config.m,
        ell: config.ell,
        c1: config.c1,
        c3: config.c3,
        phi_ell: config.phi_ell,
        d_lower,
        class_count_nonzero: nonzero,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// The six published sieve-constant levels of the density table.
pub const TABLE_C1_LEVELS: [f64; 6] = [8.0, 7.8209, 6.7814, 4.0, 3.02, 2.0];

/// Reproduce the density table: lower bounds at the six published `C₁`
/// levels for `m = 24`, with the `K = 2` threshold annotation where the
/// bound clears 1/4.
pub fn make_romanov_table(
    c0: Interval,
    cache: Option<&FactorCache>,
    threads_hint: Option<usize>,
) -> Result<ReportTable> {
    let base = RomanovConfig::default_m24(TABLE_C1_LEVELS[0], c0, cache)?;
    let results = density_lower_bound_multi(&base, &TABLE_C1_LEVELS, threads_hint)?;
    let mut table = ReportTable::new(
        "Density lower bounds for prime-plus-power-of-two integers (m = 24)",
        &[
            ("C1", ColumnKind::Real),
            ("d_lower", ColumnKind::Real),
            ("threshold", ColumnKind::Text),
        ],
    );
    for r in &results {
        let threshold = match pintz_threshold(r.d_lower, 1)? {
            Some(k) => format!("K={k}"),
            None => String::new(),
        };
        table.push_row(
            vec![
                Cell::Real(r.c1),
                Cell::Real(r.d_lower),
                Cell::Text(threshold),
            ],
            Provenance::PaperReproduction,
        );
    }
    Ok(table)
}
