//! Integer factorization: trial division by small primes, then a
//! deterministic Brent-cycle splitter certified by Miller–Rabin.
//!
//! An optional disk cache stores factorizations as text lines
//! `n: p1^e1 p2^e2 ...`, one per line, sorted by `n`. Entries are
//! re-verified on load (primality of every factor and product round-trip),
//! so a stale or corrupted cache can reject but never mislead.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::primes::{is_prime_u64, sieve_primes};

/// Certified factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorList {
    pub n: u64,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl FactorList {
    /// Product of `prime^exponent` over all entries; equals `n`.
    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product::<u64>()
            .max(1)
    }

    /// The distinct odd prime divisors, in increasing order.
    pub fn odd_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p).filter(|&p| p != 2)
    }
}

/// Trial division handles every factor below this bound; the cycle
/// splitter only ever sees 24-bit-plus cofactors.
const TRIAL_BOUND: u64 = 4096;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        sieve_primes(TRIAL_BOUND)
            .expect("static sieve limit is valid")
            .to_vec()
    })
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's cycle-finding variant of the rho method. Returns a divisor of
/// `n` which may be trivial (1 or `n`); callers retry with the next `c`.
/// Requires odd composite `n`.
fn brent_cycle(n: u64, c: u64) -> u64 {
    let step = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let m = 128u64;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let (mut x, mut ys) = (y, y);
    let mut g = 1u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = step(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = step(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        // Batched gcd overshot; replay one step at a time.
        loop {
            ys = step(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    g
}

/// Split a number with no prime factor below `TRIAL_BOUND` into primes,
/// appending them to `out` in unspecified order.
fn split_rough(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    // The polynomial offset sequence is fixed, so results are deterministic.
    for c in 1.. {
        let d = brent_cycle(n, c);
        if d != 1 && d != n {
            split_rough(d, out);
            split_rough(n / d, out);
            return;
        }
    }
    unreachable!("every odd composite splits for some polynomial offset");
}

/// Factor a positive integer into `(prime, exponent)` pairs.
///
/// Deterministic for fixed `n`. Inputs up to 63 bits are the supported
/// range; the implementation remains correct over all of `u64`.
pub fn factorize(n: u64) -> Result<FactorList> {
    if n == 0 {
        return Err(Error::invalid("factorize(0): zero has no factorization"));
    }
    let mut rest = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rest > 1 {
        if rest < TRIAL_BOUND * TRIAL_BOUND {
            // Below the square of the trial bound, a survivor is prime.
            factors.push((rest, 1));
        } else {
            let mut rough = Vec::new();
            split_rough(rest, &mut rough);
            rough.sort_unstable();
            let mut i = 0;
            while i < rough.len() {
                let p = rough[i];
                let mut e = 0u32;
                while i < rough.len() && rough[i] == p {
                    e += 1;
                    i += 1;
                }
                factors.push((p, e));
            }
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);
    Ok(FactorList { n, factors })
}

/// Euler's totient from a factorization.
pub fn euler_phi(fl: &FactorList) -> u64 {
    fl.factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product::<u64>()
        .max(1)
}

/// Sorted list of all divisors of the factored integer.
pub fn divisors(fl: &FactorList) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, e) in &fl.factors {
        let prev = divs.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            divs.extend(prev.iter().map(|d| d * pe));
        }
    }
    divs.sort_unstable();
    divs
}

/// Thread-safe factorization cache with optional disk persistence.
///
/// The disk file lives at `<dir>/factors.txt`. Loading verifies every
/// entry; `save` rewrites the whole file sorted by `n`, so repeated
/// save/load cycles are byte-stable.
#[derive(Debug)]
pub struct FactorCache {
    path: Option<PathBuf>,
    map: RwLock<BTreeMap<u64, Vec<(u64, u32)>>>,
    dirty: AtomicBool,
}

impl FactorCache {
    /// Purely in-memory cache.
    pub fn in_memory() -> Self {
        FactorCache {
            path: None,
            map: RwLock::new(BTreeMap::new()),
            dirty: AtomicBool::new(false),
        }
    }

    /// Cache backed by `<dir>/factors.txt`, loading any existing entries.
    pub fn open(dir: &Path) -> Result<Self> {
        let path = dir.join("factors.txt");
        let mut map = BTreeMap::new();
        if path.exists() {
            let text = std::fs::read_to_string(&path)?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let (n, factors) = parse_cache_line(line).ok_or_else(|| {
                    Error::config(format!(
                        "malformed cache line {} in {}",
                        lineno + 1,
                        path.display()
                    ))
                })?;
                verify_entry(n, &factors).map_err(|e| {
                    Error::config(format!(
                        "invalid cache entry for {n} in {}: {e}",
                        path.display()
                    ))
                })?;
                map.insert(n, factors);
            }
        }
        Ok(FactorCache {
            path: Some(path),
            map: RwLock::new(map),
            dirty: AtomicBool::new(false),
        })
    }

    /// Factor through the cache.
    pub fn factorize(&self, n: u64) -> Result<FactorList> {
        if let Some(factors) = self.map.read().expect("cache lock").get(&n) {
            return Ok(FactorList {
                n,
                factors: factors.clone(),
            });
        }
        let fl = factorize(n)?;
        self.map
            .write()
            .expect("cache lock")
            .insert(n, fl.factors.clone());
        self.dirty.store(true, Ordering::Release);
        Ok(fl)
    }

    /// Persist to disk if backed by a file and modified since load.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if !self.dirty.load(Ordering::Acquire) {
            return Ok(());
        }
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let map = self.map.read().expect("cache lock");
        let mut out = String::new();
        for (n, factors) in map.iter() {
            out.push_str(&format_cache_line(*n, factors));
            out.push('\n');
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(out.as_bytes())?;
        self.dirty.store(false, Ordering::Release);
        Ok(())
    }

    /// Number of cached entries.
    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn parse_cache_line(line: &str) -> Option<(u64, Vec<(u64, u32)>)> {
    let (n_str, rest) = line.split_once(':')?;
    let n: u64 = n_str.trim().parse().ok()?;
    let mut factors = Vec::new();
    for tok in rest.split_whitespace() {
        let (p_str, e_str) = tok.split_once('^')?;
        factors.push((p_str.parse().ok()?, e_str.parse().ok()?));
    }
    Some((n, factors))
}

fn format_cache_line(n: u64, factors: &[(u64, u32)]) -> String {
    let body = factors
        .iter()
        .map(|&(p, e)| format!("{p}^{e}"))
        .collect::<Vec<_>>()
        .join(" ");
    format!("{n}: {body}")
}

fn verify_entry(n: u64, factors: &[(u64, u32)]) -> Result<()> {
    let mut product: u128 = 1;
    let mut last = 0u64;
    for &(p, e) in factors {
        if p <= last {
            return Err(Error::config("primes not strictly increasing"));
        }
        if !is_prime_u64(p) {
            return Err(Error::config(format!("{p} is not prime")));
        }
        last = p;
        for _ in 0..e {
            product *= p as u128;
        }
    }
    if product != n as u128 {
        return Err(Error::config(format!("product mismatch for {n}")));
    }
    Ok(())
}
