//! Finite-range experiments backing the asymptotic results: representation
//! counts for prime-plus-powers-of-two, observed densities, Goldbach pair
//! counts against the Hardy–Littlewood prediction, prime gap counts in
//! residue classes, and explicit two-power decompositions of even numbers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::factor::factorize;
use crate::interval::Interval;
use crate::primes::PrimeSieve;

/// Largest supported number of power-of-two summands per representation.
pub const MAX_K_POWERS: u32 = 16;

fn check_sieve(sieve: &PrimeSieve, needed: u64, what: &str) -> Result<()> {
    if sieve.limit() < needed {
        return Err(Error::invalid(format!(
            "sieve covers only {} but {what} needs primality up to {needed}",
            sieve.limit()
        )));
    }
    Ok(())
}

fn check_k_powers(k_powers: u32) -> Result<()> {
    if k_powers == 0 || k_powers > MAX_K_POWERS {
        return Err(Error::invalid(format!(
            "k_powers = {k_powers} outside 1..={MAX_K_POWERS}"
        )));
    }
    Ok(())
}

/// Number of representations `n = p + 2^{a₁} + … + 2^{a_k}` with `p`
/// prime and the exponent multiset `a₁ ≤ … ≤ a_k` unordered.
pub fn rep_count(n: u64, k_powers: u32, sieve: &PrimeSieve) -> Result<u64> {
    if n < 2 {
        return Err(Error::invalid(format!("n = {n} < 2")));
    }
    check_k_powers(k_powers)?;
    check_sieve(sieve, n, "rep_count")?;
    fn recurse(rest: u64, k_left: u32, min_a: u32, sieve: &PrimeSieve) -> u64 {
        if k_left == 0 {
            return u64::from(rest >= 2 && sieve.is_prime(rest));
        }
        let mut total = 0;
        for a in min_a..63 {
            // leave room for the prime and the k_left − 1 later powers,
            // each at least as large as this one
            if (1u128 << a) * k_left as u128 + 2 > rest as u128 {
                break;
            }
            total += recurse(rest - (1 << a), k_left - 1, a, sieve);
        }
        total
    }
    Ok(recurse(n, k_powers, 0, sieve))
}

/// Bitset over `0..=limit` marking integers with at least one
/// representation as a prime plus `k_powers` powers of two.
pub fn representable_flags(limit: u64, k_powers: u32, sieve: &PrimeSieve) -> Result<Vec<u64>> {
    check_k_powers(k_powers)?;
    check_sieve(sieve, limit, "representable_flags")?;
    let words = (limit / 64 + 1) as usize;
    let mut cur = vec![0u64; words];
    for p in sieve.iter() {
        if p > limit {
            break;
        }
        cur[(p / 64) as usize] |= 1 << (p % 64);
    }
    for _ in 0..k_powers {
        let mut next = vec![0u64; words];
        for n in 0..=limit {
            if cur[(n / 64) as usize] >> (n % 64) & 1 == 0 {
                continue;
            }
            let mut a = 0u32;
            while let Some(v) = n.checked_add(1 << a) {
                if v > limit || a >= 63 {
                    break;
                }
                next[(v / 64) as usize] |= 1 << (v % 64);
                a += 1;
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Observed density `d(N) = #{n ≤ N : n representable}/N` at each
/// checkpoint. Checkpoints must be ascending, at least 4, at most `limit`.
pub fn density_profile(
    limit: u64,
    k_powers: u32,
    checkpoints: &[u64],
    sieve: &PrimeSieve,
) -> Result<Vec<(u64, f64)>> {
    if limit < 4 {
        return Err(Error::invalid(format!("limit = {limit} < 4")));
    }
    if checkpoints.is_empty() {
        return Err(Error::invalid("no checkpoints given"));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("checkpoints must be strictly ascending"));
    }
    if checkpoints[0] < 4 || *checkpoints.last().unwrap() > limit {
        return Err(Error::invalid(format!(
            "checkpoints must lie in [4, {limit}]"
        )));
    }
    let flags = representable_flags(limit, k_powers, sieve)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut count = 0u64;
    let mut n = 1u64;
    for &cp in checkpoints {
        while n <= cp {
            count += flags[(n / 64) as usize] >> (n % 64) & 1;
            n += 1;
        }
        out.push((cp, count as f64 / cp as f64));
    }
    Ok(out)
}

/// Number of ordered pairs of odd primes `(p₁, p₂)` with `p₁ + p₂ = n`.
pub fn goldbach_g(n: u64, sieve: &PrimeSieve) -> Result<u64> {
    if n <= 4 || n % 2 != 0 {
        return Err(Error::invalid(format!("n = {n} must be even and > 4")));
    }
    check_sieve(sieve, n, "goldbach_g")?;
    let mut count = 0;
    let mut p1 = 3;
    while p1 <= n / 2 {
        if sieve.is_prime(p1) && sieve.is_prime(n - p1) {
            count += if p1 < n - p1 { 2 } else { 1 };
        }
        p1 += 2;
    }
    Ok(count)
}

/// Number of primes `p ≤ n` with `p ≡ k (mod ell)` and `p + h` prime.
/// `h = 0` counts primes in the class; `ell = 1` drops the class
/// restriction.
pub fn gap_count(n: u64, h: u64, ell: u64, k: u64, sieve: &PrimeSieve) -> Result<u64> {
    if ell == 0 {
        return Err(Error::invalid("ell = 0"));
    }
    let gcd = {
        let (mut a, mut b) = (k % ell, ell);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    if gcd != 1 {
        return Err(Error::invalid(format!(
            "residue {k} is not coprime to modulus {ell}"
        )));
    }
    if h >= n {
        return Err(Error::invalid(format!("h = {h} must be < n = {n}")));
    }
    check_sieve(sieve, n + h, "gap_count")?;
    let mut count = 0;
    for p in sieve.iter() {
        if p > n {
            break;
        }
        if p % ell == k % ell && sieve.is_prime(p + h) {
            count += 1;
        }
    }
    Ok(count)
}

/// Ratio of the observed Goldbach pair count to its Hardy–Littlewood
/// prediction `2·C₀·𝔖(n)·n/(ln n)²`, where `𝔖(n) = ∏_{p|n, p>2}(p−1)/(p−2)`.
pub fn hl_ratio(n: u64, c0: Interval, sieve: &PrimeSieve) -> Result<f64> {
    if n < 10_000 || n % 2 != 0 {
        return Err(Error::invalid(format!("n = {n} must be even and >= 10000")));
    }
    let g = goldbach_g(n, sieve)? as f64;
    let mut singular = 1.0;
    for (p, _) in factorize(n)?.factors {
        if p > 2 {
            singular *= (p - 1) as f64 / (p - 2) as f64;
        }
    }
    let ln_n = (n as f64).ln();
    let predicted = 2.0 * c0.midpoint() * singular * n as f64 / (ln_n * ln_n);
    Ok(g / predicted)
}

/// Witness that an even `n ≥ 8` splits as two primes plus two powers of
/// two: returns `(p₁, p₂, a₁, a₂)` with `p₁ + p₂ + 2^{a₁} + 2^{a₂} = n`,
/// found by scanning odd `j` with both `j` and `n − j` representable.
/// `flags` must come from [`representable_flags`] with `k_powers = 1` and
/// cover `n`.
pub fn verify_k2_decomposition(
    n: u64,
    flags: &[u64],
    sieve: &PrimeSieve,
) -> Result<(u64, u64, u32, u32)> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::invalid(format!("n = {n} must be even and >= 8")));
    }
    check_sieve(sieve, n, "verify_k2_decomposition")?;
    if (flags.len() as u64) * 64 < n + 1 {
        return Err(Error::invalid("representability flags do not cover n"));
    }
    let has = |j: u64| flags[(j / 64) as usize] >> (j % 64) & 1 == 1;
    let decompose = |j: u64| -> Option<(u64, u32)> {
        (0..63)
            .take_while(|&a| (1u64 << a) + 2 <= j)
            .find(|&a| sieve.is_prime(j - (1 << a)))
            .map(|a| (j - (1 << a), a))
    };
    let mut j = 3;
    while j <= n / 2 {
        if has(j) && has(n - j) {
            let (p1, a1) = decompose(j)
                .ok_or_else(|| Error::config("flag set but power decomposition failed"))?;
            let (p2, a2) = decompose(n - j)
                .ok_or_else(|| Error::config("flag set but power decomposition failed"))?;
            return Ok((p1, p2, a1, a2));
        }
        j += 2;
    }
    Err(Error::config(format!(
        "no two-power decomposition found for {n}"
    )))
}

/// Scan all even `n` in `[8, limit]` and report how many lack a two-power
/// decomposition, together with the first failing `n` if any.
pub fn scan_k2_decompositions(limit: u64, sieve: &PrimeSieve) -> Result<(u64, Option<u64>)> {
    if limit < 8 {
        return Err(Error::invalid(format!("limit = {limit} < 8")));
    }
    check_sieve(sieve, limit, "scan_k2_decompositions")?;
    let flags = representable_flags(limit, 1, sieve)?;
    let has = |j: u64| flags[(j / 64) as usize] >> (j % 64) & 1 == 1;
    let mut failures = 0;
    let mut first = None;
    let mut n = 8;
    while n <= limit {
        let mut ok = false;
        let mut j = 3;
        while j <= n / 2 {
            if has(j) && has(n - j) {
                ok = true;
                break;
            }
            j += 2;
        }
        if !ok {
            failures += 1;
            first.get_or_insert(n);
        }
        n += 2;
    }
    Ok((failures, first))
}

/// Group the observed density checkpoints with their share of the
/// asymptotic lower bound `d_asym` (observed density divided by bound).
pub fn profile_against_bound(
    profile: &[(u64, f64)],
    d_asym: f64,
) -> Result<BTreeMap<u64, (f64, f64)>> {
    if !(0.0..=0.5).contains(&d_asym) || d_asym == 0.0 {
        return Err(Error::invalid(format!(
            "asymptotic bound {d_asym} outside (0, 0.5]"
        )));
    }
    Ok(profile
        .iter()
        .map(|&(n, d)| (n, (d, d / d_asym)))
        .collect())
}
