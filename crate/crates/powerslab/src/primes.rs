//! Prime sieving and deterministic 64-bit primality testing.

use crate::error::{Error, Result};

/// Bit-packed Eratosthenes sieve with membership queryable on `[2, limit]`.
pub struct PrimeSieve {
    limit: u64,
    bits: Vec<u64>,
}

impl PrimeSieve {
    fn mark_composite(bits: &mut [u64], n: u64) {
        bits[(n / 64) as usize] &= !(1u64 << (n % 64));
    }

    fn is_set(bits: &[u64], n: u64) -> bool {
        bits[(n / 64) as usize] >> (n % 64) & 1 == 1
    }
}

/// Sieve all primes `p ≤ limit`. Requires `limit ≥ 2`.
pub fn sieve_primes(limit: u64) -> Result<PrimeSieve> {
    if limit < 2 {
        return Err(Error::invalid(format!("sieve limit {limit} < 2")));
    }
    if limit >= u32::MAX as u64 * 2 {
        return Err(Error::unsupported(format!(
            "sieve limit {limit} exceeds supported range"
        )));
    }
    let words = (limit / 64 + 1) as usize;
    let mut bits = vec![u64::MAX; words];
    PrimeSieve::mark_composite(&mut bits, 0);
    PrimeSieve::mark_composite(&mut bits, 1);
    let mut p = 2u64;
    while p * p <= limit {
        if PrimeSieve::is_set(&bits, p) {
            let mut q = p * p;
            while q <= limit {
                PrimeSieve::mark_composite(&mut bits, q);
                q += p;
            }
        }
        p += 1;
    }
    // Clear garbage bits above `limit` in the last word so popcounts are exact.
    let last_used = (limit % 64) as u32;
    if last_used < 63 {
        let mask = (1u64 << (last_used + 1)) - 1;
        *bits.last_mut().expect("at least one word") &= mask;
    }
    Ok(PrimeSieve { limit, bits })
}

impl PrimeSieve {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Membership test. Requires `n ≤ limit`.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "query {n} beyond sieve limit {}", self.limit);
        Self::is_set(&self.bits, n)
    }

    /// π(x): number of primes `p ≤ x`. Requires `x ≤ limit`.
    pub fn prime_pi(&self, x: u64) -> u64 {
        assert!(x <= self.limit, "query {x} beyond sieve limit {}", self.limit);
        let full_words = (x / 64) as usize;
        let mut count: u64 = self.bits[..full_words]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        let rem_mask = if x % 64 == 63 {
            u64::MAX
        } else {
            (1u64 << (x % 64 + 1)) - 1
        };
        count += (self.bits[full_words] & rem_mask).count_ones() as u64;
        count
    }

    /// Iterate primes in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| Self::is_set(&self.bits, n))
    }

    /// Collect all primes `p ≤ limit` into a vector.
    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }
}

/// `(a * b) mod m` without overflow.
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Bases making Miller–Rabin deterministic for every `u64` input
/// (first twelve primes; correct beyond 3.3·10^24).
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test valid for the full `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'bases: for &a in &MR_BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division_is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn rejects_limit_below_two() {
        assert!(sieve_primes(1).is_err());
        assert!(sieve_primes(0).is_err());
    }

    #[test]
    fn limit_two_contains_only_two() {
        let s = sieve_primes(2).unwrap();
        assert_eq!(s.to_vec(), vec![2]);
        assert_eq!(s.prime_pi(2), 1);
    }

    #[test]
    fn pi_of_100_is_25() {
        let s = sieve_primes(100).unwrap();
        assert_eq!(s.prime_pi(100), 25);
        assert_eq!(s.to_vec().len(), 25);
    }

    #[test]
    fn pi_of_one_million_is_78498() {
        let s = sieve_primes(1_000_000).unwrap();
        assert_eq!(s.prime_pi(1_000_000), 78498);
    }

    #[test]
    fn matches_trial_division_on_prefix() {
        let s = sieve_primes(3000).unwrap();
        for n in 2..=3000 {
            assert_eq!(s.is_prime(n), trial_division_is_prime(n), "n={n}");
        }
    }

    #[test]
    fn word_boundary_queries() {
        let s = sieve_primes(193).unwrap(); // 193 prime, near 3*64
        assert!(s.is_prime(193));
        assert_eq!(s.prime_pi(193), s.to_vec().len() as u64);
        for x in [63, 64, 65, 127, 128, 191, 192, 193] {
            let by_iter = s.iter().take_while(|&p| p <= x).count() as u64;
            assert_eq!(s.prime_pi(x), by_iter, "x={x}");
        }
    }

    #[test]
    fn miller_rabin_known_values() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(6_700_417)); // factor of 2^32+1
        assert!(is_prime_u64(67_280_421_310_721)); // factor of 2^64+1
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(!is_prime_u64(u64::MAX)); // 2^64-1 = 3*5*17*257*641*65537*6700417
    }

    proptest! {
        #[test]
        fn miller_rabin_matches_trial_division(n in 0u64..200_000) {
            prop_assert_eq!(is_prime_u64(n), trial_division_is_prime(n));
        }

        #[test]
        fn pi_is_monotone(a in 2u64..5000, b in 2u64..5000) {
            let s = sieve_primes(5000).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(s.prime_pi(lo) <= s.prime_pi(hi));
        }
    }
}
