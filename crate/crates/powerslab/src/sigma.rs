//! The twin-prime constant and the singular series weight `σ(m)`.
//!
//! `σ(m) = 2·C₀·∏_{p | m, p odd} (p−1)/(p−2)` where `C₀` is the
//! twin-prime constant `∏_{p>2} (1 − 1/(p−1)²)`. The product over prime
//! divisors is restricted to odd primes — at `p = 2` the factor is
//! undefined, and the standard convention folds the even prime into the
//! leading 2. Consequently `σ(m) = σ(−m) = σ(2m)`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::factor::{factorize, FactorCache, FactorList};
use crate::interval::Interval;
use crate::primes::sieve_primes;

/// Rigorous enclosure of the twin-prime constant `∏_{p>2}(1 − 1/(p−1)²)`.
///
/// The product runs over odd primes `p < prime_limit`; the lower endpoint
/// additionally multiplies in the tail bound `1 − 1/(prime_limit − 2)`,
/// which under-estimates `∏_{p ≥ prime_limit}(1 − 1/(p−1)²)` because
/// `Σ_{n ≥ P} 1/(n−1)² < 1/(P−2)`.
pub fn compute_c0(prime_limit: u64) -> Result<Interval> {
    if prime_limit < 5 {
        return Err(Error::invalid(format!(
            "prime_limit {prime_limit} < 5: product needs at least p=3"
        )));
    }
    let sieve = sieve_primes(prime_limit)?;
    let one = Interval::point(1.0);
    let mut finite = one;
    for p in sieve.iter() {
        if p == 2 || p >= prime_limit {
            continue;
        }
        let pm1 = Interval::from_u64(p - 1);
        finite = finite * (one - one / (pm1 * pm1));
    }
    let tail = one - one / Interval::from_u64(prime_limit - 2);
    let lo = (finite * tail).lo();
    Ok(Interval::new(lo, finite.hi()))
}

/// `∏_{p | n, p odd} (p−1)/(p−2)` as an interval, from a factorization.
pub fn singular_ratio(fl: &FactorList) -> Interval {
    let mut ratio = Interval::point(1.0);
    for p in fl.odd_primes() {
        ratio = ratio * (Interval::from_u64(p - 1) / Interval::from_u64(p - 2));
    }
    ratio
}

fn odd_part_of_magnitude(m: i128) -> Result<u64> {
    debug_assert!(m != 0);
    let mag = m.unsigned_abs();
    let odd = mag >> mag.trailing_zeros();
    u64::try_from(odd).map_err(|_| {
        Error::unsupported(format!("odd part of {m} exceeds the 64-bit factoring range"))
    })
}

/// The singular series `σ(m) = 2·C₀·∏_{p|m, p odd}(p−1)/(p−2)`.
///
/// `σ` depends only on the odd part of `|m|`, so `σ(m) = σ(−m) = σ(2m)`.
pub fn sigma_singular(m: i128, c0: Interval) -> Result<Interval> {
    if m == 0 {
        return Err(Error::invalid("sigma is undefined at m = 0"));
    }
    let odd = odd_part_of_magnitude(m)?;
    let ratio = singular_ratio(&factorize(odd)?);
    Ok(Interval::point(2.0) * c0 * ratio)
}

/// Memoized `σ` ratios keyed by odd part, optionally routing
/// factorizations through a persistent [`FactorCache`].
pub struct SigmaMemo<'a> {
    ratios: HashMap<u64, Interval>,
    factor_cache: Option<&'a FactorCache>,
}

impl<'a> SigmaMemo<'a> {
    pub fn new() -> Self {
        SigmaMemo {
            ratios: HashMap::new(),
            factor_cache: None,
        }
    }

    pub fn with_factor_cache(cache: &'a FactorCache) -> Self {
        SigmaMemo {
            ratios: HashMap::new(),
            factor_cache: Some(cache),
        }
    }

    /// `∏_{p | odd, p odd}(p−1)/(p−2)` for an odd positive integer.
    pub fn ratio_of_odd(&mut self, odd: u64) -> Result<Interval> {
        debug_assert!(odd % 2 == 1);
        if let Some(&r) = self.ratios.get(&odd) {
            return Ok(r);
        }
        let fl = match self.factor_cache {
            Some(cache) => cache.factorize(odd)?,
            None => factorize(odd)?,
        };
        let r = singular_ratio(&fl);
        self.ratios.insert(odd, r);
        Ok(r)
    }

    /// Full `σ(m)` through the memo.
    pub fn sigma(&mut self, m: i128, c0: Interval) -> Result<Interval> {
        if m == 0 {
            return Err(Error::invalid("sigma is undefined at m = 0"));
        }
        let ratio = self.ratio_of_odd(odd_part_of_magnitude(m)?)?;
        Ok(Interval::point(2.0) * c0 * ratio)
    }

    /// Number of distinct odd parts resolved so far.
    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }
}

impl Default for SigmaMemo<'_> {
    fn default() -> Self {
        Self::new()
    }
}
