//! Distributions of sums of `k` powers of two, their correlation counts
//! `r_{k,k}(m, L)`, and the truncation estimates of the correlation
//! constants `A(k)`.
//!
//! `r_{k,k}(m, L)` counts tuples `(a_1, …, a_{2k}) ∈ {0..L}^{2k}` with
//! `m = 2^{a_1} + … + 2^{a_k} − 2^{a_{k+1}} − … − 2^{a_{2k}}`, and
//!
//! ```text
//! S(k, L) = Σ_{m≠0} r_{k,k}(m, L) · σ(m),        A(k) ≈ S(k, L)/(2L^{2k}) − 1.
//! ```
//!
//! The estimate converges slowly in `L` (no convergence rate is known),
//! so results carry the truncation level explicitly and the interval only
//! bounds the finite-`L` value, not the limit.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::factor::FactorCache;
use crate::interval::Interval;
use crate::primes::sieve_primes;
use crate::sigma::SigmaMemo;

/// Largest supported truncation level per `k`; index by `k − 1`.
///
/// The caps keep every sum value within range and bound the correlation
/// work: for `k = 4` they also keep `|m| < 2^26` so σ can be served from a
/// sieve-built ratio table instead of per-value factorization.
pub const TRUNCATION_CAPS: [u32; 4] = [64, 48, 32, 24];

/// Per-`k` truncation cap. `k` must be in `1..=4`.
pub fn truncation_cap(k: u32) -> Result<u32> {
    TRUNCATION_CAPS
        .get(k.checked_sub(1).ok_or_else(|| Error::invalid("k = 0"))? as usize)
        .copied()
        .ok_or_else(|| Error::invalid(format!("k = {k} out of supported range 1..=4")))
}

/// Multiplicity spectrum of `2^{a_1} + … + 2^{a_k}` over `(a_i) ∈ {0..L}^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSumDistribution {
    pub k: u32,
    pub l: u32,
    /// value → number of ordered exponent tuples producing it.
    pub counts: BTreeMap<u128, u64>,
}

impl PowerSumDistribution {
    /// Total multiplicity; equals `(L+1)^k`.
    pub fn total(&self) -> u128 {
        self.counts.values().map(|&c| c as u128).sum()
    }
}

/// Build the spectrum by iterated self-convolution with the base layer
/// `{2^a : a ∈ 0..=L}`.
pub fn build_distribution(k: u32, l: u32) -> Result<PowerSumDistribution> {
    if !(1..=4).contains(&k) {
        return Err(Error::invalid(format!("k = {k} out of supported range 1..=4")));
    }
    if l > 64 {
        return Err(Error::invalid(format!(
            "L = {l} overflows the supported value range"
        )));
    }
    let mut counts: BTreeMap<u128, u64> = (0..=l).map(|a| (1u128 << a, 1u64)).collect();
    for _ in 1..k {
        let mut next: BTreeMap<u128, u64> = BTreeMap::new();
        for (&v, &c) in &counts {
            for a in 0..=l {
                *next.entry(v + (1u128 << a)).or_insert(0) += c;
            }
        }
        counts = next;
    }
    Ok(PowerSumDistribution { k, l, counts })
}

/// Correlate a spectrum with itself: `r(m) = Σ_s counts(s)·counts(s−m)`
/// for `m ≠ 0`. The result is symmetric, `r(m) = r(−m)`, and satisfies
/// `Σ_{m≠0} r(m) = (L+1)^{2k} − Σ_s counts(s)²`.
pub fn correlate_r(dist: &PowerSumDistribution) -> BTreeMap<i128, u64> {
    let pairs: Vec<(u128, u64)> = dist.counts.iter().map(|(&v, &c)| (v, c)).collect();
    let mut r: BTreeMap<i128, u64> = BTreeMap::new();
    for (i, &(vi, ci)) in pairs.iter().enumerate() {
        for &(vj, cj) in &pairs[..i] {
            // vi > vj since the map iterates in key order.
            let m = (vi - vj) as i128;
            let prod = ci * cj;
            *r.entry(m).or_insert(0) += prod;
            *r.entry(-m).or_insert(0) += prod;
        }
    }
    r
}

/// Truncation estimate of a correlation constant `A(k)`.
#[derive(Debug, Clone)]
pub struct AkEstimate {
    pub k: u32,
    pub l: u32,
    /// Enclosure of `S(k, L) = Σ_{m≠0} r(m)·σ(m)` at this truncation.
    pub s_value: Interval,
    /// Enclosure of `S(k, L)/(2L^{2k}) − 1`.
    pub estimate: Interval,
    /// Published bracket for the limit `A(k)`, when one is known.
    pub paper_bracket: Option<Interval>,
}

/// Published brackets for `A(k)`, `k = 1..=4`.
pub fn reference_bracket(k: u32) -> Option<Interval> {
    let (lo, hi) = match k {
        1 => (0.27835, 0.27926),
        2 => (0.05458, 0.05549),
        3 => (0.012697, 0.013598),
        4 => (0.003091, 0.003992),
        _ => return None,
    };
    Some(Interval::from_decimal_bounds(lo, hi))
}

fn odd_part_u64(m: u64) -> u64 {
    debug_assert!(m != 0);
    m >> m.trailing_zeros()
}

/// `Σ_{m>0 ascending} r(m)·ratio(m)` with memoized singular ratios.
fn half_sum_memo(
    pairs: impl Iterator<Item = (u64, u64)>,
    memo: &mut SigmaMemo<'_>,
) -> Result<Interval> {
    let mut acc = Interval::point(0.0);
    for (m, r) in pairs {
        let ratio = memo.ratio_of_odd(odd_part_u64(m))?;
        acc = acc + Interval::from_u64(r) * ratio;
    }
    Ok(acc)
}

/// Positive-`m` half of the correlation for `k ≤ 2`, via the full map.
fn half_pairs_from_map(dist: &PowerSumDistribution) -> Vec<(u64, u64)> {
    correlate_r(dist)
        .range(1i128..)
        .map(|(&m, &r)| (u64::try_from(m).expect("positive m fits u64 under caps"), r))
        .collect()
}

/// Positive-`m` half of the correlation for `k = 3`, skipping the full
/// map: accumulate pair differences in a hash map, then sort ascending.
fn half_pairs_k3(dist: &PowerSumDistribution) -> Vec<(u64, u64)> {
    let pairs: Vec<(u64, u64)> = dist
        .counts
        .iter()
        .map(|(&v, &c)| (u64::try_from(v).expect("k=3 values fit u64"), c))
        .collect();
    let mut rmap: HashMap<u64, u64> = HashMap::with_capacity(1 << 20);
    for (i, &(vi, ci)) in pairs.iter().enumerate() {
        for &(vj, cj) in &pairs[..i] {
            *rmap.entry(vi - vj).or_insert(0) += ci * cj;
        }
    }
    let mut half: Vec<(u64, u64)> = rmap.into_iter().collect();
    half.sort_unstable_by_key(|&(m, _)| m);
    half
}

/// Maximum relative error of a sieve-built σ-ratio table entry: at most 7
/// distinct odd primes divide any value below 2^26, each contributing one
/// division and one multiplication rounding (≤ 2 ulp each); 1e-13 is two
/// orders of magnitude above the true bound.
const RATIO_TABLE_MARGIN: f64 = 1e-13;

/// `∏_{p | v, p odd}(p−1)/(p−2)` for every odd `v ≤ max_odd`, as `f64`
/// values with relative error below [`RATIO_TABLE_MARGIN`]. Index `v/2`.
fn build_ratio_table(max_odd: u64) -> Result<Vec<f64>> {
    let mut table = vec![1.0f64; (max_odd / 2 + 1) as usize];
    let sieve = sieve_primes(max_odd.max(3))?;
    for p in sieve.iter().skip(1) {
        if p > max_odd {
            break;
        }
        let f = (p - 1) as f64 / (p - 2) as f64;
        let mut v = p;
        while v <= max_odd {
            table[(v / 2) as usize] *= f;
            v += 2 * p; // next odd multiple
        }
    }
    Ok(table)
}

/// `k = 4` path: correlation counts in a flat array indexed by `m`, σ from
/// the ratio table. Summation is ascending in `m` like the other paths.
fn half_sum_k4(dist: &PowerSumDistribution, l: u32) -> Result<Interval> {
    let max_m = (4u64 << l) - 4;
    let pairs: Vec<(u64, u64)> = dist
        .counts
        .iter()
        .map(|(&v, &c)| (u64::try_from(v).expect("k=4 values fit u64"), c))
        .collect();
    let mut r = vec![0u64; (max_m + 1) as usize];
    for (i, &(vi, ci)) in pairs.iter().enumerate() {
        for &(vj, cj) in &pairs[..i] {
            r[(vi - vj) as usize] += ci * cj;
        }
    }
    let table = build_ratio_table(odd_part_u64(max_m).max(max_m - 1))?;
    let mut acc = Interval::point(0.0);
    for (m, &rm) in r.iter().enumerate().skip(1) {
        if rm == 0 {
            continue;
        }
        let ratio = Interval::point(table[(odd_part_u64(m as u64) / 2) as usize])
            .widen_rel(RATIO_TABLE_MARGIN);
        acc = acc + Interval::from_u64(rm) * ratio;
    }
    Ok(acc)
}

/// Estimate `A(k)` at truncation level `L`.
///
/// `S(k, L)` is summed in ascending-`|m|` order for reproducibility, and
/// the returned intervals rigorously enclose the finite-`L` quantity. The
/// optional cache persists the Mersenne-number factorizations the `k = 1`
/// path needs (odd parts there are exactly `2^d − 1`, `d ≤ L`); other `k`
/// see millions of unrelated odd parts and always factor in memory.
pub fn estimate_ak(
    k: u32,
    l: u32,
    c0: Interval,
    mersenne_cache: Option<&FactorCache>,
) -> Result<AkEstimate> {
    let cap = truncation_cap(k)?;
    if l < 1 || l > cap {
        return Err(Error::invalid(format!(
            "L = {l} outside supported range 1..={cap} for k = {k}"
        )));
    }
    let dist = build_distribution(k, l)?;
    let half = match k {
        1 | 2 => {
            let mut memo = match (k, mersenne_cache) {
                (1, Some(cache)) => SigmaMemo::with_factor_cache(cache),
                _ => SigmaMemo::new(),
            };
            half_sum_memo(half_pairs_from_map(&dist).into_iter(), &mut memo)?
        }
        3 => half_sum_memo(half_pairs_k3(&dist).into_iter(), &mut SigmaMemo::new())?,
        4 => half_sum_k4(&dist, l)?,
        _ => unreachable!("k validated above"),
    };
    // S = Σ_{m≠0} r·σ = 2·Σ_{m>0} r·σ = 2 · 2·C₀ · Σ_{m>0} r·ratio.
    let s_value = Interval::point(4.0) * c0 * half;
    let denom = Interval::point(2.0) * Interval::point((l as f64).powi(2 * k as i32));
    let estimate = s_value / denom - Interval::point(1.0);
    Ok(AkEstimate {
        k,
        l,
        s_value,
        estimate,
        paper_bracket: reference_bracket(k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigma::compute_c0;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn c0() -> Interval {
        static C0: OnceLock<Interval> = OnceLock::new();
        *C0.get_or_init(|| compute_c0(1_000_000).unwrap())
    }

    #[test]
    fn base_distribution() {
        let d = build_distribution(1, 1).unwrap();
        assert_eq!(d.counts, BTreeMap::from([(1, 1), (2, 1)]));
    }

    #[test]
    fn binomial_convolution() {
        let d = build_distribution(2, 1).unwrap();
        assert_eq!(d.counts, BTreeMap::from([(2, 1), (3, 2), (4, 1)]));
    }

    #[test]
    fn cube_totals() {
        let d = build_distribution(3, 2).unwrap();
        assert_eq!(d.total(), 27);
        assert_eq!(*d.counts.keys().max().unwrap(), 12);
        assert_eq!(*d.counts.keys().min().unwrap(), 3);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_distribution(0, 4).is_err());
        assert!(build_distribution(5, 4).is_err());
        assert!(build_distribution(1, 65).is_err());
        assert!(estimate_ak(1, 0, c0(), None).is_err());
        assert!(estimate_ak(1, 65, c0(), None).is_err());
        assert!(estimate_ak(2, 49, c0(), None).is_err());
        assert!(estimate_ak(3, 33, c0(), None).is_err());
        assert!(estimate_ak(4, 25, c0(), None).is_err());
        assert!(estimate_ak(5, 4, c0(), None).is_err());
    }

    #[test]
    fn largest_k1_distribution_uses_wide_keys() {
        let d = build_distribution(1, 64).unwrap();
        assert_eq!(*d.counts.keys().max().unwrap(), 1u128 << 64);
        assert_eq!(d.total(), 65);
    }

    #[test]
    fn correlate_small_known() {
        let d = build_distribution(1, 1).unwrap();
        let r = correlate_r(&d);
        assert_eq!(r, BTreeMap::from([(-1, 1), (1, 1)]));

        let d = build_distribution(1, 2).unwrap();
        let r = correlate_r(&d);
        assert_eq!(
            r,
            BTreeMap::from([(1, 1), (2, 1), (3, 1), (-1, 1), (-2, 1), (-3, 1)])
        );
    }

    fn brute_force_r(k: u32, l: u32) -> BTreeMap<i128, u64> {
        // Enumerate all (L+1)^(2k) exponent tuples directly.
        let n = (l + 1) as u64;
        let tuples = n.pow(2 * k);
        let mut r = BTreeMap::new();
        for code in 0..tuples {
            let mut c = code;
            let mut m: i128 = 0;
            for pos in 0..2 * k {
                let a = (c % n) as u32;
                c /= n;
                let term = 1i128 << a;
                m += if pos < k { term } else { -term };
            }
            if m != 0 {
                *r.entry(m).or_insert(0) += 1;
            }
        }
        r
    }

    #[test]
    fn matches_brute_force_enumeration() {
        for k in 1..=2u32 {
            for l in 1..=if k == 1 { 6 } else { 4 } {
                let fast = correlate_r(&build_distribution(k, l).unwrap());
                assert_eq!(fast, brute_force_r(k, l), "k={k} L={l}");
            }
        }
    }

    #[test]
    fn k1_nonzero_m_has_mersenne_odd_part() {
        let l = 20;
        let r = correlate_r(&build_distribution(1, l).unwrap());
        for (&m, &count) in &r {
            assert!(count > 0);
            let odd = odd_part_u64(m.unsigned_abs() as u64);
            let d = (odd + 1).trailing_zeros();
            assert_eq!(odd, (1u64 << d) - 1, "m={m}");
            assert!(d >= 1 && d <= l);
        }
    }

    proptest! {
        #[test]
        fn distribution_invariants(k in 1u32..=4, l in 0u32..=6) {
            let d = build_distribution(k, l).unwrap();
            prop_assert_eq!(d.total(), ((l + 1) as u128).pow(k));
            prop_assert_eq!(*d.counts.keys().min().unwrap(), k as u128);
            prop_assert_eq!(*d.counts.keys().max().unwrap(), (k as u128) << l);
        }

        #[test]
        fn correlation_symmetry_and_mass(k in 1u32..=3, l in 1u32..=4) {
            let d = build_distribution(k, l).unwrap();
            let r = correlate_r(&d);
            for (&m, &count) in &r {
                prop_assert_eq!(count, r[&-m]);
            }
            let off_diag: u128 = r.values().map(|&c| c as u128).sum();
            let diag: u128 = d.counts.values().map(|&c| (c as u128) * (c as u128)).sum();
            prop_assert_eq!(off_diag + diag, ((l + 1) as u128).pow(2 * k));
        }
    }

    /// Frozen truncation values, independently cross-checked against a
    /// separate implementation of the same sums.
    #[test]
    fn frozen_truncation_estimates() {
        let cases = [
            (1, 16, 0.22311),
            (1, 32, 0.23774),
            (2, 16, 0.317563),
            (3, 16, 0.451755),
            (4, 16, 0.627595),
        ];
        for (k, l, expected) in cases {
            let est = estimate_ak(k, l, c0(), None).unwrap();
            let mid = est.estimate.midpoint();
            assert!(
                (mid - expected).abs() < 2e-5,
                "k={k} L={l}: got {mid}, expected {expected}"
            );
            assert!(est.estimate.width() < 1e-4);
        }
    }

    #[test]
    fn k3_fast_path_matches_map_path() {
        // The hash-accumulate path and the BTreeMap path must produce the
        // same ascending-m pair sequence, hence bitwise-equal sums.
        let l = 8;
        let dist = build_distribution(3, l).unwrap();
        let via_map: Vec<(u64, u64)> = correlate_r(&dist)
            .range(1i128..)
            .map(|(&m, &r)| (m as u64, r))
            .collect();
        assert_eq!(half_pairs_k3(&dist), via_map);

        let a = half_sum_memo(half_pairs_k3(&dist).into_iter(), &mut SigmaMemo::new()).unwrap();
        let b = half_sum_memo(via_map.into_iter(), &mut SigmaMemo::new()).unwrap();
        assert_eq!(a.lo(), b.lo());
        assert_eq!(a.hi(), b.hi());
    }

    #[test]
    fn k4_table_path_agrees_with_memo_path() {
        let l = 10;
        let dist = build_distribution(4, l).unwrap();
        let table_sum = half_sum_k4(&dist, l).unwrap();
        let memo_sum = half_sum_memo(
            correlate_r(&dist)
                .range(1i128..)
                .map(|(&m, &r)| (m as u64, r)),
            &mut SigmaMemo::new(),
        )
        .unwrap();
        // Different σ sources: assert tight mutual agreement, not equality.
        assert!((table_sum.midpoint() - memo_sum.midpoint()).abs() / memo_sum.midpoint() < 1e-10);
        assert!(table_sum.intersect(&memo_sum).is_some());
    }

    #[test]
    fn estimate_exceeds_lower_bound_small_l() {
        // A(k) > 2^(-2k-1); the truncations sit above the limit for k ≥ 2
        // and above 2^(-3) − ε for k = 1 already at modest L.
        for k in 1..=4u32 {
            let est = estimate_ak(k, 12, c0(), None).unwrap();
            assert!(est.estimate.lo() > f64::powi(2.0, -(2 * k as i32) - 1));
        }
    }

    #[test]
    fn reference_brackets_present() {
        for k in 1..=4 {
            let b = reference_bracket(k).unwrap();
            assert!(b.lo() > 0.0 && b.hi() < 0.3);
        }
        assert!(reference_bracket(0).is_none());
        assert!(reference_bracket(5).is_none());
    }

    #[test]
    fn ratio_table_matches_factorization() {
        let table = build_ratio_table(9999).unwrap();
        let mut memo = SigmaMemo::new();
        for v in (1u64..10000).step_by(2) {
            let exact = memo.ratio_of_odd(v).unwrap();
            let t = table[(v / 2) as usize];
            assert!(
                exact.widen_rel(RATIO_TABLE_MARGIN).contains(t),
                "v={v}: table {t} vs exact {exact}"
            );
        }
    }
}
