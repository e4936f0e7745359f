use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::StatsError;

/// Both samples at or below this size get the exact distribution.
pub const DEFAULT_EXACT_THRESHOLD: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MwMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitneyResult {
    /// `min(U_a, U_b)`.
    pub u_statistic: f64,
    pub p_two_sided: f64,
    pub method: MwMethod,
    pub n_a: usize,
    pub n_b: usize,
    /// Every pooled value is identical; `p` is reported as 1.
    pub degenerate: bool,
}

/// Ranks starting at 1, ties sharing the mean of their positions.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their average
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Two-sided Mann–Whitney U test of samples `a` and `b`.
///
/// Ties get midranks. When both samples have at most `exact_threshold`
/// values, the p-value comes from the exact permutation distribution of the
/// rank sum (ties included); otherwise from the normal approximation with
/// tie-corrected variance and a 0.5 continuity correction.
pub fn mann_whitney(a: &[f64], b: &[f64], exact_threshold: usize) -> Result<MannWhitneyResult, StatsError> {
    if a.is_empty() {
        return Err(StatsError::EmptySample("a"));
    }
    if b.is_empty() {
        return Err(StatsError::EmptySample("b"));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let (n_a, n_b) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..n_a].iter().sum();
    let u_a = rank_sum_a - (n_a * (n_a + 1)) as f64 / 2.0;
    let u_b = (n_a * n_b) as f64 - u_a;
    let degenerate = pooled.iter().all(|&x| x == pooled[0]);

    let (p, method) = if n_a <= exact_threshold && n_b <= exact_threshold {
        (exact_p(&ranks, n_a), MwMethod::Exact)
    } else {
        (normal_p(&ranks, n_a, n_b, u_a), MwMethod::NormalApprox)
    };
    Ok(MannWhitneyResult {
        u_statistic: u_a.min(u_b),
        p_two_sided: if degenerate { 1.0 } else { p.clamp(f64::MIN_POSITIVE, 1.0) },
        method,
        n_a,
        n_b,
        degenerate,
    })
}

/// Exact two-sided p by counting rank-sum assignments at least as far from
/// the null mean as the observed one. Midranks are doubled so sums stay
/// integral.
fn exact_p(ranks: &[f64], n_a: usize) -> f64 {
    let n = ranks.len();
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // ways[k][s]: number of k-subsets of the items seen so far with doubled rank sum s
    let mut ways = vec![vec![0.0f64; max_sum + 1]; n_a + 1];
    ways[0][0] = 1.0;
    for &r in &doubled {
        for k in (1..=n_a).rev() {
            let (lower, upper) = ways.split_at_mut(k);
            let (prev, cur) = (&lower[k - 1], &mut upper[0]);
            for s in (r..=max_sum).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    let observed: usize = doubled[..n_a].iter().sum();
    // null mean of the doubled rank sum is n_a·(n+1)
    let center = (n_a * (n + 1)) as i64;
    let obs_dev = (observed as i64 - center).abs();
    let total: f64 = ways[n_a].iter().sum();
    let extreme: f64 = ways[n_a]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as i64 - center).abs() >= obs_dev)
        .map(|(_, w)| w)
        .sum();
    extreme / total
}

fn normal_p(ranks: &[f64], n_a: usize, n_b: usize, u_a: f64) -> f64 {
    let n = (n_a + n_b) as f64;
    let (na, nb) = (n_a as f64, n_b as f64);
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return 1.0;
    }
    let deviation = ((u_a - na * nb / 2.0).abs() - 0.5).max(0.0);
    let z = deviation / variance.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute-force oracle: walk every subset of the pooled sample of size
    /// n_a and compare |U - mean| with the observed deviation.
    fn enumerate_p(a: &[f64], b: &[f64]) -> f64 {
        let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
        let n = pooled.len();
        let n_a = a.len();
        let ranks = midranks(&pooled);
        let u_of = |sum: f64| sum - (n_a * (n_a + 1)) as f64 / 2.0;
        let mean = (n_a * b.len()) as f64 / 2.0;
        let observed = (u_of(ranks[..n_a].iter().sum()) - mean).abs();
        let (mut hits, mut total) = (0u64, 0u64);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n_a {
                continue;
            }
            total += 1;
            let sum: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
            if (u_of(sum) - mean).abs() >= observed - 1e-9 {
                hits += 1;
            }
        }
        hits as f64 / total as f64
    }

    #[test]
    fn midranks_share_ties() {
        assert_eq!(midranks(&[1.0, 2.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 3.0]), vec![3.0, 1.0, 3.0, 3.0]);
    }

    #[test]
    fn separated_triples() {
        let r = mann_whitney(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 8).unwrap();
        assert_eq!(r.u_statistic, 0.0);
        assert_eq!(r.method, MwMethod::Exact);
        assert!((r.p_two_sided - 0.1).abs() < 1e-15);
        assert!((enumerate_p(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn identical_multisets() {
        let a = [1.0, 4.0, 2.0, 8.0];
        let r = mann_whitney(&a, &a, 8).unwrap();
        assert_eq!(r.u_statistic, 8.0);
        assert!((r.p_two_sided - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tied_pairs() {
        let r = mann_whitney(&[1.0, 2.0], &[1.0, 2.0], 8).unwrap();
        assert_eq!(r.u_statistic, 2.0);
        assert!((r.p_two_sided - 1.0).abs() < 1e-15);
        assert!((enumerate_p(&[1.0, 2.0], &[1.0, 2.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn all_equal_is_degenerate() {
        for threshold in [8, 0] {
            let r = mann_whitney(&[3.0; 5], &[3.0; 12], threshold).unwrap();
            assert!(r.degenerate);
            assert_eq!(r.p_two_sided, 1.0);
        }
    }

    #[test]
    fn errors() {
        assert_eq!(mann_whitney(&[], &[1.0], 8), Err(StatsError::EmptySample("a")));
        assert_eq!(mann_whitney(&[1.0], &[f64::NAN], 8), Err(StatsError::NonFinite));
    }

    #[test]
    fn large_samples_use_normal_approximation() {
        let a: Vec<f64> = (0..30).map(f64::from).collect();
        let b: Vec<f64> = (10..40).map(f64::from).collect();
        let r = mann_whitney(&a, &b, 8).unwrap();
        assert_eq!(r.method, MwMethod::NormalApprox);
        assert_eq!(r.u_statistic, 200.0);
        assert!(r.p_two_sided < 0.05);
    }

    #[test]
    fn dp_matches_enumeration_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n_a = rng.random_range(1..=7);
            let n_b = rng.random_range(1..=7);
            // few distinct values to force ties
            let a: Vec<f64> = (0..n_a).map(|_| f64::from(rng.random_range(0..5u8))).collect();
            let b: Vec<f64> = (0..n_b).map(|_| f64::from(rng.random_range(0..5u8))).collect();
            let r = mann_whitney(&a, &b, 8).unwrap();
            let oracle = if r.degenerate { 1.0 } else { enumerate_p(&a, &b) };
            assert!((r.p_two_sided - oracle).abs() < 1e-12, "{a:?} {b:?}: {} vs {oracle}", r.p_two_sided);
        }
    }

    proptest! {
        #[test]
        fn symmetric_in_its_arguments(a in prop::collection::vec(-50.0..50.0f64, 1..10),
                                      b in prop::collection::vec(-50.0..50.0f64, 1..10)) {
            let ab = mann_whitney(&a, &b, 8).unwrap();
            let ba = mann_whitney(&b, &a, 8).unwrap();
            prop_assert_eq!(ab.u_statistic, ba.u_statistic);
            prop_assert!((ab.p_two_sided - ba.p_two_sided).abs() < 1e-12);
        }

        #[test]
        fn invariant_under_monotone_transforms(a in prop::collection::vec(-5.0..5.0f64, 1..12),
                                               b in prop::collection::vec(-5.0..5.0f64, 1..12)) {
            let f = |x: &f64| x.exp() * 3.0 + 1.0;
            let ta: Vec<f64> = a.iter().map(f).collect();
            let tb: Vec<f64> = b.iter().map(f).collect();
            let raw = mann_whitney(&a, &b, 8).unwrap();
            let tr = mann_whitney(&ta, &tb, 8).unwrap();
            prop_assert_eq!(raw.u_statistic, tr.u_statistic);
            prop_assert!((raw.p_two_sided - tr.p_two_sided).abs() < 1e-12);
        }

        #[test]
        fn u_and_p_in_range(a in prop::collection::vec(0.0..1.0f64, 1..20),
                            b in prop::collection::vec(0.0..1.0f64, 1..20)) {
            let r = mann_whitney(&a, &b, 8).unwrap();
            prop_assert!(r.u_statistic >= 0.0 && r.u_statistic <= (a.len() * b.len()) as f64);
            prop_assert!(r.p_two_sided > 0.0 && r.p_two_sided <= 1.0);
        }
    }
}
