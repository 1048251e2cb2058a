//! Intervals that meet few multiples of a set of primes, and the two-way
//! reduction between such intervals and distinct-difference progression
//! covers.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::{crt, int_serde, is_prime, prime_sieve, primes_up_to, Int};
use crate::oracle::{min_distinct_cover, SearchBudget, Witness};
use crate::sets::{verify_cover, IntSet};

/// Largest period swept exactly.
pub const EXACT_PERIOD_CAP: Int = 1_000_000_000;

/// Random shifts tried when the period is too long.
pub const HEURISTIC_SAMPLES: usize = 1_000_000;

/// Primes `p_1 < ... < p_N` and the interval `{w+1, ..., w + k p_N}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EsInstance {
    pub primes: Vec<u64>,
    pub k: usize,
    #[serde(with = "int_serde")]
    pub w: Int,
}

impl EsInstance {
    pub fn new(primes: Vec<u64>, k: usize, w: Int) -> Result<Self> {
        if primes.is_empty() || k == 0 {
            return Err(Error::Invalid("an instance needs primes and k >= 1".into()));
        }
        if let Some(&q) = primes.iter().find(|&&q| !is_prime(q)) {
            return Err(Error::NotPrime(q));
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("primes must be strictly increasing".into()));
        }
        Ok(EsInstance { primes, k, w })
    }

    pub fn len(&self) -> Int {
        self.k as Int * *self.primes.last().expect("nonempty") as Int
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The members of the interval divisible by some prime.
    pub fn multiples(&self) -> IntSet {
        (self.w + 1..=self.w + self.len()).filter(|&x| self.is_multiple(x)).collect()
    }

    fn is_multiple(&self, x: Int) -> bool {
        self.primes.iter().any(|&p| x.rem_euclid(p as Int) == 0)
    }
}

/// `#(I ∩ ∪ p_i Z)`.
pub fn interval_multiple_count(inst: &EsInstance) -> usize {
    (inst.w + 1..=inst.w + inst.len()).filter(|&x| inst.is_multiple(x)).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Sweep one full period when it is at most [`EXACT_PERIOD_CAP`], else sample.
    Auto,
    /// Sample [`HEURISTIC_SAMPLES`] shifts with the given seed.
    Sampled { seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalMin {
    #[serde(with = "int_serde")]
    pub w: Int,
    pub count: usize,
    /// Whether every shift in a full period was examined.
    pub exhaustive: bool,
    #[serde(with = "int_serde")]
    pub period: Int,
}

/// Minimum of the count over shifts `w`; the smallest minimizing `w` in
/// `[0, lcm)` is reported.
pub fn min_over_intervals(primes: &[u64], k: usize, mode: SearchMode) -> Result<IntervalMin> {
    let probe = EsInstance::new(primes.to_vec(), k, 0)?;
    let period = primes.iter().try_fold(1 as Int, |acc, &p| acc.checked_mul(p as Int));
    let len = probe.len();
    match (mode, period) {
        (SearchMode::Auto, Some(period)) if period <= EXACT_PERIOD_CAP => {
            // sliding window: count(w+1) = count(w) - [w+1 hit] + [w+1+len hit]
            let hit = |x: Int| probe.is_multiple(x) as i64;
            let mut count: i64 = (1..=len).map(hit).sum();
            let (mut best_w, mut best) = (0, count);
            for w in 1..period {
                count += hit(w + len) - hit(w);
                if count < best {
                    (best_w, best) = (w, count);
                }
            }
            Ok(IntervalMin { w: best_w, count: best as usize, exhaustive: true, period })
        }
        (mode, period) => {
            let seed = match mode {
                SearchMode::Sampled { seed } => seed,
                SearchMode::Auto => 0,
            };
            let period = period.unwrap_or(Int::MAX);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<(usize, Int)> = None;
            for _ in 0..HEURISTIC_SAMPLES {
                let w = rng.gen_range(0..period.min(1 << 100));
                let c = interval_multiple_count(&EsInstance { w, ..probe.clone() });
                if best.is_none_or(|(bc, bw)| (c, w) < (bc, bw)) {
                    best = Some((c, w));
                }
            }
            let (count, w) = best.expect("samples were drawn");
            Ok(IntervalMin { w, count, exhaustive: false, period })
        }
    }
}

/// Smallest count over every choice of `N` primes from a pool and every shift.
#[derive(Debug, Clone, Serialize)]
pub struct PoolMin {
    pub instance: EsInstance,
    pub count: usize,
    /// Pool bound: primes `<= pool_max` were tried.
    pub pool_max: u64,
    pub exhaustive_shifts: bool,
}

pub fn min_over_prime_pool(k: usize, big_n: usize, pool_max: u64) -> Result<PoolMin> {
    let pool = primes_up_to(pool_max as usize);
    if pool.len() < big_n || big_n == 0 {
        return Err(Error::Invalid(format!("need {big_n} primes up to {pool_max}")));
    }
    let subsets = combinations(&pool, big_n);
    let results: Vec<(usize, usize, IntervalMin)> = subsets
        .par_iter()
        .enumerate()
        .map(|(i, ps)| min_over_intervals(ps, k, SearchMode::Auto).map(|m| (m.count, i, m)))
        .collect::<Result<_>>()?;
    let (count, i, m) = results.into_iter().min_by_key(|(c, i, _)| (*c, *i)).expect("nonempty pool");
    let exhaustive = m.exhaustive;
    Ok(PoolMin {
        instance: EsInstance::new(subsets[i].clone(), k, m.w)?,
        count,
        pool_max,
        exhaustive_shifts: exhaustive,
    })
}

fn combinations(pool: &[u64], r: usize) -> Vec<Vec<u64>> {
    fn go(pool: &[u64], r: usize, start: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            go(pool, r, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, r, 0, &mut Vec::new(), &mut out);
    out
}

/// `v` and every `d_i u + v` prime inside `[(1-δ)X, X]`, with `X = d_N u + v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimePattern {
    pub u: u64,
    pub v: u64,
    #[serde(rename = "X")]
    pub x: u64,
}

/// Search `X = 2, 3, ..., x_max` and, for each, `u = 1, 2, ...` with
/// `v = X - d_N u >= (1-δ)X`; the first hit is returned.
pub fn prime_pattern_search(d: &[u64], delta: f64, x_max: u64) -> Option<PrimePattern> {
    let d_max = *d.iter().max()?;
    if d.contains(&0) || !(0.0..1.0).contains(&delta) {
        return None;
    }
    let sieve = prime_sieve(x_max as usize);
    for x in 2..=x_max {
        if !sieve[x as usize] {
            continue;
        }
        let floor = (1.0 - delta) * x as f64;
        let mut u = 1;
        while d_max * u < x && (x - d_max * u) as f64 >= floor {
            let v = x - d_max * u;
            if sieve[v as usize] && d.iter().all(|&di| sieve[(di * u + v) as usize]) {
                return Some(PrimePattern { u, v, x });
            }
            u += 1;
        }
    }
    None
}

/// An interval realized from a distinct-difference cover.
#[derive(Debug, Clone, Serialize)]
pub struct Realization {
    pub delta: f64,
    pub pattern: PrimePattern,
    pub instance: EsInstance,
    pub count: usize,
    /// `#A' <= k #A` with `A' = uA + {0, v, ..., (k-1)v}`.
    pub lifted_size: usize,
    /// The condition with the least slack at the accepted `δ`.
    pub binding: &'static str,
}

/// Realize an interval with at most `k #A` multiples from a set `A` holding
/// progressions `{a_i + j d_i}` with distinct `d_i`.
///
/// `δ` runs through `1/2, 1/4, ...` until the prime pattern found satisfies
/// `v/u > 4 max A`, `p_i/p_N >= 1 - 1/4k` and `p_i > p_N/2 + u max A`. Then
/// `w ≡ -u a_i (mod p_i)` by CRT and `I = w - floor(p_N/2) + {1..kp_N}`
/// meets each `p_i Z` exactly in `w + u a_i + j p_i`, `j < k`; this is
/// checked by enumeration.
pub fn realize_interval(a: &IntSet, progressions: &[(Int, u64)], k: usize, x_max: u64) -> Result<Realization> {
    let mut progs = progressions.to_vec();
    progs.sort_by_key(|&(_, d)| d);
    if progs.is_empty() || progs.windows(2).any(|w| w[0].1 == w[1].1) {
        return Err(Error::Invalid("need distinct positive differences".into()));
    }
    // shift A to start at 1
    let shift = 1 - a.min().ok_or(Error::Empty("empty set"))?;
    let a = a.translate(shift);
    let max_a = a.max().expect("nonempty") as f64;
    let diffs: Vec<u64> = progs.iter().map(|&(_, d)| d).collect();
    let mut delta = 0.5;
    for _ in 0..24 {
        let Some(pat) = prime_pattern_search(&diffs, delta, x_max) else {
            delta /= 2.0;
            continue;
        };
        let (u, v) = (pat.u as f64, pat.v as f64);
        let primes: Vec<u64> = diffs.iter().map(|&d| d * pat.u + pat.v).collect();
        let p_n = *primes.last().expect("nonempty") as f64;
        let p_1 = primes[0] as f64;
        let slack = [
            ("v/u > 4 max A", v / u / (4.0 * max_a) - 1.0),
            ("p_i/p_N >= 1 - 1/4k", (p_1 / p_n) / (1.0 - 1.0 / (4.0 * k as f64)) - 1.0),
            ("p_i > p_N/2 + u max A", p_1 / (p_n / 2.0 + u * max_a) - 1.0),
        ];
        if slack[0].1 <= 0.0 || slack[1].1 < 0.0 || slack[2].1 <= 0.0 {
            delta /= 2.0;
            continue;
        }
        let binding = slack.iter().min_by(|x, y| x.1.total_cmp(&y.1)).expect("three checks").0;
        let residues: Vec<(Int, Int)> = progs
            .iter()
            .zip(&primes)
            .map(|(&(ai, _), &p)| ((-(pat.u as Int) * (ai + shift)).rem_euclid(p as Int), p as Int))
            .collect();
        let w = crt(&residues)?;
        let start = w - (p_n as Int) / 2;
        let inst = EsInstance::new(primes.clone(), k, start)?;
        for (&(ai, _), &p) in progs.iter().zip(&primes) {
            let base = w + pat.u as Int * (ai + shift);
            let want: BTreeSet<Int> = (0..k as Int).map(|j| base + j * p as Int).collect();
            let got: BTreeSet<Int> = (start + 1..=start + inst.len()).filter(|x| x % p as Int == 0).collect();
            if want != got {
                return Err(Error::Invalid(format!("interval meets {p}Z in {got:?}, expected {want:?}")));
            }
        }
        let lifted: IntSet = a
            .dilate(pat.u as Int)
            .sumset(&(0..k as Int).map(|j| j * pat.v as Int).collect());
        let count = interval_multiple_count(&inst);
        assert!(count <= lifted.len() && lifted.len() <= k * a.len());
        return Ok(Realization { delta, pattern: pat, instance: inst, count, lifted_size: lifted.len(), binding });
    }
    Err(Error::BudgetExhausted { budget: 24, best: format!("no prime pattern up to X = {x_max}") })
}

/// `F'_k(N) <= G_k(N) <= k F'_k(N)` on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub k: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub distinct_cover: usize,
    pub distinct_exhausted: bool,
    /// Smallest count found over the prime pool (an upper bound on `G`).
    pub pool: PoolMin,
    /// The multiples in the minimizing interval carry the `p_i` as k-term
    /// progression differences.
    pub left_certified: bool,
    pub left: bool,
    /// From the distinct cover, when a prime pattern was found.
    pub realization: Option<Realization>,
    pub right: bool,
}

pub fn sandwich_check(k: usize, big_n: usize, pool_max: u64, x_max: u64, window: Int) -> Result<SandwichReport> {
    let oracle = min_distinct_cover(k, big_n as Int, window, SearchBudget::default())?;
    let pool = min_over_prime_pool(k, big_n, pool_max)?;
    let multiples = pool.instance.multiples();
    let left_certified = verify_cover(&multiples, k, pool.instance.primes.iter().map(|&p| p as Int)).is_ok();
    let left = left_certified && oracle.optimum <= multiples.len();
    let Witness::Int { set, certificate } = &oracle.witness else { unreachable!("integer oracle") };
    let progs: Vec<(Int, u64)> =
        certificate.entries.iter().take(big_n).map(|(&d, &a)| (a, d as u64)).collect();
    let realization = realize_interval(set, &progs, k, x_max).ok();
    let right = pool.count <= k * oracle.optimum
        && realization.as_ref().is_some_and(|r| r.count <= k * oracle.optimum);
    Ok(SandwichReport {
        k,
        big_n,
        distinct_cover: oracle.optimum,
        distinct_exhausted: oracle.exhausted,
        pool,
        left_certified,
        left,
        realization,
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_examples() {
        let inst = EsInstance::new(vec![3, 5], 2, 0).unwrap();
        assert_eq!(interval_multiple_count(&inst), 5);
        assert_eq!(inst.multiples().to_vec(), vec![3, 5, 6, 9, 10]);
        let inst = EsInstance::new(vec![3, 5], 2, 13).unwrap();
        assert_eq!(inst.multiples().to_vec(), vec![15, 18, 20, 21]);
        for w in 0..20 {
            assert_eq!(interval_multiple_count(&EsInstance::new(vec![7], 3, w).unwrap()), 3);
        }
    }

    #[test]
    fn instance_validation() {
        assert_eq!(EsInstance::new(vec![4], 1, 0), Err(Error::NotPrime(4)));
        assert!(EsInstance::new(vec![5, 3], 1, 0).is_err());
    }

    #[test]
    fn sweep_minimum() {
        let m = min_over_intervals(&[3, 5], 2, SearchMode::Auto).unwrap();
        assert_eq!((m.count, m.exhaustive, m.period), (4, true, 15));
        let m = min_over_intervals(&[2, 3], 2, SearchMode::Auto).unwrap();
        assert_eq!(m.count, 4);
        let m = min_over_intervals(&[11], 4, SearchMode::Auto).unwrap();
        assert_eq!(m.count, 4);
    }

    #[test]
    fn sweep_matches_direct_count() {
        let m = min_over_intervals(&[3, 5, 7], 2, SearchMode::Auto).unwrap();
        let direct = (0..105).map(|w| interval_multiple_count(&EsInstance::new(vec![3, 5, 7], 2, w).unwrap())).min();
        assert_eq!(Some(m.count), direct);
    }

    #[test]
    fn count_is_periodic() {
        let ps = vec![2, 5, 7];
        for w in [0, 3, 17, 50] {
            let a = interval_multiple_count(&EsInstance::new(ps.clone(), 3, w).unwrap());
            let b = interval_multiple_count(&EsInstance::new(ps.clone(), 3, w + 70).unwrap());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn pattern_examples() {
        let p = prime_pattern_search(&[1], 0.5, 100).unwrap();
        assert!(is_prime(p.v) && is_prime(p.u + p.v));
        let p = prime_pattern_search(&[1, 2], 0.5, 100).unwrap();
        assert!([p.v, p.u + p.v, 2 * p.u + p.v].iter().all(|&q| is_prime(q)));
        assert!(p.v as f64 >= 0.5 * p.x as f64);
        assert_eq!(prime_pattern_search(&[1, 2], 0.5, 4), None);
    }

    #[test]
    fn left_mechanism_on_instances() {
        for (ps, k, w) in [(vec![3, 5], 2, 13), (vec![2, 7, 11], 3, 100), (vec![5], 4, 2)] {
            let inst = EsInstance::new(ps.clone(), k, w).unwrap();
            assert!(verify_cover(&inst.multiples(), k, ps.iter().map(|&p| p as Int)).is_ok());
        }
    }

    #[test]
    fn realize_small_cover() {
        let a: IntSet = [0, 1, 3].into_iter().collect();
        let r = realize_interval(&a, &[(0, 1), (1, 2)], 2, 1 << 16).unwrap();
        assert!(r.count <= 2 * 3);
    }

    #[test]
    fn sandwich_small() {
        let r = sandwich_check(2, 1, 30, 1 << 16, 40).unwrap();
        assert_eq!(r.distinct_cover, 2);
        assert_eq!(r.pool.count, 2);
        assert!(r.left && r.right);
        let r = sandwich_check(2, 2, 30, 1 << 16, 40).unwrap();
        assert_eq!(r.distinct_cover, 3);
        assert!(r.left && r.right);
    }
}
