//! Compression of progression covers: the fractional-part map
//! `x -> floor(N {θx})` that turns `N` distinct differences into a cover of
//! `{1..N}`, and random linear maps `F_p^M -> F_p^n`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::covering::{greedy_translate_cover_int, int_cover_bound};
use crate::error::{Error, Result};
use crate::fp::{FpSet, FpSpace, FpVec};
use crate::numbers::Int;
use crate::sets::{verify_cover, ApCertificate, IntSet};

/// Largest grid denominator for `θ`.
const MAX_GRID: Int = 1 << 62;

/// `x -> floor(N {θx})` with `θ = num/den` exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThetaMap {
    #[serde(with = "crate::numbers::int_serde")]
    pub num: Int,
    #[serde(with = "crate::numbers::int_serde")]
    pub den: Int,
    #[serde(rename = "N", with = "crate::numbers::int_serde")]
    pub big_n: Int,
}

impl ThetaMap {
    pub fn new(num: Int, den: Int, big_n: Int) -> Result<Self> {
        if !(0 < num && num < den) || big_n < 1 || den > MAX_GRID {
            return Err(Error::Invalid(format!("theta = {num}/{den} must lie in (0,1) with den <= 2^62")));
        }
        Ok(ThetaMap { num, den, big_n })
    }

    /// `floor(N {θx})`, in `{0, ..., N-1}`.
    pub fn apply(&self, x: Int) -> Int {
        // (num * x) mod den without overflow: both factors are below 2^62
        let frac = (self.num * x.rem_euclid(self.den)) % self.den;
        (self.big_n * frac) / self.den
    }
}

/// Smallest power of two `>= 2^16 N max|d|`, capped at `2^62`.
pub fn theta_grid(big_n: Int, max_d: Int) -> Int {
    let want = (1u128 << 16).saturating_mul(big_n.max(1) as u128).saturating_mul(max_d.max(1) as u128);
    want.checked_next_power_of_two().map_or(MAX_GRID, |g| (g as Int).min(MAX_GRID))
}

/// Output of [`distinct_to_full`].
#[derive(Debug, Clone, Serialize)]
pub struct DistinctToFull {
    pub theta: ThetaMap,
    /// Number of `θ` samples drawn, the last one accepted.
    pub attempts: usize,
    /// Colliding pairs `i < j` with `d'_i = d'_j`.
    pub collisions: usize,
    /// Number of distinct `d'_i`.
    pub distinct: usize,
    pub intermediate_size: usize,
    pub translates: Vec<Int>,
    pub set: IntSet,
    /// Certificate over `{1, ..., N}`.
    pub certificate: ApCertificate,
    /// `12 k^3 (1 + ln N) #A_0`.
    pub bound: f64,
}

/// From a set holding k-term progressions with `N` distinct differences,
/// build a set holding one for every `d ∈ {1, ..., N}`.
///
/// `θ` is drawn from the grid `{1/G, ..., (G-1)/G}` until at most `N - 1`
/// pairs of differences collide under `φ_θ`, which forces at least `N/3`
/// distinct images `d'_i`. Then
/// `A_3 = φ_θ(A_0) + {0..k-1} - {0, N, ..., (k-1)N}` holds a progression
/// with each difference `d'_i`, and `A_1 = A_3 + {0..k-1}·T` for a greedy
/// `T` with `{d'_i} + T ⊇ {1..N}`.
pub fn distinct_to_full(a0: &IntSet, cert: &ApCertificate, seed: u64, budget: usize) -> Result<DistinctToFull> {
    let k = cert.k;
    let big_n = cert.len() as Int;
    if big_n == 0 || k == 0 {
        return Err(Error::Empty("distinct_to_full needs a nonempty certificate with k >= 1"));
    }
    cert.check(a0)?;
    let diffs: Vec<Int> = cert.differences().collect();
    let max_d = diffs.iter().map(|d| d.abs()).max().unwrap_or(1);
    let grid = theta_grid(big_n, max_d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut accepted = None;
    for attempt in 1..=budget {
        let theta = ThetaMap::new(rng.gen_range(1..grid), grid, big_n)?;
        let mut freq: BTreeMap<Int, usize> = BTreeMap::new();
        for &d in &diffs {
            *freq.entry(theta.apply(d)).or_default() += 1;
        }
        let collisions: usize = freq.values().map(|&f| f * (f - 1) / 2).sum();
        if collisions as Int <= big_n - 1 {
            accepted = Some((theta, attempt, collisions, freq));
            break;
        }
    }
    let Some((theta, attempts, collisions, freq)) = accepted else {
        return Err(Error::BudgetExhausted { budget, best: "no theta with at most N-1 collisions".into() });
    };
    let distinct = freq.len();
    assert!(3 * distinct as Int >= big_n, "fewer than N/3 distinct compressed differences");

    let a2: IntSet = a0.iter().map(|x| theta.apply(x)).collect();
    let spread: IntSet = (0..k as Int).flat_map(|i| (0..k as Int).map(move |j| i - j * big_n)).collect();
    let a3 = a2.sumset(&spread);
    let compressed: Vec<Int> = freq.keys().copied().collect();
    verify_cover(&a3, k, compressed.iter().copied())?;

    // d' ranges over {0..N-1}; shift by one to cover {1..N} by translates
    let shifted: IntSet = compressed.iter().map(|d| d + 1).collect();
    let cover = greedy_translate_cover_int(&shifted, big_n)?;
    assert!(cover.len() <= int_cover_bound(big_n, shifted.len()));
    let translates: Vec<Int> = cover.translates.iter().map(|t| t + 1).collect();
    let multiples: IntSet = translates.iter().flat_map(|&t| (0..k as Int).map(move |j| j * t)).collect();
    let set = a3.sumset(&multiples);
    let certificate = verify_cover(&set, k, 1..=big_n)?;
    let bound = 12.0 * (k as f64).powi(3) * (1.0 + (big_n as f64).ln()) * a0.len() as f64;
    assert!(set.len() as f64 <= bound, "#A_1 = {} exceeds {bound}", set.len());
    Ok(DistinctToFull {
        theta,
        attempts,
        collisions,
        distinct,
        intermediate_size: a3.len(),
        translates,
        set,
        certificate,
        bound,
    })
}

/// An `n × M` matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearMap {
    pub p: u32,
    pub rows: Vec<Vec<u32>>,
}

impl LinearMap {
    pub fn identity(p: u32, n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| (i == j) as u32).collect()).collect();
        LinearMap { p, rows }
    }

    pub fn apply(&self, v: &[u32]) -> FpVec {
        let p = self.p as u64;
        self.rows
            .iter()
            .map(|row| (row.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64 % p).sum::<u64>() % p) as u32)
            .collect()
    }
}

/// Output of [`random_linear_compress`].
#[derive(Debug, Clone, Serialize)]
pub struct Compressed {
    pub map: LinearMap,
    pub set: FpSet,
    /// Distinct nonzero images of the input directions.
    pub directions: BTreeSet<FpVec>,
    pub attempts: usize,
}

/// `n = min { n >= 1 : p^n >= N }`.
pub fn target_dimension(p: u32, big_n: usize) -> usize {
    let mut n = 1;
    while (p as u128).pow(n as u32) < big_n as u128 {
        n += 1;
    }
    n
}

/// Project `A ⊂ F_p^M` holding a k-term progression in each direction of
/// `directions` by a uniformly random linear map into `F_p^n`, resampling
/// until at least half of the directions have distinct nonzero images.
///
/// Progressions map to progressions; every surviving image direction is
/// re-certified in the image set.
pub fn random_linear_compress(
    a: &FpSet,
    directions: &BTreeSet<FpVec>,
    k: usize,
    seed: u64,
    budget: usize,
) -> Result<Compressed> {
    if directions.is_empty() {
        return Err(Error::Empty("random_linear_compress needs a direction"));
    }
    if let Err(missing) = a.certify(k, directions) {
        return Err(Error::UncoveredDirections { k, directions: missing });
    }
    let (p, m) = (a.p(), a.n());
    let big_n = directions.len();
    let n = target_dimension(p, big_n);
    let space = FpSpace::new(p, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for attempt in 1..=budget {
        let rows = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..p)).collect()).collect();
        let map = LinearMap { p, rows };
        let images: BTreeSet<FpVec> =
            directions.iter().map(|d| map.apply(d)).filter(|v| v.iter().any(|&x| x != 0)).collect();
        best = best.max(images.len());
        if 2 * images.len() >= big_n {
            let set = FpSet::in_space(space, a.iter().map(|v| map.apply(v)))?;
            if let Err(missing) = set.certify(k, &images) {
                return Err(Error::UncoveredDirections { k, directions: missing });
            }
            return Ok(Compressed { map, set, directions: images, attempts: attempt });
        }
    }
    Err(Error::BudgetExhausted { budget, best: format!("{best} of {big_n} directions survived") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn theta_examples() {
        let t = ThetaMap::new(1, 3, 10).unwrap();
        assert_eq!(t.apply(1), 3);
        assert_eq!(t.apply(3), 0);
        assert_eq!(t.apply(-1), 6);
        assert!(ThetaMap::new(3, 3, 10).is_err());
    }

    proptest! {
        #[test]
        fn quasi_morphism(x in -1_000_000i128..1_000_000, y in -1_000_000i128..1_000_000,
                          num in 1i128..1 << 40, big_n in 1i128..50) {
            let t = ThetaMap::new(num, 1 << 40, big_n).unwrap();
            let e = t.apply(x + y) - t.apply(x) - t.apply(y);
            prop_assert!([0, 1, -big_n, 1 - big_n].contains(&e));
        }
    }

    #[test]
    fn grid_is_a_power_of_two() {
        assert_eq!(theta_grid(3, 3), 1 << 20);
        assert_eq!(theta_grid(1 << 40, 1 << 40), 1 << 62);
    }

    #[test]
    fn small_distinct_cover() {
        let a0: IntSet = [0, 1, 3].into_iter().collect();
        let cert = verify_cover(&a0, 2, [1, 2, 3]).unwrap();
        let out = distinct_to_full(&a0, &cert, 0, 64).unwrap();
        assert!(verify_cover(&out.set, 2, 1..=3).is_ok());
        assert!(out.set.len() as f64 <= out.bound);
    }

    #[test]
    fn single_difference() {
        let a0: IntSet = (0..4).collect();
        let cert = verify_cover(&a0, 4, [1]).unwrap();
        let out = distinct_to_full(&a0, &cert, 5, 64).unwrap();
        assert_eq!(out.certificate.len(), 1);
    }

    #[test]
    fn rejects_invalid_certificate() {
        let a0: IntSet = [0, 1].into_iter().collect();
        let mut cert = ApCertificate::new(2);
        cert.entries.insert(5, 0);
        assert!(matches!(distinct_to_full(&a0, &cert, 0, 64), Err(Error::Uncovered { .. })));
    }

    #[test]
    fn compress_single_line() {
        let space = FpSpace::new(3, 4).unwrap();
        let d = vec![1, 2, 0, 1];
        let line = FpSet::line(space, &[0, 1, 1, 0], &d);
        let out = random_linear_compress(&line, &BTreeSet::from([d]), 3, 9, 64).unwrap();
        assert_eq!(out.set.n(), 1);
        assert_eq!(out.directions.len(), 1);
        assert_eq!(out.set.len(), 3);
    }

    #[test]
    fn compress_subspace() {
        let space = FpSpace::new(3, 2).unwrap();
        let whole = FpSet::whole(space).unwrap();
        let dirs: BTreeSet<FpVec> = space.nonzero_vectors().unwrap().collect();
        let out = random_linear_compress(&whole, &dirs, 3, 1, 64).unwrap();
        assert_eq!(out.set.n(), 2);
        assert!(2 * out.directions.len() >= 8);
    }

    #[test]
    fn identity_keeps_every_direction() {
        let space = FpSpace::new(5, 2).unwrap();
        let id = LinearMap::identity(5, 2);
        let dirs: BTreeSet<FpVec> = space.nonzero_vectors().unwrap().map(|d| id.apply(&d)).collect();
        assert_eq!(dirs.len(), 24);
        assert_eq!(target_dimension(5, 24), 2);
        assert_eq!(target_dimension(5, 25), 2);
        assert_eq!(target_dimension(5, 26), 3);
    }
}
