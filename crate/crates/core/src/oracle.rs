//! Exact minimal progression covers on tiny instances by branch and bound.
//!
//! Sets are bitmasks over a finite universe: the window `{0, ..., W}` for
//! integer quantities, the dense index of `F_p^n` for the field quantity.
//! Every search fixes the point 0 in the set, which loses nothing because
//! any solution can be translated to contain it (to its minimum over the
//! integers, to one of its points over the field).
//!
//! Integer optima are exact *within the declared window*. For the full
//! cover `F_k(N)` the window is `{0, ..., (k-1)N}`; for the distinct cover
//! `F'_k(N)` it is `{0, ..., cap_window}`. Translating the components of a
//! solution toward 0 suggests some optimum always fits the first window,
//! but components can be long, so we do not rely on it: results say which
//! window they are exact for.

use std::collections::HashSet;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp::{FpCertificate, FpSet, FpSpace};
use crate::numbers::Int;
use crate::sets::{verify_cover, ApCertificate, IntSet};

/// Default window cap (largest `W` in `{0, ..., W}`).
pub const DEFAULT_WINDOW_CAP: Int = 40;

/// Largest field size searched exactly.
pub const FIELD_CAP: usize = 25;

/// Limits on a search. Node counts are deterministic; the deadline is not.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub deadline: Option<Instant>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 200_000_000, deadline: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    /// Full cover of `{1..N}`.
    F,
    /// `N` distinct differences.
    #[serde(rename = "F'")]
    FPrime,
    /// Every nonzero direction of `F_p^n`.
    #[serde(rename = "f")]
    Field,
    /// Interval coverage by multiples of primes.
    G,
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Quantity::F => "F",
            Quantity::FPrime => "F'",
            Quantity::Field => "f",
            Quantity::G => "G",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Int { set: IntSet, certificate: ApCertificate },
    Field { set: FpSet, certificate: FpCertificate },
}

impl Witness {
    pub fn len(&self) -> usize {
        match self {
            Witness::Int { set, .. } => set.len(),
            Witness::Field { set, .. } => set.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Compact rendering: `0,1,3` or `(0,0) (1,2)`.
    pub fn render(&self) -> String {
        match self {
            Witness::Int { set, .. } => set.to_string(),
            Witness::Field { set, .. } => set.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub quantity: Quantity,
    pub k: usize,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub big_n: Option<Int>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Exact minimum when `exhausted`, otherwise an upper bound.
    pub optimum: usize,
    pub lower_bound: usize,
    pub witness: Witness,
    pub exhausted: bool,
    pub nodes: u64,
    /// The integer window `{0, ..., W}` the optimum is exact for.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Int>,
    /// `(p/2)^n` when `k = p`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

enum Outcome {
    Found(u128),
    Infeasible,
    OutOfBudget,
}

struct Budget {
    limit: SearchBudget,
    nodes: u64,
}

impl Budget {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit.max_nodes {
            return false;
        }
        if self.nodes % 4096 == 0 {
            if let Some(d) = self.limit.deadline {
                return Instant::now() < d;
            }
        }
        true
    }
}

/// Minimal `popcount(M)` over masks `M ⊇ fixed` that contain at least one
/// option of every requirement, by iterative deepening from `start`.
struct UnionCover<'a> {
    options: &'a [Vec<u128>],
    failed: HashSet<u128>,
    budget: Budget,
}

impl UnionCover<'_> {
    fn dfs(&mut self, mask: u128, size: u32) -> Outcome {
        if !self.budget.tick() {
            return Outcome::OutOfBudget;
        }
        let have = mask.count_ones();
        let mut best: Option<(usize, usize)> = None; // (requirement, viable options)
        let mut lower = 0;
        for (i, opts) in self.options.iter().enumerate() {
            if opts.iter().any(|&o| o & !mask == 0) {
                continue;
            }
            let mut extra_min = u32::MAX;
            let mut viable = 0;
            for &o in opts {
                let extra = (o & !mask).count_ones();
                extra_min = extra_min.min(extra);
                if have + extra <= size {
                    viable += 1;
                }
            }
            lower = lower.max(extra_min);
            if best.is_none_or(|(_, v)| viable < v) {
                best = Some((i, viable));
            }
        }
        let Some((req, viable)) = best else { return Outcome::Found(mask) };
        if viable == 0 || have + lower > size {
            return Outcome::Infeasible;
        }
        for &o in &self.options[req] {
            let next = mask | o;
            if next.count_ones() > size || self.failed.contains(&next) {
                continue;
            }
            match self.dfs(next, size) {
                Outcome::Infeasible => {
                    self.failed.insert(next);
                }
                other => return other,
            }
        }
        Outcome::Infeasible
    }
}

struct Search {
    best: Option<(usize, u128)>,
    lower: usize,
    exhausted: bool,
    nodes: u64,
}

fn min_union_cover(options: &[Vec<u128>], fixed: u128, start: usize, limit: usize, budget: SearchBudget) -> Search {
    let mut uc = UnionCover { options, failed: HashSet::new(), budget: Budget { limit: budget, nodes: 0 } };
    let mut size = start.max(fixed.count_ones() as usize);
    while size <= limit {
        uc.failed.clear();
        match uc.dfs(fixed, size as u32) {
            Outcome::Found(m) => {
                return Search { best: Some((size, m)), lower: size, exhausted: true, nodes: uc.budget.nodes }
            }
            Outcome::Infeasible => size += 1,
            Outcome::OutOfBudget => return Search { best: None, lower: size, exhausted: false, nodes: uc.budget.nodes },
        }
    }
    Search { best: None, lower: size, exhausted: true, nodes: uc.budget.nodes }
}

fn ap_mask(a: Int, d: Int, k: usize) -> u128 {
    (0..k as Int).fold(0, |m, j| m | 1u128 << (a + j * d))
}

fn mask_to_set(mask: u128) -> IntSet {
    (0..128).filter(|&i| mask >> i & 1 == 1).map(|i| i as Int).collect()
}

/// Smallest `s` with `s >= k` and `C(s, 2) >= (k-1) N`: a set holding
/// k-term progressions for `N` distinct differences has at least `(k-1)N`
/// pairs.
pub fn pair_lower_bound(k: usize, big_n: Int) -> usize {
    if k <= 1 {
        return 1;
    }
    let need = (k as Int - 1) * big_n;
    let mut s = k;
    while (((s * (s - 1)) / 2) as Int) < need {
        s += 1;
    }
    s
}

/// `F_k(N)`: the smallest set with a k-term progression of every difference
/// in `{1..N}`, searched over subsets of `{0, ..., (k-1)N}`.
///
/// When `(k-1)N` exceeds `window_cap` the union `∪_d {0, d, ..., (k-1)d}`
/// is returned as a bound.
pub fn min_full_cover(k: usize, big_n: Int, window_cap: Int, budget: SearchBudget) -> Result<OracleResult> {
    check_params(k, big_n)?;
    let w = (k as Int - 1) * big_n;
    let lb = pair_lower_bound(k, big_n);
    let trivial: IntSet = (1..=big_n).flat_map(|d| (0..k as Int).map(move |j| j * d)).collect();
    let (search, window) = if w > window_cap.min(127) {
        (Search { best: None, lower: lb, exhausted: false, nodes: 0 }, None)
    } else {
        let options: Vec<Vec<u128>> =
            (1..=big_n).map(|d| (0..=w - (k as Int - 1) * d).map(|a| ap_mask(a, d, k)).collect()).collect();
        (min_union_cover(&options, 1, lb, trivial.len(), budget), Some(w))
    };
    let set = match search.best {
        Some((_, m)) => mask_to_set(m),
        None => trivial,
    };
    let certificate = verify_cover(&set, k, 1..=big_n)?;
    Ok(OracleResult {
        quantity: Quantity::F,
        k,
        big_n: Some(big_n),
        p: None,
        n: None,
        optimum: set.len(),
        lower_bound: search.lower.min(set.len()),
        witness: Witness::Int { set, certificate },
        exhausted: search.exhausted && search.best.is_some(),
        nodes: search.nodes,
        window,
        reference: None,
    })
}

fn check_params(k: usize, big_n: Int) -> Result<()> {
    if k < 1 || big_n < 1 {
        return Err(Error::Invalid("oracle needs k >= 1 and N >= 1".into()));
    }
    Ok(())
}

/// Differences with a k-term progression inside `mask`, as a bitmask.
fn ap_differences(mask: u128, k: usize, dmax: usize) -> u128 {
    let mut out = 0u128;
    for d in 1..=dmax {
        let mut run = mask;
        for j in 1..k {
            run &= mask >> (j * d);
        }
        if run != 0 {
            out |= 1 << d;
        }
    }
    out
}

struct Distinct {
    k: usize,
    big_n: usize,
    w: usize,
    dmax: usize,
    failed: HashSet<(u128, usize)>,
    budget: Budget,
}

impl Distinct {
    fn dfs(&mut self, mask: u128, last: usize, size: u32) -> Outcome {
        if !self.budget.tick() {
            return Outcome::OutOfBudget;
        }
        let present = ap_differences(mask, self.k, self.dmax);
        let have = present.count_ones() as usize;
        if have >= self.big_n {
            return Outcome::Found(mask);
        }
        let pop = mask.count_ones();
        let b = size.saturating_sub(pop) as usize;
        // each missing difference needs a new point paired with some point
        if b == 0 || self.big_n - have > b * pop as usize + b * (b - 1) / 2 {
            return Outcome::Infeasible;
        }
        for d in last + 1..=self.dmax {
            if present >> d & 1 == 1 {
                continue;
            }
            for a in 0..=self.w - (self.k - 1) * d {
                let next = mask | ap_mask(a as Int, d as Int, self.k);
                if next.count_ones() > size || self.failed.contains(&(next, d)) {
                    continue;
                }
                match self.dfs(next, d, size) {
                    Outcome::Infeasible => {
                        self.failed.insert((next, d));
                    }
                    other => return other,
                }
            }
        }
        Outcome::Infeasible
    }
}

/// `F'_k(N)`: the smallest set with k-term progressions for `N` distinct
/// differences, searched over subsets of `{0, ..., window}`.
///
/// Progressions are added in increasing order of difference, skipping
/// differences the current set already carries.
pub fn min_distinct_cover(k: usize, big_n: Int, window: Int, budget: SearchBudget) -> Result<OracleResult> {
    check_params(k, big_n)?;
    let lb = pair_lower_bound(k, big_n);
    let fallback: IntSet = (1..=big_n).flat_map(|d| (0..k as Int).map(move |j| j * d)).collect();
    let (search, window) = if k == 1 {
        (Search { best: Some((1, 1)), lower: 1, exhausted: true, nodes: 0 }, Some(0))
    } else {
        let w = window.min(127);
        let dmax = (w / (k as Int - 1)) as usize;
        if (dmax as Int) < big_n {
            (Search { best: None, lower: lb, exhausted: false, nodes: 0 }, None)
        } else {
            let mut s = Distinct {
                k,
                big_n: big_n as usize,
                w: w as usize,
                dmax,
                failed: HashSet::new(),
                budget: Budget { limit: budget, nodes: 0 },
            };
            let mut size = lb;
            let limit = fallback.len();
            let res = loop {
                if size > limit {
                    break Search { best: None, lower: size, exhausted: true, nodes: s.budget.nodes };
                }
                s.failed.clear();
                match s.dfs(1, 0, size as u32) {
                    Outcome::Found(m) => {
                        break Search { best: Some((size, m)), lower: size, exhausted: true, nodes: s.budget.nodes }
                    }
                    Outcome::Infeasible => size += 1,
                    Outcome::OutOfBudget => {
                        break Search { best: None, lower: size, exhausted: false, nodes: s.budget.nodes }
                    }
                }
            };
            (res, Some(w))
        }
    };
    let set = match search.best {
        Some((_, m)) => mask_to_set(m),
        None => fallback,
    };
    let diffs = verify_distinct(&set, k, big_n as usize)?;
    let certificate = verify_cover(&set, k, diffs)?;
    Ok(OracleResult {
        quantity: Quantity::FPrime,
        k,
        big_n: Some(big_n),
        p: None,
        n: None,
        optimum: set.len(),
        lower_bound: search.lower.min(set.len()),
        witness: Witness::Int { set, certificate },
        exhausted: search.exhausted && search.best.is_some(),
        nodes: search.nodes,
        window,
        reference: None,
    })
}

/// The `N` smallest positive differences carrying a k-term progression.
fn verify_distinct(set: &IntSet, k: usize, big_n: usize) -> Result<Vec<Int>> {
    if k == 1 && !set.is_empty() {
        return Ok((1..=big_n as Int).collect());
    }
    let (lo, hi) = (set.min().unwrap_or(0), set.max().unwrap_or(0));
    let span = (hi - lo).max(1);
    let diffs: Vec<Int> = (1..=span)
        .filter(|&d| set.iter().any(|a| (0..k as Int).all(|j| set.contains(a + j * d))))
        .take(big_n)
        .collect();
    if diffs.len() < big_n {
        return Err(Error::Invalid(format!("witness carries only {} distinct differences", diffs.len())));
    }
    Ok(diffs)
}

/// `F'_2(N)` when every set of size `s` can be a Sidon set: the least `s`
/// with `C(s, 2) >= N`. Independent check of the distinct-cover search.
pub fn distinct_pairs_closed_form(big_n: Int) -> usize {
    pair_lower_bound(2, big_n)
}

/// `f_{k,n}(p)`: the smallest subset of `F_p^n` with a k-term progression
/// in every nonzero direction. Exact for `p^n <= 25`.
///
/// Directions `d` and `-d` are merged, since a progression read backwards
/// has the opposite difference.
pub fn min_fp_cover(k: usize, n: usize, p: u32, budget: SearchBudget) -> Result<OracleResult> {
    if k < 1 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let space = FpSpace::new(p, n)?;
    let size = space.dense_size()?;
    let reference = (k == p as usize).then(|| (p as f64 / 2.0).powi(n as i32));
    let whole = FpSet::whole(space)?;
    let all: Vec<_> = space.nonzero_vectors()?.collect();
    if size > FIELD_CAP {
        let certificate = whole.certify(k, &all).expect("the whole space covers every direction");
        return Ok(OracleResult {
            quantity: Quantity::Field,
            k,
            big_n: None,
            p: Some(p),
            n: Some(n),
            optimum: size,
            lower_bound: k.min(p as usize),
            witness: Witness::Field { set: whole, certificate },
            exhausted: false,
            nodes: 0,
            window: None,
            reference,
        });
    }
    let len = k.min(p as usize);
    let mut seen = HashSet::new();
    let mut options = Vec::new();
    for d in &all {
        if !seen.insert(d.clone()) {
            continue;
        }
        seen.insert(space.neg(d));
        let mut opts: Vec<u128> = space
            .vectors()?
            .map(|a| (0..len as u32).fold(0u128, |m, j| m | 1 << space.index(&space.step(&a, d, j))))
            .collect();
        opts.sort_unstable();
        opts.dedup();
        options.push(opts);
    }
    let search = min_union_cover(&options, 1, len, size, budget);
    let set = match search.best {
        Some((_, m)) => FpSet::in_space(space, (0..size).filter(|&i| m >> i & 1 == 1).map(|i| space.decode(i)))?,
        None => whole,
    };
    let certificate = set
        .certify(k, &all)
        .map_err(|missing| Error::UncoveredDirections { k, directions: missing })?;
    Ok(OracleResult {
        quantity: Quantity::Field,
        k,
        big_n: None,
        p: Some(p),
        n: Some(n),
        optimum: set.len(),
        lower_bound: search.lower.min(set.len()),
        witness: Witness::Field { set, certificate },
        exhausted: search.exhausted && search.best.is_some(),
        nodes: search.nodes,
        window: None,
        reference,
    })
}

/// Both integer oracles on one instance with the inequality checks.
#[derive(Debug, Clone, Serialize)]
pub struct BoundComparison {
    pub k: usize,
    #[serde(rename = "N")]
    pub big_n: Int,
    pub full: OracleResult,
    pub distinct: OracleResult,
    /// `F' <= F`.
    pub ordered: bool,
    /// `12 k^3 (1 + ln N) F'`.
    pub compression_bound: f64,
    pub within_compression_bound: bool,
    /// Size of the quadratic-residue construction with `m = 1`.
    pub construction: Option<usize>,
}

pub fn compare_bounds(k: usize, big_n: Int, window_cap: Int, budget: SearchBudget) -> Result<BoundComparison> {
    let full = min_full_cover(k, big_n, window_cap, budget)?;
    let distinct = min_distinct_cover(k, big_n, window_cap, budget)?;
    let compression_bound = 12.0 * (k as f64).powi(3) * (1.0 + (big_n as f64).ln()) * distinct.optimum as f64;
    let construction = crate::constructions::build_f_upper(k, big_n, 1, crate::constructions::DEFAULT_ENUM_CAP)
        .ok()
        .map(|u| u.size);
    if let Some(c) = construction {
        if full.exhausted {
            assert!(c >= full.optimum, "construction beats the exact optimum");
        }
    }
    Ok(BoundComparison {
        k,
        big_n,
        ordered: distinct.optimum <= full.optimum || !distinct.exhausted,
        within_compression_bound: full.optimum as f64 <= compression_bound,
        compression_bound,
        construction,
        full,
        distinct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn full_cover_values() {
        let r = min_full_cover(2, 3, 40, b()).unwrap();
        assert_eq!((r.optimum, r.exhausted), (3, true));
        assert_eq!(r.witness.render(), "0,1,3");
        let r = min_full_cover(3, 2, 40, b()).unwrap();
        assert_eq!(r.optimum, 4);
        assert_eq!(r.witness.render(), "0,1,2,4");
        assert_eq!(min_full_cover(2, 6, 40, b()).unwrap().optimum, 4);
        for k in 1..=6 {
            assert_eq!(min_full_cover(k, 1, 40, b()).unwrap().optimum, k);
        }
    }

    #[test]
    fn full_cover_beyond_cap_is_bound_only() {
        let r = min_full_cover(3, 30, 40, b()).unwrap();
        assert!(!r.exhausted);
        assert!(r.optimum >= r.lower_bound);
    }

    #[test]
    fn distinct_cover_values() {
        let r = min_distinct_cover(2, 3, 40, b()).unwrap();
        assert_eq!((r.optimum, r.exhausted), (3, true));
        assert_eq!(r.witness.render(), "0,1,3");
        assert_eq!(min_distinct_cover(2, 6, 40, b()).unwrap().optimum, 4);
        for k in 1..=6 {
            assert_eq!(min_distinct_cover(k, 1, 40, b()).unwrap().optimum, k);
        }
    }

    #[test]
    fn distinct_pairs_match_closed_form() {
        for n in 1..=15 {
            let r = min_distinct_cover(2, n, 40, b()).unwrap();
            assert!(r.exhausted);
            assert_eq!(r.optimum, distinct_pairs_closed_form(n), "N = {n}");
        }
    }

    #[test]
    fn field_cover_values() {
        for p in [2, 3, 5] {
            assert_eq!(min_fp_cover(p as usize, 1, p, b()).unwrap().optimum, p as usize);
        }
        let r = min_fp_cover(2, 1, 3, b()).unwrap();
        assert_eq!(r.optimum, 2);
        assert_eq!(min_fp_cover(2, 2, 2, b()).unwrap().optimum, 3);
    }

    #[test]
    fn field_reference_value() {
        let r = min_fp_cover(3, 2, 3, b()).unwrap();
        assert!(r.exhausted);
        assert!(r.optimum as f64 >= r.reference.unwrap());
    }

    #[test]
    fn node_budget_stops_search() {
        let r = min_full_cover(3, 6, 40, SearchBudget { max_nodes: 3, deadline: None }).unwrap();
        assert!(!r.exhausted);
        assert!(verify_cover(&mask_set(&r), 3, 1..=6).is_ok());
    }

    fn mask_set(r: &OracleResult) -> IntSet {
        match &r.witness {
            Witness::Int { set, .. } => set.clone(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn compare_examples() {
        let c = compare_bounds(2, 6, 40, b()).unwrap();
        assert!(c.ordered && c.within_compression_bound);
        assert_eq!(c.distinct.optimum, 4);
        let c = compare_bounds(3, 2, 40, b()).unwrap();
        assert!(c.distinct.optimum <= c.full.optimum);
    }

    /// Smallest subset of `{0..w}` containing 0 that passes `ok`, by plain enumeration.
    fn naive_min(w: Int, ok: impl Fn(&IntSet) -> bool) -> usize {
        (0u32..1 << w)
            .map(|bits| {
                let set: IntSet = std::iter::once(0).chain((1..=w).filter(|&i| bits >> (i - 1) & 1 == 1)).collect();
                set
            })
            .filter(|s| ok(s))
            .map(|s| s.len())
            .min()
            .unwrap()
    }

    #[test]
    fn full_cover_matches_plain_enumeration() {
        for (k, n) in [(2, 4), (2, 5), (3, 3), (3, 4), (4, 2)] {
            let w = (k as Int - 1) * n;
            let want = naive_min(w, |s| verify_cover(s, k, 1..=n).is_ok());
            assert_eq!(min_full_cover(k, n, 40, b()).unwrap().optimum, want, "k = {k}, N = {n}");
        }
    }

    #[test]
    fn distinct_cover_matches_plain_enumeration() {
        for (k, n) in [(3, 2), (3, 3), (4, 2)] {
            let w = 14;
            let want = naive_min(w, |s| verify_distinct(s, k, n as usize).is_ok());
            assert_eq!(min_distinct_cover(k, n, w, b()).unwrap().optimum, want, "k = {k}, N = {n}");
        }
    }
}
