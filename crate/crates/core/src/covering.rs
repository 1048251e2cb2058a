//! Greedy covering by translates, over the integers and over `F_p^n`, and
//! the extension of a partial progression cover to every direction.
//!
//! Both greedy routines keep, for every candidate translate `t`, the number
//! `c(t)` of still-uncovered targets in `S + t`. When a target `x` becomes
//! covered, `c(x - s)` drops by one for each `s` in `S`, so the whole run
//! costs `O(#target * #S)` plus one argmax scan per step.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp::{FpCertificate, FpSet, FpSpace, FpVec};
use crate::numbers::Int;
use crate::sets::IntSet;

/// Output of a greedy covering run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyCover<T> {
    /// Translates in the order they were chosen.
    pub translates: Vec<T>,
    /// `uncovered[i]` is the number of uncovered targets after `i` steps.
    pub uncovered: Vec<usize>,
}

impl<T: Ord + Clone> GreedyCover<T> {
    pub fn len(&self) -> usize {
        self.translates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.translates.is_empty()
    }

    pub fn set(&self) -> BTreeSet<T> {
        self.translates.iter().cloned().collect()
    }
}

/// `ceil((2X / #S) ln X) + 1`.
pub fn int_cover_bound(x: Int, s: usize) -> usize {
    ((2.0 * x as f64 / s as f64) * (x as f64).ln()).ceil() as usize + 1
}

/// `2 ceil((p^n / #S) n ln p) + 1`.
pub fn fp_cover_bound(p: u32, n: usize, s: usize) -> usize {
    let size = (p as f64).powi(n as i32);
    2 * ((size / s as f64) * n as f64 * (p as f64).ln()).ceil() as usize + 1
}

/// Find `T` with `S + T ⊇ {1, ..., X}`, greedily maximizing new coverage at
/// each step over `t ∈ {-X+1, ..., X}` (smallest `t` on ties).
///
/// Each step satisfies `#A_{i+1} <= #A_i (1 - #S/2X)`, which is checked.
pub fn greedy_translate_cover_int(s: &IntSet, x: Int) -> Result<GreedyCover<Int>> {
    if s.is_empty() {
        return Err(Error::Empty("greedy cover needs a nonempty S"));
    }
    if x < 1 || s.min().unwrap() < 1 || s.max().unwrap() > x {
        return Err(Error::Invalid(format!("S must lie in {{1, ..., {x}}}")));
    }
    let xs = x as usize;
    let elems: Vec<usize> = s.iter().map(|v| v as usize).collect();
    // translate t is stored at index t + X - 1, t in [-X+1, X]
    let offset = xs - 1;
    let mut gain = vec![0usize; 2 * xs];
    for (slot, g) in gain.iter_mut().enumerate() {
        let t = slot as i64 - offset as i64;
        *g = elems.iter().filter(|&&e| (1..=xs as i64).contains(&(e as i64 + t))).count();
    }
    let mut uncovered = vec![true; xs + 1];
    uncovered[0] = false;
    let mut remaining = xs;
    let mut out = GreedyCover { translates: Vec::new(), uncovered: vec![remaining] };
    let s_len = elems.len();
    while remaining > 0 {
        let (best, best_gain) = argmax_first(&gain);
        debug_assert!(best_gain > 0);
        let t = best as i64 - offset as i64;
        for &e in &elems {
            let target = e as i64 + t;
            if (1..=xs as i64).contains(&target) && uncovered[target as usize] {
                uncovered[target as usize] = false;
                for &e2 in &elems {
                    gain[(target - e2 as i64 + offset as i64) as usize] -= 1;
                }
            }
        }
        let before = remaining;
        remaining -= best_gain;
        // #A_{i+1} * 2X <= #A_i * (2X - #S)
        assert!(
            remaining * 2 * xs <= before * (2 * xs - s_len.min(2 * xs)),
            "greedy contraction violated"
        );
        out.translates.push(t as Int);
        out.uncovered.push(remaining);
    }
    Ok(out)
}

fn argmax_first(v: &[usize]) -> (usize, usize) {
    let mut best = 0;
    for (i, &g) in v.iter().enumerate() {
        if g > v[best] {
            best = i;
        }
    }
    (best, v[best])
}

/// Find `T ⊂ F_p^n` with `S + T = F_p^n`, greedily, ties broken by the
/// lexicographically smallest translate.
///
/// Each step satisfies `#A_{i+1} <= #A_i (1 - #S/p^n)`, which is checked.
pub fn greedy_translate_cover_fp(s: &FpSet) -> Result<GreedyCover<FpVec>> {
    if s.is_empty() {
        return Err(Error::Empty("greedy cover needs a nonempty S"));
    }
    let space = s.space();
    let size = space.dense_size()?;
    let elems: Vec<FpVec> = s.iter().cloned().collect();
    let mut gain = vec![elems.len(); size];
    let mut uncovered = vec![true; size];
    let mut remaining = size;
    let mut out = GreedyCover { translates: Vec::new(), uncovered: vec![remaining] };
    while remaining > 0 {
        let (best, best_gain) = argmax_first(&gain);
        let t = space.decode(best);
        for e in &elems {
            let target = space.add(e, &t);
            let ti = space.index(&target);
            if uncovered[ti] {
                uncovered[ti] = false;
                for e2 in &elems {
                    gain[space.index(&space.sub(&target, e2))] -= 1;
                }
            }
        }
        let before = remaining;
        remaining -= best_gain;
        assert!(remaining * size <= before * (size - elems.len()), "greedy contraction violated");
        out.translates.push(t);
        out.uncovered.push(remaining);
    }
    Ok(out)
}

/// Output of [`extend_full_difference_cover`].
#[derive(Debug, Clone, Serialize)]
pub struct FullCover {
    pub set: FpSet,
    pub translates: Vec<FpVec>,
    /// Certificate for every nonzero direction.
    pub certificate: FpCertificate,
}

/// Given `A` holding a k-term progression with every difference in `D`,
/// build `A' = ∪ (A + x)` over `x ∈ {0} ∪ T ∪ 2T ∪ ... ∪ (k-1)T`, where
/// `T` covers the space by translates of `D ∪ {0}`.
///
/// A progression with difference `d + t` is `{(a + jd) + jt}`, so `A'`
/// holds a k-term progression in every nonzero direction. The result is
/// re-verified exhaustively.
pub fn extend_full_difference_cover(a: &FpSet, directions: &BTreeSet<FpVec>, k: usize) -> Result<FullCover> {
    let space = a.space();
    if let Err(missing) = a.certify(k, directions) {
        return Err(Error::UncoveredDirections { k, directions: missing });
    }
    let zero = space.zero();
    let s = FpSet::in_space(space, directions.iter().cloned().chain(std::iter::once(zero.clone())))?;
    let cover = greedy_translate_cover_fp(&s)?;
    let shifts = multiples(space, &cover.translates, k);
    let mut points = BTreeSet::new();
    for x in &shifts {
        for v in a.iter() {
            points.insert(space.add(v, x));
        }
    }
    let set = FpSet::in_space(space, points)?;
    assert!(set.len() <= k * cover.len() * a.len(), "extension size bound violated");
    let all: Vec<FpVec> = space.nonzero_vectors()?.collect();
    let certificate = set
        .certify(k, &all)
        .map_err(|missing| Error::UncoveredDirections { k, directions: missing })?;
    Ok(FullCover { set, translates: cover.translates, certificate })
}

/// `{0} ∪ T ∪ 2T ∪ ... ∪ (k-1)T`.
fn multiples(space: FpSpace, t: &[FpVec], k: usize) -> BTreeSet<FpVec> {
    let mut out = BTreeSet::from([space.zero()]);
    for v in t {
        for j in 1..k.max(1) {
            out.insert(space.scale(j as u32, v));
        }
    }
    out
}

/// `S + T ⊇ {1, ..., X}` by direct enumeration.
pub fn covers_interval(s: &IntSet, t: &[Int], x: Int) -> bool {
    let sum: BTreeSet<Int> = s.iter().flat_map(|a| t.iter().map(move |b| a + b)).collect();
    (1..=x).all(|v| sum.contains(&v))
}

/// `S + T = F_p^n` by direct enumeration.
pub fn covers_space(s: &FpSet, t: &[FpVec]) -> Result<bool> {
    let space = s.space();
    let sum: BTreeSet<FpVec> = s.iter().flat_map(|a| t.iter().map(move |b| space.add(a, b))).collect();
    Ok(sum.len() == space.dense_size()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_interval_needs_one_translate() {
        let s = IntSet::interval(1, 10);
        let c = greedy_translate_cover_int(&s, 10).unwrap();
        assert_eq!(c.translates, vec![0]);
    }

    #[test]
    fn singleton_needs_x_translates() {
        let s: IntSet = [1].into_iter().collect();
        let c = greedy_translate_cover_int(&s, 3).unwrap();
        assert_eq!(c.set(), BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn two_point_set() {
        let s: IntSet = [1, 3].into_iter().collect();
        let c = greedy_translate_cover_int(&s, 4).unwrap();
        assert_eq!(c.len(), 2);
        assert!(covers_interval(&s, &c.translates, 4));
        // no single translate works, so 2 is optimal
        assert!((-3..=4).all(|t| !covers_interval(&s, &[t], 4)));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(greedy_translate_cover_int(&IntSet::new(), 3), Err(Error::Empty(_))));
        let s: IntSet = [0, 2].into_iter().collect();
        assert!(greedy_translate_cover_int(&s, 3).is_err());
        let space = FpSpace::new(3, 1).unwrap();
        assert!(greedy_translate_cover_fp(&FpSet::empty(space)).is_err());
    }

    #[test]
    fn fp_cover_examples() {
        let space = FpSpace::new(3, 2).unwrap();
        let whole = FpSet::whole(space).unwrap();
        assert_eq!(greedy_translate_cover_fp(&whole).unwrap().translates, vec![vec![0, 0]]);
        let single = FpSet::new(3, 1, [vec![0]]).unwrap();
        let c = greedy_translate_cover_fp(&single).unwrap();
        assert_eq!(c.translates, vec![vec![0], vec![1], vec![2]]);
        let line = FpSet::line(space, &[0, 0], &[1, 1]);
        let c = greedy_translate_cover_fp(&line).unwrap();
        assert_eq!(c.len(), 3);
        assert!(covers_space(&line, &c.translates).unwrap());
    }

    #[test]
    fn extension_is_identity_when_already_full() {
        let space = FpSpace::new(3, 2).unwrap();
        let whole = FpSet::whole(space).unwrap();
        let dirs: BTreeSet<FpVec> = space.nonzero_vectors().unwrap().collect();
        let out = extend_full_difference_cover(&whole, &dirs, 3).unwrap();
        assert_eq!(out.translates, vec![vec![0, 0]]);
        assert_eq!(out.set, whole);
    }

    #[test]
    fn extension_of_a_single_line() {
        let space = FpSpace::new(5, 1).unwrap();
        let line = FpSet::whole(space).unwrap();
        let out = extend_full_difference_cover(&line, &BTreeSet::from([vec![1]]), 5).unwrap();
        assert_eq!(out.set, line);
        assert_eq!(out.certificate.entries.len(), 4);
    }

    #[test]
    fn extension_rejects_invalid_certificate() {
        let space = FpSpace::new(5, 1).unwrap();
        let pts = FpSet::in_space(space, [vec![0], vec![1]]).unwrap();
        let err = extend_full_difference_cover(&pts, &BTreeSet::from([vec![2]]), 2).unwrap_err();
        assert_eq!(err, Error::UncoveredDirections { k: 2, directions: vec![vec![2]] });
    }

    #[test]
    fn bounds_hold_on_examples() {
        let s: IntSet = [1, 3].into_iter().collect();
        assert!(greedy_translate_cover_int(&s, 4).unwrap().len() <= int_cover_bound(4, 2));
        assert!(fp_cover_bound(3, 2, 3) >= 3);
    }
}
