//! Subsets of `F_p^n` and progressions inside them.
//!
//! Vectors are `Vec<u32>` with reduced coordinates. The dense index of a
//! vector is big-endian (`v[0]` most significant), so index order is the
//! lexicographic order of coordinate tuples.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numbers::is_prime;

pub type FpVec = Vec<u32>;

/// Largest space handled by dense (indexed) routines.
pub const DENSE_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpSpace {
    pub p: u32,
    pub n: usize,
}

impl FpSpace {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if n == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        Ok(FpSpace { p, n })
    }

    /// `p^n`, if it fits in the dense limit.
    pub fn size(&self) -> Option<usize> {
        (self.p as usize).checked_pow(self.n as u32).filter(|&s| s <= DENSE_LIMIT)
    }

    /// `p^n`, or an error when the space is too large to enumerate.
    pub fn dense_size(&self) -> Result<usize> {
        self.size().ok_or_else(|| {
            Error::too_large("dense F_p^n routine", (self.p as f64).powi(self.n as i32) as u128, DENSE_LIMIT as u128)
        })
    }

    pub fn zero(&self) -> FpVec {
        vec![0; self.n]
    }

    pub fn reduce(&self, v: &[i64]) -> FpVec {
        v.iter().map(|&x| x.rem_euclid(self.p as i64) as u32).collect()
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> FpVec {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u32], b: &[u32]) -> FpVec {
        a.iter().zip(b).map(|(&x, &y)| (x + self.p - y) % self.p).collect()
    }

    pub fn scale(&self, c: u32, a: &[u32]) -> FpVec {
        let c = (c % self.p) as u64;
        a.iter().map(|&x| ((c * x as u64) % self.p as u64) as u32).collect()
    }

    pub fn neg(&self, a: &[u32]) -> FpVec {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    /// `a + j*d`.
    pub fn step(&self, a: &[u32], d: &[u32], j: u32) -> FpVec {
        let j = (j % self.p) as u64;
        a.iter()
            .zip(d)
            .map(|(&x, &y)| ((x as u64 + j * y as u64) % self.p as u64) as u32)
            .collect()
    }

    pub fn index(&self, v: &[u32]) -> usize {
        v.iter().fold(0usize, |acc, &x| acc * self.p as usize + x as usize)
    }

    pub fn decode(&self, mut idx: usize) -> FpVec {
        let mut v = vec![0u32; self.n];
        for slot in v.iter_mut().rev() {
            *slot = (idx % self.p as usize) as u32;
            idx /= self.p as usize;
        }
        v
    }

    /// All vectors in lexicographic order.
    pub fn vectors(&self) -> Result<impl Iterator<Item = FpVec> + '_> {
        let size = self.dense_size()?;
        Ok((0..size).map(move |i| self.decode(i)))
    }

    pub fn nonzero_vectors(&self) -> Result<impl Iterator<Item = FpVec> + '_> {
        Ok(self.vectors()?.skip(1))
    }

    /// Inverse of `a` in `F_p`.
    pub fn inv(&self, a: u32) -> Option<u32> {
        let a = a % self.p;
        (a != 0).then(|| pow_mod(a, self.p - 2, self.p))
    }
}

pub(crate) fn pow_mod(b: u32, mut e: u32, p: u32) -> u32 {
    let p64 = p as u64;
    let mut r = 1u64;
    let mut b64 = b as u64 % p64;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b64 % p64;
        }
        b64 = b64 * b64 % p64;
        e >>= 1;
    }
    r as u32
}

/// A finite subset of `F_p^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpSet {
    #[serde(flatten)]
    space: FpSpace,
    points: BTreeSet<FpVec>,
}

impl FpSet {
    pub fn new(p: u32, n: usize, points: impl IntoIterator<Item = FpVec>) -> Result<Self> {
        let space = FpSpace::new(p, n)?;
        Self::in_space(space, points)
    }

    pub fn in_space(space: FpSpace, points: impl IntoIterator<Item = FpVec>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for v in points {
            if v.len() != space.n {
                return Err(Error::Invalid(format!("vector {v:?} does not have length {}", space.n)));
            }
            set.insert(v.into_iter().map(|x| x % space.p).collect());
        }
        Ok(FpSet { space, points: set })
    }

    pub fn empty(space: FpSpace) -> Self {
        FpSet { space, points: BTreeSet::new() }
    }

    /// All of `F_p^n`.
    pub fn whole(space: FpSpace) -> Result<Self> {
        Ok(FpSet { space, points: space.vectors()?.collect() })
    }

    /// The line `{a + j d : j in F_p}`.
    pub fn line(space: FpSpace, a: &[u32], d: &[u32]) -> Self {
        FpSet { space, points: (0..space.p).map(|j| space.step(a, d, j)).collect() }
    }

    pub fn space(&self) -> FpSpace {
        self.space
    }

    pub fn p(&self) -> u32 {
        self.space.p
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.points.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FpVec> {
        self.points.iter()
    }

    pub fn as_btree(&self) -> &BTreeSet<FpVec> {
        &self.points
    }

    pub fn union(&self, other: &FpSet) -> FpSet {
        FpSet { space: self.space, points: self.points.union(&other.points).cloned().collect() }
    }

    pub fn translate(&self, t: &[u32]) -> FpSet {
        FpSet { space: self.space, points: self.points.iter().map(|v| self.space.add(v, t)).collect() }
    }

    pub fn is_subset(&self, other: &FpSet) -> bool {
        self.points.is_subset(&other.points)
    }

    /// Number of distinct terms in a k-term progression with difference `d`.
    fn effective_len(&self, d: &[u32], k: usize) -> usize {
        if d.iter().all(|&x| x == 0) {
            k.min(1)
        } else {
            k.min(self.space.p as usize)
        }
    }

    pub fn has_progression(&self, a: &[u32], d: &[u32], k: usize) -> bool {
        (0..self.effective_len(d, k) as u32).all(|j| self.contains(&self.space.step(a, d, j)))
    }

    /// Lexicographically smallest base of a k-term progression with difference `d`.
    pub fn progression_base(&self, d: &[u32], k: usize) -> Option<FpVec> {
        self.points.iter().find(|a| self.has_progression(a, d, k)).cloned()
    }

    /// Every nonzero `d` for which the set holds a k-term progression, in lex order.
    pub fn covered_directions(&self, k: usize) -> Result<Vec<FpVec>> {
        let dense = DenseFpSet::new(self)?;
        Ok(self
            .space
            .nonzero_vectors()?
            .filter(|d| dense.has_any_progression(d, k))
            .collect())
    }

    /// Whether the set contains a full line in every direction.
    pub fn is_besicovitch(&self) -> Result<bool> {
        let total = self.space.dense_size()? - 1;
        Ok(self.covered_directions(self.space.p as usize)?.len() == total)
    }

    /// Certificate with the lexicographically smallest base for each listed direction.
    pub fn certify<'a>(
        &self,
        k: usize,
        directions: impl IntoIterator<Item = &'a FpVec>,
    ) -> std::result::Result<FpCertificate, Vec<FpVec>> {
        let mut cert = FpCertificate { k, entries: BTreeMap::new() };
        let mut missing = Vec::new();
        for d in directions {
            match self.progression_base(d, k) {
                Some(a) => {
                    cert.entries.insert(d.clone(), a);
                }
                None => missing.push(d.clone()),
            }
        }
        if missing.is_empty() {
            Ok(cert)
        } else {
            Err(missing)
        }
    }
}

impl fmt::Display for FpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.points.iter().map(|v| fmt_vec(v)).collect();
        f.write_str(&parts.join(" "))
    }
}

pub fn fmt_vec(v: &[u32]) -> String {
    let inner: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(","))
}

/// Progression certificate over `F_p^n`: direction -> base point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpCertificate {
    pub k: usize,
    /// Serialized as `[direction, base]` pairs since JSON keys are strings.
    #[serde(with = "pair_list")]
    pub entries: BTreeMap<FpVec, FpVec>,
}

mod pair_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serializer};

    use super::FpVec;

    pub fn serialize<S: Serializer>(m: &BTreeMap<FpVec, FpVec>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<FpVec, FpVec>, D::Error> {
        Ok(Vec::<(FpVec, FpVec)>::deserialize(d)?.into_iter().collect())
    }
}

impl FpCertificate {
    pub fn check(&self, set: &FpSet) -> std::result::Result<(), Vec<FpVec>> {
        let bad: Vec<FpVec> = self
            .entries
            .iter()
            .filter(|(d, a)| !set.has_progression(a, d, self.k))
            .map(|(d, _)| d.clone())
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }
}

/// Bitmap membership over a small `F_p^n`.
pub(crate) struct DenseFpSet {
    space: FpSpace,
    member: Vec<bool>,
    points: Vec<FpVec>,
}

impl DenseFpSet {
    pub(crate) fn new(set: &FpSet) -> Result<Self> {
        let space = set.space;
        let mut member = vec![false; space.dense_size()?];
        for v in set.iter() {
            member[space.index(v)] = true;
        }
        Ok(DenseFpSet { space, member, points: set.iter().cloned().collect() })
    }

    pub(crate) fn has_any_progression(&self, d: &[u32], k: usize) -> bool {
        let len = if d.iter().all(|&x| x == 0) { k.min(1) } else { k.min(self.space.p as usize) };
        self.points.iter().any(|a| {
            (1..len as u32).all(|j| self.member[self.space.index(&self.space.step(a, d, j))])
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(FpSpace::new(9, 2), Err(Error::NotPrime(9)));
    }

    #[test]
    fn index_order_is_lexicographic() {
        let s = FpSpace::new(3, 2).unwrap();
        let all: Vec<FpVec> = s.vectors().unwrap().collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        for (i, v) in all.iter().enumerate() {
            assert_eq!(s.index(v), i);
        }
    }

    #[test]
    fn field_inverse() {
        let s = FpSpace::new(7, 1).unwrap();
        for a in 1..7 {
            assert_eq!(a * s.inv(a).unwrap() % 7, 1);
        }
        assert_eq!(s.inv(0), None);
    }

    #[test]
    fn line_covers_one_projective_direction() {
        let s = FpSpace::new(3, 2).unwrap();
        let l = FpSet::line(s, &[0, 0], &[1, 2]);
        assert_eq!(l.len(), 3);
        let dirs = l.covered_directions(3).unwrap();
        assert_eq!(dirs, vec![vec![1, 2], vec![2, 1]]);
    }

    #[test]
    fn whole_space_is_besicovitch() {
        let s = FpSpace::new(3, 2).unwrap();
        assert!(FpSet::whole(s).unwrap().is_besicovitch().unwrap());
        assert!(!FpSet::line(s, &[0, 0], &[1, 0]).is_besicovitch().unwrap());
    }

    #[test]
    fn certificate_round_trip() {
        let s = FpSpace::new(5, 1).unwrap();
        let set = FpSet::in_space(s, [vec![0], vec![1], vec![2]]).unwrap();
        let cert = set.certify(3, &[vec![1]]).unwrap();
        assert_eq!(cert.entries[&vec![1]], vec![0]);
        cert.check(&set).unwrap();
        assert_eq!(set.certify(3, &[vec![2]]).unwrap_err(), vec![vec![2]]);
    }
}
