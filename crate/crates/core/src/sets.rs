//! Finite sets of integers and integer pairs, the projection family
//! `x + r*y`, tensor powers with their planar collapse, progression-cover
//! certificates, cut-and-move and the digit (Freiman-style) collapse.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numbers::{checked_pow, int_serde::Wire, Int, Rat};

/// A projection parameter: a rational in lowest terms or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slope {
    Finite(Rat),
    Infinity,
}

impl Slope {
    pub fn new(numerator: Int, denominator: Int) -> Result<Slope> {
        if denominator == 0 {
            return Err(Error::Invalid("slope denominator must be nonzero".into()));
        }
        Ok(Slope::Finite(Rat::new(numerator, denominator)))
    }

    pub fn int(r: Int) -> Slope {
        Slope::Finite(Rat::from_integer(r))
    }

    /// The difference slope `r = -1`.
    pub fn minus_one() -> Slope {
        Slope::int(-1)
    }

    pub fn is_minus_one(&self) -> bool {
        *self == Slope::minus_one()
    }

    /// Image of `(x, y)` under `x + r*y` (or `y` at infinity).
    pub fn apply(&self, x: Int, y: Int) -> Rat {
        match self {
            Slope::Finite(r) => Rat::from_integer(x) + *r * Rat::from_integer(y),
            Slope::Infinity => Rat::from_integer(y),
        }
    }

    /// Every slope `a/b` with `|a|, |b| <= height`, plus infinity.
    pub fn height_list(height: Int) -> Vec<Slope> {
        let mut set = BTreeSet::new();
        for a in -height..=height {
            for b in 1..=height {
                set.insert(Slope::Finite(Rat::new(a, b)));
            }
        }
        set.insert(Slope::Infinity);
        set.into_iter().collect()
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Slope::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Slope::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Slope> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Slope::Infinity);
        }
        let bad = || Error::Invalid(format!("cannot parse slope `{s}`"));
        match s.split_once('/') {
            Some((a, b)) => Slope::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => Ok(Slope::int(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Finite set of integers, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IntSet(BTreeSet<Int>);

impl IntSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The interval `{lo, ..., hi}`.
    pub fn interval(lo: Int, hi: Int) -> Self {
        (lo..=hi).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: Int) -> bool {
        self.0.contains(&x)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Int> + '_ {
        self.0.iter().copied()
    }

    pub fn min(&self) -> Option<Int> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<Int> {
        self.0.last().copied()
    }

    pub fn to_vec(&self) -> Vec<Int> {
        self.iter().collect()
    }

    pub fn as_btree(&self) -> &BTreeSet<Int> {
        &self.0
    }

    pub fn translate(&self, t: Int) -> IntSet {
        self.iter().map(|x| x + t).collect()
    }

    /// `c * A`.
    pub fn dilate(&self, c: Int) -> IntSet {
        self.iter().map(|x| c * x).collect()
    }

    pub fn union(&self, other: &IntSet) -> IntSet {
        self.0.union(&other.0).copied().collect()
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Minkowski sum `A + B`.
    pub fn sumset(&self, other: &IntSet) -> IntSet {
        let mut out = BTreeSet::new();
        for a in self.iter() {
            for b in other.iter() {
                out.insert(a + b);
            }
        }
        IntSet(out)
    }

    /// Whether the k-term progression `a, a+d, ..., a+(k-1)d` lies in the set.
    pub fn contains_progression(&self, a: Int, d: Int, k: usize) -> bool {
        (0..k as Int).all(|j| self.contains(a + j * d))
    }
}

impl FromIterator<Int> for IntSet {
    fn from_iter<I: IntoIterator<Item = Int>>(iter: I) -> Self {
        IntSet(iter.into_iter().collect())
    }
}

impl Serialize for IntSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(Wire))
    }
}

impl<'de> Deserialize<'de> for IntSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<Wire> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Finite set of integer pairs `(x, y)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlanarSet(BTreeSet<(Int, Int)>);

impl PlanarSet {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Int, Int)> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, p: (Int, Int)) -> bool {
        self.0.contains(&p)
    }
}

impl FromIterator<(Int, Int)> for PlanarSet {
    fn from_iter<I: IntoIterator<Item = (Int, Int)>>(iter: I) -> Self {
        PlanarSet(iter.into_iter().collect())
    }
}

impl Serialize for PlanarSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|(x, y)| [Wire(x), Wire(y)]))
    }
}

impl<'de> Deserialize<'de> for PlanarSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<[Wire; 2]> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|[x, y]| (x.0, y.0)).collect())
    }
}

/// Finite set of pairs of integer `n`-vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSetN {
    dim: usize,
    points: BTreeSet<(Vec<Int>, Vec<Int>)>,
}

impl PairSetN {
    pub fn new(dim: usize, points: impl IntoIterator<Item = (Vec<Int>, Vec<Int>)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        let points: BTreeSet<_> = points.into_iter().collect();
        if let Some((x, y)) = points.iter().find(|(x, y)| x.len() != dim || y.len() != dim) {
            return Err(Error::Invalid(format!(
                "vector lengths {} and {} do not match dimension {dim}",
                x.len(),
                y.len()
            )));
        }
        Ok(PairSetN { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Vec<Int>, Vec<Int>)> {
        self.points.iter()
    }
}

/// `pi_r(A) = { x + r*y }`, or `{ y }` at infinity.
pub fn project(a: &PlanarSet, r: Slope) -> BTreeSet<Rat> {
    a.iter().map(|(x, y)| r.apply(x, y)).collect()
}

/// Coordinatewise projection of a set of vector pairs.
pub fn project_n(b: &PairSetN, r: Slope) -> BTreeSet<Vec<Rat>> {
    b.iter()
        .map(|(x, y)| x.iter().zip(y).map(|(&xi, &yi)| r.apply(xi, yi)).collect())
        .collect()
}

/// The `n`-fold coordinatewise power of a planar set.
///
/// Refuses instances with more than `cap` pairs.
pub fn tensor_power(a: &PlanarSet, n: usize, cap: u128) -> Result<PairSetN> {
    if a.is_empty() {
        return Err(Error::Empty("tensor power of an empty set"));
    }
    if n == 0 {
        return Err(Error::Invalid("tensor power exponent must be positive".into()));
    }
    let size = (a.len() as u128)
        .checked_pow(n as u32)
        .filter(|&s| s <= cap)
        .ok_or_else(|| Error::too_large("tensor power", (a.len() as f64).powi(n as i32) as u128, cap))?;
    let base: Vec<(Int, Int)> = a.iter().collect();
    let mut points = BTreeSet::new();
    let mut idx = vec![0usize; n];
    for _ in 0..size {
        let x: Vec<Int> = idx.iter().map(|&i| base[i].0).collect();
        let y: Vec<Int> = idx.iter().map(|&i| base[i].1).collect();
        points.insert((x, y));
        // odometer increment
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < base.len() {
                break;
            }
            *slot = 0;
        }
    }
    PairSetN::new(n, points)
}

fn collapse_vector(v: &[Int], powers: &[Int]) -> Result<Int> {
    v.iter().zip(powers).try_fold(0 as Int, |acc, (&x, &p)| {
        p.checked_mul(x)
            .and_then(|term| acc.checked_add(term))
            .ok_or(Error::Overflow("collapse map"))
    })
}

/// Collapse a set of vector pairs to the plane by `(x, y) -> (<w, x>, <w, y>)`
/// with `w = (t, t^2, ..., t^n)`.
///
/// Returns the image and the smallest `t >= 1` for which every listed slope
/// keeps its projection count, certified by direct enumeration.
pub fn collapse_to_plane(b: &PairSetN, slopes: &[Slope]) -> Result<(PlanarSet, Int)> {
    let targets: Vec<usize> = slopes.iter().map(|&r| project_n(b, r).len()).collect();
    let mut t: Int = 1;
    loop {
        let powers: Vec<Int> = (1..=b.dim() as u32).map(|i| checked_pow(t, i)).collect::<Result<_>>()?;
        let image: PlanarSet = b
            .iter()
            .map(|(x, y)| Ok((collapse_vector(x, &powers)?, collapse_vector(y, &powers)?)))
            .collect::<Result<_>>()?;
        if slopes.iter().zip(&targets).all(|(&r, &want)| project(&image, r).len() == want) {
            return Ok((image, t));
        }
        t += 1;
    }
}

/// Map from common difference `d` to the base point `a(d)` of a k-term
/// progression `a(d), a(d)+d, ..., a(d)+(k-1)d` in some set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApCertificate {
    pub k: usize,
    pub entries: BTreeMap<Int, Int>,
}

impl ApCertificate {
    pub fn new(k: usize) -> Self {
        ApCertificate { k, entries: BTreeMap::new() }
    }

    pub fn base(&self, d: Int) -> Option<Int> {
        self.entries.get(&d).copied()
    }

    pub fn differences(&self) -> impl Iterator<Item = Int> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Check every entry against `set`; the error lists the failing differences.
    pub fn check(&self, set: &IntSet) -> Result<()> {
        let member = Membership::new(set);
        let bad: Vec<Int> = self
            .entries
            .iter()
            .filter(|&(&d, &a)| !member.has_progression(a, d, self.k))
            .map(|(&d, _)| d)
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Uncovered { k: self.k, differences: bad })
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateWire {
    k: usize,
    entries: BTreeMap<Wire, Wire>,
}

impl Serialize for ApCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateWire {
            k: self.k,
            entries: self.entries.iter().map(|(&d, &a)| (Wire(d), Wire(a))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ApCertificate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = CertificateWire::deserialize(d)?;
        Ok(ApCertificate { k: w.k, entries: w.entries.into_iter().map(|(d, a)| (d.0, a.0)).collect() })
    }
}

/// Fast membership oracle: a dense bitmap when the span is moderate,
/// otherwise a hash set.
pub(crate) enum Membership {
    Dense { lo: Int, bits: Vec<u64> },
    Sparse(HashSet<Int>),
}

const DENSE_SPAN_LIMIT: Int = 1 << 28;

impl Membership {
    pub(crate) fn new(set: &IntSet) -> Self {
        match (set.min(), set.max()) {
            (Some(lo), Some(hi)) if (hi - lo) < DENSE_SPAN_LIMIT => {
                let span = (hi - lo + 1) as usize;
                let mut bits = vec![0u64; span.div_ceil(64)];
                for x in set.iter() {
                    let i = (x - lo) as usize;
                    bits[i / 64] |= 1 << (i % 64);
                }
                Membership::Dense { lo, bits }
            }
            _ => Membership::Sparse(set.iter().collect()),
        }
    }

    #[inline]
    pub(crate) fn contains(&self, x: Int) -> bool {
        match self {
            Membership::Dense { lo, bits } => {
                if x < *lo {
                    return false;
                }
                let i = x - lo;
                if i >= (bits.len() as Int) * 64 {
                    return false;
                }
                let i = i as usize;
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            Membership::Sparse(h) => h.contains(&x),
        }
    }

    pub(crate) fn has_progression(&self, a: Int, d: Int, k: usize) -> bool {
        (0..k as Int).all(|j| self.contains(a + j * d))
    }
}

/// Differences that have no k-term progression in the checked set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Uncovered {
    pub k: usize,
    pub differences: Vec<Int>,
}

impl From<Uncovered> for Error {
    fn from(u: Uncovered) -> Error {
        Error::Uncovered { k: u.k, differences: u.differences }
    }
}

/// For each `d` in `differences`, find the minimal `a(d)` such that the
/// k-term progression with difference `d` starting at `a(d)` lies in `set`.
///
/// `d = 0` is covered by any nonempty set, with `a(0) = min A`.
pub fn verify_cover(
    set: &IntSet,
    k: usize,
    differences: impl IntoIterator<Item = Int>,
) -> std::result::Result<ApCertificate, Uncovered> {
    assert!(k >= 1, "progression length must be at least 1");
    let member = Membership::new(set);
    let mut cert = ApCertificate::new(k);
    let mut uncovered = Vec::new();
    let diffs: BTreeSet<Int> = differences.into_iter().collect();
    for d in diffs {
        match set.iter().find(|&a| member.has_progression(a, d, k)) {
            Some(a) => {
                cert.entries.insert(d, a);
            }
            None => uncovered.push(d),
        }
    }
    if uncovered.is_empty() {
        Ok(cert)
    } else {
        Err(Uncovered { k, differences: uncovered })
    }
}

/// Result of [`cut_and_move`].
#[derive(Debug, Clone, Serialize)]
pub struct CutAndMove {
    pub set: IntSet,
    /// Guaranteed progression length `floor(k/2)`.
    pub short_k: usize,
    /// Certificate over `{1, ..., N}` for `short_k`-term progressions (empty if `short_k = 0`).
    pub certificate: ApCertificate,
}

/// Fold a progression cover of `{1..N}` into the window `{1, ..., 10kN}`.
///
/// The integers are cut into blocks `10kjN + {1, ..., 10kN}` and every block
/// is translated onto the first one. A k-term progression is split across at
/// most two blocks, so each difference keeps a progression of length at
/// least `floor(k/2)`.
pub fn cut_and_move(set: &IntSet, k: usize, n: Int) -> Result<CutAndMove> {
    if n < 1 || k < 1 {
        return Err(Error::Invalid("cut_and_move needs k >= 1 and N >= 1".into()));
    }
    verify_cover(set, k, 1..=n)?;
    let block = 10 * k as Int * n;
    let moved: IntSet = set.iter().map(|x| (x - 1).rem_euclid(block) + 1).collect();
    let short_k = k / 2;
    let certificate = if short_k == 0 { ApCertificate::new(0) } else { verify_cover(&moved, short_k, 1..=n)? };
    Ok(CutAndMove { set: moved, short_k, certificate })
}

/// Smallest base for which the digit map is injective on differences of
/// vectors from the box `{0, ..., box_size-1}^n`.
pub fn min_admissible_base(box_size: Int) -> Int {
    (2 * box_size - 1).max(2)
}

/// The digit map `x -> sum_i base^i x_i` (coordinates indexed from 0).
pub fn digit_map(x: &[Int], base: Int) -> Result<Int> {
    let mut acc: Int = 0;
    let mut w: Int = 1;
    for (i, &xi) in x.iter().enumerate() {
        if i > 0 {
            w = w.checked_mul(base).ok_or(Error::Overflow("digit map"))?;
        }
        acc = w.checked_mul(xi).and_then(|t| acc.checked_add(t)).ok_or(Error::Overflow("digit map"))?;
    }
    Ok(acc)
}

/// Collapse a set of vectors from the box `{0, ..., box_size-1}^n` to the
/// integers by the digit map.
///
/// The map is linear, so progressions go to progressions; with
/// `base >= 2*box_size - 1` it is injective on the box and on the set of
/// difference vectors, so distinct common differences stay distinct.
pub fn freiman_collapse(points: &BTreeSet<Vec<Int>>, box_size: Int, base: Int) -> Result<IntSet> {
    let minimal = min_admissible_base(box_size);
    if base < minimal {
        return Err(Error::BaseTooSmall { base, minimal });
    }
    if let Some(p) = points.iter().find(|p| p.iter().any(|&c| c < 0 || c >= box_size)) {
        return Err(Error::Invalid(format!("point {p:?} outside the box [0, {box_size})")));
    }
    points.iter().map(|p| digit_map(p, base)).collect()
}

/// `#pi_r(A) <= #A`; exposed for property tests and reports.
pub fn projection_is_injective(a: &PlanarSet, r: Slope) -> bool {
    project(a, r).len() == a.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn planar(p: &[(Int, Int)]) -> PlanarSet {
        p.iter().copied().collect()
    }

    fn ints(v: &[Int]) -> BTreeSet<Rat> {
        v.iter().map(|&x| Rat::from_integer(x)).collect()
    }

    #[test]
    fn slope_reduces_and_parses() {
        assert_eq!(Slope::new(2, -4).unwrap(), Slope::new(-1, 2).unwrap());
        assert_eq!("3/6".parse::<Slope>().unwrap().to_string(), "1/2");
        assert_eq!("inf".parse::<Slope>().unwrap(), Slope::Infinity);
        assert_ne!(Slope::Infinity, Slope::int(0));
        assert!(Slope::new(1, 0).is_err());
    }

    #[test]
    fn projection_examples() {
        let a = planar(&[(0, 0), (1, 2)]);
        assert_eq!(project(&a, Slope::int(1)), ints(&[0, 3]));
        assert_eq!(project(&a, Slope::Infinity), ints(&[0, 2]));
        let b = planar(&[(0, 1), (1, 0), (2, 2)]);
        assert_eq!(project(&b, Slope::int(-1)), ints(&[-1, 1, 0]));
    }

    #[test]
    fn rational_projection_is_exact() {
        let a = planar(&[(0, 0), (1, 2), (2, 0)]);
        let half = Slope::new(1, 2).unwrap();
        // 0, 1 + 1, 2 collide exactly
        assert_eq!(project(&a, half).len(), 2);
    }

    #[test]
    fn tensor_power_examples() {
        let single = tensor_power(&planar(&[(0, 0)]), 3, 1000).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.dim(), 3);
        let b = tensor_power(&planar(&[(0, 0), (1, 2)]), 2, 1000).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(project_n(&b, Slope::int(1)).len(), 4);
        assert!(matches!(
            tensor_power(&planar(&[(0, 0), (1, 0)]), 20, 1000),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn tensor_power_counts_multiply() {
        let a = planar(&[(0, 1), (1, 0), (2, 2)]);
        let b = tensor_power(&a, 2, 1000).unwrap();
        for r in Slope::height_list(2) {
            let base = project(&a, r).len();
            assert_eq!(project_n(&b, r).len(), base * base, "slope {r}");
        }
    }

    #[test]
    fn collapse_identity_for_dimension_one() {
        let b = tensor_power(&planar(&[(0, 0), (1, 2)]), 1, 10).unwrap();
        let (image, t) = collapse_to_plane(&b, &[Slope::int(1), Slope::Infinity]).unwrap();
        assert_eq!(t, 1);
        assert_eq!(image, planar(&[(0, 0), (1, 2)]));
    }

    #[test]
    fn collapse_preserves_counts() {
        let b = tensor_power(&planar(&[(0, 0), (1, 2)]), 2, 10).unwrap();
        let slopes = [Slope::int(-1), Slope::int(0), Slope::int(1), Slope::Infinity];
        let (image, t) = collapse_to_plane(&b, &slopes).unwrap();
        assert_eq!(image.len(), 4);
        for r in slopes {
            assert_eq!(project(&image, r).len(), 4, "slope {r} at t = {t}");
        }
    }

    #[test]
    fn collapse_skips_degenerate_t() {
        // (1,0) and (0,1) both collapse to 1 when t = 1.
        let b = PairSetN::new(2, [(vec![1, 0], vec![0, 0]), (vec![0, 1], vec![0, 0])]).unwrap();
        let (image, t) = collapse_to_plane(&b, &[Slope::int(0)]).unwrap();
        assert!(t >= 2);
        assert_eq!(image.len(), 2);
    }

    #[test]
    fn verify_cover_examples() {
        let a: IntSet = [0, 1, 3].into_iter().collect();
        let c = verify_cover(&a, 2, [1, 2, 3]).unwrap();
        assert_eq!(c.entries, BTreeMap::from([(1, 0), (2, 1), (3, 0)]));
        let b: IntSet = [0, 1, 2, 4].into_iter().collect();
        let c = verify_cover(&b, 3, [1, 2]).unwrap();
        assert_eq!(c.entries, BTreeMap::from([(1, 0), (2, 0)]));
        let fail = verify_cover(&a, 3, [2]).unwrap_err();
        assert_eq!(fail.differences, vec![2]);
    }

    #[test]
    fn zero_difference_is_trivially_covered() {
        let a: IntSet = [5, 9].into_iter().collect();
        assert_eq!(verify_cover(&a, 4, [0]).unwrap().base(0), Some(5));
        assert!(verify_cover(&IntSet::new(), 1, [0]).is_err());
    }

    #[test]
    fn certificate_json_shape() {
        let a: IntSet = [0, 1, 3].into_iter().collect();
        let c = verify_cover(&a, 2, [1, 2]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"k":2,"entries":{"1":0,"2":1}}"#);
        let back: ApCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(serde_json::to_string(&a).unwrap(), "[0,1,3]");
    }

    #[test]
    fn cut_and_move_inside_window_is_identity() {
        let a: IntSet = (1..=7).collect();
        let out = cut_and_move(&a, 4, 2).unwrap();
        assert_eq!(out.set, a);
        assert_eq!(out.short_k, 2);
    }

    #[test]
    fn cut_and_move_straddling_progression() {
        // k = 4, N = 1: window 40. The progression 38..41 straddles the cut.
        let a: IntSet = (38..=41).collect();
        let out = cut_and_move(&a, 4, 1).unwrap();
        assert!(out.set.iter().all(|x| (1..=40).contains(&x)));
        assert!(out.certificate.base(1).is_some());
        assert_eq!(out.set.len(), a.len());
    }

    #[test]
    fn cut_and_move_rejects_bad_precondition() {
        let a: IntSet = [0, 1, 3].into_iter().collect();
        assert!(matches!(cut_and_move(&a, 3, 2), Err(Error::Uncovered { .. })));
    }

    #[test]
    fn freiman_examples() {
        let line: BTreeSet<Vec<Int>> = [vec![0, 0], vec![1, 2], vec![2, 4]].into_iter().collect();
        let img = freiman_collapse(&line, 5, 100).unwrap();
        assert_eq!(img.to_vec(), vec![0, 201, 402]);
        let one: BTreeSet<Vec<Int>> = [vec![3], vec![7]].into_iter().collect();
        assert_eq!(freiman_collapse(&one, 10, 19).unwrap().to_vec(), vec![3, 7]);
        assert_eq!(
            freiman_collapse(&line, 5, 8),
            Err(Error::BaseTooSmall { base: 8, minimal: 9 })
        );
    }

    #[test]
    fn freiman_injective_on_box() {
        let all: BTreeSet<Vec<Int>> = (0..10).flat_map(|a| (0..10).map(move |b| vec![a, b])).collect();
        assert_eq!(freiman_collapse(&all, 10, 100).unwrap().len(), 100);
        // differences stay distinct at the minimal base
        let base = min_admissible_base(10);
        let mut diffs = BTreeSet::new();
        for a in -9..=9 {
            for b in -9..=9 {
                diffs.insert(digit_map(&[a, b], base).unwrap());
            }
        }
        assert_eq!(diffs.len(), 19 * 19);
    }

    proptest! {
        #[test]
        fn projection_never_grows(pts in proptest::collection::btree_set((-6i128..6, -6i128..6), 1..12), num in -4i128..4, den in 1i128..4) {
            let a: PlanarSet = pts.into_iter().collect();
            let r = Slope::new(num, den).unwrap();
            let img = project(&a, r);
            prop_assert!(img.len() <= a.len());
            let injective = a.iter().all(|p| a.iter().all(|q| p == q || r.apply(p.0, p.1) != r.apply(q.0, q.1)));
            prop_assert_eq!(img.len() == a.len(), injective);
        }

        #[test]
        fn difference_projection_of_symmetric_set_is_symmetric(pts in proptest::collection::vec((-6i128..6, -6i128..6), 1..8)) {
            let a: PlanarSet = pts.iter().flat_map(|&(x, y)| [(x, y), (y, x)]).collect();
            let img = project(&a, Slope::minus_one());
            let neg: BTreeSet<Rat> = img.iter().map(|v| -*v).collect();
            prop_assert_eq!(img, neg);
        }

        #[test]
        fn verify_cover_agrees_with_double_loop(set in proptest::collection::btree_set(0i128..30, 0..15), k in 1usize..4) {
            let a: IntSet = set.into_iter().collect();
            let diffs: Vec<Int> = (1..8).collect();
            let expect_ok = diffs.iter().all(|&d| a.iter().any(|x| (0..k as Int).all(|j| a.contains(x + j * d))));
            let res = verify_cover(&a, k, diffs.clone());
            prop_assert_eq!(res.is_ok(), expect_ok);
            if let Ok(c) = res {
                c.check(&a).unwrap();
                for d in diffs {
                    let a_d = c.base(d).unwrap();
                    prop_assert!(a.iter().take_while(|&x| x < a_d).all(|x| !a.contains_progression(x, d, k)));
                }
            }
        }

        #[test]
        fn cut_and_move_stays_in_window(k in 2usize..7, n in 1i128..5, seed_pts in proptest::collection::vec(-200i128..200, 0..6)) {
            // build a cover of {1..N}: one k-AP per difference at random bases
            let mut pts: BTreeSet<Int> = BTreeSet::new();
            for d in 1..=n {
                let a = seed_pts.get(d as usize % seed_pts.len().max(1)).copied().unwrap_or(0) + 37 * d;
                for j in 0..k as Int { pts.insert(a + j * d); }
            }
            let a: IntSet = pts.into_iter().collect();
            let out = cut_and_move(&a, k, n).unwrap();
            prop_assert!(out.set.len() <= a.len());
            let window = 10 * k as Int * n;
            prop_assert!(out.set.iter().all(|x| 1 <= x && x <= window));
        }
    }
}
