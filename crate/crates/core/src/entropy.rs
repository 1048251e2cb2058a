//! Exact finite-support random variables and their Shannon entropies.
//!
//! Masses are `BigRational` end to end; logarithms are taken once per atom
//! at the final reduction and summed with compensation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numbers::{ln_factorial_table, mod_inverse, Int, Rat};
use crate::sets::{ApCertificate, IntSet, Slope};

/// Kahan–Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `ln q` for a rational `0 < q <= 1`, accurate near both ends.
pub fn ln_mass(q: &BigRational) -> f64 {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if q > &half {
        let rest = (BigRational::one() - q).to_f64().expect("finite");
        (-rest).ln_1p()
    } else {
        match q.to_f64() {
            Some(f) if f > 0.0 && f.is_normal() => f.ln(),
            _ => ln_bigint(q.numer()) - ln_bigint(q.denom()),
        }
    }
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().expect("finite").ln()
    } else {
        let shift = bits - 64;
        (x >> shift as usize).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `-Σ q ln q` over the given masses.
pub fn entropy_of<'a>(masses: impl IntoIterator<Item = &'a BigRational>) -> f64 {
    let mut acc = CompensatedSum::default();
    for q in masses {
        let qf = q.to_f64().expect("finite");
        acc.add(-qf * ln_mass(q));
    }
    acc.value().max(0.0)
}

/// A finitely supported distribution with exact rational masses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteDist<V: Ord> {
    masses: BTreeMap<V, BigRational>,
}

impl<V: Ord + Clone> DiscreteDist<V> {
    /// Masses must be positive and sum to exactly one; repeated values merge.
    pub fn new(atoms: impl IntoIterator<Item = (V, BigRational)>) -> Result<Self> {
        let mut masses: BTreeMap<V, BigRational> = BTreeMap::new();
        for (v, q) in atoms {
            if !q.is_positive() {
                return Err(Error::Invalid("masses must be positive".into()));
            }
            *masses.entry(v).or_insert_with(BigRational::zero) += q;
        }
        let total: BigRational = masses.values().sum();
        if !total.is_one() {
            return Err(Error::Invalid(format!("masses sum to {total}, not 1")));
        }
        Ok(DiscreteDist { masses })
    }

    pub fn uniform(values: impl IntoIterator<Item = V>) -> Result<Self> {
        let vals: Vec<V> = values.into_iter().collect();
        if vals.is_empty() {
            return Err(Error::Empty("uniform distribution on no values"));
        }
        let q = BigRational::new(BigInt::one(), BigInt::from(vals.len()));
        Self::new(vals.into_iter().map(|v| (v, q.clone())))
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(self.masses.values())
    }

    pub fn support_size(&self) -> usize {
        self.masses.len()
    }

    pub fn mass(&self, v: &V) -> BigRational {
        self.masses.get(v).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&V, &BigRational)> {
        self.masses.iter()
    }

    pub fn is_uniform(&self) -> bool {
        let mut it = self.masses.values();
        let first = it.next();
        it.all(|q| Some(q) == first)
    }
}

/// Group in which a joint law's values live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ambient {
    Integers,
    IntVectors { n: usize },
    Fp { p: u32, n: usize },
}

impl Ambient {
    fn dim(&self) -> usize {
        match *self {
            Ambient::Integers => 1,
            Ambient::IntVectors { n } | Ambient::Fp { n, .. } => n,
        }
    }
}

/// Value of `X + rY`: exact rationals over `Z`, residues over `F_p`.
pub type ProjValue = Vec<Rat>;

/// A pair `(X, Y)` with exact joint law. Values are vectors of length
/// `ambient.dim()` (length 1 over the integers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointRv {
    ambient: Ambient,
    atoms: BTreeMap<(Vec<Int>, Vec<Int>), BigRational>,
}

impl JointRv {
    pub fn new(ambient: Ambient, atoms: impl IntoIterator<Item = ((Vec<Int>, Vec<Int>), BigRational)>) -> Result<Self> {
        let dim = ambient.dim();
        let mut checked = Vec::new();
        for ((x, y), q) in atoms {
            if x.len() != dim || y.len() != dim {
                return Err(Error::Invalid(format!("atom ({x:?}, {y:?}) does not have dimension {dim}")));
            }
            let (x, y) = match ambient {
                Ambient::Fp { p, .. } => {
                    let p = p as Int;
                    (x.iter().map(|c| c.rem_euclid(p)).collect(), y.iter().map(|c| c.rem_euclid(p)).collect())
                }
                _ => (x, y),
            };
            checked.push(((x, y), q));
        }
        let dist = DiscreteDist::new(checked)?;
        Ok(JointRv { ambient, atoms: dist.masses })
    }

    /// Integer-valued pair with masses proportional to positive weights.
    pub fn from_weights(ambient: Ambient, weights: impl IntoIterator<Item = ((Vec<Int>, Vec<Int>), u64)>) -> Result<Self> {
        let w: Vec<_> = weights.into_iter().collect();
        let total: u64 = w.iter().map(|(_, c)| c).sum();
        if total == 0 {
            return Err(Error::Empty("joint law with zero total weight"));
        }
        let total = BigInt::from(total);
        Self::new(ambient, w.into_iter().map(|(xy, c)| (xy, BigRational::new(BigInt::from(c), total.clone()))))
    }

    /// Uniform law on the listed pairs (repeats add mass).
    pub fn uniform_on(ambient: Ambient, pairs: impl IntoIterator<Item = (Vec<Int>, Vec<Int>)>) -> Result<Self> {
        Self::from_weights(ambient, pairs.into_iter().map(|xy| (xy, 1)))
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&(Vec<Int>, Vec<Int>), &BigRational)> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Least common denominator of the masses.
    pub fn denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.atoms.values().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
    }

    fn pushforward<V: Ord + Clone>(&self, f: impl Fn(&[Int], &[Int]) -> V) -> DiscreteDist<V> {
        let mut masses: BTreeMap<V, BigRational> = BTreeMap::new();
        for ((x, y), q) in &self.atoms {
            *masses.entry(f(x, y)).or_insert_with(BigRational::zero) += q;
        }
        DiscreteDist { masses }
    }

    pub fn x(&self) -> DiscreteDist<Vec<Int>> {
        self.pushforward(|x, _| x.to_vec())
    }

    pub fn y(&self) -> DiscreteDist<Vec<Int>> {
        self.pushforward(|_, y| y.to_vec())
    }

    /// Law of `X - Y`.
    pub fn difference(&self) -> DiscreteDist<ProjValue> {
        self.projection(Slope::minus_one()).expect("r = -1 is valid in every ambient")
    }

    /// Law of `X + rY` (`Y` at infinity). Over `F_p` a slope `a/b` is read
    /// as `a b^{-1}`.
    pub fn projection(&self, r: Slope) -> Result<DiscreteDist<ProjValue>> {
        match (self.ambient, r) {
            (_, Slope::Infinity) => Ok(self.pushforward(|_, y| y.iter().map(|&c| Rat::from_integer(c)).collect())),
            (Ambient::Fp { p, .. }, Slope::Finite(q)) => {
                let rr = fp_slope(q, p)?;
                let p = p as Int;
                Ok(self.pushforward(|x, y| {
                    x.iter().zip(y).map(|(&a, &b)| Rat::from_integer((a + rr * b).rem_euclid(p))).collect()
                }))
            }
            (_, Slope::Finite(q)) => Ok(self.pushforward(|x, y| {
                x.iter().zip(y).map(|(&a, &b)| Rat::from_integer(a) + q * Rat::from_integer(b)).collect()
            })),
        }
    }
}

/// The residue `a b^{-1} mod p` of a rational slope.
pub fn fp_slope(q: Rat, p: u32) -> Result<Int> {
    let p = p as Int;
    let inv = mod_inverse(*q.denom(), p).ok_or_else(|| Error::Slope(format!("{q} has no value mod {p}")))?;
    Ok((q.numer().rem_euclid(p) * inv).rem_euclid(p))
}

/// Whether `r` is the difference slope in the given ambient.
pub fn is_difference_slope(ambient: Ambient, r: Slope) -> bool {
    match (ambient, r) {
        (Ambient::Fp { p, .. }, Slope::Finite(q)) => fp_slope(q, p).is_ok_and(|v| v == p as Int - 1),
        _ => r.is_minus_one(),
    }
}

impl Serialize for JointRv {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            ambient: Ambient,
            atoms: Atoms<'a>,
        }
        struct Atoms<'a>(&'a JointRv);
        impl Serialize for Atoms<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let scalar = self.0.ambient == Ambient::Integers;
                let mut seq = s.serialize_seq(Some(self.0.atoms.len()))?;
                for ((x, y), q) in &self.0.atoms {
                    let q = q.to_string();
                    if scalar {
                        seq.serialize_element(&(x[0] as i64, y[0] as i64, q))?;
                    } else {
                        seq.serialize_element(&(x, y, q))?;
                    }
                }
                seq.end()
            }
        }
        Wire { ambient: self.ambient, atoms: Atoms(self) }.serialize(s)
    }
}

/// `H(X - Y) / sup_j H(X + r_j Y)` with the maximizing slope.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub difference_entropy: f64,
    pub sup_entropy: f64,
    /// `None` when the sup is zero but `H(X - Y) > 0` (infinite ratio).
    pub ratio: Option<f64>,
    pub argmax: Slope,
    pub per_slope: Vec<(Slope, f64)>,
}

/// Entropy ratio over a slope list that must not contain the difference slope.
pub fn entropy_gap(j: &JointRv, slopes: &[Slope]) -> Result<GapReport> {
    if slopes.is_empty() {
        return Err(Error::Empty("entropy_gap needs at least one slope"));
    }
    if let Some(r) = slopes.iter().find(|&&r| is_difference_slope(j.ambient, r)) {
        return Err(Error::Slope(format!("slope {r} is the difference slope")));
    }
    let per_slope: Vec<(Slope, f64)> = slopes
        .par_iter()
        .map(|&r| j.projection(r).map(|d| (r, d.entropy())))
        .collect::<Result<_>>()?;
    let (mut argmax, mut sup) = per_slope[0];
    for &(r, h) in &per_slope[1..] {
        if h > sup {
            (argmax, sup) = (r, h);
        }
    }
    let difference_entropy = j.difference().entropy();
    let ratio = if sup > 0.0 {
        Some(difference_entropy / sup)
    } else if difference_entropy == 0.0 {
        Some(0.0)
    } else {
        None
    };
    Ok(GapReport { difference_entropy, sup_entropy: sup, ratio, argmax, per_slope })
}

/// All `r ∈ F_p ∪ {∞}` except `-1`.
pub fn fp_slopes(p: u32) -> Vec<Slope> {
    (0..p as Int - 1).map(Slope::int).chain(std::iter::once(Slope::Infinity)).collect()
}

/// `X = (a + b, ab)`, `Y = (a + b', ab')` with `a, b, b'` uniform on `F_p`.
pub fn mt_joint(p: u32, cap: u128) -> Result<JointRv> {
    crate::fp::FpSpace::new(p, 2)?;
    let triples = (p as u128).pow(3);
    if triples > cap {
        return Err(Error::too_large("sharpness law", triples, cap));
    }
    let p = p as Int;
    let mut counts: BTreeMap<(Vec<Int>, Vec<Int>), u64> = BTreeMap::new();
    for a in 0..p {
        for b in 0..p {
            for b2 in 0..p {
                let x = vec![(a + b) % p, (a * b) % p];
                let y = vec![(a + b2) % p, (a * b2) % p];
                *counts.entry((x, y)).or_default() += 1;
            }
        }
    }
    JointRv::from_weights(Ambient::Fp { p: p as u32, n: 2 }, counts)
}

/// Exact entropy analysis of the sharpness law at one prime.
#[derive(Debug, Clone, Serialize)]
pub struct SharpnessReport {
    pub p: u32,
    pub difference_entropy: f64,
    /// `(2 - 1/p) ln p`.
    pub difference_closed_form: f64,
    pub max_entropy: f64,
    pub argmax: Slope,
    /// `2 ln p - ln 2 + 5 ln p / p`.
    pub max_bound: f64,
    pub ratio: f64,
    /// `1 + 0.1 / ln p`.
    pub ratio_threshold: f64,
}

pub fn mt_sharpness(p: u32, cap: u128) -> Result<SharpnessReport> {
    let j = mt_joint(p, cap)?;
    let gap = entropy_gap(&j, &fp_slopes(p))?;
    let lp = (p as f64).ln();
    Ok(SharpnessReport {
        p,
        difference_entropy: gap.difference_entropy,
        difference_closed_form: (2.0 - 1.0 / p as f64) * lp,
        max_entropy: gap.sup_entropy,
        argmax: gap.argmax,
        max_bound: 2.0 * lp - std::f64::consts::LN_2 + 5.0 * lp / p as f64,
        ratio: gap.ratio.unwrap_or(f64::INFINITY),
        ratio_threshold: 1.0 + 0.1 / lp,
    })
}

/// `(1/n) ln(n! / ∏ (n q_z)!)` against the entropy of the law.
#[derive(Debug, Clone, Serialize)]
pub struct TypicalCount {
    pub n: usize,
    pub log_count: f64,
    pub entropy: f64,
    pub gap: f64,
    /// `#support · ln(n+1) / n`.
    pub bound: f64,
}

/// Per-symbol log-size of the set of length-`n` sequences with empirical
/// law exactly `dist`. Every `n q_z` must be an integer.
pub fn typical_logcount<V: Ord + Clone>(dist: &DiscreteDist<V>, n: usize) -> Result<TypicalCount> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let table = ln_factorial_table(n);
    let mut acc = CompensatedSum::default();
    acc.add(table[n]);
    for (_, q) in dist.iter() {
        let count = q * BigRational::from_integer(BigInt::from(n));
        if !count.is_integer() {
            return Err(Error::Invalid(format!("n q = {count} is not an integer for n = {n}")));
        }
        acc.add(-table[count.to_integer().to_usize().expect("count <= n")]);
    }
    let log_count = acc.value() / n as f64;
    let entropy = dist.entropy();
    Ok(TypicalCount {
        n,
        log_count,
        entropy,
        gap: entropy - log_count,
        bound: dist.support_size() as f64 * ((n + 1) as f64).ln() / n as f64,
    })
}

/// Joint law built from a progression cover, with the audits that were run.
#[derive(Debug, Clone, Serialize)]
pub struct CoverRv {
    pub joint: JointRv,
    pub k: usize,
    pub difference_entropy: f64,
    pub projection_entropies: Vec<(Slope, f64)>,
    /// `ln #A`.
    pub log_size: f64,
}

/// `r/(1+r)`.
fn slope_shift(r: Rat) -> Rat {
    r / (Rat::from_integer(1) + r)
}

/// Minimal `(Q, M)` for which every slope satisfies the integrality and
/// magnitude conditions.
pub fn minimal_q_m(slopes: &[Slope]) -> Result<(Int, Int)> {
    use num_integer::Integer;
    let mut q: Int = 1;
    let mut m: Int = 1;
    for &s in slopes {
        match s {
            Slope::Infinity => m = m.max(2),
            Slope::Finite(r) => {
                if r == Rat::from_integer(-1) {
                    return Err(Error::Slope("r = -1 is the difference slope".into()));
                }
                let w = slope_shift(r);
                q = q.lcm(w.denom());
                // need |w| < M
                m = m.max(w.abs().floor().to_integer() + 1);
            }
        }
    }
    Ok((q, m))
}

/// `X = a(d) + MQd`, `Y = a(d) + (M+1)Qd` with `d` uniform on `{1..N}`.
///
/// With `k = 2MQ`, `X + rY = (1+r)(a(d) + (MQ + Qr/(1+r)) d)` and the index
/// `MQ + Qr/(1+r)` lies in `{1, ..., k-1}`, so `X + rY ∈ (1+r)·A`.
pub fn cover_to_rv(a: &IntSet, cert: &ApCertificate, slopes: &[Slope], q: Int, m: Int) -> Result<CoverRv> {
    if q < 1 || m < 1 {
        return Err(Error::Invalid("Q and M must be positive".into()));
    }
    let k = cert.k;
    if k as Int != 2 * m * q {
        return Err(Error::Invalid(format!("k = {k} must equal 2MQ = {}", 2 * m * q)));
    }
    cert.check(a)?;
    let big_n = cert.len() as Int;
    if cert.differences().ne(1..=big_n) {
        return Err(Error::Invalid("certificate must cover exactly {1, ..., N}".into()));
    }
    let (q_min, m_min) = minimal_q_m(slopes)?;
    for &s in slopes {
        let ok = match s {
            Slope::Infinity => (m + 1) * q < k as Int,
            Slope::Finite(r) => {
                let w = slope_shift(r) * Rat::from_integer(q);
                w.is_integer() && w.abs() < Rat::from_integer(q * m)
            }
        };
        if !ok {
            return Err(Error::Slope(format!(
                "slope {s} fails with Q = {q}, M = {m}; minimal valid choice is Q = {q_min}, M = {m_min} (or a multiple of Q)"
            )));
        }
    }
    let pairs = cert.entries.iter().map(|(&d, &ad)| (vec![ad + m * q * d], vec![ad + (m + 1) * q * d]));
    let joint = JointRv::uniform_on(Ambient::Integers, pairs)?;

    let diff = joint.difference();
    let expected: Vec<ProjValue> = (1..=big_n).rev().map(|d| vec![Rat::from_integer(-q * d)]).collect();
    assert!(diff.is_uniform() && diff.iter().map(|(v, _)| v.clone()).eq(expected), "X - Y is not uniform on -Q{{1..N}}");
    let difference_entropy = diff.entropy();

    let log_size = (a.len() as f64).ln();
    let mut projection_entropies = Vec::new();
    for &s in slopes {
        let proj = joint.projection(s)?;
        let scale = match s {
            Slope::Infinity => Rat::from_integer(1),
            Slope::Finite(r) => Rat::from_integer(1) + r,
        };
        for (v, _) in proj.iter() {
            let back = v[0] / scale;
            assert!(back.is_integer() && a.contains(back.to_integer()), "X + {s} Y escapes (1+r) A");
        }
        let h = proj.entropy();
        assert!(h <= log_size + 1e-12);
        projection_entropies.push((s, h));
    }
    Ok(CoverRv { joint, k, difference_entropy, projection_entropies, log_size })
}

/// `α - 1` where `α ∈ (1, 2)` is the root of `α³ - 4α + 2`.
pub fn katz_tao_epsilon() -> f64 {
    alpha_root() - 1.0
}

/// The root of `α³ - 4α + 2` in `(1, 2)` by bisection.
pub fn alpha_root() -> f64 {
    let f = |a: f64| a * a * a - 4.0 * a + 2.0;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Render a value with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = 11 - x.abs().log10().floor() as i32;
    if (0..=20).contains(&digits) {
        format!("{:.*}", digits as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ambient::Integers => write!(f, "Z"),
            Ambient::IntVectors { n } => write!(f, "Z^{n}"),
            Ambient::Fp { p, n } => write!(f, "F_{p}^{n}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn closed_form_entropies() {
        let u = DiscreteDist::uniform(0..7).unwrap();
        assert!((u.entropy() - 7f64.ln()).abs() < 1e-15);
        let point = DiscreteDist::uniform([5]).unwrap();
        assert_eq!(point.entropy(), 0.0);
        let dyadic = DiscreteDist::new([(0, r(1, 2)), (1, r(1, 4)), (2, r(1, 4))]).unwrap();
        assert!((dyadic.entropy() - 1.5 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_masses() {
        assert!(DiscreteDist::new([(0, r(1, 2))]).is_err());
        assert!(DiscreteDist::new([(0, r(3, 2)), (1, r(-1, 2))]).is_err());
    }

    #[test]
    fn near_one_masses_are_accurate() {
        let eps = r(1, 1_000_000_000);
        let d = DiscreteDist::new([(0, BigRational::one() - &eps), (1, eps)]).unwrap();
        let e = 1e-9f64;
        let exact = -(1.0 - e) * (-e).ln_1p() - e * e.ln();
        assert!((d.entropy() - exact).abs() <= 1e-12 * exact);
    }

    #[test]
    fn projection_examples() {
        let amb = Ambient::Integers;
        let j = JointRv::uniform_on(amb, [(vec![0], vec![0]), (vec![1], vec![2])]).unwrap();
        let d = j.projection(Slope::minus_one()).unwrap();
        assert_eq!(d.support_size(), 2);
        assert!((d.entropy() - 2f64.ln()).abs() < 1e-15);
        let j = JointRv::uniform_on(amb, [(vec![0], vec![0]), (vec![1], vec![2]), (vec![2], vec![1])]).unwrap();
        let d = j.projection(Slope::int(2)).unwrap();
        let vals: Vec<Int> = d.iter().map(|(v, _)| v[0].to_integer()).collect();
        assert_eq!(vals, vec![0, 4, 5]);
        let point = JointRv::uniform_on(amb, [(vec![3], vec![4])]).unwrap();
        assert_eq!(point.projection(Slope::int(1)).unwrap().entropy(), 0.0);
    }

    #[test]
    fn gap_examples() {
        let amb = Ambient::Integers;
        let diag = JointRv::uniform_on(amb, (0..3).map(|x| (vec![x], vec![x]))).unwrap();
        let g = entropy_gap(&diag, &[Slope::int(0), Slope::int(1)]).unwrap();
        assert_eq!(g.ratio, Some(0.0));
        let indep = JointRv::uniform_on(amb, [0, 1].iter().flat_map(|&x| [0, 1].map(|y| (vec![x], vec![y])))).unwrap();
        let g = entropy_gap(&indep, &[Slope::int(0), Slope::int(1), Slope::Infinity]).unwrap();
        assert!((g.difference_entropy - 1.5 * 2f64.ln()).abs() < 1e-15);
        assert!((g.ratio.unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(g.argmax, Slope::int(1));
        assert!(entropy_gap(&indep, &[Slope::minus_one()]).is_err());
    }

    #[test]
    fn mt_difference_entropy() {
        for p in [2, 3, 5, 7] {
            let j = mt_joint(p, 1 << 20).unwrap();
            let lp = (p as f64).ln();
            assert!((j.difference().entropy() - (2.0 - 1.0 / p as f64) * lp).abs() < 1e-12);
        }
        assert!(is_difference_slope(Ambient::Fp { p: 5, n: 2 }, Slope::int(4)));
        assert!(!fp_slopes(5).contains(&Slope::int(4)));
    }

    #[test]
    fn fp_slope_residues() {
        assert_eq!(fp_slope(Rat::new(1, 2), 5).unwrap(), 3);
        assert!(fp_slope(Rat::new(1, 5), 5).is_err());
    }

    #[test]
    fn typical_count_examples() {
        let half = DiscreteDist::uniform([0, 1]).unwrap();
        let t = typical_logcount(&half, 4).unwrap();
        assert!((t.log_count - 6f64.ln() / 4.0).abs() < 1e-14);
        let t = typical_logcount(&half, 1 << 10).unwrap();
        assert!(t.gap.abs() < 0.01 && t.gap.abs() <= t.bound);
        let point = DiscreteDist::uniform([0]).unwrap();
        assert_eq!(typical_logcount(&point, 9).unwrap().log_count, 0.0);
        assert!(typical_logcount(&half, 3).is_err());
    }

    #[test]
    fn cover_rv_example() {
        let a: IntSet = [0, 1, 2, 3, 4, 6].into_iter().collect();
        let cert = crate::sets::verify_cover(&a, 4, [1, 2]).unwrap();
        let out = cover_to_rv(&a, &cert, &[Slope::int(1)], 2, 1).unwrap();
        assert!((out.difference_entropy - 2f64.ln()).abs() < 1e-15);
        let err = cover_to_rv(&a, &cert, &[Slope::Infinity], 2, 1).unwrap_err();
        assert!(err.to_string().contains("M = 2"));
    }

    #[test]
    fn cover_rv_membership_slope() {
        let a: IntSet = [0, 1, 3].into_iter().collect();
        let cert = crate::sets::verify_cover(&a, 2, [1, 2, 3]).unwrap();
        let out = cover_to_rv(&a, &cert, &[Slope::int(0)], 1, 1).unwrap();
        assert!(out.projection_entropies[0].1 <= 3f64.ln() + 1e-15);
        assert!((out.difference_entropy - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn minimal_parameters() {
        assert_eq!(minimal_q_m(&[Slope::int(1)]).unwrap(), (2, 1));
        assert_eq!(minimal_q_m(&[Slope::int(2), Slope::Infinity]).unwrap(), (3, 2));
        assert!(minimal_q_m(&[Slope::minus_one()]).is_err());
    }

    #[test]
    fn katz_tao_constant() {
        let a = alpha_root();
        assert!((a * a * a - 4.0 * a + 2.0).abs() < 1e-12);
        let e = katz_tao_epsilon();
        assert!(0.675 < e && e < 0.6752);
    }

    #[test]
    fn sig12_format() {
        assert_eq!(sig12(2.0f64.ln()), "0.693147180560");
        assert_eq!(sig12(1.8 * 5f64.ln()), "2.89698824238");
    }

    proptest! {
        #[test]
        fn entropy_bounds(weights in proptest::collection::vec(1u64..20, 1..8)) {
            let d = DiscreteDist::new(weights.iter().enumerate().map(|(i, &w)| {
                (i, BigRational::new(BigInt::from(w), BigInt::from(weights.iter().sum::<u64>())))
            })).unwrap();
            let h = d.entropy();
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (d.support_size() as f64).ln() + 1e-12);
        }

        #[test]
        fn subadditive(atoms in proptest::collection::vec(((-3i128..4, -3i128..4), 1u64..10), 1..10)) {
            let j = JointRv::from_weights(Ambient::Integers, atoms.iter().map(|&((x, y), w)| ((vec![x], vec![y]), w))).unwrap();
            prop_assert!(j.difference().entropy() <= j.x().entropy() + j.y().entropy() + 1e-12);
            let total: BigRational = j.projection(Slope::new(1, 2).unwrap()).unwrap().iter().map(|(_, q)| q.clone()).sum();
            prop_assert!(total.is_one());
        }
    }
}
