//! From a joint law over `F_p^n` to a Besicovitch set: typical pair set,
//! union of lines, random linear compression, extension to every direction.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::compression::{random_linear_compress, LinearMap};
use crate::covering::extend_full_difference_cover;
use crate::entropy::{entropy_gap, fp_slope, fp_slopes, Ambient, JointRv};
use crate::error::{Error, Result};
use crate::fp::{FpSet, FpSpace, FpVec};
use crate::numbers::Int;
use crate::sets::Slope;

/// Pairs of sequences in `F_p^{nL} × F_p^{nL}`.
pub type PairSet = Vec<(FpVec, FpVec)>;

/// Limits and seeds for [`typical_pair_set`] and [`replay`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PipelineOptions {
    pub m: usize,
    pub seed: u64,
    /// Largest pair set enumerated exactly; beyond it arrangements are sampled.
    pub exact_cap: u128,
    /// Distinct arrangements drawn in sampled mode.
    pub samples: usize,
    pub retries: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { m: 1, seed: 0, exact_cap: 1_000_000, samples: 200, retries: 64 }
    }
}

/// `L! / ∏ c_z!`.
pub fn multinomial(counts: &[usize]) -> BigUint {
    let total: usize = counts.iter().sum();
    let fact = |n: usize| (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i));
    counts.iter().fold(fact(total), |acc, &c| acc / fact(c))
}

#[derive(Debug, Clone, Serialize)]
pub struct TypicalPairs {
    /// Sequence length `L = mq`.
    pub length: usize,
    pub q: usize,
    /// Occurrences of each atom in every sequence.
    pub counts: Vec<usize>,
    /// `L! / ∏ c_z!` as a decimal string.
    pub full_size: String,
    /// Whether `pairs` is only a seeded sample of the full pair set.
    pub sampled: bool,
    #[serde(skip)]
    pub pairs: PairSet,
    #[serde(skip)]
    pub space: FpSpace,
}

/// All pairs of sequences `((x_1..x_L), (y_1..y_L))` in which each atom
/// `(x, y)` of the law occurs exactly `L P(x, y)` times, `L = mq`.
///
/// When the multinomial exceeds `exact_cap`, `samples` distinct uniformly
/// random arrangements are drawn instead and `sampled` is set.
pub fn typical_pair_set(j: &JointRv, opts: &PipelineOptions) -> Result<TypicalPairs> {
    let Ambient::Fp { p, n } = j.ambient() else {
        return Err(Error::Invalid("the pipeline needs a law over F_p^n".into()));
    };
    if opts.m == 0 {
        return Err(Error::Invalid("m must be positive".into()));
    }
    let q = j.denominator().to_usize().filter(|&q| q <= 1 << 16).ok_or_else(|| {
        Error::too_large("mass denominator", u128::MAX, 1 << 16)
    })?;
    let length = opts.m * q;
    let atoms: Vec<&(Vec<Int>, Vec<Int>)> = j.atoms().map(|(xy, _)| xy).collect();
    let counts: Vec<usize> = j
        .atoms()
        .map(|(_, mass)| (mass * num_rational::BigRational::from_integer(length.into())).to_integer().to_usize().expect("count"))
        .collect();
    let space = FpSpace::new(p, n * length)?;
    let full = multinomial(&counts);
    let build = |seq: &[usize]| -> (FpVec, FpVec) {
        let mut x = Vec::with_capacity(n * length);
        let mut y = Vec::with_capacity(n * length);
        for &i in seq {
            x.extend(atoms[i].0.iter().map(|&c| c as u32));
            y.extend(atoms[i].1.iter().map(|&c| c as u32));
        }
        (x, y)
    };
    let mut seq: Vec<usize> = counts.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat(i).take(c)).collect();
    let exact = full.to_u128().is_some_and(|s| s <= opts.exact_cap);
    let pairs: PairSet = if exact {
        let mut out = vec![build(&seq)];
        while next_permutation(&mut seq) {
            out.push(build(&seq));
        }
        out
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut seen = BTreeSet::new();
        let mut tries = 0;
        while seen.len() < opts.samples && tries < 20 * opts.samples {
            seq.shuffle(&mut rng);
            seen.insert(build(&seq));
            tries += 1;
        }
        seen.into_iter().collect()
    };
    Ok(TypicalPairs { length, q, counts, full_size: full.to_string(), sampled: !exact, pairs, space })
}

/// Lexicographic successor; false at the last arrangement.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else { return false };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("successor exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `π_r(B)` over `F_p`.
pub fn project_pairs(space: FpSpace, pairs: &PairSet, r: Slope) -> Result<BTreeSet<FpVec>> {
    Ok(match r {
        Slope::Infinity => pairs.iter().map(|(_, y)| y.clone()).collect(),
        Slope::Finite(q) => {
            let rr = fp_slope(q, space.p)? as u32;
            pairs.iter().map(|(x, y)| space.add(x, &space.scale(rr, y))).collect()
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LinesUnion {
    #[serde(skip)]
    pub set: FpSet,
    #[serde(skip)]
    pub directions: BTreeSet<FpVec>,
    pub size: usize,
    pub direction_count: usize,
    /// `p · sup_{r ≠ -1} #π_r(B)`.
    pub bound: usize,
}

/// The union of the lines through `x` and `y` over `(x, y) ∈ B`, `x ≠ y`;
/// a diagonal pair contributes the single point `x`. Directions are
/// `π_{-1}(B) ∖ {0}`.
pub fn lines_union(space: FpSpace, pairs: &PairSet) -> Result<LinesUnion> {
    let mut points = BTreeSet::new();
    let mut directions = BTreeSet::new();
    for (x, y) in pairs {
        if x == y {
            points.insert(x.clone());
            continue;
        }
        let d = space.sub(y, x);
        points.extend((0..space.p).map(|t| space.step(x, &d, t)));
        directions.insert(space.sub(x, y));
    }
    let diff = project_pairs(space, pairs, Slope::minus_one())?;
    let nonzero: BTreeSet<FpVec> = diff.into_iter().filter(|v| v.iter().any(|&c| c != 0)).collect();
    assert_eq!(nonzero, directions, "direction set differs from the difference projection");
    let sup = fp_slopes(space.p)
        .into_iter()
        .map(|r| project_pairs(space, pairs, r).map(|s| s.len()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let bound = space.p as usize * sup;
    let set = FpSet::in_space(space, points)?;
    assert!(set.len() <= bound, "#A = {} exceeds p sup #π_r(B) = {bound}", set.len());
    Ok(LinesUnion { size: set.len(), direction_count: directions.len(), bound, set, directions })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionCount {
    pub slope: Slope,
    pub count: usize,
    /// `L! / ∏ (L P(X + rY = z))!`.
    pub multinomial: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompressionStage {
    pub n: usize,
    pub map: LinearMap,
    pub attempts: usize,
    pub size: usize,
    pub surviving: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionStage {
    pub translates: usize,
    pub size: usize,
    pub besicovitch: bool,
    /// `(p/2)^n`.
    pub reference: f64,
    pub above_reference: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub p: u32,
    pub options: PipelineOptions,
    pub gap_ratio: Option<f64>,
    pub typical: TypicalPairs,
    pub pairs: usize,
    pub projection_counts: Vec<ProjectionCount>,
    pub lines: LinesUnion,
    pub compression: Option<CompressionStage>,
    pub extension: Option<ExtensionStage>,
    #[serde(skip)]
    pub final_set: Option<FpSet>,
}

/// Run every stage, re-verifying each output; errors name the failing stage.
pub fn replay(j: &JointRv, opts: PipelineOptions) -> Result<PipelineReport> {
    let Ambient::Fp { p, .. } = j.ambient() else {
        return Err(Error::Invalid("the pipeline needs a law over F_p^n".into()));
    };
    let mut slopes = fp_slopes(p);
    let gap_ratio = entropy_gap(j, &slopes).map_err(|e| e.in_stage("entropy"))?.ratio;
    let typical = typical_pair_set(j, &opts).map_err(|e| e.in_stage("typical set"))?;
    let space = typical.space;

    slopes.push(Slope::minus_one());
    let mut projection_counts = Vec::new();
    for &r in &slopes {
        let count = project_pairs(space, &typical.pairs, r).map_err(|e| e.in_stage("typical set"))?.len();
        let law = j.projection(r).map_err(|e| e.in_stage("typical set"))?;
        let counts: Vec<usize> = law
            .iter()
            .map(|(_, q)| (q * num_rational::BigRational::from_integer(typical.length.into())).to_integer().to_usize().expect("count"))
            .collect();
        let full = multinomial(&counts);
        if typical.sampled {
            assert!(BigUint::from(count) <= full);
        } else {
            assert_eq!(BigUint::from(count), full, "#π_{r}(B) differs from the multinomial");
        }
        projection_counts.push(ProjectionCount { slope: r, count, multinomial: full.to_string() });
    }

    let lines = lines_union(space, &typical.pairs).map_err(|e| e.in_stage("lines"))?;
    let (compression, extension, final_set) = if lines.directions.is_empty() {
        (None, None, None)
    } else {
        let c = random_linear_compress(&lines.set, &lines.directions, p as usize, opts.seed, opts.retries)
            .map_err(|e| e.in_stage("compression"))?;
        let ext = extend_full_difference_cover(&c.set, &c.directions, p as usize).map_err(|e| e.in_stage("extension"))?;
        let besicovitch = ext.set.is_besicovitch().map_err(|e| e.in_stage("extension"))?;
        let n = c.set.n();
        let reference = (p as f64 / 2.0).powi(n as i32);
        let comp = CompressionStage { n, map: c.map, attempts: c.attempts, size: c.set.len(), surviving: c.directions.len() };
        let size = ext.set.len();
        let stage = ExtensionStage {
            translates: ext.translates.len(),
            size,
            besicovitch,
            reference,
            above_reference: size as f64 >= reference,
        };
        (Some(comp), Some(stage), Some(ext.set))
    };
    Ok(PipelineReport {
        p,
        options: opts,
        gap_ratio,
        pairs: typical.pairs.len(),
        typical,
        projection_counts,
        lines,
        compression,
        extension,
        final_set,
    })
}

/// Occurrence counts of each pair in a sequence, for tests and reports.
pub fn atom_histogram(pair: &(FpVec, FpVec), n: usize) -> BTreeMap<(FpVec, FpVec), usize> {
    let mut h = BTreeMap::new();
    for (xs, ys) in pair.0.chunks(n).zip(pair.1.chunks(n)) {
        *h.entry((xs.to_vec(), ys.to_vec())).or_default() += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::mt_joint;

    fn fp1(p: u32, atoms: &[(Int, Int)]) -> JointRv {
        JointRv::uniform_on(Ambient::Fp { p, n: 1 }, atoms.iter().map(|&(x, y)| (vec![x], vec![y]))).unwrap()
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[2, 2]), BigUint::from(6u32));
        assert_eq!(multinomial(&[1, 1]), BigUint::from(2u32));
        assert_eq!(multinomial(&[3, 3, 3]), BigUint::from(1680u32));
    }

    #[test]
    fn permutations_are_distinct_and_complete() {
        let mut v = vec![0, 0, 1, 1];
        let mut all = vec![v.clone()];
        while next_permutation(&mut v) {
            all.push(v.clone());
        }
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn point_mass_is_degenerate() {
        let j = fp1(3, &[(1, 1)]);
        let r = replay(&j, PipelineOptions { m: 2, ..Default::default() }).unwrap();
        assert_eq!(r.pairs, 1);
        assert_eq!(r.lines.size, 1);
        assert!(r.compression.is_none() && r.extension.is_none());
    }

    #[test]
    fn two_atom_pair_sets() {
        let j = fp1(3, &[(0, 1), (2, 2)]);
        let t = typical_pair_set(&j, &PipelineOptions::default()).unwrap();
        assert_eq!((t.length, t.pairs.len()), (2, 2));
        let t = typical_pair_set(&j, &PipelineOptions { m: 2, ..Default::default() }).unwrap();
        assert_eq!(t.pairs.len(), 6);
        for pair in &t.pairs {
            assert!(atom_histogram(pair, 1).values().all(|&c| c == 2));
        }
    }

    #[test]
    fn single_line() {
        let space = FpSpace::new(3, 1).unwrap();
        let l = lines_union(space, &vec![(vec![0], vec![1])]).unwrap();
        assert_eq!(l.size, 3);
        assert_eq!(l.directions, BTreeSet::from([vec![2]]));
    }

    #[test]
    fn two_generic_lines() {
        let space = FpSpace::new(3, 2).unwrap();
        let b = vec![(vec![0, 0], vec![1, 0]), (vec![0, 1], vec![1, 2])];
        let l = lines_union(space, &b).unwrap();
        assert!(l.size <= 6);
        assert_eq!(l.direction_count, 2);
    }

    #[test]
    fn independent_uniform_replay() {
        let atoms: Vec<(Int, Int)> = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).collect();
        let j = fp1(3, &atoms);
        let r = replay(&j, PipelineOptions::default()).unwrap();
        assert!((r.gap_ratio.unwrap() - 1.0).abs() < 1e-12);
        assert!(!r.typical.sampled);
        assert_eq!(r.pairs, 362_880);
        assert_eq!(r.lines.direction_count, 1680);
        let c = r.compression.unwrap();
        assert_eq!(c.n, 7);
        let e = r.extension.unwrap();
        assert!(e.besicovitch && e.above_reference);
    }

    #[test]
    fn sharpness_law_replay() {
        let j = mt_joint(3, 1 << 20).unwrap();
        let r = replay(&j, PipelineOptions { seed: 3, ..Default::default() }).unwrap();
        assert!(r.typical.sampled);
        let e = r.extension.unwrap();
        assert!(e.besicovitch && e.above_reference);
    }
}
