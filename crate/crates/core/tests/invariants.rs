use std::collections::BTreeSet;

use kakeya::compression::{distinct_to_full, random_linear_compress};
use kakeya::constructions::{build_f_upper, fp_unwrap, mockenhaupt_tao, qr_residue_counts, quadratic_residue_cover};
use kakeya::entropy::{Ambient, JointRv};
use kakeya::erdos_selfridge::{interval_multiple_count, EsInstance};
use kakeya::fp::{FpSet, FpSpace};
use kakeya::numbers::Int;
use kakeya::oracle::{min_distinct_cover, min_full_cover, SearchBudget, Witness};
use kakeya::sets::{collapse_to_plane, freiman_collapse, project, project_n, tensor_power, verify_cover, IntSet, PlanarSet, Slope};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn slopes() -> Vec<Slope> {
    vec![Slope::int(0), Slope::int(1), Slope::int(2), Slope::minus_one(), Slope::Infinity]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn collapse_preserves_projection_counts(pts in proptest::collection::btree_set((0i128..3, 0i128..3), 1..5), n in 1usize..3) {
        let a: PlanarSet = pts.into_iter().collect();
        let b = tensor_power(&a, n, 1 << 20).unwrap();
        let (plane, _) = collapse_to_plane(&b, &slopes()).unwrap();
        for r in slopes() {
            prop_assert_eq!(project(&plane, r).len(), project_n(&b, r).len());
        }
    }

    #[test]
    fn freiman_collapse_keeps_progressions(
        a in proptest::collection::vec(0i128..4, 2), d in proptest::collection::vec(0i128..3, 2), k in 2usize..4,
    ) {
        let pts: BTreeSet<Vec<Int>> =
            (0..k as Int).map(|j| a.iter().zip(&d).map(|(&x, &y)| x + j * y).collect()).collect();
        let image = freiman_collapse(&pts, 10, 19).unwrap();
        prop_assert_eq!(image.len(), pts.len());
        let step = d[0] + 19 * d[1];
        let base = a[0] + 19 * a[1];
        prop_assert!(image.contains_progression(base, step, k));
    }

    #[test]
    fn projection_conserves_mass(atoms in proptest::collection::vec(((-4i128..4, -4i128..4), 1u64..9), 1..8), num in -3i128..4, den in 1i128..4) {
        let j = JointRv::from_weights(Ambient::Integers, atoms.into_iter().map(|((x, y), w)| ((vec![x], vec![y]), w))).unwrap();
        let r = Slope::new(num, den).unwrap();
        let total = j.projection(r).unwrap().iter().fold(BigRational::zero(), |acc, (_, q)| acc + q);
        prop_assert!(total.is_one());
    }

    #[test]
    fn es_extracted_set_certifies_primes(w in -500i128..500, k in 1usize..4, pick in proptest::sample::subsequence(vec![2u64, 3, 5, 7, 11, 13], 1..4)) {
        let inst = EsInstance::new(pick.clone(), k, w).unwrap();
        let set = inst.multiples();
        prop_assert!(verify_cover(&set, k, pick.iter().map(|&p| p as Int)).is_ok());
        let period: Int = pick.iter().map(|&p| p as Int).product();
        let shifted = EsInstance::new(pick, k, w + period).unwrap();
        prop_assert_eq!(interval_multiple_count(&inst), interval_multiple_count(&shifted));
    }

    #[test]
    fn compressed_lines_stay_lines(seed in 0u64..1000, lines in 1usize..12) {
        let space = FpSpace::new(3, 5).unwrap();
        let mut pts = BTreeSet::new();
        let mut dirs = BTreeSet::new();
        for i in 0..lines {
            let d = space.decode(1 + (seed as usize * 31 + i * 17) % 242);
            let x = space.decode((seed as usize * 7 + i * 101) % 243);
            pts.extend((0..3).map(|t| space.step(&x, &d, t)));
            dirs.insert(d);
        }
        let a = FpSet::in_space(space, pts).unwrap();
        let c = random_linear_compress(&a, &dirs, 3, seed, 64).unwrap();
        for d in &c.directions {
            prop_assert!(d.iter().any(|&x| x != 0));
            prop_assert!(c.set.progression_base(d, 3).is_some());
        }
        prop_assert!(2 * c.directions.len() >= dirs.len());
    }

    #[test]
    fn distinct_to_full_keeps_a_third(seed in 0u64..500, n in 1usize..12) {
        let diffs: Vec<Int> = (0..n as Int).map(|i| 3 * i + 1 + (seed as Int % 5)).collect();
        let a0: IntSet = diffs.iter().flat_map(|&d| [7 * d, 8 * d]).collect();
        let cert = verify_cover(&a0, 2, diffs.iter().copied()).unwrap();
        let out = distinct_to_full(&a0, &cert, seed, 64).unwrap();
        prop_assert!(3 * out.distinct >= n);
        prop_assert!(verify_cover(&out.set, 2, 1..=n as Int).is_ok());
    }
}

#[test]
fn residue_pattern_is_at_most_half() {
    for k in 2..=4 {
        for m in 1..=2 {
            let c = quadratic_residue_cover(k, m, 1 << 24).unwrap();
            for (p, j, count) in qr_residue_counts(&c) {
                assert!(count <= (p as usize + 1) / 2, "k={k} m={m} p={p} j={j}: {count}");
            }
        }
    }
}

#[test]
fn unwrap_inflation_is_bounded() {
    for p in [3, 5] {
        let v = mockenhaupt_tao(p).unwrap();
        let u = fp_unwrap(&v, p as usize).unwrap();
        assert!(u.set.len() <= (p as usize).pow(2) * v.len());
    }
}

#[test]
fn oracle_tables_are_consistent() {
    let budget = SearchBudget::default();
    let mut grid = Vec::new();
    for k in 1..=4 {
        let mut row = Vec::new();
        for n in 1..=5 {
            let f = min_full_cover(k, n, 40, budget).unwrap();
            let fp = min_distinct_cover(k, n, 40, budget).unwrap();
            assert!(f.exhausted && fp.exhausted);
            for r in [&f, &fp] {
                let Witness::Int { set, certificate } = &r.witness else { panic!("integer witness") };
                assert!(certificate.check(set).is_ok());
            }
            let Witness::Int { set, .. } = &f.witness else { unreachable!() };
            assert!(verify_cover(set, k, 1..=n).is_ok());
            assert!(fp.optimum <= f.optimum, "F'_{k}({n}) > F_{k}({n})");
            if let Ok(up) = build_f_upper(k, n, 1, 1 << 24) {
                assert!(up.size >= f.optimum);
            }
            row.push(f.optimum);
        }
        grid.push(row);
    }
    for (k, row) in grid.iter().enumerate() {
        assert!(row.windows(2).all(|w| w[0] <= w[1]), "F_{} not monotone in N", k + 1);
        if k > 0 {
            assert!(row.iter().zip(&grid[k - 1]).all(|(a, b)| a >= b), "F not monotone in k");
        }
    }
}
