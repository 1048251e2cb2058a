use kakeya::constructions::{build_f_upper, wrap_to_fp, WrapOptions};
use kakeya::entropy::{cover_to_rv, minimal_q_m, mt_joint};
use kakeya::oracle::{min_full_cover, SearchBudget, Witness};
use kakeya::pipeline::{replay, PipelineOptions};
use kakeya::sets::Slope;

#[test]
fn oracle_witness_feeds_the_entropy_bridge() {
    let slopes = [Slope::int(0), Slope::Infinity];
    let (q, m) = minimal_q_m(&slopes).unwrap();
    let k = (2 * q * m) as usize;
    let r = min_full_cover(k, 3, 40, SearchBudget::default()).unwrap();
    let Witness::Int { set, certificate } = &r.witness else { panic!("integer witness") };
    let rv = cover_to_rv(set, certificate, &slopes, q, m).unwrap();
    assert!((rv.difference_entropy - 3f64.ln()).abs() < 1e-12);
    assert!(rv.projection_entropies.iter().all(|&(_, h)| h <= rv.log_size + 1e-12));
}

#[test]
fn integer_cover_wraps_into_a_field() {
    let up = build_f_upper(4, 100, 1, 1 << 24).unwrap();
    let w = wrap_to_fp(&up.set, 4, 100, 2, WrapOptions { density: None, retries: 64, seed: 1 }).unwrap();
    assert!(w.covered as f64 >= w.threshold);
    assert_eq!(w.set.covered_directions(w.short_k).unwrap().len(), w.covered);
}

#[test]
fn pipeline_report_is_replayable() {
    let j = mt_joint(3, 1 << 20).unwrap();
    let opts = PipelineOptions { seed: 11, ..Default::default() };
    let a = serde_json::to_string(&replay(&j, opts).unwrap()).unwrap();
    let b = serde_json::to_string(&replay(&j, opts).unwrap()).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["options"]["seed"], 11);
    assert!(v["compression"]["map"]["rows"].is_array());
}
