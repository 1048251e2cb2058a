use std::collections::BTreeSet;

use kakeya::checks::{check_all, render as render_checks};
use kakeya::compression::{distinct_to_full, random_linear_compress};
use kakeya::constructions::{
    build_f_upper, digit_concatenate, fp_unwrap, full_line_directions, mockenhaupt_tao, qr_size_bound,
    quadratic_residue_cover, wrap_to_fp, WrapOptions,
};
use kakeya::covering::{
    covers_interval, covers_space, extend_full_difference_cover, fp_cover_bound, greedy_translate_cover_fp,
    greedy_translate_cover_int, int_cover_bound,
};
use kakeya::entropy::{katz_tao_epsilon, mt_joint, mt_sharpness, sig12, typical_logcount, Ambient, DiscreteDist, JointRv};
use kakeya::erdos_selfridge::{min_over_intervals, min_over_prime_pool, prime_pattern_search, sandwich_check, SearchMode};
use kakeya::error::Result;
use kakeya::fp::{fmt_vec, FpSet, FpSpace};
use kakeya::numbers::Int;
use kakeya::oracle::{min_distinct_cover, min_fp_cover, min_full_cover, SearchBudget};
use kakeya::pipeline::{replay, PipelineOptions};
use kakeya::sets::{verify_cover, IntSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::Output;
use crate::{invalid, tables, Command, Common, CompressKind, ConstructKind, CoverKind, EsKind, Preset};

pub fn run(cmd: &Command, c: &Common) -> Result<Output> {
    match cmd {
        Command::Construct { kind } => construct(*kind, c),
        Command::Oracle { quantity, max_nodes, pool_max } => oracle(quantity, *max_nodes, *pool_max, c),
        Command::Entropy { mt: _, katz_tao, typical } => entropy(*katz_tao, typical, c),
        Command::Cover { kind, set, size } => cover(*kind, set, *size, c),
        Command::Compress { kind, lines } => compress(*kind, *lines, c),
        Command::Es { kind, primes, d, delta, x_max, pool_max } => es(*kind, primes, d, *delta, *x_max, *pool_max, c),
        Command::Pipeline { preset, samples, exact_cap } => pipeline(*preset, *samples, *exact_cap, c),
        Command::CheckAll { level } => {
            let outcomes = check_all(*level, c.seed);
            let failed = outcomes.iter().any(|o| !o.passed);
            let mut out = Output::new(&outcomes, vec!["id", "name", "passed", "detail"]).failed_if(failed);
            for o in &outcomes {
                out = out.row(vec![o.id.to_string(), o.name.to_string(), o.passed.to_string(), o.detail.clone()]);
            }
            out.text = Some(render_checks(&outcomes));
            Ok(out)
        }
        Command::Table { quantity, ks, ps, ms } => tables::table(quantity, ks, ps, ms, c),
    }
}

fn opt_f(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

fn construct(kind: ConstructKind, c: &Common) -> Result<Output> {
    let cap = c.cap_enum;
    Ok(match kind {
        ConstructKind::Qr => {
            let (k, m) = (c.k(2), c.m(1));
            let qr = quadratic_residue_cover(k, m, cap)?;
            let ok = verify_cover(&qr.s, k, 1..qr.q).is_ok();
            let bound = qr_size_bound(k, m);
            Output::new(&qr, vec!["k", "m", "Q", "size", "bound", "verified", "S"])
                .row(vec![k.to_string(), m.to_string(), qr.q.to_string(), qr.s.len().to_string(), bound.to_string(), ok.to_string(), qr.s.to_string()])
                .failed_if(!ok)
        }
        ConstructKind::Digits => {
            let (k, m, n) = (c.k(2), c.m(1), c.n(2));
            let qr = quadratic_residue_cover(k, m, cap)?;
            let d = digit_concatenate(&qr, n, cap)?;
            let top = qr.q.checked_pow(n as u32).ok_or_else(|| invalid("Q^n overflows"))?;
            let ok = verify_cover(&d.set, k, 1..top).is_ok();
            Output::new(json!({"k": k, "m": m, "Q": qr.q.to_string(), "n": n, "set": d.set}), vec!["k", "m", "Q", "n", "size", "verified"])
                .row(vec![k.to_string(), m.to_string(), qr.q.to_string(), n.to_string(), d.set.len().to_string(), ok.to_string()])
                .failed_if(!ok)
        }
        ConstructKind::Upper => {
            let (k, big_n, m) = (c.k(2), c.big_n(10), c.m(1));
            let u = build_f_upper(k, big_n, m, cap)?;
            let ok = verify_cover(&u.set, k, 1..=big_n).is_ok();
            Output::new(&u, vec!["k", "N", "m", "n", "size", "exponent", "verified"])
                .row(vec![k.to_string(), big_n.to_string(), m.to_string(), u.n.to_string(), u.size.to_string(), opt_f(u.exponent), ok.to_string()])
                .failed_if(!ok)
        }
        ConstructKind::Mt => {
            let p = c.p(3);
            let v = mockenhaupt_tao(p)?;
            let dirs = full_line_directions(&v)?;
            let shown: Vec<String> = dirs.iter().map(|d| fmt_vec(d)).collect();
            Output::new(json!({"p": p, "set": v, "full_line_directions": dirs}), vec!["p", "size", "full_lines", "directions"])
                .row(vec![p.to_string(), v.len().to_string(), dirs.len().to_string(), shown.join(" ")])
        }
        ConstructKind::Unwrap => {
            let p = c.p(3);
            let k = c.k(p as usize);
            let v = mockenhaupt_tao(p)?;
            let u = fp_unwrap(&v, k)?;
            Output::new(&u, vec!["p", "k", "input_size", "size", "differences", "base"])
                .row(vec![p.to_string(), k.to_string(), v.len().to_string(), u.set.len().to_string(), u.differences.len().to_string(), u.base.to_string()])
        }
        ConstructKind::Wrap => {
            let (k, big_n, m, n) = (c.k(4), c.big_n(100), c.m(1), c.n(2));
            let u = build_f_upper(k, big_n, m, cap)?;
            let w = wrap_to_fp(&u.set, k, big_n, n, WrapOptions { density: None, retries: c.retries, seed: c.seed })?;
            Output::new(&w, vec!["k", "N", "n", "M", "p", "t", "short_k", "size", "covered", "threshold", "attempts"]).row(vec![
                k.to_string(),
                big_n.to_string(),
                n.to_string(),
                w.big_m.to_string(),
                w.p.to_string(),
                w.t.to_string(),
                w.short_k.to_string(),
                w.set.len().to_string(),
                w.covered.to_string(),
                sig12(w.threshold),
                w.attempts.to_string(),
            ])
        }
    })
}

fn oracle(quantity: &str, max_nodes: u64, pool_max: u64, c: &Common) -> Result<Output> {
    let budget = SearchBudget { max_nodes, deadline: None };
    let header = vec!["quantity", "k", "N", "p", "n", "optimum", "lower_bound", "exhausted", "nodes", "window", "witness"];
    if quantity == "G" {
        let (k, big_n) = (c.k(2), c.big_n(2));
        let g = min_over_prime_pool(k, big_n as usize, pool_max)?;
        let primes: Vec<String> = g.instance.primes.iter().map(u64::to_string).collect();
        let row = vec![
            "G".into(),
            k.to_string(),
            big_n.to_string(),
            String::new(),
            String::new(),
            g.count.to_string(),
            String::new(),
            g.exhaustive_shifts.to_string(),
            String::new(),
            String::new(),
            primes.join(","),
        ];
        return Ok(Output::new(&g, header).row(row));
    }
    let r = match quantity {
        "F" => min_full_cover(c.k(2), c.big_n(3), c.cap_window, budget)?,
        "F'" => min_distinct_cover(c.k(2), c.big_n(3), c.cap_window, budget)?,
        "f" => {
            let p = c.p(3);
            min_fp_cover(c.k(p as usize), c.n(1), p, budget)?
        }
        other => return Err(invalid(format!("unknown quantity {other}"))),
    };
    let s = |x: Option<String>| x.unwrap_or_default();
    let row = vec![
        r.quantity.to_string(),
        r.k.to_string(),
        s(r.big_n.map(|v| v.to_string())),
        s(r.p.map(|v| v.to_string())),
        s(r.n.map(|v| v.to_string())),
        r.optimum.to_string(),
        r.lower_bound.to_string(),
        r.exhausted.to_string(),
        r.nodes.to_string(),
        s(r.window.map(|v| v.to_string())),
        r.witness.render(),
    ];
    Ok(Output::new(&r, header).row(row))
}

fn entropy(katz_tao: bool, typical: &[usize], c: &Common) -> Result<Output> {
    if katz_tao {
        let e = katz_tao_epsilon();
        return Ok(Output::new(json!({"epsilon": e, "alpha": e + 1.0}), vec!["epsilon", "alpha"])
            .row(vec![sig12(e), sig12(e + 1.0)]));
    }
    let p = c.p(5);
    if !typical.is_empty() {
        let j = mt_joint(p, c.cap_enum)?;
        let dist = DiscreteDist::new(j.atoms().enumerate().map(|(i, (_, q))| (i, q.clone())))?;
        let rows = typical.iter().map(|&n| typical_logcount(&dist, n)).collect::<Result<Vec<_>>>()?;
        let mut out = Output::new(&rows, vec!["p", "n", "log_count", "entropy", "gap", "bound"]);
        for r in &rows {
            out = out.row(vec![p.to_string(), r.n.to_string(), sig12(r.log_count), sig12(r.entropy), sig12(r.gap), sig12(r.bound)]);
        }
        return Ok(out);
    }
    let r = mt_sharpness(p, c.cap_enum)?;
    Ok(Output::new(&r, vec!["p", "H(X-Y)", "closed_form", "max_H", "argmax", "max_bound", "ratio", "ratio_threshold"]).row(vec![
        p.to_string(),
        sig12(r.difference_entropy),
        sig12(r.difference_closed_form),
        sig12(r.max_entropy),
        r.argmax.to_string(),
        sig12(r.max_bound),
        sig12(r.ratio),
        sig12(r.ratio_threshold),
    ]))
}

fn random_fp_set(space: FpSpace, size: usize, rng: &mut ChaCha8Rng) -> Result<FpSet> {
    let total = space.dense_size()?;
    let size = size.min(total);
    let mut pts = BTreeSet::new();
    while pts.len() < size {
        pts.insert(space.decode(rng.gen_range(0..total)));
    }
    FpSet::in_space(space, pts)
}

fn cover(kind: CoverKind, set: &[Int], size: Option<usize>, c: &Common) -> Result<Output> {
    Ok(match kind {
        CoverKind::Int => {
            if set.is_empty() {
                return Err(invalid("--kind int needs --set"));
            }
            let s: IntSet = set.iter().copied().collect();
            let x = c.big_n(s.max().unwrap_or(1).max(1));
            let g = greedy_translate_cover_int(&s, x)?;
            let ok = covers_interval(&s, &g.translates, x);
            let t: Vec<String> = g.translates.iter().map(Int::to_string).collect();
            Output::new(&g, vec!["X", "size_S", "size_T", "bound", "covered", "T"])
                .row(vec![x.to_string(), s.len().to_string(), g.len().to_string(), int_cover_bound(x, s.len()).to_string(), ok.to_string(), t.join(",")])
                .failed_if(!ok)
        }
        CoverKind::Fp => {
            let (p, n) = (c.p(3), c.n(2));
            let space = FpSpace::new(p, n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            let s = random_fp_set(space, size.unwrap_or(p as usize), &mut rng)?;
            let g = greedy_translate_cover_fp(&s)?;
            let ok = covers_space(&s, &g.translates)?;
            Output::new(json!({"S": s, "cover": g}), vec!["p", "n", "size_S", "size_T", "bound", "covered"])
                .row(vec![p.to_string(), n.to_string(), s.len().to_string(), g.len().to_string(), fp_cover_bound(p, n, s.len()).to_string(), ok.to_string()])
                .failed_if(!ok)
        }
        CoverKind::Extend => {
            let p = c.p(3);
            let v = mockenhaupt_tao(p)?;
            let dirs: BTreeSet<_> = (0..p).map(|a| vec![1, a]).collect();
            let full = extend_full_difference_cover(&v, &dirs, p as usize)?;
            let ok = full.set.is_besicovitch()?;
            Output::new(&full, vec!["p", "input_size", "translates", "size", "besicovitch"])
                .row(vec![p.to_string(), v.len().to_string(), full.translates.len().to_string(), full.set.len().to_string(), ok.to_string()])
                .failed_if(!ok)
        }
    })
}

fn compress(kind: CompressKind, lines: usize, c: &Common) -> Result<Output> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    Ok(match kind {
        CompressKind::Distinct => {
            let (k, big_n) = (c.k(2), c.big_n(6));
            if big_n < 1 || big_n > 40 {
                return Err(invalid("--N must lie in 1..=40 for a random distinct instance"));
            }
            let mut diffs = BTreeSet::new();
            while diffs.len() < big_n as usize {
                diffs.insert(rng.gen_range(1..=40 as Int));
            }
            let mut pts = BTreeSet::new();
            for &d in &diffs {
                let a: Int = rng.gen_range(-30..=30);
                pts.extend((0..k as Int).map(|j| a + j * d));
            }
            let a0: IntSet = pts.into_iter().collect();
            let cert = verify_cover(&a0, k, diffs.iter().copied()).map_err(|u| invalid(format!("{u:?}")))?;
            let out = distinct_to_full(&a0, &cert, c.seed, c.retries)?;
            let ok = verify_cover(&out.set, k, 1..=big_n).is_ok();
            Output::new(&out, vec!["k", "N", "input_size", "size", "bound", "attempts", "collisions", "distinct", "verified"])
                .row(vec![
                    k.to_string(),
                    big_n.to_string(),
                    a0.len().to_string(),
                    out.set.len().to_string(),
                    sig12(out.bound),
                    out.attempts.to_string(),
                    out.collisions.to_string(),
                    out.distinct.to_string(),
                    ok.to_string(),
                ])
                .failed_if(!ok)
        }
        CompressKind::Linear => {
            let (p, dim) = (c.p(3), c.n(6));
            let space = FpSpace::new(p, dim)?;
            let total = space.dense_size()?;
            let mut pts = BTreeSet::new();
            let mut dirs = BTreeSet::new();
            while dirs.len() < lines {
                let d = space.decode(rng.gen_range(1..total));
                let x = space.decode(rng.gen_range(0..total));
                pts.extend((0..p).map(|t| space.step(&x, &d, t)));
                dirs.insert(d);
            }
            let a = FpSet::in_space(space, pts)?;
            let r = random_linear_compress(&a, &dirs, p as usize, c.seed, c.retries)?;
            Output::new(&r, vec!["p", "M", "n", "input_size", "directions", "size", "surviving", "attempts"]).row(vec![
                p.to_string(),
                dim.to_string(),
                r.set.n().to_string(),
                a.len().to_string(),
                dirs.len().to_string(),
                r.set.len().to_string(),
                r.directions.len().to_string(),
                r.attempts.to_string(),
            ])
        }
    })
}

fn es(kind: EsKind, primes: &[u64], d: &[u64], delta: f64, x_max: u64, pool_max: u64, c: &Common) -> Result<Output> {
    Ok(match kind {
        EsKind::Min => {
            if primes.is_empty() {
                return Err(invalid("--kind min needs --primes"));
            }
            let k = c.k(2);
            let r = min_over_intervals(primes, k, SearchMode::Auto)?;
            let ps: Vec<String> = primes.iter().map(u64::to_string).collect();
            Output::new(&r, vec!["primes", "k", "w", "count", "exhaustive", "period"])
                .row(vec![ps.join(","), k.to_string(), r.w.to_string(), r.count.to_string(), r.exhaustive.to_string(), r.period.to_string()])
        }
        EsKind::Sandwich => {
            let (k, big_n) = (c.k(2), c.big_n(2));
            let r = sandwich_check(k, big_n as usize, pool_max, x_max, c.cap_window)?;
            let binding = r.realization.as_ref().map(|z| z.binding).unwrap_or("");
            Output::new(&r, vec!["k", "N", "F'", "G_upper", "kF'", "left", "right", "binding"])
                .row(vec![
                    k.to_string(),
                    big_n.to_string(),
                    r.distinct_cover.to_string(),
                    r.pool.count.to_string(),
                    (k * r.distinct_cover).to_string(),
                    r.left.to_string(),
                    r.right.to_string(),
                    binding.to_string(),
                ])
                .failed_if(!r.left)
        }
        EsKind::Pattern => {
            if d.is_empty() {
                return Err(invalid("--kind pattern needs --d"));
            }
            let ds: Vec<String> = d.iter().map(u64::to_string).collect();
            let hit = prime_pattern_search(d, delta, x_max);
            let cell = |f: fn(&kakeya::erdos_selfridge::PrimePattern) -> u64| hit.map(|h| f(&h).to_string()).unwrap_or_default();
            Output::new(&hit, vec!["d", "delta", "found", "u", "v", "X"])
                .row(vec![ds.join(","), sig12(delta), hit.is_some().to_string(), cell(|h| h.u), cell(|h| h.v), cell(|h| h.x)])
                .failed_if(hit.is_none())
        }
    })
}

fn pipeline(preset: Preset, samples: usize, exact_cap: u128, c: &Common) -> Result<Output> {
    let p = c.p(3);
    let fp1 = Ambient::Fp { p, n: 1 };
    let j = match preset {
        Preset::Mt => mt_joint(p, c.cap_enum)?,
        Preset::Uniform => JointRv::uniform_on(fp1, (0..p as Int).flat_map(|x| (0..p as Int).map(move |y| (vec![x], vec![y]))))?,
        Preset::Point => JointRv::uniform_on(fp1, [(vec![0], vec![0])])?,
    };
    let opts = PipelineOptions { m: c.m(1), seed: c.seed, exact_cap, samples, retries: c.retries };
    let r = replay(&j, opts)?;
    let failed = r.extension.as_ref().is_some_and(|e| !e.besicovitch);
    let comp = r.compression.as_ref();
    let ext = r.extension.as_ref();
    let row = vec![
        p.to_string(),
        opts.m.to_string(),
        r.typical.length.to_string(),
        r.typical.sampled.to_string(),
        r.pairs.to_string(),
        r.lines.size.to_string(),
        r.lines.direction_count.to_string(),
        comp.map(|c| c.n.to_string()).unwrap_or_default(),
        comp.map(|c| c.size.to_string()).unwrap_or_default(),
        comp.map(|c| c.surviving.to_string()).unwrap_or_default(),
        ext.map(|e| e.size.to_string()).unwrap_or_default(),
        ext.map(|e| e.besicovitch.to_string()).unwrap_or_default(),
        opt_f(ext.map(|e| e.reference)),
        opt_f(r.gap_ratio),
    ];
    let header = vec![
        "p", "m", "length", "sampled", "pairs", "union", "directions", "n", "compressed", "surviving", "final", "besicovitch",
        "reference", "gap_ratio",
    ];
    Ok(Output::new(&r, header).row(row).failed_if(failed))
}
