//! Parameter sweeps, one row per point. A failing point is marked in its
//! `error` column and does not stop the sweep.

use kakeya::constructions::{build_f_upper, quadratic_residue_cover};
use kakeya::entropy::sig12;
use kakeya::error::Result;
use kakeya::numbers::Int;
use kakeya::oracle::{min_distinct_cover, min_fp_cover, min_full_cover, pair_lower_bound, SearchBudget};
use serde_json::{json, Value};

use crate::report::Output;
use crate::{invalid, Common};

pub fn table(quantity: &str, ks: &[usize], ps: &[u32], ms: &[usize], c: &Common) -> Result<Output> {
    match quantity {
        "F" => Ok(f_table(ks, c)),
        "f" => Ok(field_table(ps, c)),
        "exponent" => Ok(exponent_table(ms, c)),
        other => Err(invalid(format!("unknown table {other}"))),
    }
}

fn cell<T: ToString>(r: &Result<T>) -> String {
    r.as_ref().map(T::to_string).unwrap_or_default()
}

fn err_cell<T>(rs: &[&Result<T>]) -> String {
    rs.iter().filter_map(|r| r.as_ref().err()).map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// `F_k(N)` and `F'_k(N)` by search against the explicit construction.
fn f_table(ks: &[usize], c: &Common) -> Output {
    let budget = SearchBudget::default();
    let max_n = c.big_n(4);
    let header = vec!["k", "N", "F", "F'", "pair_lower", "construction", "ordered", "monotone", "error"];
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    let mut failed = false;
    for &k in ks {
        let mut prev: Option<usize> = None;
        for big_n in 1..=max_n {
            let f = min_full_cover(k, big_n, c.cap_window, budget).map(|r| r.optimum);
            let fp = min_distinct_cover(k, big_n, c.cap_window, budget).map(|r| r.optimum);
            let up = build_f_upper(k, big_n, c.m(1), c.cap_enum).map(|u| u.size);
            let lower = pair_lower_bound(k, big_n);
            let ordered = match (&f, &fp, &up) {
                (Ok(f), Ok(fp), Ok(up)) => lower <= *fp && fp <= f && f <= up,
                _ => false,
            };
            let monotone = match (&f, prev) {
                (Ok(f), Some(p)) => *f >= p,
                (Ok(_), None) => true,
                _ => false,
            };
            prev = f.as_ref().ok().copied();
            failed |= !ordered || !monotone;
            let error = err_cell(&[&f, &fp, &up]);
            json_rows.push(json!({
                "k": k, "N": big_n, "F": f.as_ref().ok(), "F'": fp.as_ref().ok(), "pair_lower": lower,
                "construction": up.as_ref().ok(), "ordered": ordered, "monotone": monotone, "error": error,
            }));
            rows.push(vec![
                k.to_string(),
                big_n.to_string(),
                cell(&f),
                cell(&fp),
                lower.to_string(),
                cell(&up),
                ordered.to_string(),
                monotone.to_string(),
                error,
            ]);
        }
    }
    finish(json_rows, header, rows, failed)
}

/// `f_{p,n}(p)` against `(p/2)^n`.
fn field_table(ps: &[u32], c: &Common) -> Output {
    let n = c.n(1);
    let header = vec!["p", "n", "k", "f", "exhausted", "reference", "above_reference", "error"];
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    let mut failed = false;
    for &p in ps {
        let k = c.k(p as usize);
        let r = min_fp_cover(k, n, p, SearchBudget::default());
        let reference = (p as f64 / 2.0).powi(n as i32);
        let (f, exhausted) = match &r {
            Ok(r) => (Some(r.optimum), r.exhausted),
            Err(_) => (None, false),
        };
        let above = f.is_some_and(|f| f as f64 >= reference);
        failed |= !above;
        let error = err_cell(&[&r]);
        json_rows.push(json!({"p": p, "n": n, "k": k, "f": f, "exhausted": exhausted, "reference": reference, "above_reference": above, "error": error}));
        rows.push(vec![
            p.to_string(),
            n.to_string(),
            k.to_string(),
            f.map(|f| f.to_string()).unwrap_or_default(),
            exhausted.to_string(),
            sig12(reference),
            above.to_string(),
            error,
        ]);
    }
    finish(json_rows, header, rows, failed)
}

/// Exponent `ln #A / ln N` of the explicit construction at `N = Q^n - 1`
/// for the largest `n` with `Q^n <= --N` (default 10^5), and the digit
/// limit `ln #S / ln Q`.
fn exponent_table(ms: &[usize], c: &Common) -> Output {
    let k = c.k(2);
    let limit = c.big_n(100_000);
    let header = vec!["k", "m", "Q", "size_S", "N", "size", "exponent", "limit_exponent", "c_prime", "below_one", "error"];
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for &m in ms {
        let qr = quadratic_residue_cover(k, m, c.cap_enum);
        let (q, s) = qr.as_ref().map(|qr| (qr.q, qr.s.len())).unwrap_or((0, 0));
        let mut top: Int = q.max(2);
        while top.checked_mul(q).is_some_and(|t| t <= limit) {
            top *= q;
        }
        let big_n = top - 1;
        let up = qr.as_ref().map_err(Clone::clone).and_then(|_| build_f_upper(k, big_n, m, c.cap_enum));
        let exponent = up.as_ref().ok().and_then(|u| u.exponent);
        let limit_exponent = (q > 1).then(|| (s as f64).ln() / (q as f64).ln());
        let c_prime = exponent.map(|e| 1.0 - e);
        let below = c_prime.is_some_and(|cp| cp > 0.0);
        let error = [qr.as_ref().err().map(ToString::to_string), up.as_ref().err().map(ToString::to_string)]
            .into_iter()
            .flatten()
            .collect::<Vec<_>>()
            .join("; ");
        json_rows.push(json!({
            "k": k, "m": m, "Q": q.to_string(), "size_S": s, "N": big_n.to_string(),
            "size": up.as_ref().ok().map(|u| u.size), "exponent": exponent, "limit_exponent": limit_exponent,
            "c_prime": c_prime, "below_one": below, "error": error,
        }));
        rows.push(vec![
            k.to_string(),
            m.to_string(),
            q.to_string(),
            s.to_string(),
            big_n.to_string(),
            up.as_ref().map(|u| u.size.to_string()).unwrap_or_default(),
            exponent.map(sig12).unwrap_or_default(),
            limit_exponent.map(sig12).unwrap_or_default(),
            c_prime.map(sig12).unwrap_or_default(),
            below.to_string(),
            error,
        ]);
    }
    finish(json_rows, header, rows, false)
}

fn finish(json_rows: Vec<Value>, header: Vec<&'static str>, rows: Vec<Vec<String>>, failed: bool) -> Output {
    let mut out = Output::new(json_rows, header).failed_if(failed);
    out.rows = rows;
    out
}
