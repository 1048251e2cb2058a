//! Explicit progression covers: the quadratic-residue union of
//! progressions and its digit concatenation, transfers between integer
//! covers and covers in `F_p^n`, and the parabola-chord set in `F_p^2`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp::{FpSet, FpSpace, FpVec};
use crate::numbers::{checked_pow, next_prime, odd_primes, Int};
use crate::sets::{cut_and_move, freiman_collapse, verify_cover, ApCertificate, IntSet};

/// Default cap on enumerated set sizes.
pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

/// `S = ∪_{d=1}^{Q-1} {x_d + jd : 0 <= j < k}` with `x_d ≡ d² (mod Q)`.
#[derive(Debug, Clone, Serialize)]
pub struct QrConstruction {
    pub k: usize,
    pub m: usize,
    #[serde(rename = "Q", with = "crate::numbers::int_serde")]
    pub q: Int,
    #[serde(rename = "S")]
    pub s: IntSet,
    /// Minimal bases for every `d` in `{1, ..., Q-1}`.
    pub certificate: ApCertificate,
}

/// `k² ∏ (p_i + 1)/2` over the first `m` odd primes.
pub fn qr_size_bound(k: usize, m: usize) -> u128 {
    let prod: u128 = odd_primes(m).iter().map(|&p| (p as u128 + 1) / 2).product();
    (k as u128).pow(2) * prod
}

pub fn quadratic_residue_cover(k: usize, m: usize, cap: u128) -> Result<QrConstruction> {
    if k < 1 || m < 1 {
        return Err(Error::Invalid("quadratic_residue_cover needs k >= 1 and m >= 1".into()));
    }
    let q: u128 = odd_primes(m).iter().map(|&p| p as u128).product();
    if (k as u128).saturating_mul(q) > cap {
        return Err(Error::too_large("quadratic residue cover", k as u128 * q, cap));
    }
    let q = q as Int;
    let mut s = BTreeSet::new();
    for d in 1..q {
        let x = match (d * d) % q {
            0 => q,
            r => r,
        };
        s.extend((0..k as Int).map(|j| x + j * d));
    }
    let s: IntSet = s.into_iter().collect();
    let certificate = verify_cover(&s, k, 1..q)?;
    let bound = qr_size_bound(k, m);
    assert!(s.len() as u128 <= bound, "#S = {} exceeds k^2 prod (p+1)/2 = {bound}", s.len());
    Ok(QrConstruction { k, m, q, s, certificate })
}

/// For each odd prime `p | Q` and each `j < k`, the number of residues of
/// `x_d + jd mod p` as `d` runs over `1..Q`. Each is at most `(p+1)/2`.
pub fn qr_residue_counts(c: &QrConstruction) -> Vec<(u64, usize, usize)> {
    let mut out = Vec::new();
    for p in odd_primes(c.m) {
        let p = p as Int;
        for j in 0..c.k as Int {
            let residues: BTreeSet<Int> = (1..c.q)
                .map(|d| {
                    let x = match (d * d) % c.q {
                        0 => c.q,
                        r => r,
                    };
                    (x + j * d).rem_euclid(p)
                })
                .collect();
            out.push((p as u64, j as usize, residues.len()));
        }
    }
    out
}

/// A set covering a range of differences, with its certificate.
#[derive(Debug, Clone, Serialize)]
pub struct Covered {
    pub set: IntSet,
    pub certificate: ApCertificate,
}

/// `A_n = { s_0 + s_1 Q + ... + s_{n-1} Q^{n-1} : s_i ∈ S }`.
///
/// For `d = Σ d_i Q^i` with digits `d_i < Q`, the base `Σ a(d_i) Q^i` starts
/// a k-term progression with difference `d`, where `a(0) = min S`. The
/// digitwise certificate covers all of `{0, ..., Q^n - 1}` and is checked
/// against `A_n` before returning.
pub fn digit_concatenate(c: &QrConstruction, n: usize, cap: u128) -> Result<Covered> {
    if n < 1 {
        return Err(Error::Invalid("digit_concatenate needs n >= 1".into()));
    }
    let size = (c.s.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let q_n = checked_pow(c.q, n as u32)?;
    if size > cap || q_n as u128 > cap {
        return Err(Error::too_large("digit concatenation", size.max(q_n as u128), cap));
    }
    let digits = c.s.to_vec();
    let mut set: BTreeSet<Int> = BTreeSet::from([0]);
    let mut place: Int = 1;
    for _ in 0..n {
        set = set.iter().flat_map(|&base| digits.iter().map(move |&s| base + s * place)).collect();
        place *= c.q;
    }
    let set: IntSet = set.into_iter().collect();

    let mut digit_base = c.certificate.entries.clone();
    digit_base.insert(0, c.s.min().expect("S is nonempty"));
    let mut certificate = ApCertificate::new(c.k);
    for d in 0..q_n {
        let (mut rest, mut place, mut base) = (d, 1 as Int, 0 as Int);
        for _ in 0..n {
            base += digit_base[&(rest % c.q)] * place;
            rest /= c.q;
            place *= c.q;
        }
        certificate.entries.insert(d, base);
    }
    certificate.check(&set)?;
    Ok(Covered { set, certificate })
}

/// Upper-bound construction for the full-cover quantity.
#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    pub k: usize,
    #[serde(rename = "N", with = "crate::numbers::int_serde")]
    pub big_n: Int,
    pub m: usize,
    /// Number of digits: minimal `n` with `Q^n > N`.
    pub n: usize,
    pub size: usize,
    /// `ln #A / ln N` (absent for `N = 1`).
    pub exponent: Option<f64>,
    pub set: IntSet,
    /// Certificate over `{1, ..., N}`.
    pub certificate: ApCertificate,
}

pub fn build_f_upper(k: usize, big_n: Int, m: usize, cap: u128) -> Result<UpperBound> {
    if big_n < 1 {
        return Err(Error::Invalid("N must be positive".into()));
    }
    let c = quadratic_residue_cover(k, m, cap)?;
    let mut n = 1;
    while checked_pow(c.q, n as u32)? <= big_n {
        n += 1;
    }
    let full = digit_concatenate(&c, n, cap)?;
    let certificate = ApCertificate {
        k,
        entries: full.certificate.entries.range(1..=big_n).map(|(&d, &a)| (d, a)).collect(),
    };
    let q_n = checked_pow(c.q, n as u32)?;
    assert!(full.set.len() as Int <= k as Int * q_n, "#A exceeds k Q^n");
    let size = full.set.len();
    let exponent = (big_n > 1).then(|| (size as f64).ln() / (big_n as f64).ln());
    Ok(UpperBound { k, big_n, m, n, size, exponent, set: full.set, certificate })
}

/// `V = {(u + v, uv) : u, v ∈ F_p}`.
pub fn mockenhaupt_tao(p: u32) -> Result<FpSet> {
    let space = FpSpace::new(p, 2)?;
    let pts = (0..p).flat_map(|u| {
        (0..p).map(move |v| vec![(u + v) % p, ((u as u64 * v as u64) % p as u64) as u32])
    });
    FpSet::in_space(space, pts)
}

/// Representatives (first nonzero coordinate 1) of the directions in which
/// the set contains a full line.
pub fn full_line_directions(set: &FpSet) -> Result<Vec<FpVec>> {
    let space = set.space();
    Ok(set
        .covered_directions(space.p as usize)?
        .into_iter()
        .filter(|d| d.iter().find(|&&x| x != 0) == Some(&1))
        .collect())
}

/// Integer set obtained from a cover in `F_p^n` by lifting coordinates to
/// `{0, ..., p-1}`.
#[derive(Debug, Clone, Serialize)]
pub struct Unwrapped {
    pub set: IntSet,
    /// Distinct integer differences carrying a k-term progression.
    pub differences: Vec<Int>,
    pub certificate: ApCertificate,
    /// Digit base used to collapse `Z^n` to `Z` (1 when `n = 1`).
    #[serde(with = "crate::numbers::int_serde")]
    pub base: Int,
}

/// Lift every progression `x(d) + λd` of `A ⊂ F_p^n` (lex-min base, one per
/// `d` that has one, including `d = 0`) to `ψ(x(d)) + λψ(d)` in
/// `{0, ..., k(p-1)}^n`, then collapse to `Z` by the digit map with base
/// `10kp` when `n > 1`.
pub fn fp_unwrap(a: &FpSet, k: usize) -> Result<Unwrapped> {
    if k < 1 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let space = a.space();
    let (p, n) = (space.p as Int, space.n);
    let mut lifted: BTreeSet<Vec<Int>> = BTreeSet::new();
    let mut lifted_diffs = Vec::new();
    for d in space.vectors()? {
        let Some(x) = a.progression_base(&d, k) else { continue };
        for lambda in 0..k as Int {
            lifted.insert(x.iter().zip(&d).map(|(&xi, &di)| xi as Int + lambda * di as Int).collect());
        }
        lifted_diffs.push(d.iter().map(|&c| c as Int).collect::<Vec<Int>>());
    }
    let box_size = k as Int * (p - 1) + 1;
    let base = if n == 1 { 1 } else { 10 * k as Int * p };
    let (set, differences): (IntSet, Vec<Int>) = if n == 1 {
        (lifted.iter().map(|v| v[0]).collect(), lifted_diffs.iter().map(|v| v[0]).collect())
    } else {
        let set = freiman_collapse(&lifted, box_size, base)?;
        let diffs = lifted_diffs
            .iter()
            .map(|v| crate::sets::digit_map(v, base))
            .collect::<Result<Vec<Int>>>()?;
        (set, diffs)
    };
    let distinct: BTreeSet<Int> = differences.iter().copied().collect();
    assert_eq!(distinct.len(), differences.len(), "unwrapped differences collide");
    let inflation = (k as u128).pow(n as u32) * a.len() as u128;
    assert!(set.len() as u128 <= inflation, "unwrap exceeded k^n #A");
    let certificate = verify_cover(&set, k, distinct.iter().copied())?;
    Ok(Unwrapped { set, differences: distinct.into_iter().collect(), certificate, base })
}

/// Result of [`wrap_to_fp`].
#[derive(Debug, Clone, Serialize)]
pub struct Wrapped {
    /// The accepted shift.
    #[serde(with = "crate::numbers::int_serde")]
    pub t: Int,
    #[serde(rename = "M", with = "crate::numbers::int_serde")]
    pub big_m: Int,
    pub p: u32,
    pub n: usize,
    /// Progression length after cut-and-move, `floor(k/2)`.
    pub short_k: usize,
    pub set: FpSet,
    /// Exact number of nonzero directions of `F_p^n` with a `short_k`-term progression.
    pub covered: usize,
    /// Acceptance threshold `c N`.
    pub threshold: f64,
    pub attempts: usize,
}

/// Options for [`wrap_to_fp`].
#[derive(Debug, Clone, Copy)]
pub struct WrapOptions {
    /// Acceptance density; `None` uses `2^-n / 30k`.
    pub density: Option<f64>,
    pub retries: usize,
    pub seed: u64,
}

/// Transfer an integer cover of `{1..N}` to `F_p^n`.
///
/// The cover is folded into `{1, ..., 10kN}` by cut-and-move, shifted by a
/// random `t ∈ [-10kN, 20kN)`, read in base `M = floor(N^(1/n))` on
/// `{0, ..., M-1}^n` and reduced mod the smallest prime `p >= M`. The shift
/// is resampled until the exact number of covered directions reaches `cN`.
pub fn wrap_to_fp(a: &IntSet, k: usize, big_n: Int, n: usize, opts: WrapOptions) -> Result<Wrapped> {
    if k < 2 || n < 1 || big_n < 1 {
        return Err(Error::Invalid("wrap_to_fp needs k >= 2, n >= 1, N >= 1".into()));
    }
    let folded = cut_and_move(a, k, big_n)?;
    let big_m = integer_root(big_n, n);
    if big_m < 2 {
        return Err(Error::Invalid(format!("N^(1/n) = {big_m} leaves no room for digits")));
    }
    let p = next_prime(big_m as u64) as u32;
    debug_assert!((p as Int) < 2 * big_m);
    let space = FpSpace::new(p, n)?;
    space.dense_size()?;
    let m_n = checked_pow(big_m, n as u32)?;
    let density = opts.density.unwrap_or(0.5f64.powi(n as i32) / (30.0 * k as f64));
    let threshold = density * big_n as f64;
    let window = 10 * k as Int * big_n;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<Wrapped> = None;
    for attempt in 1..=opts.retries.max(1) {
        let t = rng.gen_range(-window..2 * window);
        let digits = folded.set.iter().map(|x| x + t).filter(|&v| (0..m_n).contains(&v)).map(|mut v| {
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                out.push((v % big_m) as u32);
                v /= big_m;
            }
            out
        });
        let set = FpSet::in_space(space, digits)?;
        let covered = set.covered_directions(folded.short_k)?.len();
        let cand = Wrapped { t, big_m, p, n, short_k: folded.short_k, set, covered, threshold, attempts: attempt };
        let accept = covered as f64 >= threshold;
        if best.as_ref().is_none_or(|b| cand.covered > b.covered) {
            best = Some(cand);
        }
        if accept {
            return Ok(best.expect("just set"));
        }
    }
    let b = best.expect("at least one attempt");
    Err(Error::BudgetExhausted {
        budget: opts.retries,
        best: format!("t = {} covered {} < {:.3}", b.t, b.covered, threshold),
    })
}

/// `floor(N^(1/n))`, exactly.
pub fn integer_root(big_n: Int, n: usize) -> Int {
    let mut r = (big_n as f64).powf(1.0 / n as f64).round() as Int;
    while r > 0 && checked_pow(r, n as u32).map_or(true, |v| v > big_n) {
        r -= 1;
    }
    while checked_pow(r + 1, n as u32).is_ok_and(|v| v <= big_n) {
        r += 1;
    }
    r
}
