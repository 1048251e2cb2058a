//! Integer and rational primitives shared by every module.
//!
//! All set elements are `i128`. Every construction that can grow its
//! values (digit concatenation, collapse maps, Freiman-style digit maps)
//! uses checked arithmetic and reports [`Error::Overflow`] instead of
//! wrapping.

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{Error, Result};

/// Integer type used for set elements.
pub type Int = i128;

/// Exact rational with `i128` numerator and denominator.
pub type Rat = Ratio<Int>;

/// Largest magnitude serialized as a plain JSON number (2^53).
pub const JSON_SAFE_INT: Int = 1 << 53;

/// Deterministic primality test by trial division.
///
/// Every prime in this crate is tiny, so trial division up to the square
/// root is both exact and fast.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut i = 5u64;
    while i.saturating_mul(i) <= n {
        if n % i == 0 || n % (i + 2) == 0 {
            return false;
        }
        i += 6;
    }
    true
}

/// Smallest prime `>= n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// The first `m` odd primes `3, 5, 7, 11, ...`.
pub fn odd_primes(m: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(m);
    let mut c = 3u64;
    while out.len() < m {
        if is_prime(c) {
            out.push(c);
        }
        c += 2;
    }
    out
}

/// Sieve of Eratosthenes; `sieve[i]` is true iff `i` is prime.
pub fn prime_sieve(limit: usize) -> Vec<bool> {
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    if limit >= 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if sieve[i] {
            let mut j = i * i;
            while j <= limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
}

pub fn primes_up_to(limit: usize) -> Vec<u64> {
    prime_sieve(limit)
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| p.then_some(i as u64))
        .collect()
}

/// Modular inverse of `a` modulo `m` (`m >= 2`), if it exists.
pub fn mod_inverse(a: Int, m: Int) -> Option<Int> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// Chinese remainder theorem for pairwise coprime moduli.
///
/// Returns the unique `x` in `[0, prod m_i)` with `x = r_i (mod m_i)`.
pub fn crt(residues: &[(Int, Int)]) -> Result<Int> {
    let mut x: Int = 0;
    let mut modulus: Int = 1;
    for &(r, m) in residues {
        if m < 1 {
            return Err(Error::Invalid(format!("CRT modulus {m} must be positive")));
        }
        let inv = mod_inverse(modulus, m)
            .ok_or_else(|| Error::Invalid(format!("CRT moduli not coprime at {m}")))?;
        // x' = x + modulus * ((r - x) * inv mod m)
        let step = ((r - x).rem_euclid(m) * inv).rem_euclid(m);
        x = modulus
            .checked_mul(step)
            .and_then(|v| v.checked_add(x))
            .ok_or(Error::Overflow("chinese remainder"))?;
        modulus = modulus.checked_mul(m).ok_or(Error::Overflow("chinese remainder"))?;
        x = x.rem_euclid(modulus);
    }
    Ok(x)
}

/// `base^exp` with overflow detection.
pub fn checked_pow(base: Int, exp: u32) -> Result<Int> {
    base.checked_pow(exp).ok_or(Error::Overflow("power"))
}

/// Floor of `num / den` for `den > 0`.
pub fn floor_div(num: Int, den: Int) -> Int {
    num.div_euclid(den)
}

/// `ln(n!)` for every `n` in `0..=max`, by direct summation of `ln i`.
pub fn ln_factorial_table(max: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(max + 1);
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    table.push(0.0);
    for i in 1..=max {
        // Neumaier summation keeps the table accurate to a few ulps.
        let term = (i as f64).ln();
        let t = acc + term;
        if acc.abs() >= term.abs() {
            comp += (acc - t) + term;
        } else {
            comp += (term - t) + acc;
        }
        acc = t;
        table.push(acc + comp);
    }
    table
}

/// Serde helpers for integers: plain JSON numbers up to 2^53 in magnitude,
/// decimal strings beyond that.
pub mod int_serde {
    use super::{Int, JSON_SAFE_INT};
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &Int, s: S) -> Result<S::Ok, S::Error> {
        if v.abs() <= JSON_SAFE_INT {
            s.serialize_i64(*v as i64)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    struct IntVisitor;

    impl<'de> Visitor<'de> for IntVisitor {
        type Value = Int;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("an integer or a decimal string")
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Int, E> {
            Ok(v as Int)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Int, E> {
            Ok(v as Int)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Int, E> {
            v.trim().parse().map_err(E::custom)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        d.deserialize_any(IntVisitor)
    }

    /// Wrapper to serialize integers inside collections.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    pub struct Wire(pub Int);

    impl serde::Serialize for Wire {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize(&self.0, s)
        }
    }

    impl<'de> serde::Deserialize<'de> for Wire {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            deserialize(d).map(Wire)
        }
    }
}
