//! Modular arithmetic modulo a single prime: primality, factorization,
//! primitive roots, discrete logarithms and the nontrivial cube roots of
//! unity.
//!
//! [`PrimeContext`] is the shared evaluation environment for everything else
//! in the crate. It is built once per prime and is immutable afterwards.

use std::f64::consts::TAU;
use std::ops::Deref;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest modulus for which the O(p) lookup tables are built.
pub const MAX_TABLE_MODULUS: u64 = 1 << 26;

/// Cube roots of unity are found by enumeration up to this bound and from
/// the primitive root above it.
pub const CUBE_ROOT_ENUMERATION_LIMIT: u64 = 10_000;

#[inline]
pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `a^e mod m` by square-and-multiply.
pub fn mod_pow(a: u64, mut e: u64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    if m == 1 {
        return 0;
    }
    let mut base = a % m;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        e >>= 1;
    }
    acc
}

/// Least nonnegative residue of a signed integer.
#[inline]
pub fn reduce(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo a prime `p`, or `None` when `p | a`.
pub fn mod_inv(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        None
    } else {
        Some(mod_pow(a, p - 2, p))
    }
}

/// Deterministic Miller-Rabin for the full 64-bit range.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if m % q == 0 {
            return m == q;
        }
    }
    let mut d = m - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = mod_pow(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs with
/// strictly increasing primes. `factorize(1)` is empty.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    assert!(m >= 1, "factorize requires m >= 1");
    let mut out = Vec::new();
    let mut push = |m: &mut u64, q: u64| {
        let mut e = 0;
        while *m % q == 0 {
            *m /= q;
            e += 1;
        }
        if e > 0 {
            out.push((q, e));
        }
    };
    push(&mut m, 2);
    push(&mut m, 3);
    let mut q = 5u64;
    while q.saturating_mul(q) <= m {
        push(&mut m, q);
        push(&mut m, q + 2);
        q += 6;
        // the remaining cofactor may already be prime
        if q > 1000 && is_prime(m) {
            break;
        }
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// True iff `x -> x^3` permutes the nonzero residues mod `p`.
///
/// Checked by marking images rather than by the residue class of `p`, so the
/// class criterion can be tested against it. For `p = 3` the map is also a
/// bijection (`gcd(3, p - 1) = 1`).
pub fn cubing_is_bijection(p: u64) -> bool {
    assert!(p <= MAX_TABLE_MODULUS, "modulus too large for direct check");
    let mut seen = vec![false; p as usize];
    for x in 1..p {
        let c = mod_pow(x, 3, p) as usize;
        if seen[c] {
            return false;
        }
        seen[c] = true;
    }
    true
}

/// Smallest `g >= 2` whose order modulo the prime `p` is `p - 1`.
pub fn least_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let divisors: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| divisors.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// A prime modulus together with its primitive root, discrete-log table and
/// root-of-unity tables.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    g: u64,
    /// `dlog[a] = k` with `g^k = a`; entry 0 is unused.
    dlog: Vec<u32>,
    /// `powers[k] = g^k mod p` for `k` in `0..p-1`.
    powers: Vec<u32>,
    /// `e_table[j] = e(j/p)`.
    e_table: Vec<Complex64>,
    /// `unit_roots[k] = e(k/(p-1))`.
    unit_roots: Vec<Complex64>,
}

/// `exp(2 pi i num/den)` with the numerator reduced first.
pub fn unit_root(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    if num == 0 {
        return Complex64::new(1.0, 0.0);
    }
    // fold into (-1/2, 1/2] to keep the argument small
    let signed = if 2 * num > den {
        num as f64 - den as f64
    } else {
        num as f64
    };
    let (s, c) = (TAU * signed / den as f64).sin_cos();
    Complex64::new(c, s)
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p % 2 == 0 {
            return Err(if p == 2 { Error::EvenModulus(p) } else { Error::NotPrime(p) });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > MAX_TABLE_MODULUS {
            return Err(Error::ModulusTooLarge(p, MAX_TABLE_MODULUS));
        }
        let g = least_primitive_root(p);
        let n = (p - 1) as usize;
        let mut dlog = vec![0u32; p as usize];
        let mut powers = Vec::with_capacity(n);
        let mut x = 1u64;
        for k in 0..n {
            dlog[x as usize] = k as u32;
            powers.push(x as u32);
            x = x * g % p;
        }
        debug_assert_eq!(x, 1);
        let e_table = (0..p).map(|j| unit_root(j, p)).collect();
        let unit_roots = (0..p - 1).map(|k| unit_root(k, p - 1)).collect();
        Ok(Self { p, g, dlog, powers, e_table, unit_roots })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The least primitive root.
    #[inline]
    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Order of the multiplicative group, `p - 1`.
    #[inline]
    pub fn group_order(&self) -> u64 {
        self.p - 1
    }

    /// Discrete log of `a` to base `g`, `None` when `p | a`.
    #[inline]
    pub fn dlog(&self, a: i64) -> Option<u64> {
        match reduce(a, self.p) {
            0 => None,
            r => Some(self.dlog[r as usize] as u64),
        }
    }

    /// `g^k mod p`.
    #[inline]
    pub fn power(&self, k: u64) -> u64 {
        self.powers[(k % (self.p - 1)) as usize] as u64
    }

    /// `e(j/p)` for any integer `j`.
    #[inline]
    pub fn e(&self, j: i64) -> Complex64 {
        self.e_table[reduce(j, self.p) as usize]
    }

    #[inline]
    pub fn e_table(&self) -> &[Complex64] {
        &self.e_table
    }

    /// `e(k/(p-1))`, the value of the generating character at `g^k`.
    #[inline]
    pub fn unit_root(&self, k: u64) -> Complex64 {
        self.unit_roots[(k % (self.p - 1)) as usize]
    }

    pub fn inverse(&self, a: i64) -> Option<u64> {
        mod_inv(reduce(a, self.p), self.p)
    }
}

/// Nontrivial cube roots of unity mod `p` by scanning `2..p`.
pub fn cube_roots_by_enumeration(p: u64) -> Option<(u64, u64)> {
    let roots: Vec<u64> = (2..p).filter(|&x| mod_pow(x, 3, p) == 1).collect();
    match roots.as_slice() {
        &[a1, a2] => Some((a1, a2)),
        _ => None,
    }
}

/// Nontrivial cube roots of unity as `g^((p-1)/3)` and its square, sorted.
pub fn cube_roots_by_generator(ctx: &PrimeContext) -> Option<(u64, u64)> {
    let p = ctx.p();
    if p % 3 != 1 {
        return None;
    }
    let w = mod_pow(ctx.generator(), (p - 1) / 3, p);
    let w2 = mod_mul(w, w, p);
    Some((w.min(w2), w.max(w2)))
}

/// A prime `p = 1 mod 3` with its two nontrivial cube roots of unity and the
/// character index that realizes the cubic residue symbol.
#[derive(Debug, Clone)]
pub struct CubicContext {
    base: Arc<PrimeContext>,
    a1: u64,
    a2: u64,
    lambda_index: u64,
}

impl CubicContext {
    pub fn new(p: u64) -> Result<Self> {
        let base = PrimeContext::new(p)?;
        Self::from_context(Arc::new(base))
    }

    pub fn from_context(base: Arc<PrimeContext>) -> Result<Self> {
        let p = base.p();
        if p % 3 != 1 {
            return Err(Error::WrongResidueClass(p));
        }
        let (a1, a2) = if p <= CUBE_ROOT_ENUMERATION_LIMIT {
            cube_roots_by_enumeration(p)
        } else {
            cube_roots_by_generator(&base)
        }
        .expect("p = 1 mod 3 has two nontrivial cube roots of unity");
        let third = (p - 1) / 3;
        // a^((p-1)/3) = w^k for a = g^k, w = g^((p-1)/3); sending a1 to e(1/3)
        // fixes which order-3 character is lambda.
        let w = mod_pow(base.generator(), third, p);
        let lambda_index = if w == a1 { third } else { 2 * third };
        Ok(Self { base, a1, a2, lambda_index })
    }

    /// The same prime with the opposite complex embedding of the cubic
    /// symbol (`a1 -> e(2/3)`).
    pub fn with_swapped_embedding(&self) -> Self {
        Self {
            base: Arc::clone(&self.base),
            a1: self.a1,
            a2: self.a2,
            lambda_index: self.base.group_order() - self.lambda_index,
        }
    }

    pub fn base(&self) -> &PrimeContext {
        &self.base
    }

    pub fn shared_base(&self) -> Arc<PrimeContext> {
        Arc::clone(&self.base)
    }

    #[inline]
    pub fn a1(&self) -> u64 {
        self.a1
    }

    #[inline]
    pub fn a2(&self) -> u64 {
        self.a2
    }

    #[inline]
    pub fn lambda_index(&self) -> u64 {
        self.lambda_index
    }

    /// True when `a1` is mapped to `e(1/3)`.
    pub fn is_canonical_embedding(&self) -> bool {
        let w = mod_pow(self.base.generator(), (self.p() - 1) / 3, self.p());
        (self.lambda_index == (self.p() - 1) / 3) == (w == self.a1)
    }
}

impl Deref for CubicContext {
    type Target = PrimeContext;

    fn deref(&self) -> &PrimeContext {
        &self.base
    }
}
