//! Dirichlet characters modulo a prime and the cubic residue symbol.
//!
//! The character group mod `p` is cyclic of order `p - 1`. Fixing the least
//! primitive root `g`, the character with index `j` is
//! `chi_j(g^k) = e(jk/(p-1))`. Characters are plain indices over a shared
//! [`PrimeContext`]; values always go through the discrete-log table.

use num_complex::Complex64;

use crate::arith::{gcd, mod_pow, reduce, CubicContext, PrimeContext};

#[derive(Debug, Clone, Copy)]
pub struct DirichletCharacter<'a> {
    ctx: &'a PrimeContext,
    index: u64,
}

impl PartialEq for DirichletCharacter<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.ctx.p() == other.ctx.p()
    }
}

impl Eq for DirichletCharacter<'_> {}

impl<'a> DirichletCharacter<'a> {
    /// The character with index `j mod (p - 1)`.
    pub fn new(ctx: &'a PrimeContext, j: u64) -> Self {
        Self { ctx, index: j % ctx.group_order() }
    }

    pub fn principal(ctx: &'a PrimeContext) -> Self {
        Self { ctx, index: 0 }
    }

    #[inline]
    pub fn index(&self) -> u64 {
        self.index
    }

    #[inline]
    pub fn context(&self) -> &'a PrimeContext {
        self.ctx
    }

    /// `chi(a) = e(m/(p-1))` with `m` returned here, or `None` when `p | a`.
    #[inline]
    pub fn exponent(&self, a: i64) -> Option<u64> {
        let n = self.ctx.group_order();
        self.ctx
            .dlog(a)
            .map(|k| ((self.index as u128 * k as u128) % n as u128) as u64)
    }

    #[inline]
    pub fn evaluate(&self, a: i64) -> Complex64 {
        match self.exponent(a) {
            Some(m) => self.ctx.unit_root(m),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.ctx, self.ctx.group_order() - self.index)
    }

    /// Pointwise product `chi * psi`.
    pub fn product(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ctx.p(), other.ctx.p());
        Self::new(self.ctx, self.index + other.index)
    }

    /// `chi^e`; negative exponents give powers of the conjugate.
    pub fn pow(&self, e: i64) -> Self {
        let n = self.ctx.group_order();
        let e = reduce(e, n);
        Self::new(self.ctx, ((self.index as u128 * e as u128) % n as u128) as u64)
    }

    pub fn order(&self) -> u64 {
        let n = self.ctx.group_order();
        n / gcd(self.index, n)
    }

    #[inline]
    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// `chi(-1)`: since `-1 = g^((p-1)/2)`, this is `(-1)^j`.
    pub fn parity(&self) -> i8 {
        if self.index % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == 1
    }
}

/// All `p - 1` characters, principal first.
pub fn enumerate_characters(ctx: &PrimeContext) -> impl Iterator<Item = DirichletCharacter<'_>> {
    (0..ctx.group_order()).map(move |j| DirichletCharacter::new(ctx, j))
}

/// The cubic residue symbol `lambda` as a Dirichlet character.
pub fn cubic_character(cctx: &CubicContext) -> DirichletCharacter<'_> {
    DirichletCharacter::new(cctx.base(), cctx.lambda_index())
}

/// `a^((p-1)/3) mod p`, one of `0, 1, a1, a2`.
pub fn cubic_power_residue(cctx: &CubicContext, a: i64) -> u64 {
    let p = cctx.p();
    mod_pow(reduce(a, p), (p - 1) / 3, p)
}

/// `lambda(a)`, computed from the power residue and the fixed embedding
/// (`1 -> 1`, `a1 -> e(1/3)`, `a2 -> e(2/3)` under the canonical embedding).
pub fn cubic_symbol(cctx: &CubicContext, a: i64) -> Complex64 {
    let r = cubic_power_residue(cctx, a);
    let third = if cctx.is_canonical_embedding() { 1 } else { 2 };
    let k = if r == 0 {
        return Complex64::new(0.0, 0.0);
    } else if r == 1 {
        0
    } else if r == cctx.a1() {
        third
    } else {
        debug_assert_eq!(r, cctx.a2());
        2 * third
    };
    crate::arith::unit_root(k, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_prime, mod_mul};
    use crate::summation::compensated_complex_sum;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn primes(lo: u64, hi: u64) -> impl Iterator<Item = u64> {
        (lo..=hi).filter(|&p| is_prime(p) && p % 2 == 1)
    }

    #[test]
    fn evaluation_examples() {
        let ctx = PrimeContext::new(7).unwrap();
        let chi0 = DirichletCharacter::principal(&ctx);
        assert_eq!(chi0.evaluate(5), Complex64::new(1.0, 0.0));
        for j in 0..6 {
            let chi = DirichletCharacter::new(&ctx, j);
            assert_eq!(chi.evaluate(7 * 13), Complex64::new(0.0, 0.0));
            assert_eq!(chi.evaluate(0), Complex64::new(0.0, 0.0));
        }
        let chi3 = DirichletCharacter::new(&ctx, 3);
        assert!(close(chi3.evaluate(3), Complex64::new(-1.0, 0.0), 1e-15));
        assert_eq!(chi3.parity(), -1);
        assert!(close(chi3.evaluate(-1), Complex64::new(-1.0, 0.0), 1e-15));
        assert_eq!(DirichletCharacter::new(&ctx, 2).order(), 3);
        assert_eq!(chi0.conjugate(), chi0);
    }

    #[test]
    fn group_structure() {
        assert_eq!(enumerate_characters(&PrimeContext::new(3).unwrap()).count(), 2);
        assert_eq!(enumerate_characters(&PrimeContext::new(13).unwrap()).count(), 12);
        let ctx = PrimeContext::new(7).unwrap();
        let mut orders: Vec<u64> = enumerate_characters(&ctx).map(|c| c.order()).collect();
        assert!(enumerate_characters(&ctx).next().unwrap().is_principal());
        orders.sort();
        assert_eq!(orders, vec![1, 2, 3, 3, 6, 6]);
    }

    #[test]
    fn order_and_parity_match_values() {
        for p in primes(3, 101) {
            let ctx = PrimeContext::new(p).unwrap();
            for chi in enumerate_characters(&ctx) {
                let minus_one = chi.evaluate(-1);
                assert!(close(minus_one, Complex64::new(chi.parity() as f64, 0.0), 1e-12));
                // chi^order is principal, no smaller positive power is
                let ord = chi.order();
                assert!(chi.pow(ord as i64).is_principal());
                for d in 1..ord {
                    if ord % d == 0 {
                        assert!(!chi.pow(d as i64).is_principal());
                    }
                }
                assert!(chi.product(&chi.conjugate()).is_principal());
            }
        }
    }

    #[test]
    fn orthogonality() {
        for p in primes(3, 200) {
            let ctx = PrimeContext::new(p).unwrap();
            let tol = 1e-9 * p as f64;
            for chi in enumerate_characters(&ctx).skip(1) {
                let row = compensated_complex_sum((1..p as i64).map(|a| chi.evaluate(a)));
                assert!(row.norm() <= tol, "p = {p}, j = {}", chi.index());
            }
            for a in 1..p as i64 {
                let col = compensated_complex_sum(enumerate_characters(&ctx).map(|c| c.evaluate(a)));
                let expect = if a == 1 { (p - 1) as f64 } else { 0.0 };
                assert!(close(col, Complex64::new(expect, 0.0), tol), "p = {p}, a = {a}");
            }
        }
    }

    #[test]
    fn complete_multiplicativity_spot_check() {
        let mut s = 0x9E37_79B9_7F4A_7C15u64;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        for p in [7u64, 13, 101, 1009] {
            let ctx = PrimeContext::new(p).unwrap();
            for _ in 0..10_000 {
                let chi = DirichletCharacter::new(&ctx, next() % (p - 1));
                let a = (next() % (3 * p)) as i64 - p as i64;
                let b = (next() % (3 * p)) as i64 - p as i64;
                let lhs = chi.evaluate(a * b);
                let rhs = chi.evaluate(a) * chi.evaluate(b);
                assert!(close(lhs, rhs, 1e-12));
            }
        }
    }

    #[test]
    fn cubic_symbol_examples() {
        let c7 = CubicContext::new(7).unwrap();
        assert_eq!(cubic_symbol(&c7, 1), Complex64::new(1.0, 0.0));
        assert_eq!(cubic_power_residue(&c7, 2), 4);
        assert!(close(cubic_symbol(&c7, 2), crate::arith::unit_root(2, 3), 1e-15));
        assert_eq!(cubic_symbol(&c7, 14), Complex64::new(0.0, 0.0));
        for b in 1..7 {
            let cube = mod_pow(b, 3, 7) as i64;
            assert!(close(cubic_symbol(&c7, cube), Complex64::new(1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn cubic_symbol_is_order_three_character() {
        for p in primes(7, 500).filter(|p| p % 3 == 1) {
            let cctx = CubicContext::new(p).unwrap();
            for embed in [cctx.clone(), cctx.with_swapped_embedding()] {
                let lambda = cubic_character(&embed);
                assert_eq!(lambda.order(), 3);
                assert_eq!(lambda.pow(3), DirichletCharacter::principal(embed.base()));
                for a in 1..p as i64 {
                    let v = cubic_symbol(&embed, a);
                    assert!(close(v, lambda.evaluate(a), 1e-12), "p = {p}, a = {a}");
                    assert!(close(v * v * v, Complex64::new(1.0, 0.0), 1e-12));
                    let inv = embed.inverse(a).unwrap() as i64;
                    assert!(close(v * cubic_symbol(&embed, inv), Complex64::new(1.0, 0.0), 1e-12));
                    assert!(close(cubic_symbol(&embed, inv), v.conj(), 1e-12));
                }
                let w = cubic_symbol(&embed, embed.generator() as i64);
                assert!(w != Complex64::new(1.0, 0.0));
            }
            // residue a1 maps to e(1/3) under the canonical embedding
            let a = (1..p as i64).find(|&a| cubic_power_residue(&cctx, a) == cctx.a1()).unwrap();
            assert!(close(cubic_symbol(&cctx, a), crate::arith::unit_root(1, 3), 1e-15));
            assert_eq!(mod_mul(cctx.a1(), cctx.a2(), p), 1);
        }
    }
}
