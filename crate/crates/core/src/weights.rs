//! The multiplicative weight `r(n)`, the constant `C = sum r(n)^2 / n^2`,
//! the divisor-sum constants `C_t` and the truncated convolution kernel
//! `r(n, N)`.
//!
//! `r(q^a) = binom(2a, a) / 4^a` does not depend on the prime `q`, and every
//! value is a dyadic rational, so `r` and its Dirichlet convolutions are
//! computed exactly. `C_t` divides by `s^2 t` and is computed as an exact
//! big rational before conversion.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::sieve::primes_up_to;
use crate::summation::CompensatedSum;

/// Largest prime exponent accepted by [`r`].
pub const MAX_EXPONENT: u32 = 30;

/// `numerator / 2^log2_denominator`, kept with an odd numerator (or zero
/// with denominator exponent zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: u128,
    log2_denominator: u32,
}

impl DyadicRational {
    pub const ZERO: Self = Self { numerator: 0, log2_denominator: 0 };
    pub const ONE: Self = Self { numerator: 1, log2_denominator: 0 };

    pub fn new(numerator: u128, log2_denominator: u32) -> Self {
        if numerator == 0 {
            return Self::ZERO;
        }
        let shift = numerator.trailing_zeros().min(log2_denominator);
        Self {
            numerator: numerator >> shift,
            log2_denominator: log2_denominator - shift,
        }
    }

    pub fn numerator(&self) -> u128 {
        self.numerator
    }

    pub fn log2_denominator(&self) -> u32 {
        self.log2_denominator
    }

    pub fn checked_mul(self, other: Self) -> Result<Self> {
        let numerator = self.numerator.checked_mul(other.numerator).ok_or(Error::Overflow)?;
        let log2 = self
            .log2_denominator
            .checked_add(other.log2_denominator)
            .ok_or(Error::Overflow)?;
        Ok(Self::new(numerator, log2))
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        let log2 = self.log2_denominator.max(other.log2_denominator);
        let lift = |x: Self| -> Result<u128> {
            let shift = log2 - x.log2_denominator;
            if shift >= 128 || (x.numerator != 0 && x.numerator.leading_zeros() < shift) {
                return Err(Error::Overflow);
            }
            Ok(x.numerator << shift)
        };
        let sum = lift(self)?.checked_add(lift(other)?).ok_or(Error::Overflow)?;
        Ok(Self::new(sum, log2))
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.log2_denominator as i32)
    }

    pub fn to_big_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numerator), BigInt::one() << self.log2_denominator as usize)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }
}

impl std::fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.log2_denominator == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.log2_denominator)
        }
    }
}

/// `r(q^a) = binom(2a, a) / 4^a` for any prime `q`.
pub fn r_prime_power(a: u32) -> Result<DyadicRational> {
    if a > MAX_EXPONENT {
        return Err(Error::Overflow);
    }
    // binom(2a, a) = binom(2a - 2, a - 1) * 2 (2a - 1) / a
    let mut binom: u128 = 1;
    for i in 1..=a as u128 {
        binom = binom
            .checked_mul(2 * (2 * i - 1))
            .ok_or(Error::Overflow)?
            / i;
    }
    Ok(DyadicRational::new(binom, 2 * a))
}

fn r_from_exponents<I: IntoIterator<Item = u32>>(exponents: I) -> Result<DyadicRational> {
    exponents
        .into_iter()
        .try_fold(DyadicRational::ONE, |acc, a| acc.checked_mul(r_prime_power(a)?))
}

/// The multiplicative weight `r(n)`, with `r(1) = 1`.
pub fn r(n: u64) -> Result<DyadicRational> {
    if n == 0 {
        return Err(Error::InvalidArgument("r(n) needs n >= 1".into()));
    }
    r_from_exponents(factorize(n).into_iter().map(|(_, a)| a))
}

/// Every divisor of `n` as its exponent vector against `factors`.
fn divisor_exponents(factors: &[(u64, u32)]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(factors.len())];
    for &(_, a) in factors {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=a).map(move |e| {
                    let mut v = prefix.clone();
                    v.push(e);
                    v
                })
            })
            .collect();
    }
    out
}

fn value_of(factors: &[(u64, u32)], exps: &[u32]) -> u64 {
    factors.iter().zip(exps).map(|(&(q, _), &e)| q.pow(e)).product()
}

/// `sum_{d | n} r(d) r(n/d)`, exactly. Always 1, since
/// `sum_a r(q^a) x^a = (1 - x)^(-1/2)`.
pub fn r_convolution_identity(n: u64) -> Result<DyadicRational> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let factors = factorize(n);
    divisor_exponents(&factors).iter().try_fold(DyadicRational::ZERO, |acc, exps| {
        let rd = r_from_exponents(exps.iter().copied())?;
        let rc = r_from_exponents(factors.iter().zip(exps).map(|(&(_, a), &e)| a - e))?;
        acc.checked_add(rd.checked_mul(rc)?)
    })
}

/// `r(n, N) = sum r(d) r(n/d)` over divisors with both `d <= N` and
/// `n/d <= N`.
pub fn r_truncated_kernel(n: u64, big_n: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let factors = factorize(n);
    let mut acc = DyadicRational::ZERO;
    for exps in divisor_exponents(&factors) {
        let d = value_of(&factors, &exps);
        if d as f64 > big_n || (n / d) as f64 > big_n {
            continue;
        }
        let rd = r_from_exponents(exps.iter().copied())?;
        let rc = r_from_exponents(factors.iter().zip(&exps).map(|(&(_, a), &e)| a - e))?;
        acc = acc.checked_add(rd.checked_mul(rc)?)?;
    }
    Ok(acc.to_f64())
}

/// `C_t = sum_{s | t} r(s) r(st) / (s^2 t)` as an exact rational.
pub fn constant_ct_exact(t: u64) -> Result<BigRational> {
    if t == 0 {
        return Err(Error::InvalidArgument("C_t needs t >= 1".into()));
    }
    let factors = factorize(t);
    let mut acc = BigRational::zero();
    for exps in divisor_exponents(&factors) {
        let s = value_of(&factors, &exps);
        let rs = r_from_exponents(exps.iter().copied())?;
        let rst = r_from_exponents(factors.iter().zip(&exps).map(|(&(_, a), &e)| a + e))?;
        let den = BigInt::from(s) * BigInt::from(s) * BigInt::from(t);
        acc += rs.to_big_rational() * rst.to_big_rational() / BigRational::from_integer(den);
    }
    Ok(acc)
}

pub fn constant_ct(t: u64) -> Result<f64> {
    constant_ct_exact(t).map(|v| v.to_f64().expect("C_t is a finite rational"))
}

/// Local Euler factor `sum_{m=0}^{m_max} r(q^m)^2 / q^(2m)`.
pub fn local_factor_partial(q: u64, m_max: u32) -> f64 {
    let x = 1.0 / (q as f64 * q as f64);
    let mut r_m = 1.0;
    let mut x_m = 1.0;
    let mut acc = CompensatedSum::new();
    acc.add(1.0);
    for m in 1..=m_max {
        r_m *= (2 * m - 1) as f64 / (2 * m) as f64;
        x_m *= x;
        acc.add(r_m * r_m * x_m);
    }
    acc.value()
}

/// Local factor summed until the increment drops below `tol`, with a bound
/// on the omitted remainder.
fn local_factor(q: u64, tol: f64) -> (f64, f64) {
    let x = 1.0 / (q as f64 * q as f64);
    let mut r_m = 1.0;
    let mut x_m = 1.0;
    let mut acc = CompensatedSum::new();
    acc.add(1.0);
    let mut m = 0u32;
    loop {
        m += 1;
        r_m *= (2 * m - 1) as f64 / (2 * m) as f64;
        x_m *= x;
        let term = r_m * r_m * x_m;
        acc.add(term);
        if term < tol {
            // r(q^m) is decreasing in m, so the rest is at most a geometric tail
            return (acc.value(), term * x / (1.0 - x));
        }
    }
}

/// Number of terms in the direct-series cross-check of `C`.
pub const DIRECT_SERIES_TERMS: u64 = 1_000_000;

/// `C` with certified bounds from two independent routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantEstimate {
    /// Truncated Euler product over primes `<= prime_cutoff`.
    pub value: f64,
    /// Rigorous upper bound: value plus omitted local remainders and the
    /// tail over primes above the cutoff.
    pub upper: f64,
    /// `upper - value`.
    pub tail_bound: f64,
    /// `sum_{n <= DIRECT_SERIES_TERMS} r(n)^2 / n^2`, a lower bound for `C`.
    pub direct_series: f64,
    /// Bound on the omitted direct-series tail, `1 / (4 M)`.
    pub direct_tail_bound: f64,
    pub prime_cutoff: u64,
}

impl ConstantEstimate {
    /// The two routes overlap: each lower bound is below the other upper bound.
    pub fn routes_agree(&self) -> bool {
        let slack = 1e-13;
        self.direct_series <= self.upper + slack
            && self.value <= self.direct_series + self.direct_tail_bound + slack
    }
}

/// `r(n)^2` for every `n <= limit` via a smallest-prime-factor sieve.
fn r_squared_table(limit: usize) -> Vec<f64> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut rp = vec![1.0f64; 64];
    for a in 1..64 {
        rp[a] = rp[a - 1] * (2 * a - 1) as f64 / (2 * a) as f64;
    }
    let mut out = vec![0.0; limit + 1];
    if limit >= 1 {
        out[1] = 1.0;
    }
    for n in 2..=limit {
        let q = spf[n] as usize;
        let mut m = n;
        let mut a = 0;
        while m % q == 0 {
            m /= q;
            a += 1;
        }
        out[n] = out[m] * rp[a] * rp[a];
    }
    out
}

pub fn constant_c(prime_cutoff: u64, series_tol: f64) -> Result<ConstantEstimate> {
    if prime_cutoff < 100 {
        return Err(Error::InvalidArgument("prime_cutoff must be at least 100".into()));
    }
    if !(series_tol >= 1e-14) {
        return Err(Error::InvalidArgument("series_tol must be at least 1e-14".into()));
    }
    let mut value = 1.0;
    let mut upper = 1.0;
    for q in primes_up_to(prime_cutoff) {
        let (f, rem) = local_factor(q, series_tol);
        value *= f;
        upper *= f + rem;
    }
    // each omitted factor is at most 1 + 1/(2 q^2), and sum_{n > P} 1/n^2 < 1/P
    upper *= (0.5 / prime_cutoff as f64).exp();

    let table = r_squared_table(DIRECT_SERIES_TERMS as usize);
    let direct_series = compensated_direct(&table);
    Ok(ConstantEstimate {
        value,
        upper,
        tail_bound: upper - value,
        direct_series,
        direct_tail_bound: 0.25 / DIRECT_SERIES_TERMS as f64,
        prime_cutoff,
    })
}

fn compensated_direct(r_sq: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    // descending so the small terms accumulate first
    for n in (1..r_sq.len()).rev() {
        let nf = n as f64;
        acc.add(r_sq[n] / (nf * nf));
    }
    acc.value()
}

pub const DEFAULT_PRIME_CUTOFF: u64 = 100_000;
pub const DEFAULT_SERIES_TOL: f64 = 1e-14;

/// `C` computed once with the default cutoff and cached.
pub fn constant_c_default() -> &'static ConstantEstimate {
    static CELL: OnceLock<ConstantEstimate> = OnceLock::new();
    CELL.get_or_init(|| {
        constant_c(DEFAULT_PRIME_CUTOFF, DEFAULT_SERIES_TOL).expect("default parameters are valid")
    })
}

/// Shorthand for the cached value of `C`.
pub fn c_value() -> f64 {
    constant_c_default().value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd;
    use proptest::prelude::*;

    fn dy(num: u128, log2: u32) -> DyadicRational {
        DyadicRational::new(num, log2)
    }

    #[test]
    fn r_examples() {
        assert!(r(1).unwrap().is_one());
        assert_eq!(r(2).unwrap(), dy(1, 1));
        assert_eq!(r(4).unwrap(), dy(3, 3));
        assert_eq!(r(9).unwrap(), dy(3, 3));
        assert_eq!(r(6).unwrap(), dy(1, 2));
        assert_eq!(r(8).unwrap(), dy(5, 4));
        assert_eq!(r(16).unwrap(), dy(35, 7));
        assert_eq!(r(0).unwrap_err(), Error::InvalidArgument("r(n) needs n >= 1".into()));
        assert_eq!(r(1 << 31).unwrap_err(), Error::Overflow);
        // binom(60, 30) / 4^30
        let top = r(1 << 30).unwrap().to_f64();
        assert!((top - 118_264_581_564_861_424.0 / 2f64.powi(60)).abs() < 1e-18);
    }

    #[test]
    fn dyadic_normalization_and_arithmetic() {
        assert_eq!(dy(8, 5), dy(1, 2));
        assert_eq!(dy(0, 9), DyadicRational::ZERO);
        assert_eq!(dy(3, 3).checked_add(dy(1, 2)).unwrap().checked_add(dy(3, 3)).unwrap(), DyadicRational::ONE);
        assert_eq!(dy(u128::MAX, 0).checked_mul(dy(3, 0)).unwrap_err(), Error::Overflow);
        assert_eq!(dy(5, 4).to_string(), "5/2^4");
    }

    #[test]
    fn convolution_square_is_one() {
        assert!(r_convolution_identity(1).unwrap().is_one());
        assert!(r_convolution_identity(4).unwrap().is_one());
        assert!(r_convolution_identity(360).unwrap().is_one());
        assert!(r_convolution_identity(1 << 30).unwrap().is_one());
        for n in 1..=2000 {
            assert!(r_convolution_identity(n).unwrap().is_one(), "n = {n}");
        }
    }

    #[test]
    fn truncated_kernel() {
        assert_eq!(r_truncated_kernel(6, 2.0).unwrap(), 0.0);
        assert_eq!(r_truncated_kernel(12, 3.0).unwrap(), 0.0);
        for n in 1..=100 {
            assert_eq!(r_truncated_kernel(n, 100.0).unwrap(), 1.0);
            assert_eq!(r_truncated_kernel(n, (n as f64).sqrt() - 1e-9).unwrap(), 0.0);
        }
        // n = 12, N = 4: pairs (3,4), (4,3) only
        let expect = 2.0 * 0.5 * 0.375;
        assert_eq!(r_truncated_kernel(12, 4.0).unwrap(), expect);
    }

    #[test]
    fn ct_examples() {
        assert_eq!(constant_ct(1).unwrap(), 1.0);
        assert_eq!(constant_ct(2).unwrap(), 35.0 / 128.0);
        let c3 = constant_ct_exact(3).unwrap();
        assert_eq!(c3, BigRational::new(25.into(), 144.into()));
        // s = 1: 3/32, s = 2: 5/512, s = 4: 105/65536
        assert_eq!(constant_ct_exact(4).unwrap(), BigRational::new(6889.into(), 65536.into()));
    }

    #[test]
    fn ct_bounds() {
        for t in 1..=10_000u64 {
            let ct = constant_ct(t).unwrap();
            let factors = factorize(t);
            let crude = r(t).unwrap().to_f64() / t as f64
                + divisor_exponents(&factors)
                    .iter()
                    .map(|e| value_of(&factors, e))
                    .filter(|&s| s >= 2)
                    .map(|s| 1.0 / ((s * s) as f64 * t as f64))
                    .sum::<f64>();
            assert!(ct > 0.0 && ct <= 1.0, "t = {t}");
            assert!(ct <= crude + 1e-15, "t = {t}");
        }
    }

    #[test]
    fn constant_c_routes() {
        assert_eq!(local_factor_partial(2, 1), 1.0625);
        let est = constant_c(DEFAULT_PRIME_CUTOFF, DEFAULT_SERIES_TOL).unwrap();
        assert!(est.routes_agree(), "{est:?}");
        assert!(est.value > 1.0 && est.value < 1.3);
        assert!(est.direct_series <= est.upper);
        assert!(est.tail_bound < 1e-5);
        assert!((est.value - 1.130_749_793).abs() < 1e-5);
        assert!(constant_c(10, 1e-14).is_err());
        assert!(constant_c(1000, 1e-16).is_err());
    }

    proptest! {
        #[test]
        fn r_is_multiplicative(m in 1u64..1_000_000, n in 1u64..1_000_000) {
            prop_assume!(gcd(m, n) == 1);
            let lhs = r(m * n).unwrap();
            let rhs = r(m).unwrap().checked_mul(r(n).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            let v = lhs.to_f64();
            prop_assert!(v > 0.0 && v <= 1.0);
        }
    }
}
