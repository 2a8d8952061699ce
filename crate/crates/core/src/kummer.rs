//! The angles `theta_p` of Kummer's cubic sums and their partial sums.
//!
//! For `p = 1 mod 3`, `S_p = sum_{a=1}^{p} e(a^3/p)` is real with
//! `|S_p| <= 2 sqrt(p)`, so `S_p / (2 sqrt(p)) = cos(2 pi theta_p)` for a
//! unique `theta_p` in `[0, 1/2]`. The census counts primes by which third of
//! `[-1, 1]` the cosine lands in; the Patterson report compares the running
//! sum of cosines with `d X^{5/6} / ln X`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::CubicContext;
use crate::error::{Error, Result};
use crate::expsums::raw_cubic_sum;
use crate::sieve::primes_one_mod_three;
use crate::summation::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KummerRecord {
    pub p: u64,
    pub s_p: f64,
    pub cos_theta: f64,
    /// In `[0, 1/2]`.
    pub theta: f64,
    pub class: u8,
}

/// Interval class of a cosine: `[-1, -1/2) -> 1`, `[-1/2, 1/2) -> 2`,
/// `[1/2, 1] -> 3`.
pub fn interval_class(c: f64) -> u8 {
    if c < -0.5 {
        1
    } else if c < 0.5 {
        2
    } else {
        3
    }
}

pub fn kummer_record(p: u64) -> Result<KummerRecord> {
    if p % 3 != 1 {
        return Err(Error::WrongResidueClass(p));
    }
    let cctx = CubicContext::new(p)?;
    let s_p = raw_cubic_sum(&cctx)?;
    let cos_theta = s_p / (2.0 * (p as f64).sqrt());
    if cos_theta.abs() > 1.0 + 1e-9 {
        return Err(Error::CrossCheckFailed { what: "Weil bound on S_p", gap: cos_theta.abs() - 1.0, tol: 1e-9 });
    }
    let theta = cos_theta.clamp(-1.0, 1.0).acos() / (2.0 * PI);
    Ok(KummerRecord { p, s_p, cos_theta, theta, class: interval_class(cos_theta) })
}

/// Records for every prime `p = 1 mod 3` up to `x`, in ascending `p`.
pub fn kummer_records(x: u64) -> Result<Vec<KummerRecord>> {
    primes_one_mod_three(7, x).into_par_iter().map(kummer_record).collect()
}

/// Class counts `(count1, count2, count3)` over primes `p = 1 mod 3`, `p <= x`.
pub fn census_of(records: &[KummerRecord]) -> (u64, u64, u64) {
    records.iter().fold((0, 0, 0), |(a, b, c), r| match r.class {
        1 => (a + 1, b, c),
        2 => (a, b + 1, c),
        _ => (a, b, c + 1),
    })
}

pub fn kummer_census(x: u64) -> Result<(u64, u64, u64)> {
    Ok(census_of(&kummer_records(x)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PattersonReport {
    #[serde(rename = "X")]
    pub x: u64,
    pub primes: u64,
    pub partial_sum: f64,
    pub main_term: f64,
    pub d: f64,
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Gamma(x)` by the Lanczos approximation (`g = 7`, nine terms), with the
/// reflection formula below `1/2`.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

pub fn gamma_two_thirds() -> f64 {
    gamma(2.0 / 3.0)
}

/// `d = 2 (2 pi)^{2/3} / (5 Gamma(2/3))`.
pub fn patterson_constant() -> f64 {
    2.0 * (2.0 * PI).powf(2.0 / 3.0) / (5.0 * gamma_two_thirds())
}

pub fn patterson_from_records(x: u64, records: &[KummerRecord]) -> PattersonReport {
    let xf = x as f64;
    let d = patterson_constant();
    PattersonReport {
        x,
        primes: records.len() as u64,
        partial_sum: compensated_sum(records.iter().map(|r| r.cos_theta)),
        main_term: d * xf.powf(5.0 / 6.0) / xf.ln(),
        d,
    }
}

pub fn patterson_report(x: u64) -> Result<PattersonReport> {
    if x < 7 {
        return Err(Error::InvalidArgument(format!("cutoff X = {x} below 7")));
    }
    Ok(patterson_from_records(x, &kummer_records(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{is_prime, mod_pow};

    /// `S_p` straight from the definition, cubes by repeated multiplication.
    fn brute_cos(p: u64) -> f64 {
        let s: f64 = (1..=p).map(|a| (2.0 * PI * mod_pow(a, 3, p) as f64 / p as f64).cos()).sum();
        s / (2.0 * (p as f64).sqrt())
    }

    #[test]
    fn record_for_seven() {
        let r = kummer_record(7).unwrap();
        let expect = (1.0 + 6.0 * (2.0 * PI / 7.0).cos()) / (2.0 * 7f64.sqrt());
        assert!((r.cos_theta - expect).abs() < 1e-12);
        assert!((r.cos_theta - 0.89595).abs() < 1e-5);
        assert_eq!(r.class, 3);
        assert!((0.0..=0.5).contains(&r.theta));
        assert!(((2.0 * PI * r.theta).cos() - r.cos_theta).abs() < 1e-12);
        let r13 = kummer_record(13).unwrap();
        assert!(r13.cos_theta.abs() <= 1.0);
        assert_eq!(r13.class, interval_class(r13.cos_theta));
        assert_eq!(kummer_record(11), Err(Error::WrongResidueClass(11)));
    }

    #[test]
    fn class_boundaries() {
        assert_eq!(interval_class(-1.0), 1);
        assert_eq!(interval_class(-0.5), 2);
        assert_eq!(interval_class(0.5), 3);
        assert_eq!(interval_class(1.0), 3);
        assert_eq!(interval_class(0.4999999), 2);
    }

    #[test]
    fn census_small_and_golden() {
        assert_eq!(kummer_census(7).unwrap(), (0, 0, 1));
        // frozen from the brute-force oracle below
        assert_eq!(kummer_census(500).unwrap(), GOLDEN_500);
        let mut oracle = (0, 0, 0);
        for p in (7..=500).filter(|&p| p % 3 == 1 && is_prime(p)) {
            match interval_class(brute_cos(p)) {
                1 => oracle.0 += 1,
                2 => oracle.1 += 1,
                _ => oracle.2 += 1,
            }
        }
        assert_eq!(oracle, GOLDEN_500);
    }

    const GOLDEN_500: (u64, u64, u64) = (7, 14, 24);

    #[test]
    fn census_is_monotone_and_partitions() {
        let mut prev = (0, 0, 0);
        for x in [7u64, 50, 100, 250, 500, 1000] {
            let c = kummer_census(x).unwrap();
            assert!(c.0 >= prev.0 && c.1 >= prev.1 && c.2 >= prev.2);
            assert_eq!(c.0 + c.1 + c.2, primes_one_mod_three(7, x).len() as u64);
            prev = c;
        }
    }

    #[test]
    fn cosine_bound_and_dual_path() {
        for r in kummer_records(10_000).unwrap() {
            assert!(r.cos_theta.abs() <= 1.0 + 1e-9);
            assert!((r.cos_theta - brute_cos(r.p)).abs() < 1e-9);
        }
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-13);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-10);
        assert!((gamma(5.0) - 24.0).abs() < 1e-11);
        let refl = gamma(1.0 / 3.0) * gamma_two_thirds();
        assert!((refl - 2.0 * PI / 3f64.sqrt()).abs() < 1e-10);
        assert!((gamma_two_thirds() - 1.354_118).abs() < 1e-6);
    }

    #[test]
    fn patterson_small() {
        let d = patterson_constant();
        assert!((d - 1.005_827_283_528_674).abs() < 1e-9, "{d}");
        let rep = patterson_report(7).unwrap();
        assert!((rep.partial_sum - 0.89595).abs() < 1e-5);
        let rep = patterson_report(5000).unwrap();
        assert!(rep.partial_sum.is_finite());
        assert!(rep.partial_sum.abs() <= rep.primes as f64);
    }
}
