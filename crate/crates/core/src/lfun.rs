//! `L(1, chi)` for non-principal characters modulo a prime, and the sums of
//! `|L(1, chi)|` over the character group.
//!
//! The primary route is the finite closed form obtained by expanding a
//! primitive `chi` in additive characters:
//!
//! ```text
//! L(1, chi) = -(1 / g(conj chi)) * sum_{a=1}^{p-1} conj chi(a) Log(1 - e(a/p))
//! ```
//!
//! The independent route is the Dirichlet series itself, truncated at `M`
//! terms with `M` chosen from a Polya-Vinogradov tail bound. The series is
//! regrouped by residue class mod `p` so that one pass over `n <= M` serves
//! every character.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::PrimeContext;
use crate::characters::DirichletCharacter;
use crate::dft::{ChirpZ, Direction};
use crate::error::{Error, Result};
use crate::expsums::classical_gauss;
use crate::summation::{compensated_sum, CompensatedComplexSum, CompensatedSum};
use crate::weights::{c_value, constant_ct};

/// Default cap on the number of series terms for the truncated route.
pub const DEFAULT_TERM_CAP: u64 = 100_000_000;

/// `Log(1 - e(a/p))` on the principal branch, for `p` not dividing `a`.
///
/// `1 - e(x) = 2 sin(pi x) e((x - 1/2)/2)`, and for `x` in `(0, 1)` the sine
/// is positive and the argument lies in `(-pi/2, pi/2)`.
pub fn log_one_minus_e(a: u64, p: u64) -> Complex64 {
    let a = a % p;
    debug_assert!(a != 0);
    let near = a.min(p - a);
    let s = (PI * near as f64 / p as f64).sin();
    Complex64::new((2.0 * s).ln(), PI * a as f64 / p as f64 - PI / 2.0)
}

/// `L(1, chi)` from the finite closed form, O(p).
pub fn l_one_exact(ctx: &PrimeContext, chi: &DirichletCharacter<'_>) -> Result<Complex64> {
    if chi.is_principal() {
        return Err(Error::PrincipalCharacter);
    }
    let conj = chi.conjugate();
    let gauss = classical_gauss(ctx, &conj).value;
    let mut acc = CompensatedComplexSum::new();
    for a in 1..ctx.p() {
        acc.add(conj.evaluate(a as i64) * log_one_minus_e(a, ctx.p()));
    }
    Ok(-acc.value() / gauss)
}

/// Number of series terms `M` with `2 sqrt(p) ln(p) / M <= eps`.
pub fn truncation_length(p: u64, eps: f64) -> u64 {
    let pf = p as f64;
    (2.0 * pf.sqrt() * pf.ln() / eps).ceil() as u64
}

/// Partial sums `sum_{n <= M, n = r (mod p)} 1/n` for every residue `r`.
#[derive(Debug, Clone)]
pub struct ResidueClassSums {
    p: u64,
    terms: u64,
    sums: Vec<f64>,
}

impl ResidueClassSums {
    pub fn new(p: u64, terms: u64) -> Self {
        let mut acc = vec![CompensatedSum::new(); p as usize];
        // descending n so each class accumulates its smallest terms first
        for n in (1..=terms).rev() {
            acc[(n % p) as usize].add(1.0 / n as f64);
        }
        Self { p, terms, sums: acc.iter().map(|s| s.value()).collect() }
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// `sum_{n <= M} chi(n) / n`.
    pub fn evaluate(&self, chi: &DirichletCharacter<'_>) -> Complex64 {
        debug_assert_eq!(chi.context().p(), self.p);
        let mut acc = CompensatedComplexSum::new();
        for r in 1..self.p {
            acc.add(chi.evaluate(r as i64) * self.sums[r as usize]);
        }
        acc.value()
    }
}

/// A truncated-series value of `L(1, chi)` with its truncation length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedL {
    pub value: Complex64,
    pub terms: u64,
}

fn check_tolerance(eps: f64) -> Result<()> {
    if !(1e-8..=1e-2).contains(&eps) {
        return Err(Error::BadTolerance(eps));
    }
    Ok(())
}

/// Class sums sized for tolerance `eps`, shared by every character mod `p`.
pub fn truncated_class_sums(ctx: &PrimeContext, eps: f64, cap: u64) -> Result<ResidueClassSums> {
    check_tolerance(eps)?;
    let needed = truncation_length(ctx.p(), eps);
    if needed > cap {
        return Err(Error::TailBoundUnreachable { needed, cap });
    }
    Ok(ResidueClassSums::new(ctx.p(), needed))
}

/// `sum_{n <= M} chi(n)/n` with `M` from the tail bound, capped at `cap`.
pub fn l_one_truncated_capped(
    ctx: &PrimeContext,
    chi: &DirichletCharacter<'_>,
    eps: f64,
    cap: u64,
) -> Result<TruncatedL> {
    if chi.is_principal() {
        return Err(Error::PrincipalCharacter);
    }
    let sums = truncated_class_sums(ctx, eps, cap)?;
    Ok(TruncatedL { value: sums.evaluate(chi), terms: sums.terms() })
}

pub fn l_one_truncated(ctx: &PrimeContext, chi: &DirichletCharacter<'_>, eps: f64) -> Result<TruncatedL> {
    l_one_truncated_capped(ctx, chi, eps, DEFAULT_TERM_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LMethod {
    Exact,
    Truncated { terms: u64 },
}

/// `L(1, chi_j)` for every non-principal `j`, stored at position `j - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LValueTable {
    pub p: u64,
    pub values: Vec<Complex64>,
    pub method: LMethod,
}

impl LValueTable {
    /// `L(1, chi_j)`, or `None` for the principal index.
    pub fn get(&self, j: u64) -> Option<Complex64> {
        let j = j % (self.p - 1);
        if j == 0 {
            None
        } else {
            Some(self.values[(j - 1) as usize])
        }
    }

    /// `|L(1, chi_j)|` indexed by `j`, with 0 in the principal slot.
    pub fn abs_by_index(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.values.iter().map(|v| v.norm())).collect()
    }

    /// Checks finiteness, the nonvanishing sanity bound and conjugate symmetry.
    pub fn validate(&self) -> Result<()> {
        if self.values.len() as u64 != self.p - 2 {
            return Err(Error::InvalidArgument(format!(
                "table for p = {} has {} entries",
                self.p,
                self.values.len()
            )));
        }
        for (i, v) in self.values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() || v.norm() <= 1e-6 {
                return Err(Error::InvalidArgument(format!("bad L-value at index {}", i + 1)));
            }
            let mirror = self.values[self.values.len() - 1 - i];
            let gap = (mirror - v.conj()).norm();
            if gap > 1e-9 {
                return Err(Error::CrossCheckFailed { what: "conjugate symmetry", gap, tol: 1e-9 });
            }
        }
        Ok(())
    }
}

/// All `L(1, chi)` at once from two length-`(p-1)` DFTs: one of
/// `Log(1 - e(g^t/p))` and one of `e(g^t/p)` (the conjugate Gauss sums).
pub fn bulk_l_one(ctx: &PrimeContext) -> LValueTable {
    let p = ctx.p();
    let n = ctx.group_order() as usize;
    let plan = ChirpZ::new(n);
    let logs: Vec<Complex64> = (0..n as u64).map(|t| log_one_minus_e(ctx.power(t), p)).collect();
    let adds: Vec<Complex64> = (0..n as u64).map(|t| ctx.e(ctx.power(t) as i64)).collect();
    let log_sums = plan.transform(&logs, Direction::Forward);
    let gauss_conj = plan.transform(&adds, Direction::Forward);
    let values = (1..n).map(|j| -log_sums[j] / gauss_conj[j]).collect();
    LValueTable { p, values, method: LMethod::Exact }
}

/// `sum_{chi != chi_0} |L(1, chi)|`.
pub fn lemma4_sum(table: &LValueTable) -> f64 {
    compensated_sum(table.values.iter().map(|v| v.norm()))
}

/// `sum |L(1, chi)|` over even non-principal characters.
pub fn lemma3_even_sum(table: &LValueTable) -> f64 {
    parity_sum(table, 0)
}

/// `sum |L(1, chi)|` over odd characters.
pub fn odd_sum(table: &LValueTable) -> f64 {
    parity_sum(table, 1)
}

fn parity_sum(table: &LValueTable, parity: u64) -> f64 {
    compensated_sum(
        table
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as u64 + 1) % 2 == parity)
            .map(|(_, v)| v.norm()),
    )
}

/// `sum_{a=1}^{p-1} | sum_{chi != chi_0} chi(a) |L(1, chi)| |`.
///
/// The inner sums for all `a = g^k` form one backward DFT of `|L(1, chi_j)|`.
pub fn lemma2_statistic(table: &LValueTable) -> f64 {
    let weights: Vec<Complex64> = table.abs_by_index().into_iter().map(|w| Complex64::new(w, 0.0)).collect();
    let inner = ChirpZ::new(weights.len()).transform(&weights, Direction::Backward);
    compensated_sum(inner.iter().map(|z| z.norm()))
}

/// `sum_{chi != chi_0} chi(t) |L(1, chi)|` against its main term `C C_t p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedLSum {
    pub computed: f64,
    /// Imaginary part; vanishes by the `chi <-> conj chi` pairing.
    pub imaginary: f64,
    pub main_term: f64,
}

pub fn lemma5_weighted(ctx: &PrimeContext, table: &LValueTable, t: u64) -> Result<WeightedLSum> {
    let p = ctx.p();
    if !(2..p).contains(&t) {
        return Err(Error::BadT { t, p });
    }
    let mut acc = CompensatedComplexSum::new();
    for (i, v) in table.values.iter().enumerate() {
        let chi = DirichletCharacter::new(ctx, i as u64 + 1);
        acc.add(chi.evaluate(t as i64) * v.norm());
    }
    let z = acc.value();
    Ok(WeightedLSum {
        computed: z.re,
        imaginary: z.im,
        main_term: c_value() * constant_ct(t)? * p as f64,
    })
}
