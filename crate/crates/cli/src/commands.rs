//! Subcommand implementations. Each returns a [`RunRecord`], a CSV view of
//! the same results, and whether every enforced check passed.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use kummerlab_core::arith::reduce;
use kummerlab_core::characters::enumerate_characters;
use kummerlab_core::expsums::{bulk_generalized_gauss, generalized_gauss, kummer_sum};
use kummerlab_core::kummer::{census_of, kummer_records, patterson_from_records};
use kummerlab_core::lfun::{lemma2_statistic, lemma3_even_sum, lemma4_sum, lemma5_weighted, odd_sum};
use kummerlab_core::moments::{
    fourth_moment, lemma1_identity_check, lemma1_principal_check, second_moment, weighted_fourth_constants,
    weighted_fourth_moment_with, weighted_second_moment_with, MomentReport,
};
use kummerlab_core::sieve::primes_one_mod_three;
use kummerlab_core::weights::{constant_c_default, constant_ct, constant_ct_exact};
use kummerlab_core::{CubicContext, Error, PrimeContext};

use crate::cache::Cache;
use crate::params;
use crate::record::{RunRecord, Timer};
use crate::row;
use crate::table::Table;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or inadmissible input: exit code 2.
    Usage(String),
    /// A computation or internal check failed: exit code 1.
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Overflow | Error::CrossCheckFailed { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub struct CommandOutput {
    pub record: RunRecord,
    pub table: Table,
    pub ok: bool,
}

type CmdResult = Result<CommandOutput, CliError>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn cubic(p: u64) -> Result<CubicContext, CliError> {
    Ok(CubicContext::from_context(std::sync::Arc::new(PrimeContext::new(p)?))?)
}

fn check_twist(p: u64, n: i64) -> Result<(), CliError> {
    if reduce(n, p) == 0 {
        return Err(Error::BadTwist { n, p }.into());
    }
    Ok(())
}

// ---------------------------------------------------------------- verify

/// Cap on failures listed per check; the count is always exact.
const LISTED_FAILURES: usize = 50;

#[derive(Debug, Clone, Serialize)]
struct Failure {
    p: u64,
    n: Option<i64>,
    chi: Option<u64>,
    gap: f64,
}

#[derive(Debug, Clone, Serialize)]
struct CheckSummary {
    name: &'static str,
    /// Whether a violation makes the command fail.
    enforced: bool,
    tolerance: &'static str,
    cases: u64,
    /// Largest observed value of the checked quantity, in the tolerance's units.
    max_gap: f64,
    failure_count: u64,
    failures: Vec<Failure>,
}

struct Check {
    name: &'static str,
    enforced: bool,
    tolerance: &'static str,
    cases: u64,
    max_gap: f64,
    failures: Vec<Failure>,
}

impl Check {
    fn new(name: &'static str, enforced: bool, tolerance: &'static str) -> Self {
        Self { name, enforced, tolerance, cases: 0, max_gap: 0.0, failures: Vec::new() }
    }

    /// Records one case; `gap` is normalized so that `gap <= 1` passes.
    fn case(&mut self, p: u64, n: Option<i64>, chi: Option<u64>, gap: f64) {
        self.cases += 1;
        self.max_gap = self.max_gap.max(gap);
        if gap > 1.0 || gap.is_nan() {
            self.failures.push(Failure { p, n, chi, gap });
        }
    }

    fn merge(&mut self, other: Check) {
        self.cases += other.cases;
        self.max_gap = self.max_gap.max(other.max_gap);
        self.failures.extend(other.failures);
    }

    fn summary(self) -> CheckSummary {
        CheckSummary {
            name: self.name,
            enforced: self.enforced,
            tolerance: self.tolerance,
            cases: self.cases,
            max_gap: self.max_gap,
            failure_count: self.failures.len() as u64,
            failures: self.failures.into_iter().take(LISTED_FAILURES).collect(),
        }
    }
}

fn fresh_checks(stated_principal: bool) -> Vec<Check> {
    vec![
        Check::new("identity_nonprincipal", true, "gap <= 1e-6 p and |Im rhs| <= 1e-8 p"),
        Check::new("identity_principal", true, "gap <= 1e-6 p, leading term 2p+1"),
        Check::new("identity_principal_as_stated", stated_principal, "gap <= 1e-6 p, leading term 3"),
        Check::new("second_moment_orthogonality", true, "|sum - (p-1)^2| <= 1e-6 p^2"),
        Check::new("cauchy_schwarz", true, "M4 >= M2^2 / (p-1)"),
        Check::new("embedding_independence", true, "relative change <= 1e-9"),
        Check::new("bulk_vs_naive", true, "max |bulk - naive| <= 1e-8 sqrt(p)"),
        Check::new("l_table_symmetry", true, "conjugate pairs within 1e-9"),
        Check::new("brute_force_oracle", true, "relative deviation <= 1e-9, p <= 61"),
    ]
}

const BRUTE_FORCE_LIMIT: u64 = 61;

fn verify_prime(p: u64, ns: &[i64], stated_principal: bool, cache: &Cache) -> Result<Vec<Check>, CliError> {
    let mut c = fresh_checks(stated_principal);
    let cctx = cubic(p)?;
    let swapped = cctx.with_swapped_embedding();
    let ctx = cctx.base();
    let pf = p as f64;
    let table = cache.l_table(ctx);
    c[7].case(p, None, None, if table.validate().is_ok() { 0.0 } else { f64::INFINITY });

    for &n in ns.iter().filter(|&&n| reduce(n, p) != 0) {
        for chi in enumerate_characters(ctx).skip(1) {
            let r = lemma1_identity_check(&cctx, n, &chi)?;
            let gap = (r.gap / (1e-6 * pf)).max(r.rhs.im.abs() / (1e-8 * pf));
            c[0].case(p, Some(n), Some(chi.index()), gap);
        }
        let pr = lemma1_principal_check(&cctx, n)?;
        c[1].case(p, Some(n), Some(0), pr.corrected.gap / (1e-6 * pf));
        c[2].case(p, Some(n), Some(0), pr.stated.gap / (1e-6 * pf));

        let m2 = second_moment(&cctx, n).map_err(CliError::from);
        let m2 = match m2 {
            Ok(r) => r,
            Err(_) => {
                c[3].case(p, Some(n), None, f64::INFINITY);
                continue;
            }
        };
        c[3].case(p, Some(n), None, (m2.computed - (pf - 1.0) * (pf - 1.0)).abs() / (1e-6 * pf * pf));
        let m4 = fourth_moment(&cctx, n)?;
        let bound = m2.computed * m2.computed / (pf - 1.0);
        c[4].case(p, Some(n), None, if m4.computed >= bound * (1.0 - 1e-12) { 0.0 } else { 2.0 });

        let w2 = weighted_second_moment_with(&cctx, n, &table)?;
        let w4 = weighted_fourth_moment_with(&cctx, n, &table)?;
        let w2s = weighted_second_moment_with(&swapped, n, &table)?;
        let w4s = weighted_fourth_moment_with(&swapped, n, &table)?;
        let rel = |a: &MomentReport, b: &MomentReport| (a.computed - b.computed).abs() / a.computed.abs().max(1e-300);
        c[5].case(p, Some(n), None, rel(&w2, &w2s).max(rel(&w4, &w4s)) / 1e-9);

        let bulk = bulk_generalized_gauss(ctx, n, 3);
        let naive: Vec<_> = enumerate_characters(ctx).map(|chi| kummer_sum(&cctx, n, &chi).value).collect();
        let dev = bulk.iter().zip(&naive).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        c[6].case(p, Some(n), None, dev / (1e-8 * pf.sqrt()));

        if p <= BRUTE_FORCE_LIMIT {
            let mut o = [0.0f64; 4];
            for (chi, s) in enumerate_characters(ctx).zip(&naive) {
                let s2 = s.norm_sqr();
                o[0] += s2;
                o[1] += s2 * s2;
                if !chi.is_principal() {
                    let l = kummerlab_core::lfun::l_one_exact(ctx, &chi)?.norm();
                    o[2] += s2 * l;
                    o[3] += s2 * s2 * l;
                }
            }
            let got = [m2.computed, m4.computed, w2.computed, w4.computed];
            let worst = got.iter().zip(o).map(|(g, o)| (g - o).abs() / o.max(1.0)).fold(0.0, f64::max);
            c[8].case(p, Some(n), None, worst / 1e-9);
        }
    }
    Ok(c)
}

pub fn verify(pmax: u64, ns: &[i64], stated_principal: bool, cache: &Cache) -> CmdResult {
    if pmax < 7 {
        return Err(CliError::Usage(format!("--pmax {pmax}: no prime p = 1 mod 3 below 7")));
    }
    if ns.is_empty() {
        return Err(CliError::Usage("--n needs at least one twist".into()));
    }
    let mut timer = Timer::default();
    let primes = primes_one_mod_three(7, pmax);
    let per_prime: Vec<Result<Vec<Check>, CliError>> = timer.time("checks", || {
        primes.par_iter().map(|&p| verify_prime(p, ns, stated_principal, cache)).collect()
    });
    let mut checks = fresh_checks(stated_principal);
    for r in per_prime {
        for (acc, c) in checks.iter_mut().zip(r?) {
            acc.merge(c);
        }
    }
    let summaries: Vec<CheckSummary> = checks.into_iter().map(Check::summary).collect();
    let ok = summaries.iter().all(|s| !s.enforced || s.failure_count == 0);
    let mut table = Table::new(&["check", "enforced", "cases", "max_gap", "failures"]);
    for s in &summaries {
        table.push(row![s.name, s.enforced, s.cases, s.max_gap, s.failure_count]);
    }
    let results = json!({ "passed": ok, "primes": primes.len(), "checks": to_value(&summaries) });
    let params = params! { "pmax" => pmax, "n" => ns, "stated_principal" => stated_principal };
    Ok(CommandOutput { record: RunRecord::new("verify", params, results, timer), table, ok })
}

// --------------------------------------------------------------- moments

fn moment_report(cctx: &CubicContext, n: i64, order: u32, weighted: bool, cache: &Cache) -> Result<MomentReport, CliError> {
    Ok(match (order, weighted) {
        (2, false) => second_moment(cctx, n)?,
        (4, false) => fourth_moment(cctx, n)?,
        (2, true) => weighted_second_moment_with(cctx, n, &cache.l_table(cctx.base()))?,
        (4, true) => weighted_fourth_moment_with(cctx, n, &cache.l_table(cctx.base()))?,
        _ => return Err(CliError::Usage(format!("--order {order}: expected 2 or 4"))),
    })
}

const MOMENT_COLUMNS: [&str; 9] =
    ["p", "n", "order", "weighted", "computed", "main_term", "residual", "error_scale", "normalized_error"];

fn moment_row(r: &MomentReport) -> Vec<crate::table::Cell> {
    row![r.p, r.n, r.order as u64, r.weighted, r.computed, r.main_term, r.residual, r.error_scale, r.normalized_error]
}

pub fn moments(p: u64, n: i64, order: u32, weighted: bool, cache: &Cache) -> CmdResult {
    if order != 2 && order != 4 {
        return Err(CliError::Usage(format!("--order {order}: expected 2 or 4")));
    }
    let cctx = cubic(p)?;
    check_twist(p, n)?;
    let mut timer = Timer::default();
    let report = timer.time("moment", || moment_report(&cctx, n, order, weighted, cache))?;
    let mut results = to_value(&report);
    if order == 4 && weighted {
        let readings = weighted_fourth_constants(&cctx)?;
        let p3 = (p as f64).powi(3);
        results["main_term_integer_reading"] = json!(readings.integer * p3);
    }
    let mut table = Table::new(&MOMENT_COLUMNS);
    table.push(moment_row(&report));
    let params = params! { "p" => p, "n" => n, "order" => order, "weighted" => weighted };
    Ok(CommandOutput { record: RunRecord::new("moments", params, results, timer), table, ok: true })
}

/// Least-squares slope of `ys` against `ln p`.
pub fn slope_against_log(ps: &[u64], ys: &[f64]) -> Option<f64> {
    if ps.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = ps.iter().map(|&p| (p as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

pub fn scan(pmin: u64, pmax: u64, n: i64, order: u32, weighted: bool, cache: &Cache) -> CmdResult {
    if order != 2 && order != 4 {
        return Err(CliError::Usage(format!("--order {order}: expected 2 or 4")));
    }
    if pmin > pmax {
        return Err(CliError::Usage(format!("empty interval [{pmin}, {pmax}] given backwards")));
    }
    let mut timer = Timer::default();
    let primes: Vec<u64> = primes_one_mod_three(pmin.max(7), pmax).into_iter().filter(|&p| reduce(n, p) != 0).collect();
    let rows: Vec<Result<MomentReport, CliError>> = timer.time("scan", || {
        primes
            .par_iter()
            .map(|&p| moment_report(&cubic(p)?, n, order, weighted, cache))
            .collect()
    });
    let rows: Vec<MomentReport> = rows.into_iter().collect::<Result<_, _>>()?;
    let mut table = Table::new(&["p", "computed", "main_term", "normalized_error"]);
    for r in &rows {
        table.push(row![r.p, r.computed, r.main_term, r.normalized_error]);
    }
    let abs: Vec<f64> = rows.iter().map(|r| r.normalized_error.abs()).collect();
    let summary = json!({
        "primes": rows.len(),
        "max_abs_normalized_error": abs.iter().copied().reduce(f64::max),
        "slope_abs_normalized_error_vs_ln_p": slope_against_log(&primes, &abs),
    });
    let results = json!({ "rows": to_value(&rows), "summary": summary });
    let params = params! { "pmin" => pmin, "pmax" => pmax, "n" => n, "order" => order, "weighted" => weighted };
    Ok(CommandOutput { record: RunRecord::new("scan", params, results, timer), table, ok: true })
}

// ---------------------------------------------------------- other commands

pub fn constants(ts: &[u64]) -> CmdResult {
    let mut timer = Timer::default();
    let est = *timer.time("constant_c", constant_c_default);
    let mut table = Table::new(&["name", "exact", "value"]);
    table.push(row!["C", "", est.value]);
    table.push(row!["C_upper", "", est.upper]);
    let mut cts = Vec::new();
    for &t in ts {
        let exact = timer.time("constant_ct", || constant_ct_exact(t))?;
        let value = constant_ct(t)?;
        table.push(row![format!("C_{t}"), exact.to_string(), value]);
        cts.push(json!({ "t": t, "exact": exact.to_string(), "value": value }));
    }
    let results = json!({
        "C": {
            "value": est.value,
            "upper": est.upper,
            "tail_bound": est.tail_bound,
            "direct_series": est.direct_series,
            "direct_tail_bound": est.direct_tail_bound,
            "prime_cutoff": est.prime_cutoff,
            "routes_agree": est.routes_agree(),
        },
        "C_t": cts,
    });
    let ok = est.routes_agree();
    Ok(CommandOutput { record: RunRecord::new("constants", params! { "t" => ts }, results, timer), table, ok })
}

pub fn lsum(p: u64, t: Option<u64>, cache: &Cache) -> CmdResult {
    let ctx = PrimeContext::new(p)?;
    let mut timer = Timer::default();
    let table_l = timer.time("l_values", || cache.l_table(&ctx));
    let c = constant_c_default().value;
    let pf = p as f64;
    let (all, even, odd, l2) = timer.time("statistics", || {
        (lemma4_sum(&table_l), lemma3_even_sum(&table_l), odd_sum(&table_l), lemma2_statistic(&table_l))
    });
    let mut results = json!({
        "sum_abs_l": all,
        "sum_abs_l_over_cp": all / (c * pf),
        "even_sum": even,
        "even_sum_over_half_cp": even / (0.5 * c * pf),
        "odd_sum": odd,
        "double_sum": l2,
        "double_sum_over_p_ln_p": l2 / (pf * pf.ln()),
    });
    let mut table = Table::new(&["name", "value"]);
    for key in ["sum_abs_l", "sum_abs_l_over_cp", "even_sum", "even_sum_over_half_cp", "odd_sum", "double_sum", "double_sum_over_p_ln_p"] {
        table.push(row![key, results[key].as_f64().unwrap()]);
    }
    if let Some(t) = t {
        let w = lemma5_weighted(&ctx, &table_l, t)?;
        results["weighted"] = json!({
            "t": t,
            "computed": w.computed,
            "imaginary": w.imaginary,
            "main_term": w.main_term,
            "normalized_error": (w.computed - w.main_term) / (pf.sqrt() * pf.ln()),
        });
        table.push(row!["weighted_computed", w.computed]);
        table.push(row!["weighted_main_term", w.main_term]);
    }
    let params = params! { "p" => p, "t" => t };
    Ok(CommandOutput { record: RunRecord::new("lsum", params, results, timer), table, ok: true })
}

pub fn kummer(xmax: u64, census: bool, patterson: bool, records: bool) -> CmdResult {
    if xmax < 7 {
        return Err(CliError::Usage(format!("--xmax {xmax}: needs X >= 7")));
    }
    let (census, patterson) = if census || patterson { (census, patterson) } else { (true, true) };
    let mut timer = Timer::default();
    let recs = timer.time("records", || kummer_records(xmax))?;
    let mut results = json!({ "primes": recs.len() });
    if census {
        let (a, b, c) = census_of(&recs);
        results["census"] = json!({ "class1": a, "class2": b, "class3": c });
    }
    if patterson {
        results["patterson"] = to_value(&patterson_from_records(xmax, &recs));
    }
    if records {
        results["records"] = to_value(&recs);
    }
    let mut table = Table::new(&["p", "s_p", "cos_theta", "class"]);
    for r in &recs {
        table.push(row![r.p, r.s_p, r.cos_theta, r.class]);
    }
    let params = params! { "xmax" => xmax, "census" => census, "patterson" => patterson, "records" => records };
    Ok(CommandOutput { record: RunRecord::new("kummer", params, results, timer), table, ok: true })
}

pub fn bench(p: u64, reps: u32) -> CmdResult {
    let ctx = PrimeContext::new(p)?;
    let reps = reps.max(1);
    let timer = Timer::default();
    let best = |f: &dyn Fn() -> Vec<_>| {
        let mut out = Vec::new();
        let mut best = f64::INFINITY;
        for _ in 0..reps {
            let t = Instant::now();
            out = f();
            best = best.min(t.elapsed().as_secs_f64() * 1e3);
        }
        (out, best)
    };
    let (bulk, bulk_ms) = best(&|| bulk_generalized_gauss(&ctx, 1, 3));
    let (naive, naive_ms) =
        best(&|| enumerate_characters(&ctx).map(|chi| generalized_gauss(&ctx, 1, 3, &chi).value).collect());
    let dev = bulk.iter().zip(&naive).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let tol = 1e-8 * (p as f64).sqrt();
    let agree = dev <= tol;
    let results = json!({
        "characters": p - 1,
        "bulk_ms": bulk_ms,
        "naive_ms": naive_ms,
        "speedup": naive_ms / bulk_ms,
        "bulk_faster": bulk_ms < naive_ms,
        "max_deviation": dev,
        "tolerance": tol,
        "agree": agree,
    });
    let mut table = Table::new(&["p", "bulk_ms", "naive_ms", "max_deviation", "agree"]);
    table.push(row![p, bulk_ms, naive_ms, dev, agree]);
    let params = params! { "p" => p, "reps" => reps };
    Ok(CommandOutput { record: RunRecord::new("bench", params, results, timer), table, ok: agree })
}
