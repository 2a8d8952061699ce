//! Python bindings. Contexts, characters and reports are exposed as classes;
//! bulk results come back as lists of Python complex numbers.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyComplex;

use kummerlab_core::characters::DirichletCharacter;
use kummerlab_core::{expsums, kummer, lfun, moments, weights, Error};

fn to_py(py: Python<'_>, re: f64, im: f64) -> Bound<'_, PyComplex> {
    PyComplex::from_doubles(py, re, im)
}

fn err(e: Error) -> PyErr {
    match e {
        Error::CrossCheckFailed { .. } | Error::Overflow => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A prime modulus with its primitive root and lookup tables.
#[pyclass(frozen, module = "kummerlab")]
struct PrimeContext {
    inner: Arc<kummerlab_core::PrimeContext>,
}

#[pymethods]
impl PrimeContext {
    #[new]
    fn new(p: u64) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(kummerlab_core::PrimeContext::new(p).map_err(err)?) })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    #[getter]
    fn generator(&self) -> u64 {
        self.inner.generator()
    }

    /// Discrete log base the generator, or None for multiples of p.
    fn dlog(&self, a: i64) -> Option<u64> {
        self.inner.dlog(a)
    }

    /// chi_j(a) for the character with index j.
    fn character(&self, py: Python<'_>, j: u64, a: i64) -> Py<PyComplex> {
        let v = DirichletCharacter::new(&self.inner, j).evaluate(a);
        to_py(py, v.re, v.im).unbind()
    }

    /// g(chi_j) for every j.
    fn gauss_sums(&self, py: Python<'_>) -> Vec<Py<PyComplex>> {
        expsums::bulk_classical_gauss(&self.inner).iter().map(|z| to_py(py, z.re, z.im).unbind()).collect()
    }

    /// G(n, k, chi_j; p) for every j.
    fn generalized_gauss_sums(&self, py: Python<'_>, n: i64, k: u32) -> PyResult<Vec<Py<PyComplex>>> {
        if k == 0 {
            return Err(PyValueError::new_err("k must be positive"));
        }
        Ok(expsums::bulk_generalized_gauss(&self.inner, n, k).iter().map(|z| to_py(py, z.re, z.im).unbind()).collect())
    }

    /// L(1, chi_j) for j = 1..p-2.
    fn l_values(&self, py: Python<'_>) -> Vec<Py<PyComplex>> {
        lfun::bulk_l_one(&self.inner).values.iter().map(|z| to_py(py, z.re, z.im).unbind()).collect()
    }

    /// sum over non-principal chi of |L(1, chi)|.
    fn sum_abs_l(&self) -> f64 {
        lfun::lemma4_sum(&lfun::bulk_l_one(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("PrimeContext(p={}, generator={})", self.inner.p(), self.inner.generator())
    }
}

/// A prime p = 1 mod 3 with its cube roots of unity and cubic symbol.
#[pyclass(frozen, module = "kummerlab")]
struct CubicContext {
    inner: kummerlab_core::CubicContext,
}

#[pymethods]
impl CubicContext {
    #[new]
    fn new(p: u64) -> PyResult<Self> {
        Ok(Self { inner: kummerlab_core::CubicContext::new(p).map_err(err)? })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.p()
    }

    #[getter]
    fn a1(&self) -> u64 {
        self.inner.a1()
    }

    #[getter]
    fn a2(&self) -> u64 {
        self.inner.a2()
    }

    #[getter]
    fn lambda_index(&self) -> u64 {
        self.inner.lambda_index()
    }

    fn swapped(&self) -> Self {
        Self { inner: self.inner.with_swapped_embedding() }
    }

    /// S_p(n; chi_j) for every j.
    fn kummer_sums(&self, py: Python<'_>, n: i64) -> Vec<Py<PyComplex>> {
        expsums::bulk_kummer_sums(&self.inner, n).iter().map(|z| to_py(py, z.re, z.im).unbind()).collect()
    }

    /// Kummer's S_p = sum_a e(a^3 / p).
    fn raw_cubic_sum(&self) -> PyResult<f64> {
        expsums::raw_cubic_sum(&self.inner).map_err(err)
    }

    /// (lhs, rhs, gap) of the |S_p(n; chi_j)|^2 identity, j != 0.
    fn identity_check(&self, py: Python<'_>, n: i64, j: u64) -> PyResult<(f64, Py<PyComplex>, f64)> {
        let chi = DirichletCharacter::new(self.inner.base(), j);
        let c = moments::lemma1_identity_check(&self.inner, n, &chi).map_err(err)?;
        Ok((c.lhs, to_py(py, c.rhs.re, c.rhs.im).unbind(), c.gap))
    }

    /// Gaps of the principal-character identity: (as stated, with 2p+1).
    fn principal_identity_gaps(&self, n: i64) -> PyResult<(f64, f64)> {
        let c = moments::lemma1_principal_check(&self.inner, n).map_err(err)?;
        Ok((c.stated.gap, c.corrected.gap))
    }

    /// One moment statistic: order 2 or 4, optionally weighted by |L(1, chi)|.
    #[pyo3(signature = (n, order, weighted=false))]
    fn moment(&self, n: i64, order: u32, weighted: bool) -> PyResult<MomentReport> {
        let r = match (order, weighted) {
            (2, false) => moments::second_moment(&self.inner, n),
            (4, false) => moments::fourth_moment(&self.inner, n),
            (2, true) => moments::weighted_second_moment(&self.inner, n),
            (4, true) => moments::weighted_fourth_moment(&self.inner, n),
            _ => return Err(PyValueError::new_err("order must be 2 or 4")),
        };
        r.map(MomentReport::from).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("CubicContext(p={}, a1={}, a2={})", self.inner.p(), self.inner.a1(), self.inner.a2())
    }
}

#[pyclass(frozen, get_all, module = "kummerlab")]
#[derive(Clone)]
struct MomentReport {
    p: u64,
    n: i64,
    order: u32,
    weighted: bool,
    computed: f64,
    main_term: f64,
    residual: f64,
    error_scale: f64,
    normalized_error: f64,
}

impl From<moments::MomentReport> for MomentReport {
    fn from(r: moments::MomentReport) -> Self {
        Self {
            p: r.p,
            n: r.n,
            order: r.order,
            weighted: r.weighted,
            computed: r.computed,
            main_term: r.main_term,
            residual: r.residual,
            error_scale: r.error_scale,
            normalized_error: r.normalized_error,
        }
    }
}

#[pymethods]
impl MomentReport {
    fn __repr__(&self) -> String {
        format!(
            "MomentReport(p={}, n={}, order={}, weighted={}, computed={}, main_term={}, normalized_error={})",
            self.p, self.n, self.order, self.weighted, self.computed, self.main_term, self.normalized_error
        )
    }
}

/// The weight r(n) as (numerator, log2 of the denominator).
#[pyfunction]
fn r(n: u64) -> PyResult<(u128, u32)> {
    let v = weights::r(n).map_err(err)?;
    Ok((v.numerator(), v.log2_denominator()))
}

/// C_t as an exact fraction string and a float.
#[pyfunction]
fn constant_ct(t: u64) -> PyResult<(String, f64)> {
    let exact = weights::constant_ct_exact(t).map_err(err)?;
    Ok((exact.to_string(), weights::constant_ct(t).map_err(err)?))
}

/// C = sum r(n)^2 / n^2 with its certified upper bound.
#[pyfunction]
fn constant_c() -> (f64, f64) {
    let est = weights::constant_c_default();
    (est.value, est.upper)
}

/// (s_p, cos_theta, theta, class) for a prime p = 1 mod 3.
#[pyfunction]
fn kummer_record(p: u64) -> PyResult<(f64, f64, f64, u8)> {
    let rec = kummer::kummer_record(p).map_err(err)?;
    Ok((rec.s_p, rec.cos_theta, rec.theta, rec.class))
}

#[pyfunction]
fn kummer_census(x: u64) -> PyResult<(u64, u64, u64)> {
    kummer::kummer_census(x).map_err(err)
}

#[pyfunction]
fn patterson_constant() -> f64 {
    kummer::patterson_constant()
}

#[pyfunction]
fn gamma(x: f64) -> f64 {
    kummer::gamma(x)
}

#[pymodule]
fn kummerlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PrimeContext>()?;
    m.add_class::<CubicContext>()?;
    m.add_class::<MomentReport>()?;
    m.add_function(wrap_pyfunction!(r, m)?)?;
    m.add_function(wrap_pyfunction!(constant_ct, m)?)?;
    m.add_function(wrap_pyfunction!(constant_c, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_record, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_census, m)?)?;
    m.add_function(wrap_pyfunction!(patterson_constant, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
