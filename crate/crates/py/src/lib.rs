//! Python bindings. Rationals cross the boundary as `"p/q"` strings,
//! indices as floats (half-integers occur at degenerate endpoints).

use std::collections::BTreeMap;

use hc_core::contact_homology::{
    build_hc_complex, check_degree_shift, default_m_o, hc_ranks_chain, hc_ranks_closed_form_window,
    DegreeWindow, Target,
};
use hc_core::handle_dynamics::{
    enumerate_orbits, equal_action_groups, flow_closed_form, flow_numeric, orbit_index,
    orbit_nondegenerate, segment_index_growth, tune_principal, is_principal_tuned, ActionCutoff,
    HandlePoint, ModelHandle, DEFAULT_BELT_SIZE,
};
use hc_core::morse_complex::{homology_ranks, CriticalPoint, GradedRanks, MorseData};
use hc_core::rational::{format_rational, parse_rational, Q};
use hc_core::symplectic_index::{
    classify_return_map, reduced_index, rotation_index, rs_index_blocks, rs_index_numeric,
    BlockGenerator, BlockPath, DEFAULT_KERNEL_TOL,
};
use hc_core::word_combinatorics::{
    count_disjoint_basins, find_basin, is_jumpy, verify_word_lemma, Word, WordLemmaMode,
    DEFAULT_WORD_BUDGET,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Q> {
    parse_rational(s).map_err(err)
}

fn target(name: &str) -> PyResult<Target> {
    match name {
        "M" => Ok(Target::M),
        "Mprime" => Ok(Target::MPrime),
        other => Err(err(format!("target must be \"M\" or \"Mprime\", got {other:?}"))),
    }
}

fn ranks_dict(g: &GradedRanks, window: DegreeWindow) -> BTreeMap<i64, usize> {
    if window.is_empty() {
        return BTreeMap::new();
    }
    window.degrees().map(|d| (d, g.get(d))).collect()
}

/// Index data of a block-diagonal path: rotations `exp(ω t J)`, hyperbolic
/// blocks `diag(e^{a t}, e^{-b t})` and constant identity blocks.
#[pyfunction]
#[pyo3(signature = (duration, rotations=vec![], hyperbolic=vec![], identity=0))]
fn path_index(
    duration: f64,
    rotations: Vec<f64>,
    hyperbolic: Vec<(f64, f64)>,
    identity: usize,
) -> PyResult<BTreeMap<&'static str, f64>> {
    let mut blocks = Vec::new();
    for w in rotations {
        blocks.push(BlockGenerator::rotation(w).map_err(err)?);
    }
    for (a, b) in hyperbolic {
        blocks.push(BlockGenerator::hyperbolic(a, b).map_err(err)?);
    }
    blocks.extend(std::iter::repeat_n(BlockGenerator::ConstantIdentity, identity));
    let path = BlockPath::new(blocks, duration).map_err(err)?;
    let n = path.blocks().len();
    let mu = rs_index_numeric(&path.clone().into(), DEFAULT_KERNEL_TOL).map_err(err)?;
    let class = classify_return_map(&path);
    Ok(BTreeMap::from([
        ("mu", mu.to_f64()),
        ("mu_closed_form", rs_index_blocks(&path).to_f64()),
        ("reduced", reduced_index(mu, n).to_f64()),
        ("n_gamma", class.n_gamma as f64),
        ("degenerate", f64::from(u8::from(class.degenerate))),
    ]))
}

/// Index of a single rotation through `angle` radians.
#[pyfunction]
fn rotation_path_index(angle: f64) -> f64 {
    rotation_index(angle).to_f64()
}

/// A point `(x, y, z)` of the model handle.
#[pyclass(name = "HandlePoint", frozen, from_py_object)]
#[derive(Clone)]
struct PyHandlePoint {
    inner: HandlePoint,
}

#[pymethods]
impl PyHandlePoint {
    #[new]
    fn new(x: Vec<f64>, y: Vec<f64>, z: Vec<Complex64>) -> Self {
        Self {
            inner: HandlePoint::new(x, y, z),
        }
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.inner.x.clone()
    }

    #[getter]
    fn y(&self) -> Vec<f64> {
        self.inner.y.clone()
    }

    #[getter]
    fn z(&self) -> Vec<Complex64> {
        self.inner.z.clone()
    }

    fn __repr__(&self) -> String {
        format!("HandlePoint(x={:?}, y={:?}, z={:?})", self.inner.x, self.inner.y, self.inner.z)
    }
}

/// The standard model of a `k`-handle in dimension `2n`.
#[pyclass(name = "ModelHandle", frozen)]
struct PyModelHandle {
    inner: ModelHandle,
}

#[pymethods]
impl PyModelHandle {
    #[new]
    fn new(n: usize, k: usize, b: &str, b_prime: &str, c_sq: Vec<String>, level: &str) -> PyResult<Self> {
        let c_sq = c_sq.iter().map(|c| rational(c)).collect::<PyResult<Vec<_>>>()?;
        let inner = ModelHandle::new(n, k, rational(b)?, rational(b_prime)?, c_sq, rational(level)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn c_sq(&self) -> Vec<String> {
        self.inner.c_sq().iter().map(format_rational).collect()
    }

    #[getter]
    fn level(&self) -> String {
        format_rational(self.inner.level())
    }

    /// Periodic orbits with action up to `cutoff` (`"pi"`, `"3/2pi"`, `"2.5"`, ...).
    fn orbits(&self, py: Python<'_>, cutoff: &str) -> PyResult<Vec<Py<pyo3::types::PyDict>>> {
        let cutoff = ActionCutoff::parse(cutoff).ok_or_else(|| err(format!("bad cutoff {cutoff:?}")))?;
        let list = enumerate_orbits(&self.inner, &cutoff).map_err(err)?;
        let mut tied = vec![false; list.len()];
        for group in equal_action_groups(&list) {
            for i in group {
                tied[i] = true;
            }
        }
        list.iter()
            .zip(tied)
            .map(|(o, tie)| {
                let d = pyo3::types::PyDict::new(py);
                d.set_item("l", o.l)?;
                d.set_item("m", o.m)?;
                d.set_item("period_over_pi", format_rational(&o.period_over_pi))?;
                d.set_item("action_over_pi", format_rational(&o.action_over_pi))?;
                d.set_item("period", o.hamiltonian_period)?;
                d.set_item("action", o.action)?;
                d.set_item("mu", o.mu.to_f64())?;
                d.set_item("reduced", o.reduced.to_f64())?;
                d.set_item("nondegenerate", o.nondegenerate)?;
                d.set_item("good", o.good)?;
                d.set_item("equal_action", tie)?;
                Ok(d.unbind())
            })
            .collect()
    }

    fn orbit_nondegenerate(&self, l: usize, m: u64) -> bool {
        orbit_nondegenerate(&self.inner, l, m)
    }

    /// `(mu, reduced)` of the `m`-fold cover of the orbit in plane `l`.
    fn orbit_index(&self, l: usize, m: u64) -> PyResult<(f64, f64)> {
        let idx = orbit_index(&self.inner, l, m).map_err(err)?;
        Ok((idx.mu.to_f64(), idx.reduced.to_f64()))
    }

    fn tune_principal(&self, n_o: u64) -> Self {
        Self {
            inner: tune_principal(&self.inner, n_o),
        }
    }

    fn is_principal_tuned(&self, n_o: u64) -> bool {
        is_principal_tuned(&self.inner, n_o)
    }

    fn sf(&self, p: &PyHandlePoint) -> f64 {
        self.inner.sf(&p.inner)
    }

    /// Hamiltonian flow for time `t`: exact, or RK4 with `steps` steps.
    #[pyo3(signature = (p, t, steps=None))]
    fn flow(&self, p: &PyHandlePoint, t: f64, steps: Option<usize>) -> PyHandlePoint {
        let inner = match steps {
            None => flow_closed_form(&self.inner, &p.inner, t),
            Some(s) => flow_numeric(&self.inner, &p.inner, t, s),
        };
        PyHandlePoint { inner }
    }

    /// Index growth along the Reeb segment of the given action from `p`.
    #[pyo3(signature = (p, action, belt=DEFAULT_BELT_SIZE))]
    fn segment_index_growth(&self, p: &PyHandlePoint, action: f64, belt: f64) -> PyResult<BTreeMap<&'static str, f64>> {
        let g = segment_index_growth(&self.inner, &p.inner, action, belt).map_err(err)?;
        Ok(BTreeMap::from([
            ("mu_segment", g.mu_segment.to_f64()),
            ("bound", g.bound),
            ("rate", g.rate),
            ("hamiltonian_time", g.hamiltonian_time),
            ("rotation_angle", g.rotation_angle),
        ]))
    }

    fn __repr__(&self) -> String {
        format!(
            "ModelHandle(n={}, k={}, c_sq={:?}, level={})",
            self.inner.n(),
            self.inner.k(),
            self.c_sq(),
            self.level()
        )
    }
}

/// Critical points and integer coboundary coefficients of a Morse function.
#[pyclass(name = "MorseData", frozen)]
struct PyMorseData {
    inner: MorseData,
}

#[pymethods]
impl PyMorseData {
    /// `critical_points`: `(id, index)` or `(id, index, height)` tuples;
    /// `boundary`: `(from, to, coefficient)` with `to` one index higher.
    #[new]
    #[pyo3(signature = (n, critical_points, boundary=vec![], allow_multiple_minima=false))]
    fn new(
        n: usize,
        critical_points: Vec<(String, usize, Option<String>)>,
        boundary: Vec<(String, String, i64)>,
        allow_multiple_minima: bool,
    ) -> PyResult<Self> {
        let mut points = Vec::new();
        for (id, index, h) in critical_points {
            let mut p = CriticalPoint::new(id, index);
            if let Some(h) = h {
                p = p.with_height(rational(&h)?);
            }
            points.push(p);
        }
        let mut inner = MorseData::new(n, points);
        inner.allow_multiple_minima = allow_multiple_minima;
        for (from, to, a) in boundary {
            inner.boundary.insert((from, to), BigInt::from(a));
        }
        Ok(Self { inner })
    }

    #[staticmethod]
    fn ball(n: usize) -> Self {
        Self { inner: MorseData::ball(n) }
    }

    #[staticmethod]
    fn one_handles(n: usize, s: usize) -> Self {
        Self {
            inner: MorseData::one_handles(n, s),
        }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    fn violations(&self) -> Vec<String> {
        self.inner.violations().iter().map(ToString::to_string).collect()
    }

    /// Betti numbers by degree.
    fn homology(&self) -> PyResult<BTreeMap<i64, usize>> {
        let g = homology_ranks(&self.inner).map_err(err)?;
        let top = self.inner.max_index().unwrap_or(0) as i64;
        Ok((0..=top).map(|j| (j, g.get(j))).collect())
    }

    /// Contact homology ranks over `lo..=hi` via the chain complex or the
    /// closed form; `m_o` defaults to the value saturating the window.
    #[pyo3(signature = (lo, hi, target="M", route="chain", m_o=None))]
    fn hc_ranks(&self, lo: i64, hi: i64, target: &str, route: &str, m_o: Option<u64>) -> PyResult<BTreeMap<i64, usize>> {
        let window = DegreeWindow::new(lo, hi);
        let t = self::target(target)?;
        let m_o = m_o.unwrap_or_else(|| default_m_o(hi));
        let g = match route {
            "chain" => {
                let cx = build_hc_complex(&self.inner, m_o, window, t).map_err(err)?;
                hc_ranks_chain(&cx).map_err(err)?
            }
            "closed" => hc_ranks_closed_form_window(&self.inner, window, t, Some(m_o)).map_err(err)?,
            other => return Err(err(format!("route must be \"chain\" or \"closed\", got {other:?}"))),
        };
        Ok(ranks_dict(&g, window))
    }

    /// `(degree, rank on M, rank on M' two degrees up)` rows.
    fn degree_shift(&self, lo: i64, hi: i64) -> PyResult<Vec<(i64, usize, usize)>> {
        let r = check_degree_shift(&self.inner, DegreeWindow::new(lo, hi)).map_err(err)?;
        Ok(r.rows.iter().map(|row| (row.degree, row.rank_m, row.rank_m_prime_shifted)).collect())
    }
}

fn word(letters: Vec<u32>, n: u32) -> PyResult<Word> {
    Word::new(letters, n).map_err(err)
}

#[pyfunction(name = "is_jumpy")]
fn py_is_jumpy(letters: Vec<u32>, n: u32) -> PyResult<bool> {
    Ok(is_jumpy(&word(letters, n)?))
}

/// The basin `(i, j, k)` with the smallest right end, 1-based, if any.
#[pyfunction(name = "find_basin")]
fn py_find_basin(letters: Vec<u32>, n: u32) -> PyResult<Option<(usize, usize, u32)>> {
    Ok(find_basin(&word(letters, n)?).map(|b| (b.i, b.j, b.k)))
}

#[pyfunction(name = "count_disjoint_basins")]
fn py_count_disjoint_basins(letters: Vec<u32>, n: u32) -> PyResult<usize> {
    Ok(count_disjoint_basins(&word(letters, n)?))
}

/// Checks that jumpy words of length `2^n` contain a basin. Returns
/// `(words_checked, counterexamples)`.
#[pyfunction(name = "verify_word_lemma")]
#[pyo3(signature = (n, samples=None, seed=0, cap=DEFAULT_WORD_BUDGET))]
fn py_verify_word_lemma(n: u32, samples: Option<u64>, seed: u64, cap: u64) -> PyResult<(u64, Vec<Vec<u32>>)> {
    let mode = match samples {
        None => WordLemmaMode::Exhaustive { cap },
        Some(samples) => WordLemmaMode::Randomized { samples, seed },
    };
    let r = verify_word_lemma(n, mode).map_err(err)?;
    Ok((
        r.words_checked,
        r.counterexamples.iter().map(|w| w.letters().to_vec()).collect(),
    ))
}

#[pymodule]
fn handle_contact(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHandlePoint>()?;
    m.add_class::<PyModelHandle>()?;
    m.add_class::<PyMorseData>()?;
    m.add_function(wrap_pyfunction!(path_index, m)?)?;
    m.add_function(wrap_pyfunction!(rotation_path_index, m)?)?;
    m.add_function(wrap_pyfunction!(py_is_jumpy, m)?)?;
    m.add_function(wrap_pyfunction!(py_find_basin, m)?)?;
    m.add_function(wrap_pyfunction!(py_count_disjoint_basins, m)?)?;
    m.add_function(wrap_pyfunction!(py_verify_word_lemma, m)?)?;
    Ok(())
}
