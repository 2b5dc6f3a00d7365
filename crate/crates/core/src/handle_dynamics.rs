//! Reeb dynamics on the model contact `k`-handle
//! `H_c = { b|x|² − b'|y|² + Σ_l |z_l|²/c_l² = c } ⊂ ℂⁿ = ℝᵏ × ℝᵏ × ℂ^{n−k}`.
//!
//! The grading data (periods, actions, degeneracy, indices) is exact over the
//! rationals. Flows and trajectory indices are floating point.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::rational::{floor_i64, format_rational, parse_rational, q_int, to_f64, Q};
use crate::symplectic_index::{
    classify_return_map, is_good, reduced_index, rs_index_numeric_with, BlockGenerator, BlockPath,
    CrossingOptions, IndexError, IndexValue,
};

/// Relative tolerance for "lies on the level set".
pub const LEVEL_TOL: f64 = 1e-10;
/// Default size `C` of the belt-sphere neighbourhood `b'|y|² ≤ C`.
pub const DEFAULT_BELT_SIZE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HandleError {
    #[error("invalid handle: {0}")]
    InvalidHandle(String),
    #[error("point is off the level set (Sf = {value}, level = {level})")]
    OffLevelSet { value: f64, level: f64 },
    #[error("level {0} carries no periodic Reeb orbits")]
    DegenerateLevel(String),
    #[error("orbit (l = {l}, m = {m}) is degenerate")]
    DegenerateOrbit { l: usize, m: u64 },
    #[error("no orbit (l = {l}, m = {m}) on this handle")]
    InvalidOrbit { l: usize, m: u64 },
    #[error("point leaves the belt neighbourhood (b'|y|² = {value} > {bound})")]
    OutsideBelt { value: f64, bound: f64 },
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// Parameters of the quadric `b|x|² − b'|y|² + Σ |z_l|²/c_l² = level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelHandle {
    n: usize,
    k: usize,
    b: Q,
    b_prime: Q,
    c_sq: Vec<Q>,
    level: Q,
}

impl ModelHandle {
    /// Requires `n ≥ 2`, `k < n`, `b > b' > 0`, and `n − k` positive `c_l²`.
    /// The level may have any sign; orbit enumeration rejects `level ≤ 0`.
    pub fn new(n: usize, k: usize, b: Q, b_prime: Q, c_sq: Vec<Q>, level: Q) -> Result<Self, HandleError> {
        let bad = |msg: String| Err(HandleError::InvalidHandle(msg));
        if n < 2 {
            return bad(format!("n must be at least 2, got {n}"));
        }
        if k >= n {
            return bad(format!("handle index {k} is not subcritical for n = {n}"));
        }
        if !b_prime.is_positive() || b <= b_prime {
            return bad(format!(
                "need b > b' > 0, got b = {}, b' = {}",
                format_rational(&b),
                format_rational(&b_prime)
            ));
        }
        if c_sq.len() != n - k {
            return bad(format!("expected {} values of c_l², got {}", n - k, c_sq.len()));
        }
        if c_sq.iter().any(|c| !c.is_positive()) {
            return bad("every c_l² must be positive".into());
        }
        Ok(Self { n, k, b, b_prime, c_sq, level })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> &Q {
        &self.b
    }

    pub fn b_prime(&self) -> &Q {
        &self.b_prime
    }

    /// `c_l²` for `l = k+1, …, n`, in that order.
    pub fn c_sq(&self) -> &[Q] {
        &self.c_sq
    }

    pub fn level(&self) -> &Q {
        &self.level
    }

    /// `c_l²` for a plane label `l ∈ [k+1, n]`.
    pub fn c_sq_of(&self, l: usize) -> Option<&Q> {
        if l > self.k && l <= self.n {
            Some(&self.c_sq[l - self.k - 1])
        } else {
            None
        }
    }

    /// Plane labels `k+1..=n`.
    pub fn planes(&self) -> impl Iterator<Item = usize> + '_ {
        (self.k + 1)..=self.n
    }

    pub fn with_c_sq(&self, c_sq: Vec<Q>) -> Result<Self, HandleError> {
        Self::new(self.n, self.k, self.b.clone(), self.b_prime.clone(), c_sq, self.level.clone())
    }

    pub fn with_level(&self, level: Q) -> Self {
        Self { level, ..self.clone() }
    }

    fn floats(&self) -> (f64, f64, Vec<f64>, f64) {
        (
            to_f64(&self.b),
            to_f64(&self.b_prime),
            self.c_sq.iter().map(to_f64).collect(),
            to_f64(&self.level),
        )
    }

    /// `Sf(p) = b|x|² − b'|y|² + Σ |z_l|²/c_l²`.
    pub fn sf(&self, p: &HandlePoint) -> f64 {
        let (b, bp, c_sq, _) = self.floats();
        b * norm_sq(&p.x) - bp * norm_sq(&p.y)
            + p.z.iter().zip(&c_sq).map(|(z, c)| z.norm_sqr() / c).sum::<f64>()
    }

    /// Sum of the absolute values of the three terms of `Sf`, the natural
    /// scale for conservation and level checks.
    pub fn sf_scale(&self, p: &HandlePoint) -> f64 {
        let (b, bp, c_sq, _) = self.floats();
        b * norm_sq(&p.x)
            + bp * norm_sq(&p.y)
            + p.z.iter().zip(&c_sq).map(|(z, c)| z.norm_sqr() / c).sum::<f64>()
    }

    fn check_point(&self, p: &HandlePoint) -> Result<(), HandleError> {
        if p.x.len() != self.k || p.y.len() != self.k || p.z.len() != self.n - self.k {
            return Err(HandleError::InvalidHandle(format!(
                "point has shape ({}, {}, {}), handle needs ({}, {}, {})",
                p.x.len(),
                p.y.len(),
                p.z.len(),
                self.k,
                self.k,
                self.n - self.k
            )));
        }
        Ok(())
    }

    fn check_on_level(&self, p: &HandlePoint) -> Result<(), HandleError> {
        self.check_point(p)?;
        let value = self.sf(p);
        let level = to_f64(&self.level);
        let scale = 1.0 + self.sf_scale(p) + level.abs();
        if (value - level).abs() > LEVEL_TOL * scale {
            return Err(HandleError::OffLevelSet { value, level });
        }
        Ok(())
    }
}

/// A point `(x, y, z)` of `ℝᵏ × ℝᵏ × ℂ^{n−k}`; also used for tangent vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct HandlePoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<Complex64>,
}

impl HandlePoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: Vec<Complex64>) -> Self {
        Self { x, y, z }
    }

    pub fn origin(h: &ModelHandle) -> Self {
        Self {
            x: vec![0.0; h.k],
            y: vec![0.0; h.k],
            z: vec![Complex64::new(0.0, 0.0); h.n - h.k],
        }
    }

    fn to_state(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(2 * self.x.len() + 2 * self.z.len());
        s.extend(&self.x);
        s.extend(&self.y);
        s.extend(self.z.iter().map(|z| z.re));
        s.extend(self.z.iter().map(|z| z.im));
        s
    }

    fn from_state(s: &[f64], k: usize, planes: usize) -> Self {
        let x = s[..k].to_vec();
        let y = s[k..2 * k].to_vec();
        let z = (0..planes)
            .map(|i| Complex64::new(s[2 * k + i], s[2 * k + planes + i]))
            .collect();
        Self { x, y, z }
    }

    /// Largest coordinate difference, each measured relative to
    /// `max(1, |coordinate of self|)`.
    pub fn max_scaled_difference(&self, other: &HandlePoint) -> f64 {
        let a = self.to_state();
        let b = other.to_state();
        a.iter()
            .zip(&b)
            .map(|(u, v)| (u - v).abs() / u.abs().max(1.0))
            .fold(0.0, f64::max)
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

/// Hamiltonian vector field: `ẋ_j = 2b'y_j`, `ẏ_j = 2b x_j`,
/// `ż_l = −(2i/c_l²) z_l`.
pub fn hamiltonian_field(h: &ModelHandle, p: &HandlePoint) -> HandlePoint {
    let (b, bp, c_sq, _) = h.floats();
    HandlePoint {
        x: p.y.iter().map(|y| 2.0 * bp * y).collect(),
        y: p.x.iter().map(|x| 2.0 * b * x).collect(),
        z: p.z
            .iter()
            .zip(&c_sq)
            .map(|(z, c)| Complex64::new(0.0, -2.0 / c) * z)
            .collect(),
    }
}

/// Value of the standard contact form on the Hamiltonian field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReebRescale {
    /// `α(X) = 4b|x|² + 2b'|y|² + Σ |z_l|²/c_l²`.
    pub value: f64,
    /// The point is the origin, where `α(X)` vanishes (only on `H_0`).
    pub at_origin: bool,
}

/// `α(X_Sf)(p)`, checked against `3b|x|² + 3b'|y|² + c` on the level set.
pub fn reeb_rescale(h: &ModelHandle, p: &HandlePoint) -> Result<ReebRescale, HandleError> {
    h.check_on_level(p)?;
    let (b, bp, c_sq, level) = h.floats();
    let (x2, y2) = (norm_sq(&p.x), norm_sq(&p.y));
    let zsum: f64 = p.z.iter().zip(&c_sq).map(|(z, c)| z.norm_sqr() / c).sum();
    let value = 4.0 * b * x2 + 2.0 * bp * y2 + zsum;
    let on_level = 3.0 * b * x2 + 3.0 * bp * y2 + level;
    debug_assert!(
        (value - on_level).abs() <= LEVEL_TOL * (1.0 + value.abs() + on_level.abs()) * 4.0,
        "rescale identity violated: {value} vs {on_level}"
    );
    let at_origin = x2 == 0.0 && y2 == 0.0 && zsum == 0.0;
    Ok(ReebRescale { value, at_origin })
}

/// Exact Hamiltonian flow.
pub fn flow_closed_form(h: &ModelHandle, p0: &HandlePoint, t: f64) -> HandlePoint {
    let (b, bp, c_sq, _) = h.floats();
    let rate = 2.0 * (b * bp).sqrt();
    let (ch, sh) = ((rate * t).cosh(), (rate * t).sinh());
    let (rx, ry) = ((bp / b).sqrt(), (b / bp).sqrt());
    HandlePoint {
        x: p0.x.iter().zip(&p0.y).map(|(x, y)| x * ch + y * rx * sh).collect(),
        y: p0.x.iter().zip(&p0.y).map(|(x, y)| y * ch + x * ry * sh).collect(),
        z: p0
            .z
            .iter()
            .zip(&c_sq)
            .map(|(z, c)| z * Complex64::from_polar(1.0, -2.0 * t / c))
            .collect(),
    }
}

/// Classical fourth-order Runge–Kutta integration of [`hamiltonian_field`].
pub fn flow_numeric(h: &ModelHandle, p0: &HandlePoint, t: f64, steps: usize) -> HandlePoint {
    flow_numeric_checkpoints(h, p0, t, steps, 1).pop().expect("one checkpoint")
}

/// RK4 from 0 to `t` returning the state at `checkpoints` evenly spaced
/// times `t·i/checkpoints`, `i = 1..=checkpoints`. `steps` is rounded up to
/// a multiple of `checkpoints`.
pub fn flow_numeric_checkpoints(
    h: &ModelHandle,
    p0: &HandlePoint,
    t: f64,
    steps: usize,
    checkpoints: usize,
) -> Vec<HandlePoint> {
    let checkpoints = checkpoints.max(1);
    let per = steps.max(1).div_ceil(checkpoints);
    let total = per * checkpoints;
    let dt = t / total as f64;
    let (k, planes) = (h.k, h.n - h.k);
    let field = |s: &[f64]| -> Vec<f64> {
        hamiltonian_field(h, &HandlePoint::from_state(s, k, planes)).to_state()
    };
    let axpy = |s: &[f64], d: &[f64], a: f64| -> Vec<f64> {
        s.iter().zip(d).map(|(u, v)| u + a * v).collect()
    };
    let mut state = p0.to_state();
    let mut out = Vec::with_capacity(checkpoints);
    for step in 1..=total {
        let k1 = field(&state);
        let k2 = field(&axpy(&state, &k1, dt / 2.0));
        let k3 = field(&axpy(&state, &k2, dt / 2.0));
        let k4 = field(&axpy(&state, &k3, dt));
        for i in 0..state.len() {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if step % per == 0 {
            out.push(HandlePoint::from_state(&state, k, planes));
        }
    }
    out
}

/// Upper bound on the action of enumerated orbits.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionCutoff {
    /// `q·π`, compared exactly.
    PiMultiple(Q),
    Value(f64),
}

impl ActionCutoff {
    /// Accepts `"pi"`, `"3pi"`, `"3/2pi"`, `"3/2*pi"`, `"π"` for multiples of
    /// π, and `"p/q"`, integers, or decimals for plain values.
    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim();
        let stripped = t
            .strip_suffix("pi")
            .or_else(|| t.strip_suffix('π'))
            .map(|r| r.trim().trim_end_matches('*').trim());
        match stripped {
            Some("") => Some(Self::PiMultiple(Q::one())),
            Some(r) => parse_rational(r).ok().map(Self::PiMultiple),
            None => match parse_rational(t) {
                Ok(q) => Some(Self::Value(to_f64(&q))),
                Err(_) => t.parse::<f64>().ok().filter(|v| v.is_finite()).map(Self::Value),
            },
        }
    }

    fn admits(&self, action_over_pi: &Q) -> bool {
        match self {
            Self::PiMultiple(q) => action_over_pi <= q,
            Self::Value(v) => to_f64(action_over_pi) * PI <= *v,
        }
    }
}

impl fmt::Display for ActionCutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PiMultiple(q) => write!(f, "{}pi", format_rational(q)),
            Self::Value(v) => write!(f, "{v}"),
        }
    }
}

/// The orbit `σ_l^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReebOrbit {
    pub l: usize,
    pub m: u64,
    /// Hamiltonian period divided by π: `m·c_l²`.
    pub period_over_pi: Q,
    /// Action divided by π: `m·c_l²·level`.
    pub action_over_pi: Q,
    pub hamiltonian_period: f64,
    pub action: f64,
    pub mu: IndexValue,
    pub reduced: IndexValue,
    pub good: bool,
    pub nondegenerate: bool,
}

/// Periodic orbits with action at most the cutoff, sorted by exact action
/// (ties by `l`, then `m`).
pub fn enumerate_orbits(h: &ModelHandle, cutoff: &ActionCutoff) -> Result<Vec<ReebOrbit>, HandleError> {
    if !h.level.is_positive() {
        return Err(HandleError::DegenerateLevel(format_rational(&h.level)));
    }
    let mut orbits = Vec::new();
    for l in h.planes() {
        let c_sq = h.c_sq_of(l).expect("plane in range");
        let n_gamma = classify_return_map(&orbit_block_path(h, l, 1)?).n_gamma;
        let mut m = 1u64;
        loop {
            let period_over_pi = c_sq * q_int(m as i64);
            let action_over_pi = &period_over_pi * &h.level;
            if !cutoff.admits(&action_over_pi) {
                break;
            }
            let mu = orbit_rs_index(h, l, m)?;
            orbits.push(ReebOrbit {
                l,
                m,
                hamiltonian_period: to_f64(&period_over_pi) * PI,
                action: to_f64(&action_over_pi) * PI,
                period_over_pi,
                action_over_pi,
                mu,
                reduced: reduced_index(mu, h.n),
                good: is_good(n_gamma, m),
                nondegenerate: orbit_nondegenerate(h, l, m),
            });
            m += 1;
        }
    }
    orbits.sort_by(|a, b| {
        a.action_over_pi
            .cmp(&b.action_over_pi)
            .then(a.l.cmp(&b.l))
            .then(a.m.cmp(&b.m))
    });
    Ok(orbits)
}

/// Groups of orbits (by position in the slice) that share an exactly equal
/// action. The slice must be sorted by action.
pub fn equal_action_groups(orbits: &[ReebOrbit]) -> Vec<Vec<usize>> {
    let mut groups = Vec::new();
    let mut i = 0;
    while i < orbits.len() {
        let mut j = i + 1;
        while j < orbits.len() && orbits[j].action_over_pi.cmp(&orbits[i].action_over_pi) == Ordering::Equal {
            j += 1;
        }
        if j - i > 1 {
            groups.push((i..j).collect());
        }
        i = j;
    }
    groups
}

fn check_orbit(h: &ModelHandle, l: usize, m: u64) -> Result<&Q, HandleError> {
    if m == 0 {
        return Err(HandleError::InvalidOrbit { l, m });
    }
    h.c_sq_of(l).ok_or(HandleError::InvalidOrbit { l, m })
}

/// True iff `m·c_l²/c_{l'}² ∉ ℤ` for every other plane `l'`.
pub fn orbit_nondegenerate(h: &ModelHandle, l: usize, m: u64) -> bool {
    let Ok(own) = check_orbit(h, l, m) else {
        return false;
    };
    let scaled = own * q_int(m as i64);
    h.planes()
        .filter(|&other| other != l)
        .all(|other| !(&scaled / h.c_sq_of(other).unwrap()).is_integer())
}

/// Exact index of the linearized flow along `σ_l^m` over one period, valid
/// for degenerate orbits as well (endpoint crossings count half).
pub fn orbit_rs_index(h: &ModelHandle, l: usize, m: u64) -> Result<IndexValue, HandleError> {
    let own = check_orbit(h, l, m)?;
    let scaled = own * q_int(m as i64);
    let mut mu = IndexValue::from_int(2 * m as i64);
    for other in h.planes().filter(|&o| o != l) {
        let ratio = &scaled / h.c_sq_of(other).unwrap();
        mu = mu
            + if ratio.is_integer() {
                IndexValue::from_int(2 * floor_i64(&ratio))
            } else {
                IndexValue::from_int(2 * floor_i64(&ratio) + 1)
            };
    }
    Ok(mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitIndex {
    pub mu: IndexValue,
    pub reduced: IndexValue,
}

/// `μ = 2m + (n−k−1) + 2 Σ_{l'≠l} ⌊m c_l²/c_{l'}²⌋` and `ō = μ + (n − 3)`.
pub fn orbit_index(h: &ModelHandle, l: usize, m: u64) -> Result<OrbitIndex, HandleError> {
    check_orbit(h, l, m)?;
    if !orbit_nondegenerate(h, l, m) {
        return Err(HandleError::DegenerateOrbit { l, m });
    }
    let mu = orbit_rs_index(h, l, m)?;
    Ok(OrbitIndex {
        mu,
        reduced: reduced_index(mu, h.n),
    })
}

/// Linearized flow along `σ_l^m` in the standard trivialization of `ℂⁿ`,
/// in Hamiltonian time over one period `m·π·c_l²`.
pub fn orbit_block_path(h: &ModelHandle, l: usize, m: u64) -> Result<BlockPath, HandleError> {
    let own = check_orbit(h, l, m)?;
    let period = to_f64(own) * m as f64 * PI;
    Ok(BlockPath::new(linearized_blocks(h)?, period)?)
}

/// `D_j = [[0, 2b'], [2b, 0]]` for each `x_j, y_j` plane, and rotation at
/// speed `2/c_l²` for each `z_l` plane.
fn linearized_blocks(h: &ModelHandle) -> Result<Vec<BlockGenerator>, HandleError> {
    let (b, bp, c_sq, _) = h.floats();
    let mut blocks = Vec::with_capacity(h.n);
    for _ in 0..h.k {
        blocks.push(BlockGenerator::hyperbolic(2.0 * b, 2.0 * bp)?);
    }
    for c in c_sq {
        blocks.push(BlockGenerator::rotation(2.0 / c)?);
    }
    Ok(blocks)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn next_prime_after(x: u64) -> u64 {
    (x + 1..).find(|&p| is_prime(p)).expect("primes are unbounded")
}

/// Rescales the `c_l²` so that `σ_n` is principal up to multiplicity `n_o`.
///
/// With `s = min c_l²`, distinct primes `n_o < a_{k+1} < … < a_{n−1} < Q`
/// and a prime `P > n_o·Q`, the new values are `c_l² = s·a_l/Q` for `l < n`
/// and `c_n² = s/P`. Then `n_o c_n² < c_l²` and every `σ_l^m` with `m ≤ n_o`
/// is nondegenerate.
pub fn tune_principal(h: &ModelHandle, n_o: u64) -> ModelHandle {
    let n_o = n_o.max(1);
    let scale = h.c_sq.iter().min().expect("at least one plane").clone();
    let others = h.n - h.k - 1;
    let mut primes = Vec::with_capacity(others);
    let mut p = n_o;
    for _ in 0..others {
        p = next_prime_after(p);
        primes.push(p);
    }
    let q = next_prime_after(p.max(n_o));
    let big_p = next_prime_after(n_o * q);
    let mut c_sq: Vec<Q> = primes
        .iter()
        .map(|&a| &scale * Q::new((a as i64).into(), (q as i64).into()))
        .collect();
    c_sq.push(&scale / q_int(big_p as i64));
    h.with_c_sq(c_sq).expect("tuned values are positive")
}

/// Whether `σ_n` satisfies `n_o c_n² < c_l²` for all `l < n` and all orbits
/// up to multiplicity `n_o` are nondegenerate.
pub fn is_principal_tuned(h: &ModelHandle, n_o: u64) -> bool {
    let c_n = h.c_sq.last().expect("at least one plane");
    let bound = c_n * q_int(n_o as i64);
    let thin = h.c_sq[..h.c_sq.len() - 1].iter().all(|c| &bound < c);
    thin && h
        .planes()
        .all(|l| (1..=n_o).all(|m| orbit_nondegenerate(h, l, m)))
}

/// Index growth along a non-periodic trajectory segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentGrowth {
    /// Crossing-number index of the linearized flow over the segment.
    pub mu_segment: IndexValue,
    /// `N·T − 2n`.
    pub bound: f64,
    /// The rate `N = (Σ_l 2/(π c_l²)) / (6C + 4c)`.
    pub rate: f64,
    /// Hamiltonian time needed to accumulate the requested action.
    pub hamiltonian_time: f64,
    /// Total angle `Σ_l 2t/c_l²` turned by the `z` planes.
    pub rotation_angle: f64,
}

impl SegmentGrowth {
    pub fn exceeds_bound(&self) -> bool {
        self.mu_segment.to_f64() > self.bound
    }
}

/// Action accumulated along the Hamiltonian flow from `p0` up to time `t`:
/// `∫₀ᵗ (3b|x|² + 3b'|y|² + c) ds` in closed form.
pub fn action_along_flow(h: &ModelHandle, p0: &HandlePoint, t: f64) -> f64 {
    let (b, bp, _, level) = h.floats();
    let level_term = level * t;
    if h.k == 0 {
        return level_term;
    }
    let s = (b * bp).sqrt();
    let quad = b * norm_sq(&p0.x) + bp * norm_sq(&p0.y);
    let cross: f64 = p0.x.iter().zip(&p0.y).map(|(x, y)| x * y).sum();
    let arg = 4.0 * s * t;
    3.0 * (quad * arg.sinh() / (4.0 * s) + cross * (arg.cosh() - 1.0) / 2.0) + level_term
}

fn hamiltonian_time_for_action(h: &ModelHandle, p0: &HandlePoint, action: f64) -> f64 {
    if action <= 0.0 {
        return 0.0;
    }
    let f = |t: f64| action_along_flow(h, p0, t) - action;
    let mut hi = action / to_f64(&h.level).max(f64::MIN_POSITIVE);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Index of the linearized flow along the trajectory from `p0` that carries
/// Reeb action `action`, with the growth bound `N·action − 2n`.
///
/// `belt` is the constant `C` of the neighbourhood `b'|y|² ≤ C`. `p0` must
/// lie on the level set, and the segment must stay in the neighbourhood.
pub fn segment_index_growth(
    h: &ModelHandle,
    p0: &HandlePoint,
    action: f64,
    belt: f64,
) -> Result<SegmentGrowth, HandleError> {
    h.check_on_level(p0)?;
    let (_, bp, c_sq, level) = h.floats();
    let in_belt = |p: &HandlePoint| {
        let value = bp * norm_sq(&p.y);
        if value > belt {
            Err(HandleError::OutsideBelt { value, bound: belt })
        } else {
            Ok(())
        }
    };
    in_belt(p0)?;
    let speed_sum: f64 = c_sq.iter().map(|c| 2.0 / c).sum();
    let rate = speed_sum / PI / (6.0 * belt + 4.0 * level);
    let bound = rate * action - 2.0 * h.n as f64;
    let t = hamiltonian_time_for_action(h, p0, action);
    // |y(t)|² is convex in t, so both ends inside means the whole segment is.
    in_belt(&flow_closed_form(h, p0, t))?;
    let mu_segment = if t > 0.0 {
        let path = BlockPath::new(linearized_blocks(h)?, t)?;
        rs_index_numeric_with(&path.into(), &CrossingOptions::default())?
    } else {
        IndexValue::ZERO
    };
    Ok(SegmentGrowth {
        mu_segment,
        bound,
        rate,
        hamiltonian_time: t,
        rotation_angle: speed_sum * t,
    })
}

impl fmt::Display for ReebOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sigma_{}^{} (action {}pi, mu {}, reduced {})",
            self.l,
            self.m,
            format_rational(&self.action_over_pi),
            self.mu,
            self.reduced
        )
    }
}
