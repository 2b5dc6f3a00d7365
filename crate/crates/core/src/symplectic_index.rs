//! Conley–Zehnder indices of paths of symplectic matrices.
//!
//! Coordinates are ordered plane by plane, `(x_1, y_1, x_2, y_2, …)`, and the
//! symplectic form is `Ω = diag(J, …, J)` with `J = [[0, 1], [-1, 0]]`, so that
//! `Ω(e_x, e_y) = 1`. With this form a positive rotation `t ↦ e^{ωtJ₀}`,
//! `J₀ = [[0,-1],[1,0]]`, has positive definite crossing forms.
//!
//! Two independent routes are provided: [`rs_index_numeric`] counts signed
//! crossings of a sampled path with the eigenvalue-1 locus, and
//! [`rs_index_blocks`] evaluates the per-block closed form.

use std::f64::consts::PI;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Neg, Sub};

use nalgebra::{DMatrix, Matrix2, SymmetricEigen, SVD};
use num_complex::Complex64;
use thiserror::Error;

pub const DEFAULT_GRID: usize = 2048;
pub const DEFAULT_KERNEL_TOL: f64 = 1e-9;
pub const DEFAULT_REFINE_TOL: f64 = 1e-12;
pub const DEFAULT_SYMPLECTIC_TOL: f64 = 1e-8;
/// Eigenvalue tolerance used to declare a numeric return map degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Grid points per full turn of the fastest rotation block.
const POINTS_PER_TURN: f64 = 16.0;
/// Above this Frobenius norm a 2×2 block uses `|2 - tr Φ| / σ_max` for its
/// smallest singular value instead of a direct SVD.
const LARGE_BLOCK_NORM: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("crossing at t = {time} has a singular crossing form")]
    NonRegularCrossing { time: f64 },
    #[error("sample {sample} is not symplectic (defect {defect:e})")]
    NotSymplectic { sample: usize, defect: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// An index stored as twice its value, so endpoint half-contributions stay exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexValue {
    twice: i64,
}

impl IndexValue {
    pub const ZERO: IndexValue = IndexValue { twice: 0 };

    pub fn from_twice(twice: i64) -> Self {
        Self { twice }
    }

    pub fn from_int(value: i64) -> Self {
        Self { twice: 2 * value }
    }

    pub fn twice_value(self) -> i64 {
        self.twice
    }

    /// The index as an integer, if it is one.
    pub fn as_integer(self) -> Option<i64> {
        (self.twice % 2 == 0).then_some(self.twice / 2)
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

impl fmt::Display for IndexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{}/2", self.twice),
        }
    }
}

impl Add for IndexValue {
    type Output = IndexValue;
    fn add(self, rhs: Self) -> Self {
        Self::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for IndexValue {
    type Output = IndexValue;
    fn sub(self, rhs: Self) -> Self {
        Self::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for IndexValue {
    type Output = IndexValue;
    fn neg(self) -> Self {
        Self::from_twice(-self.twice)
    }
}

impl Sum for IndexValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

/// Generator of one invariant symplectic plane of a [`BlockPath`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockGenerator {
    /// `t ↦` rotation by `ωt`, generator `ω·[[0,-1],[1,0]]`.
    Rotation { omega: f64 },
    /// `t ↦ e^{tA}` with `A = [[0,b],[a,0]]`.
    Hyperbolic { a: f64, b: f64 },
    ConstantIdentity,
}

impl BlockGenerator {
    pub fn rotation(omega: f64) -> Result<Self, IndexError> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(IndexError::InvalidPath(format!(
                "rotation speed must be positive, got {omega}"
            )));
        }
        Ok(Self::Rotation { omega })
    }

    pub fn hyperbolic(a: f64, b: f64) -> Result<Self, IndexError> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
            return Err(IndexError::InvalidPath(format!(
                "hyperbolic parameters must be positive, got ({a}, {b})"
            )));
        }
        Ok(Self::Hyperbolic { a, b })
    }

    fn validate(&self) -> Result<(), IndexError> {
        match *self {
            Self::Rotation { omega } => Self::rotation(omega).map(|_| ()),
            Self::Hyperbolic { a, b } => Self::hyperbolic(a, b).map(|_| ()),
            Self::ConstantIdentity => Ok(()),
        }
    }

    pub fn generator(&self) -> Matrix2<f64> {
        match *self {
            Self::Rotation { omega } => Matrix2::new(0.0, -omega, omega, 0.0),
            Self::Hyperbolic { a, b } => Matrix2::new(0.0, b, a, 0.0),
            Self::ConstantIdentity => Matrix2::zeros(),
        }
    }

    pub fn exp(&self, t: f64) -> Matrix2<f64> {
        match *self {
            Self::Rotation { omega } => {
                let (s, c) = (omega * t).sin_cos();
                Matrix2::new(c, -s, s, c)
            }
            Self::Hyperbolic { a, b } => {
                let rate = (a * b).sqrt();
                let (ch, sh) = ((rate * t).cosh(), (rate * t).sinh());
                Matrix2::new(ch, b / rate * sh, a / rate * sh, ch)
            }
            Self::ConstantIdentity => Matrix2::identity(),
        }
    }

    /// Eigenvalues of `exp(t·A)`.
    pub fn eigenvalues(&self, t: f64) -> [Complex64; 2] {
        match *self {
            Self::Rotation { omega } => {
                let z = Complex64::from_polar(1.0, omega * t);
                [z, z.conj()]
            }
            Self::Hyperbolic { a, b } => {
                let e = ((a * b).sqrt() * t).exp();
                [Complex64::new(e, 0.0), Complex64::new(1.0 / e, 0.0)]
            }
            Self::ConstantIdentity => [Complex64::new(1.0, 0.0); 2],
        }
    }
}

/// Direct sum of planar one-parameter groups over `[0, duration]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPath {
    blocks: Vec<BlockGenerator>,
    duration: f64,
}

impl BlockPath {
    pub fn new(blocks: Vec<BlockGenerator>, duration: f64) -> Result<Self, IndexError> {
        if blocks.is_empty() {
            return Err(IndexError::InvalidPath("block path needs at least one block".into()));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(IndexError::InvalidPath(format!(
                "duration must be positive, got {duration}"
            )));
        }
        for b in &blocks {
            b.validate()?;
        }
        Ok(Self { blocks, duration })
    }

    pub fn blocks(&self) -> &[BlockGenerator] {
        &self.blocks
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn dim(&self) -> usize {
        2 * self.blocks.len()
    }

    /// `P ⊕ Q` over the common duration.
    pub fn direct_sum(&self, other: &BlockPath) -> Result<BlockPath, IndexError> {
        if self.duration != other.duration {
            return Err(IndexError::InvalidPath(
                "direct sum needs equal durations".into(),
            ));
        }
        let mut blocks = self.blocks.clone();
        blocks.extend_from_slice(&other.blocks);
        BlockPath::new(blocks, self.duration)
    }

    pub fn with_block(&self, block: BlockGenerator) -> Result<BlockPath, IndexError> {
        let mut blocks = self.blocks.clone();
        blocks.push(block);
        BlockPath::new(blocks, self.duration)
    }

    pub fn at(&self, t: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (i, b) in self.blocks.iter().enumerate() {
            m.fixed_view_mut::<2, 2>(2 * i, 2 * i).copy_from(&b.exp(t));
        }
        m
    }

    fn velocity(&self, t: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (i, b) in self.blocks.iter().enumerate() {
            m.fixed_view_mut::<2, 2>(2 * i, 2 * i)
                .copy_from(&(b.generator() * b.exp(t)));
        }
        m
    }

    fn max_turns(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| match *b {
                BlockGenerator::Rotation { omega } => omega * self.duration / (2.0 * PI),
                _ => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// Samples the path on `samples + 1` uniformly spaced times.
    pub fn to_sampled(&self, samples: usize) -> SampledPath {
        let samples = samples.max(1);
        let times: Vec<f64> = (0..=samples)
            .map(|i| self.duration * i as f64 / samples as f64)
            .collect();
        let matrices = times.iter().map(|&t| self.at(t)).collect();
        SampledPath { times, matrices }
    }
}

/// Path known only through samples; evaluated by linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    matrices: Vec<DMatrix<f64>>,
}

impl SampledPath {
    /// Validates dimensions, time ordering, the identity start and the
    /// symplectic condition `MᵀΩM = Ω` (max-entry defect at most `tol`).
    pub fn new(times: Vec<f64>, matrices: Vec<DMatrix<f64>>, tol: f64) -> Result<Self, IndexError> {
        if times.len() < 2 || times.len() != matrices.len() {
            return Err(IndexError::InvalidPath(
                "need at least two samples and one matrix per time".into(),
            ));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(IndexError::InvalidPath(
                "times must start at 0 and increase strictly".into(),
            ));
        }
        let dim = matrices[0].nrows();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(IndexError::InvalidPath(format!("dimension {dim} is not even")));
        }
        if matrices.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(IndexError::InvalidPath("matrices must all be square of equal size".into()));
        }
        let start_defect = (&matrices[0] - DMatrix::identity(dim, dim)).amax();
        if start_defect > tol {
            return Err(IndexError::InvalidPath(format!(
                "first matrix is not the identity (defect {start_defect:e})"
            )));
        }
        let omega = standard_form(dim);
        for (sample, m) in matrices.iter().enumerate() {
            let defect = symplectic_defect(m, &omega);
            if !(defect <= tol) {
                return Err(IndexError::NotSymplectic { sample, defect });
            }
        }
        Ok(Self { times, matrices })
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    pub fn end_matrix(&self) -> &DMatrix<f64> {
        self.matrices.last().expect("non-empty")
    }

    fn segment(&self, t: f64) -> usize {
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.times.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.times.len() - 2),
        }
    }

    fn at(&self, t: f64) -> DMatrix<f64> {
        let i = self.segment(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let s = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        &self.matrices[i] * (1.0 - s) + &self.matrices[i + 1] * s
    }

    fn velocity(&self, t: f64) -> DMatrix<f64> {
        let i = self.segment(t);
        (&self.matrices[i + 1] - &self.matrices[i]) / (self.times[i + 1] - self.times[i])
    }

    /// Bound on how far the linear interpolant can sit from the true path
    /// near `t`, estimated from the local second difference.
    fn interpolation_slack(&self, t: f64) -> f64 {
        let n = self.times.len();
        if n < 3 {
            return 0.0;
        }
        let i = self.segment(t).clamp(1, n - 2);
        let second = &self.matrices[i + 1] - &self.matrices[i] * 2.0 + &self.matrices[i - 1];
        0.25 * second.norm()
    }

    /// Largest relative speed `‖ΔM‖ / (Δt · max(1, ‖M‖))` over the segments.
    fn speed_scale(&self) -> f64 {
        self.matrices
            .windows(2)
            .zip(self.times.windows(2))
            .map(|(m, t)| (&m[1] - &m[0]).norm() / ((t[1] - t[0]) * m[0].norm().max(1.0)))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymplecticPath {
    Blocks(BlockPath),
    Sampled(SampledPath),
}

impl From<BlockPath> for SymplecticPath {
    fn from(p: BlockPath) -> Self {
        Self::Blocks(p)
    }
}

impl From<SampledPath> for SymplecticPath {
    fn from(p: SampledPath) -> Self {
        Self::Sampled(p)
    }
}

impl SymplecticPath {
    pub fn dim(&self) -> usize {
        match self {
            Self::Blocks(p) => p.dim(),
            Self::Sampled(p) => p.dim(),
        }
    }

    fn speed_scale(&self) -> f64 {
        match self {
            Self::Blocks(p) => p
                .blocks
                .iter()
                .map(|b| b.generator().norm())
                .fold(0.0, f64::max),
            Self::Sampled(p) => p.speed_scale(),
        }
    }

    fn interpolation_slack(&self, t: f64) -> f64 {
        match self {
            Self::Blocks(_) => 0.0,
            Self::Sampled(p) => p.interpolation_slack(t),
        }
    }

    fn at(&self, t: f64) -> DMatrix<f64> {
        match self {
            Self::Blocks(p) => p.at(t),
            Self::Sampled(p) => p.at(t),
        }
    }

    fn velocity(&self, t: f64) -> DMatrix<f64> {
        match self {
            Self::Blocks(p) => p.velocity(t),
            Self::Sampled(p) => p.velocity(t),
        }
    }

    fn grid(&self, base: usize) -> Vec<f64> {
        match self {
            Self::Blocks(p) => {
                let n = (base as f64).max((POINTS_PER_TURN * p.max_turns()).ceil()) as usize;
                let n = n.max(2);
                (0..=n).map(|i| p.duration * i as f64 / n as f64).collect()
            }
            Self::Sampled(p) => p.times.clone(),
        }
    }
}

/// Numerical settings of the crossing search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingOptions {
    /// Minimum number of grid intervals (block paths refine this by speed).
    pub grid: usize,
    /// Singular-value threshold for the kernel of `Φ(t) − I`.
    pub kernel_tol: f64,
    /// Width at which bisection of a crossing time stops.
    pub refine_tol: f64,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            kernel_tol: DEFAULT_KERNEL_TOL,
            refine_tol: DEFAULT_REFINE_TOL,
        }
    }
}

/// Standard symplectic form `diag(J, …, J)`, `J = [[0,1],[-1,0]]`.
pub fn standard_form(dim: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(dim, dim);
    for i in (0..dim).step_by(2) {
        omega[(i, i + 1)] = 1.0;
        omega[(i + 1, i)] = -1.0;
    }
    omega
}

/// Largest entry of `MᵀΩM − Ω`.
pub fn symplectic_defect(m: &DMatrix<f64>, omega: &DMatrix<f64>) -> f64 {
    (m.transpose() * omega * m - omega).amax()
}

/// Crossing-number index with default settings and kernel tolerance `tol`.
pub fn rs_index_numeric(path: &SymplecticPath, tol: f64) -> Result<IndexValue, IndexError> {
    rs_index_numeric_with(
        path,
        &CrossingOptions {
            kernel_tol: tol,
            ..CrossingOptions::default()
        },
    )
}

/// Robbin–Salamon index `½ sign Γ(0) + Σ sign Γ(t) + ½ sign Γ(T)` computed
/// from crossings located on a grid and refined by golden-section search.
///
/// The path is first split into the finest decomposition into symplectic
/// planes that no sample couples; components that stay at the identity
/// contribute zero, every other component is searched separately.
pub fn rs_index_numeric_with(
    path: &SymplecticPath,
    opts: &CrossingOptions,
) -> Result<IndexValue, IndexError> {
    let grid = path.grid(opts.grid);
    let samples: Vec<DMatrix<f64>> = grid.iter().map(|&t| path.at(t)).collect();
    let components = plane_components(&samples);
    let mut total = IndexValue::ZERO;
    for coords in components {
        let restricted: Vec<DMatrix<f64>> =
            samples.iter().map(|m| m.select_rows(&coords).select_columns(&coords)).collect();
        let stays_identity = restricted
            .iter()
            .all(|m| (m - DMatrix::identity(coords.len(), coords.len())).amax() <= opts.kernel_tol);
        if stays_identity {
            continue;
        }
        let comp = Component {
            path,
            coords: &coords,
            speed: path.speed_scale().max(1.0),
        };
        total = total + comp.index(&grid, &restricted, opts)?;
    }
    Ok(total)
}

/// Groups coordinate planes into blocks that no sample couples.
fn plane_components(samples: &[DMatrix<f64>]) -> Vec<Vec<usize>> {
    let dim = samples[0].nrows();
    let planes = dim / 2;
    let mut parent: Vec<usize> = (0..planes).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for m in samples {
        let thresh = 1e-13 * (1.0 + m.amax());
        for r in 0..dim {
            for c in 0..dim {
                if r / 2 != c / 2 && m[(r, c)].abs() > thresh {
                    let (a, b) = (find(&mut parent, r / 2), find(&mut parent, c / 2));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of_group: Vec<usize> = Vec::new();
    for p in 0..planes {
        let r = find(&mut parent, p);
        let g = match root_of_group.iter().position(|&x| x == r) {
            Some(g) => g,
            None => {
                root_of_group.push(r);
                groups.push(Vec::new());
                groups.len() - 1
            }
        };
        groups[g].extend([2 * p, 2 * p + 1]);
    }
    groups
}

struct Component<'a> {
    path: &'a SymplecticPath,
    coords: &'a [usize],
    speed: f64,
}

impl Component<'_> {
    fn value(&self, t: f64) -> DMatrix<f64> {
        self.path.at(t).select_rows(self.coords).select_columns(self.coords)
    }

    fn velocity(&self, t: f64) -> DMatrix<f64> {
        self.path
            .velocity(t)
            .select_rows(self.coords)
            .select_columns(self.coords)
    }

    fn gap(&self, t: f64) -> f64 {
        min_singular_of_shift(&self.value(t))
    }

    fn threshold(&self, t: f64, opts: &CrossingOptions) -> f64 {
        opts.kernel_tol * self.speed + self.path.interpolation_slack(t)
    }

    fn index(
        &self,
        grid: &[f64],
        samples: &[DMatrix<f64>],
        opts: &CrossingOptions,
    ) -> Result<IndexValue, IndexError> {
        let gaps: Vec<f64> = samples.iter().map(min_singular_of_shift).collect();
        let last = grid.len() - 1;
        let end = grid[last];

        // Φ(0) = I, so the whole space is the kernel at the start.
        let mut twice = self.crossing_signature(0.0, opts)?;

        let end_crossing = gaps[last] <= self.threshold(end, opts);

        let mut interior: Vec<f64> = Vec::new();
        let consider = |lo: f64, hi: f64, interior: &mut Vec<f64>| {
            let (t, g) = golden_min(|t| self.gap(t), lo, hi, opts.refine_tol);
            if g <= self.threshold(t, opts) && t > 0.0 && t < end {
                interior.push(t);
            }
        };
        for i in 1..last {
            if gaps[i] < gaps[i - 1] && gaps[i] <= gaps[i + 1] {
                consider(grid[i - 1], grid[i + 1], &mut interior);
            }
        }
        if !end_crossing && last >= 1 && gaps[last] < gaps[last - 1] {
            consider(grid[last - 1], end, &mut interior);
        }
        interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
        interior.dedup_by(|a, b| (*a - *b).abs() <= 16.0 * opts.refine_tol.max(end * 1e-14));
        if end_crossing {
            let min_sep = 16.0 * opts.refine_tol.max(end * 1e-14);
            interior.retain(|&t| end - t > min_sep);
        }

        for t in interior {
            twice += 2 * self.crossing_signature(t, opts)?;
        }
        if end_crossing {
            twice += self.crossing_signature(end, opts)?;
        }
        Ok(IndexValue::from_twice(twice))
    }

    /// Signature of `v ↦ Ω(v, Φ̇(t)v)` on `ker(Φ(t) − I)`.
    fn crossing_signature(
        &self,
        t: f64,
        opts: &CrossingOptions,
    ) -> Result<i64, IndexError> {
        let dim = self.coords.len();
        let value = self.value(t);
        let velocity = self.velocity(t);
        let thresh = self.threshold(t, opts);
        let shift = &value - DMatrix::identity(dim, dim);
        let svd = SVD::new(shift, false, true);
        let v_t = svd.v_t.expect("requested V");
        let kernel_rows: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] <= thresh)
            .collect();
        if kernel_rows.is_empty() {
            return Ok(0);
        }
        let kernel = v_t.select_rows(&kernel_rows).transpose();
        let omega = standard_form(dim);
        let form = &omega * &velocity;
        let sym = (&form + form.transpose()) * 0.5;
        let restricted = kernel.transpose() * sym * &kernel;
        let eig = SymmetricEigen::new(restricted);
        let form_tol = opts.kernel_tol * self.speed;
        let mut sig = 0i64;
        for &lambda in eig.eigenvalues.iter() {
            if lambda.abs() <= form_tol {
                return Err(IndexError::NonRegularCrossing { time: t });
            }
            sig += if lambda > 0.0 { 1 } else { -1 };
        }
        Ok(sig)
    }
}

/// Smallest singular value of `Φ − I`.
fn min_singular_of_shift(m: &DMatrix<f64>) -> f64 {
    let dim = m.nrows();
    if dim == 2 && m.norm() > LARGE_BLOCK_NORM {
        // σ_min σ_max = |det(Φ − I)| = |2 − tr Φ| for a symplectic 2×2 block,
        // which avoids cancellation when the entries are large.
        let shift = m - DMatrix::identity(2, 2);
        let fro2 = shift.norm_squared();
        let det = 2.0 - m.trace();
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
        let smax = ((fro2 + disc) / 2.0).sqrt();
        return det.abs() / smax;
    }
    let shift = m - DMatrix::identity(dim, dim);
    shift.singular_values().min()
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iters = 0;
    while hi - lo > tol && iters < 200 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
        iters += 1;
    }
    let candidates = [(lo, f(lo)), (hi, f(hi)), (x1, f1), (x2, f2)];
    candidates
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("non-empty")
}

/// Closed-form index of one block over `[0, duration]`.
pub fn block_index(block: &BlockGenerator, duration: f64) -> IndexValue {
    match *block {
        BlockGenerator::Rotation { omega } => rotation_index(omega * duration),
        BlockGenerator::Hyperbolic { .. } | BlockGenerator::ConstantIdentity => IndexValue::ZERO,
    }
}

/// Index of the rotation path with total angle `angle > 0`:
/// `2⌊angle/2π⌋ + 1` off the eigenvalue-1 locus, `angle/π` on it.
pub fn rotation_index(angle: f64) -> IndexValue {
    let turns = angle / (2.0 * PI);
    let nearest = turns.round();
    if nearest >= 1.0 && (turns - nearest).abs() <= 1e-12 * turns.max(1.0) {
        IndexValue::from_int(2 * nearest as i64)
    } else {
        IndexValue::from_int(2 * turns.floor() as i64 + 1)
    }
}

/// Closed-form index by direct-sum additivity over the blocks.
pub fn rs_index_blocks(path: &BlockPath) -> IndexValue {
    path.blocks
        .iter()
        .map(|b| block_index(b, path.duration))
        .sum()
}

/// `ō = μ + (n − 3)`.
pub fn reduced_index(mu: IndexValue, n: usize) -> IndexValue {
    mu + IndexValue::from_int(n as i64 - 3)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMapClass {
    pub eigenvalues: Vec<Complex64>,
    /// Number of real eigenvalues in the open interval (−1, 0).
    pub n_gamma: usize,
    pub degenerate: bool,
}

fn count_in_open_unit_negative(eigs: &[Complex64], tol: f64) -> usize {
    eigs.iter()
        .filter(|z| z.im.abs() <= tol && z.re > -1.0 + tol && z.re < -tol)
        .count()
}

/// Classifies the end matrix of a block path blockwise.
///
/// A rotation block is degenerate when its angle is a multiple of `2π` up to a
/// relative tolerance of `1e-12`; a constant identity block always is.
pub fn classify_return_map(path: &BlockPath) -> ReturnMapClass {
    let t = path.duration;
    let mut eigenvalues = Vec::with_capacity(path.dim());
    let mut degenerate = false;
    for b in &path.blocks {
        eigenvalues.extend(b.eigenvalues(t));
        degenerate |= match *b {
            BlockGenerator::ConstantIdentity => true,
            BlockGenerator::Rotation { omega } => rotation_index(omega * t).as_integer().unwrap() % 2 == 0,
            BlockGenerator::Hyperbolic { .. } => false,
        };
    }
    let n_gamma = count_in_open_unit_negative(&eigenvalues, 0.0);
    ReturnMapClass {
        eigenvalues,
        n_gamma,
        degenerate,
    }
}

/// Numeric classification of an arbitrary end matrix.
pub fn classify_matrix(m: &DMatrix<f64>) -> ReturnMapClass {
    let eigs: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    let degenerate = eigs.iter().any(|z| (z - 1.0).norm() < DEGENERACY_TOL);
    let n_gamma = count_in_open_unit_negative(&eigs, DEGENERACY_TOL);
    ReturnMapClass {
        eigenvalues: eigs,
        n_gamma,
        degenerate,
    }
}

/// An orbit is bad iff it is an even multiple of a simple orbit with an odd
/// number of return-map eigenvalues in (−1, 0).
pub fn is_good(n_gamma_simple: usize, multiplicity: u64) -> bool {
    !(multiplicity.is_multiple_of(2) && n_gamma_simple % 2 == 1)
}
