//! Morse chain data of a subcritical filling and its rational Betti numbers.
//!
//! Boundary coefficients are keyed `(p, q)` with `index(q) = index(p) + 1`,
//! the coboundary direction; over ℚ the Betti numbers of the complex and of
//! its dual agree.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::rational::{format_rational, rank_integer, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalPoint {
    pub id: String,
    pub index: usize,
    pub h_value: Option<Q>,
}

impl CriticalPoint {
    pub fn new(id: impl Into<String>, index: usize) -> Self {
        Self {
            id: id.into(),
            index,
            h_value: None,
        }
    }

    pub fn with_height(mut self, h: Q) -> Self {
        self.h_value = Some(h);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorseData {
    pub n: usize,
    pub critical_points: Vec<CriticalPoint>,
    /// `(p, q) ↦ a_q`, with `index(q) = index(p) + 1`. Zero entries are
    /// allowed and ignored.
    pub boundary: BTreeMap<(String, String), BigInt>,
    /// Skip the single-minimum requirement (and the checks that rely on it).
    pub allow_multiple_minima: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DimensionTooSmall { n: usize },
    DuplicateId { id: String },
    Subcriticality { id: String, index: usize, n: usize },
    MinimumCount { count: usize },
    UnknownPoint { id: String },
    BoundaryDegree { from: String, to: String },
    /// With a single minimum every coefficient out of it must vanish, or
    /// the filling would have no degree-zero homology.
    MinimumCoboundary { to: String },
    BoundarySquare { from: String, to: String, value: BigInt },
    HeightOrder { lower: String, higher: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionTooSmall { n } => write!(f, "n = {n} is below 2"),
            Self::DuplicateId { id } => write!(f, "critical point id {id:?} appears twice"),
            Self::Subcriticality { id, index, n } => {
                write!(f, "critical point {id:?} has index {index}, not below n = {n}")
            }
            Self::MinimumCount { count } => {
                write!(f, "expected exactly one critical point of index 0, found {count}")
            }
            Self::UnknownPoint { id } => write!(f, "boundary references unknown point {id:?}"),
            Self::BoundaryDegree { from, to } => {
                write!(f, "boundary entry ({from:?}, {to:?}) does not raise the index by one")
            }
            Self::MinimumCoboundary { to } => {
                write!(f, "coefficient from the minimum to {to:?} must vanish")
            }
            Self::BoundarySquare { from, to, value } => {
                write!(f, "composite coefficient ({from:?} -> {to:?}) is {value}, not 0")
            }
            Self::HeightOrder { lower, higher } => {
                write!(f, "{lower:?} has lower index but is not below {higher:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorseError {
    #[error("invalid Morse data: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidData(Vec<Violation>),
}

/// Ranks indexed by degree; absent degrees have rank 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GradedRanks {
    ranks: BTreeMap<i64, usize>,
}

impl GradedRanks {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, degree: i64) -> usize {
        self.ranks.get(&degree).copied().unwrap_or(0)
    }

    /// Stores `rank`; zero ranks are dropped.
    pub fn set(&mut self, degree: i64, rank: usize) {
        if rank == 0 {
            self.ranks.remove(&degree);
        } else {
            self.ranks.insert(degree, rank);
        }
    }

    pub fn add(&mut self, degree: i64, rank: usize) {
        let total = self.get(degree) + rank;
        self.set(degree, total);
    }

    /// Nonzero entries in increasing degree.
    pub fn iter(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.ranks.iter().map(|(&d, &r)| (d, r))
    }

    /// Ranks for every degree in `lo..=hi`, zeros included.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<(i64, usize)> {
        (lo..=hi).map(|d| (d, self.get(d))).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.iter()
            .map(|(d, r)| if d.rem_euclid(2) == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }

    pub fn restrict(&self, lo: i64, hi: i64) -> GradedRanks {
        GradedRanks {
            ranks: self.ranks.range(lo..=hi).map(|(&d, &r)| (d, r)).collect(),
        }
    }
}

impl MorseData {
    pub fn new(n: usize, critical_points: Vec<CriticalPoint>) -> Self {
        Self {
            n,
            critical_points,
            boundary: BTreeMap::new(),
            allow_multiple_minima: false,
        }
    }

    pub fn with_coefficient(mut self, from: &str, to: &str, a: i64) -> Self {
        self.boundary.insert((from.to_string(), to.to_string()), BigInt::from(a));
        self
    }

    /// The ball `B^{2n}`: a single minimum.
    pub fn ball(n: usize) -> Self {
        Self::new(n, vec![CriticalPoint::new("p0", 0)])
    }

    /// The minimum plus `s` index-1 points with zero coefficients (a
    /// boundary connected sum of `s` copies of `S¹ × S^{2n−2}`).
    pub fn one_handles(n: usize, s: usize) -> Self {
        let mut pts = vec![CriticalPoint::new("p0", 0)];
        pts.extend((1..=s).map(|j| CriticalPoint::new(format!("q{j}"), 1)));
        Self::new(n, pts)
    }

    pub fn point(&self, id: &str) -> Option<&CriticalPoint> {
        self.critical_points.iter().find(|p| p.id == id)
    }

    /// Critical points of the given index, in input order.
    pub fn points_of_index(&self, index: usize) -> Vec<&CriticalPoint> {
        self.critical_points.iter().filter(|p| p.index == index).collect()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.critical_points.iter().map(|p| p.index).max()
    }

    pub fn coefficient(&self, from: &str, to: &str) -> BigInt {
        self.boundary
            .get(&(from.to_string(), to.to_string()))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Matrix of `a_q` from index `j` to index `j+1`: rows are the index
    /// `j+1` points, columns the index `j` points, both in input order.
    pub fn coboundary_matrix(&self, j: usize) -> Vec<Vec<BigInt>> {
        let cols = self.points_of_index(j);
        self.points_of_index(j + 1)
            .iter()
            .map(|q| cols.iter().map(|p| self.coefficient(&p.id, &q.id)).collect())
            .collect()
    }

    /// Rank of [`Self::coboundary_matrix`] over ℚ.
    pub fn coboundary_rank(&self, j: usize) -> usize {
        let m = self.coboundary_matrix(j);
        if m.is_empty() || m[0].is_empty() {
            0
        } else {
            rank_integer(m)
        }
    }

    /// Every violated invariant, in a fixed order. Empty means valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n < 2 {
            out.push(Violation::DimensionTooSmall { n: self.n });
        }
        let mut seen = HashSet::new();
        for p in &self.critical_points {
            if !seen.insert(p.id.as_str()) {
                out.push(Violation::DuplicateId { id: p.id.clone() });
            }
        }
        for p in &self.critical_points {
            if p.index >= self.n {
                out.push(Violation::Subcriticality {
                    id: p.id.clone(),
                    index: p.index,
                    n: self.n,
                });
            }
        }
        let minima = self.points_of_index(0).len();
        if !self.allow_multiple_minima && minima != 1 {
            out.push(Violation::MinimumCount { count: minima });
        }

        let index_of: HashMap<&str, usize> =
            self.critical_points.iter().map(|p| (p.id.as_str(), p.index)).collect();
        let mut structurally_sound = true;
        for ((from, to), a) in &self.boundary {
            let (Some(&i), Some(&j)) = (index_of.get(from.as_str()), index_of.get(to.as_str())) else {
                for id in [from, to] {
                    if !index_of.contains_key(id.as_str()) {
                        out.push(Violation::UnknownPoint { id: id.clone() });
                    }
                }
                structurally_sound = false;
                continue;
            };
            if j != i + 1 {
                out.push(Violation::BoundaryDegree {
                    from: from.clone(),
                    to: to.clone(),
                });
                structurally_sound = false;
            } else if i == 0 && !self.allow_multiple_minima && !a.is_zero() {
                out.push(Violation::MinimumCoboundary { to: to.clone() });
            }
        }

        if structurally_sound {
            out.extend(self.square_violations());
        }

        for p in &self.critical_points {
            for q in &self.critical_points {
                if let (Some(hp), Some(hq)) = (&p.h_value, &q.h_value) {
                    if p.index < q.index && hp >= hq {
                        out.push(Violation::HeightOrder {
                            lower: p.id.clone(),
                            higher: q.id.clone(),
                        });
                    }
                }
            }
        }
        out
    }

    fn square_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let top = self.max_index().unwrap_or(0);
        for j in 0..top.saturating_sub(1) {
            for p in self.points_of_index(j) {
                for r in self.points_of_index(j + 2) {
                    let value: BigInt = self
                        .points_of_index(j + 1)
                        .iter()
                        .map(|q| self.coefficient(&p.id, &q.id) * self.coefficient(&q.id, &r.id))
                        .sum();
                    if !value.is_zero() {
                        out.push(Violation::BoundarySquare {
                            from: p.id.clone(),
                            to: r.id.clone(),
                            value,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), MorseError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(MorseError::InvalidData(v))
        }
    }

    /// Number of critical points of each index.
    pub fn chain_ranks(&self) -> GradedRanks {
        let mut g = GradedRanks::new();
        for p in &self.critical_points {
            g.add(p.index as i64, 1);
        }
        g
    }
}

/// Rational Betti numbers `b_j = c_j − rank δ^j − rank δ^{j−1}`.
pub fn homology_ranks(d: &MorseData) -> Result<GradedRanks, MorseError> {
    d.validate()?;
    Ok(betti_unchecked(d))
}

pub(crate) fn betti_unchecked(d: &MorseData) -> GradedRanks {
    let mut g = GradedRanks::new();
    let Some(top) = d.max_index() else {
        return g;
    };
    let ranks: Vec<usize> = (0..=top).map(|j| d.coboundary_rank(j)).collect();
    for j in 0..=top {
        let c = d.points_of_index(j).len();
        let incoming = if j == 0 { 0 } else { ranks[j - 1] };
        g.set(j as i64, c - ranks[j] - incoming);
    }
    g
}

impl fmt::Display for CriticalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (index {}", self.id, self.index)?;
        if let Some(h) = &self.h_value {
            write!(f, ", h = {}", format_rational(h))?;
        }
        write!(f, ")")
    }
}
