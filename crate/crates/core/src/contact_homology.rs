//! Cylindrical contact complex of the boundary `M` of a subcritical filling
//! (and of its stabilization `M′`), built from Morse data.
//!
//! Each critical point `p` and multiplicity `m ≥ 1` gives a generator
//! `γ_p^m` of degree `2n − 4 − index(p) + 2m` on `M` (`+2` on `M′`). The
//! differential preserves `m` and, on each multiplicity block, is the Morse
//! coboundary.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::morse_complex::{betti_unchecked, GradedRanks, MorseData, MorseError};
use crate::rational::{rank_rational, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HCError {
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error("boundary squares to a nonzero map out of degree {degree}")]
    BoundarySquareNonzero { degree: i64 },
    #[error("multiplicity cutoff must be at least 1")]
    InvalidCutoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    /// The contact boundary `M`, of dimension `2n − 1`.
    M,
    /// The stabilization `M′ = ∂(V × ℂ)`, of dimension `2n + 1`.
    MPrime,
}

impl Target {
    /// Degree of `γ_p^m` minus `2m − index(p)`.
    fn offset(self, n: usize) -> i64 {
        let base = 2 * n as i64 - 4;
        match self {
            Target::M => base,
            Target::MPrime => base + 2,
        }
    }

    pub fn contact_dimension(self, n: usize) -> usize {
        match self {
            Target::M => 2 * n - 1,
            Target::MPrime => 2 * n + 1,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::M => "M",
            Target::MPrime => "Mprime",
        })
    }
}

/// Inclusive degree interval; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeWindow {
    pub lo: i64,
    pub hi: i64,
}

impl DegreeWindow {
    pub fn new(lo: i64, hi: i64) -> Self {
        Self { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, d: i64) -> bool {
        self.lo <= d && d <= self.hi
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

/// `2n − 4 − index + 2m` on `M`, two more on `M′`.
pub fn generator_degree(n: usize, index: usize, m: u64, target: Target) -> i64 {
    target.offset(n) - index as i64 + 2 * m as i64
}

/// Smallest multiplicity cutoff whose blocks cover every degree up to
/// `hi + 1`: `⌈(hi + 4)/2⌉`, at least 1.
pub fn default_m_o(hi: i64) -> u64 {
    ((hi + 4).max(0) as u64).div_ceil(2).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HCGenerator {
    pub critical_point_id: String,
    pub index: usize,
    pub multiplicity: u64,
    pub degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HCComplex {
    pub n: usize,
    pub target: Target,
    pub generators: Vec<HCGenerator>,
    /// Generator position ↦ nonzero terms of its boundary.
    pub boundary: BTreeMap<usize, Vec<(usize, Q)>>,
    pub m_o: u64,
    pub window: DegreeWindow,
}

/// Assembles the complex for multiplicities `1..=m_o`. A multiplicity block
/// is included whole when any of its generators falls in the window, so
/// homology at the window edges is computed from complete blocks.
pub fn build_hc_complex(
    d: &MorseData,
    m_o: u64,
    window: DegreeWindow,
    target: Target,
) -> Result<HCComplex, HCError> {
    d.validate()?;
    if m_o == 0 {
        return Err(HCError::InvalidCutoff);
    }
    let mut generators = Vec::new();
    let mut position: BTreeMap<(u64, &str), usize> = BTreeMap::new();
    for m in 1..=m_o {
        let touches = d
            .critical_points
            .iter()
            .any(|p| window.contains(generator_degree(d.n, p.index, m, target)));
        if !touches {
            continue;
        }
        for p in &d.critical_points {
            position.insert((m, p.id.as_str()), generators.len());
            generators.push(HCGenerator {
                critical_point_id: p.id.clone(),
                index: p.index,
                multiplicity: m,
                degree: generator_degree(d.n, p.index, m, target),
            });
        }
    }

    // ∂γ_p^m = m · Σ_q (a_q / m) γ_q^m
    let mut boundary: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
    for ((from, to), a) in &d.boundary {
        if a.is_zero() {
            continue;
        }
        for m in 1..=m_o {
            let (Some(&src), Some(&dst)) = (position.get(&(m, from.as_str())), position.get(&(m, to.as_str()))) else {
                continue;
            };
            let mult = Q::from_integer(m.into());
            let weight = &mult * (Q::from_integer(a.clone()) / &mult);
            boundary.entry(src).or_default().push((dst, weight));
        }
    }
    for terms in boundary.values_mut() {
        terms.sort_by_key(|(dst, _)| *dst);
    }

    Ok(HCComplex {
        n: d.n,
        target,
        generators,
        boundary,
        m_o,
        window,
    })
}

impl HCComplex {
    pub fn contact_dimension(&self) -> usize {
        self.target.contact_dimension(self.n)
    }

    /// Positions of generators in degree `deg`.
    pub fn in_degree(&self, deg: i64) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&g| self.generators[g].degree == deg)
            .collect()
    }

    pub fn degrees(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.generators.iter().map(|g| g.degree).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn boundary_coefficient(&self, src: usize, dst: usize) -> Q {
        self.boundary
            .get(&src)
            .and_then(|terms| terms.iter().find(|(d, _)| *d == dst))
            .map(|(_, q)| q.clone())
            .unwrap_or_else(Q::zero)
    }

    /// Matrix of `∂: C_deg → C_{deg−1}`, rows indexed by the target basis.
    pub fn boundary_matrix(&self, deg: i64) -> Vec<Vec<Q>> {
        let src = self.in_degree(deg);
        let dst = self.in_degree(deg - 1);
        dst.iter()
            .map(|&t| src.iter().map(|&s| self.boundary_coefficient(s, t)).collect())
            .collect()
    }

    fn boundary_rank(&self, deg: i64) -> usize {
        let m = self.boundary_matrix(deg);
        if m.is_empty() || m[0].is_empty() {
            0
        } else {
            rank_rational(&m)
        }
    }

    /// Degrees `d` for which `∂∘∂` out of `C_d` is nonzero.
    pub fn square_defects(&self) -> Vec<i64> {
        let mut bad = Vec::new();
        for deg in self.degrees() {
            let first = self.in_degree(deg - 1);
            let second = self.in_degree(deg - 2);
            let nonzero = self.in_degree(deg).iter().any(|&s| {
                second.iter().any(|&t| {
                    let sum: Q = first
                        .iter()
                        .map(|&mid| self.boundary_coefficient(s, mid) * self.boundary_coefficient(mid, t))
                        .sum();
                    !sum.is_zero()
                })
            });
            if nonzero {
                bad.push(deg);
            }
        }
        bad
    }
}

/// Homology of the complex, degree by degree, restricted to its window.
pub fn hc_ranks_chain(cx: &HCComplex) -> Result<GradedRanks, HCError> {
    if let Some(&degree) = cx.square_defects().first() {
        return Err(HCError::BoundarySquareNonzero { degree });
    }
    let mut g = GradedRanks::new();
    if cx.window.is_empty() {
        return Ok(g);
    }
    for deg in cx.window.degrees() {
        let dim = cx.in_degree(deg).len();
        if dim == 0 {
            continue;
        }
        g.set(deg, dim - cx.boundary_rank(deg) - cx.boundary_rank(deg + 1));
    }
    Ok(g)
}

/// Homology of the single multiplicity-`m` block, in every degree it spans.
pub fn block_ranks(cx: &HCComplex, m: u64) -> GradedRanks {
    let mut sub = cx.clone();
    let keep: Vec<usize> = (0..cx.generators.len())
        .filter(|&g| cx.generators[g].multiplicity == m)
        .collect();
    let renumber: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    sub.generators = keep.iter().map(|&g| cx.generators[g].clone()).collect();
    sub.boundary = cx
        .boundary
        .iter()
        .filter_map(|(s, terms)| {
            let s = *renumber.get(s)?;
            let terms = terms
                .iter()
                .filter_map(|(t, q)| Some((*renumber.get(t)?, q.clone())))
                .collect();
            Some((s, terms))
        })
        .collect();
    let (lo, hi) = match (sub.degrees().first(), sub.degrees().last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return GradedRanks::new(),
    };
    sub.window = DegreeWindow::new(lo, hi);
    hc_ranks_chain(&sub).unwrap_or_default()
}

fn closed_form_from_betti(betti: &GradedRanks, n: usize, i: i64, target: Target, m_o: Option<u64>) -> usize {
    // Multiplicity m ≥ 1 contributes b_j with j = offset + 2m − i.
    let offset = target.offset(n);
    betti
        .iter()
        .filter(|&(j, _)| {
            let twice_m = j + i - offset;
            twice_m >= 2 && twice_m % 2 == 0 && m_o.is_none_or(|cap| twice_m / 2 <= cap as i64)
        })
        .map(|(_, r)| r)
        .sum()
}

/// `Σ_{m≥0} b_{2(n+m−1)−i}(V)` on `M`, `Σ_{m≥0} b_{2(n+m)−i}(V)` on `M′`.
pub fn hc_ranks_closed_form(d: &MorseData, i: i64, target: Target) -> Result<usize, HCError> {
    d.validate()?;
    Ok(closed_form_from_betti(&betti_unchecked(d), d.n, i, target, None))
}

/// The closed form over a window, optionally keeping only multiplicities
/// up to `m_o`.
pub fn hc_ranks_closed_form_window(
    d: &MorseData,
    window: DegreeWindow,
    target: Target,
    m_o: Option<u64>,
) -> Result<GradedRanks, HCError> {
    d.validate()?;
    let betti = betti_unchecked(d);
    let mut g = GradedRanks::new();
    if !window.is_empty() {
        for i in window.degrees() {
            g.set(i, closed_form_from_betti(&betti, d.n, i, target, m_o));
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeShiftRow {
    pub degree: i64,
    pub rank_m: usize,
    pub rank_m_prime_shifted: usize,
}

impl DegreeShiftRow {
    pub fn matches(&self) -> bool {
        self.rank_m == self.rank_m_prime_shifted
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeShiftReport {
    pub rows: Vec<DegreeShiftRow>,
}

impl DegreeShiftReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(DegreeShiftRow::matches)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &DegreeShiftRow> {
        self.rows.iter().filter(|r| !r.matches())
    }
}

/// Compares the rank on `M` in degree `i` with the rank on `M′` in degree
/// `i + 2`, for each `i` in the window.
pub fn check_degree_shift(d: &MorseData, window: DegreeWindow) -> Result<DegreeShiftReport, HCError> {
    d.validate()?;
    let betti = betti_unchecked(d);
    let rows = if window.is_empty() {
        Vec::new()
    } else {
        window
            .degrees()
            .map(|i| DegreeShiftRow {
                degree: i,
                rank_m: closed_form_from_betti(&betti, d.n, i, Target::M, None),
                rank_m_prime_shifted: closed_form_from_betti(&betti, d.n, i + 2, Target::MPrime, None),
            })
            .collect()
    };
    Ok(DegreeShiftReport { rows })
}

/// `m·(e^{−h₊} − e^{−h₋})`.
pub fn cylinder_energy(h_plus: f64, h_minus: f64, m: u64) -> f64 {
    m as f64 * ((-h_plus).exp() - (-h_minus).exp())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardWarning {
    /// Generators in degree 0 or 1 on a contact manifold of dimension > 3.
    LowDegree { degree: i64, count: usize },
    /// On a 3-manifold, an even generator whose boundary hits an odd one.
    EvenToOdd { from: String, to: String, multiplicity: u64 },
    /// On a 3-manifold, an odd generator outside degrees `2m − 1`.
    OddDegree { id: String, multiplicity: u64, degree: i64 },
    BoundarySquare { degree: i64 },
}

impl fmt::Display for GuardWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LowDegree { degree, count } => write!(f, "{count} generator(s) in degree {degree}"),
            Self::EvenToOdd { from, to, multiplicity } => {
                write!(f, "boundary from {from}^{multiplicity} hits odd generator {to}^{multiplicity}")
            }
            Self::OddDegree { id, multiplicity, degree } => {
                write!(f, "odd generator {id}^{multiplicity} sits in degree {degree}")
            }
            Self::BoundarySquare { degree } => write!(f, "boundary squared is nonzero out of degree {degree}"),
        }
    }
}

/// Structural preconditions under which the differential squares to zero,
/// followed by a direct check. An empty list means no warnings.
pub fn d_squared_guard(cx: &HCComplex) -> Vec<GuardWarning> {
    let mut out = Vec::new();
    if cx.contact_dimension() > 3 {
        for degree in [0, 1] {
            let count = cx.in_degree(degree).len();
            if count > 0 {
                out.push(GuardWarning::LowDegree { degree, count });
            }
        }
    } else {
        for g in cx.generators.iter().filter(|g| g.degree.rem_euclid(2) == 1) {
            if g.degree != 2 * g.multiplicity as i64 - 1 {
                out.push(GuardWarning::OddDegree {
                    id: g.critical_point_id.clone(),
                    multiplicity: g.multiplicity,
                    degree: g.degree,
                });
            }
        }
        for (&src, terms) in &cx.boundary {
            let s = &cx.generators[src];
            if s.degree.rem_euclid(2) != 0 {
                continue;
            }
            for (dst, q) in terms {
                let t = &cx.generators[*dst];
                if t.degree.rem_euclid(2) == 1 && !q.is_zero() {
                    out.push(GuardWarning::EvenToOdd {
                        from: s.critical_point_id.clone(),
                        to: t.critical_point_id.clone(),
                        multiplicity: s.multiplicity,
                    });
                }
            }
        }
    }
    out.extend(
        cx.square_defects()
            .into_iter()
            .map(|degree| GuardWarning::BoundarySquare { degree }),
    );
    out
}

/// Whether every weight in the boundary is an integer (it always is, since
/// the `m` and `1/m` factors cancel).
pub fn boundary_is_integral(cx: &HCComplex) -> bool {
    cx.boundary
        .values()
        .flatten()
        .all(|(_, q)| q.denom() == &num_bigint::BigInt::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse_complex::CriticalPoint;
    use num_bigint::BigInt;

    fn w(lo: i64, hi: i64) -> DegreeWindow {
        DegreeWindow::new(lo, hi)
    }

    #[test]
    fn ball_generators() {
        let cx = build_hc_complex(&MorseData::ball(2), 4, w(0, 8), Target::M).unwrap();
        let degs: Vec<(u64, i64)> = cx.generators.iter().map(|g| (g.multiplicity, g.degree)).collect();
        assert_eq!(degs, vec![(1, 2), (2, 4), (3, 6), (4, 8)]);
        assert!(cx.boundary.is_empty());
    }

    #[test]
    fn one_handle_generators() {
        let cx = build_hc_complex(&MorseData::one_handles(2, 2), 3, w(0, 6), Target::M).unwrap();
        for m in 1..=3u64 {
            let odd: Vec<_> = cx
                .generators
                .iter()
                .filter(|g| g.multiplicity == m && g.index == 1)
                .collect();
            assert_eq!(odd.len(), 2);
            assert!(odd.iter().all(|g| g.degree == 2 * m as i64 - 1));
        }
    }

    #[test]
    fn chain_ranks_examples() {
        let cx = build_hc_complex(&MorseData::ball(2), default_m_o(10), w(0, 10), Target::M).unwrap();
        let r = hc_ranks_chain(&cx).unwrap();
        assert_eq!(r.iter().collect::<Vec<_>>(), vec![(2, 1), (4, 1), (6, 1), (8, 1), (10, 1)]);

        let d = MorseData::one_handles(2, 3);
        let cx = build_hc_complex(&d, default_m_o(9), w(0, 9), Target::M).unwrap();
        let r = hc_ranks_chain(&cx).unwrap();
        for deg in 0..=9 {
            let expected = match deg {
                0 => 0,
                d if d % 2 == 1 => 3,
                _ => 1,
            };
            assert_eq!(r.get(deg), expected, "degree {deg}");
        }
    }

    #[test]
    fn acyclic_pair_vanishes() {
        let d = MorseData::new(
            3,
            vec![
                CriticalPoint::new("p0", 0),
                CriticalPoint::new("a", 1),
                CriticalPoint::new("b", 2),
            ],
        )
        .with_coefficient("a", "b", 1);
        let cx = build_hc_complex(&d, 6, w(0, 10), Target::M).unwrap();
        let r = hc_ranks_chain(&cx).unwrap();
        // only the minimum survives: degrees 2n−4+2m = 2m+2
        assert_eq!(r.iter().collect::<Vec<_>>(), vec![(4, 1), (6, 1), (8, 1), (10, 1)]);
        assert!(boundary_is_integral(&cx));
    }

    #[test]
    fn closed_form_examples() {
        let ball = MorseData::ball(2);
        assert_eq!(hc_ranks_closed_form(&ball, 2, Target::M).unwrap(), 1);
        assert_eq!(hc_ranks_closed_form(&ball, 3, Target::M).unwrap(), 0);
        assert_eq!(hc_ranks_closed_form(&ball, 0, Target::M).unwrap(), 0);
        let s3 = MorseData::one_handles(2, 3);
        assert_eq!(hc_ranks_closed_form(&s3, 5, Target::M).unwrap(), 3);
        assert_eq!(hc_ranks_closed_form(&ball, 4, Target::MPrime).unwrap(), 1);
        assert_eq!(hc_ranks_closed_form(&ball, 2, Target::MPrime).unwrap(), 0);
    }

    #[test]
    fn truncated_closed_form_matches_chain_at_any_cutoff() {
        let d = MorseData::one_handles(3, 2);
        for m_o in 1..=4 {
            let cx = build_hc_complex(&d, m_o, w(0, 12), Target::M).unwrap();
            let chain = hc_ranks_chain(&cx).unwrap();
            let closed = hc_ranks_closed_form_window(&d, w(0, 12), Target::M, Some(m_o)).unwrap();
            assert_eq!(chain, closed, "m_o = {m_o}");
        }
    }

    #[test]
    fn degree_shift_examples() {
        assert!(check_degree_shift(&MorseData::ball(2), w(0, 10)).unwrap().passed());
        assert!(check_degree_shift(&MorseData::one_handles(3, 2), w(0, 12)).unwrap().passed());
        let empty = check_degree_shift(&MorseData::ball(2), w(5, 4)).unwrap();
        assert!(empty.rows.is_empty() && empty.passed());
    }

    #[test]
    fn energy() {
        assert_eq!(cylinder_energy(1.5, 1.5, 3), 0.0);
        assert!((cylinder_energy(0.0, 1.0, 2) - 1.264_241_117_657_115).abs() < 1e-12);
        assert!((cylinder_energy(0.0, 1.0, 6) - 3.0 * cylinder_energy(0.0, 1.0, 2)).abs() < 1e-12);
        assert!(cylinder_energy(0.2, 0.9, 1) > 0.0);
    }

    #[test]
    fn guard_cases() {
        let cx = build_hc_complex(&MorseData::ball(3), 5, w(0, 10), Target::M).unwrap();
        assert!(d_squared_guard(&cx).is_empty());
        let cx = build_hc_complex(&MorseData::one_handles(2, 2), 5, w(0, 10), Target::M).unwrap();
        assert!(d_squared_guard(&cx).is_empty());

        let mut bad = build_hc_complex(
            &MorseData::new(
                4,
                vec![
                    CriticalPoint::new("p0", 0),
                    CriticalPoint::new("a", 1),
                    CriticalPoint::new("b", 2),
                    CriticalPoint::new("c", 3),
                ],
            ),
            2,
            w(0, 10),
            Target::M,
        )
        .unwrap();
        let pos = |id: &str| {
            bad.generators
                .iter()
                .position(|g| g.critical_point_id == id && g.multiplicity == 1)
                .unwrap()
        };
        let (a, b, c) = (pos("a"), pos("b"), pos("c"));
        bad.boundary.insert(a, vec![(b, Q::from_integer(BigInt::from(1)))]);
        bad.boundary.insert(b, vec![(c, Q::from_integer(BigInt::from(1)))]);
        let warnings = d_squared_guard(&bad);
        assert!(warnings.iter().any(|w| matches!(w, GuardWarning::BoundarySquare { .. })));
        assert!(matches!(hc_ranks_chain(&bad), Err(HCError::BoundarySquareNonzero { .. })));
    }

    #[test]
    fn default_cutoff_saturates() {
        assert_eq!(default_m_o(20), 12);
        assert_eq!(default_m_o(-10), 1);
        assert_eq!(default_m_o(1), 3);
    }

    #[test]
    fn rejects_zero_cutoff_and_invalid_data() {
        assert_eq!(
            build_hc_complex(&MorseData::ball(2), 0, w(0, 4), Target::M),
            Err(HCError::InvalidCutoff)
        );
        let bad = MorseData::new(2, vec![]);
        assert!(matches!(
            build_hc_complex(&bad, 2, w(0, 4), Target::M),
            Err(HCError::Morse(_))
        ));
    }
}
