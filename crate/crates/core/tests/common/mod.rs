#![allow(dead_code)]

use hc_core::handle_dynamics::{HandlePoint, ModelHandle};
use hc_core::morse_complex::{CriticalPoint, MorseData};
use hc_core::rational::{q_frac, Q};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;

/// Random valid Morse data with known Betti numbers.
pub struct PlantedMorse {
    pub data: MorseData,
    /// Expected rational Betti numbers by index.
    pub betti: Vec<usize>,
}

type IMat = Vec<Vec<i64>>;

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

/// A random unimodular matrix and its inverse, from a few elementary moves.
fn random_unimodular<R: Rng>(rng: &mut R, n: usize, moves: usize) -> (IMat, IMat) {
    let mut u = identity(n);
    let mut inv = identity(n);
    if n < 2 {
        if n == 1 && rng.random_bool(0.5) {
            u[0][0] = -1;
            inv[0][0] = -1;
        }
        return (u, inv);
    }
    for _ in 0..moves {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        match rng.random_range(0..3) {
            0 => {
                // row_i += c·row_j on u; inverse: col_j −= c·col_i on inv
                let c = rng.random_range(-2i64..=2);
                for col in 0..n {
                    u[i][col] += c * u[j][col];
                }
                for row in inv.iter_mut() {
                    row[j] -= c * row[i];
                }
            }
            1 => {
                u.swap(i, j);
                for row in inv.iter_mut() {
                    row.swap(i, j);
                }
            }
            _ => {
                for col in 0..n {
                    u[i][col] = -u[i][col];
                }
                for row in inv.iter_mut() {
                    row[i] = -row[i];
                }
            }
        }
    }
    (u, inv)
}

/// Builds data from a standard form: cancelling pairs with nonzero integer
/// coefficients between adjacent indices `≥ 1`, free generators, and a
/// single minimum, then changes basis in each index by a random unimodular
/// matrix.
pub fn planted_morse<R: Rng>(rng: &mut R, n: usize, max_points: usize) -> PlantedMorse {
    let top = n - 1;
    let mut free = vec![0usize; n];
    let mut pairs = vec![0usize; n]; // pairs[j]: between index j and j+1
    free[0] = 1;
    let mut budget = max_points - 1;
    let mut slots: Vec<(usize, bool)> = Vec::new(); // (index, is_pair)
    for j in 1..=top {
        slots.push((j, false));
        if j < top {
            slots.push((j, true));
        }
    }
    let extra = rng.random_range(0..=budget);
    for _ in 0..extra {
        let (j, pair) = slots[rng.random_range(0..slots.len())];
        let cost = if pair { 2 } else { 1 };
        if cost > budget {
            continue;
        }
        budget -= cost;
        if pair {
            pairs[j] += 1;
        } else {
            free[j] += 1;
        }
    }
    let counts: Vec<usize> = (0..n)
        .map(|j| free[j] + pairs[j] + if j > 0 { pairs[j - 1] } else { 0 })
        .collect();

    // Basis at index j: [down-partners (pairs[j-1]), up-partners (pairs[j]), free].
    let standard: Vec<IMat> = (0..top)
        .map(|j| {
            let mut m = vec![vec![0i64; counts[j]]; counts[j + 1]];
            let down_j = if j > 0 { pairs[j - 1] } else { 0 };
            for p in 0..pairs[j] {
                let mut a = rng.random_range(1i64..=3);
                if rng.random_bool(0.5) {
                    a = -a;
                }
                m[p][down_j + p] = a;
            }
            m
        })
        .collect();

    let bases: Vec<(IMat, IMat)> = (0..n)
        .map(|j| {
            if j == 0 {
                (identity(counts[0]), identity(counts[0]))
            } else {
                random_unimodular(rng, counts[j], 3 * counts[j])
            }
        })
        .collect();

    let mut points = Vec::new();
    let mut ids: Vec<Vec<String>> = Vec::new();
    for (j, &c) in counts.iter().enumerate() {
        let mut row = Vec::new();
        for i in 0..c {
            let id = if j == 0 { "min".to_string() } else { format!("c{j}_{i}") };
            let h = q_frac(100 * j as i64 + rng.random_range(0..90), 100);
            points.push(CriticalPoint::new(id.clone(), j).with_height(h));
            row.push(id);
        }
        ids.push(row);
    }
    // shuffle input order so nothing depends on it
    for i in (1..points.len()).rev() {
        let k = rng.random_range(0..=i);
        points.swap(i, k);
    }
    let mut data = MorseData::new(n, points);
    for j in 0..top {
        // δ' = U_{j+1} δ U_j^{-1}
        let conj = mat_mul(&mat_mul(&bases[j + 1].0, &standard[j]), &bases[j].1);
        for (r, row) in conj.iter().enumerate() {
            for (c, &a) in row.iter().enumerate() {
                if a != 0 {
                    data.boundary
                        .insert((ids[j][c].clone(), ids[j + 1][r].clone()), BigInt::from(a));
                }
            }
        }
    }
    PlantedMorse { data, betti: free }
}

/// Rank by Smith normal form over ℤ.
pub fn snf_rank(m: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block as pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let (q, _) = a[i][t].div_mod_floor(&a[t][t]);
            if !q.is_zero() {
                for j in t..cols {
                    let v = &a[t][j] * &q;
                    a[i][j] -= v;
                }
            }
            if !a[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..cols {
            let (q, _) = a[t][j].div_mod_floor(&a[t][t]);
            if !q.is_zero() {
                for row in a.iter_mut().skip(t) {
                    let v = &row[t] * &q;
                    row[j] -= v;
                }
            }
            if !a[t][j].is_zero() {
                clean = false;
            }
        }
        if clean {
            t += 1;
        }
    }
    t
}

/// A random handle with rational parameters.
pub fn random_handle<R: Rng>(rng: &mut R, n_range: std::ops::RangeInclusive<usize>) -> ModelHandle {
    let n = rng.random_range(n_range);
    let k = rng.random_range(0..n);
    let bp = q_frac(rng.random_range(1..=20), 20);
    let b = &bp + q_frac(rng.random_range(1..=20), 20);
    let c_sq = (k..n)
        .map(|_| q_frac(rng.random_range(1..=40), rng.random_range(1..=40)))
        .collect();
    let level = q_frac(rng.random_range(1..=40), 20);
    ModelHandle::new(n, k, b, bp, c_sq, level).expect("valid random handle")
}

/// A random point on the level set with `b|x|² − b'|y|²` below the level,
/// the remainder spread over the `z` planes.
pub fn random_point_on_level<R: Rng>(rng: &mut R, h: &ModelHandle, spread: f64) -> HandlePoint {
    let b = hc_core::rational::to_f64(h.b());
    let bp = hc_core::rational::to_f64(h.b_prime());
    let level = hc_core::rational::to_f64(h.level());
    let c_sq: Vec<f64> = h.c_sq().iter().map(hc_core::rational::to_f64).collect();
    loop {
        let x: Vec<f64> = (0..h.k()).map(|_| rng.random_range(-spread..=spread)).collect();
        let y: Vec<f64> = (0..h.k()).map(|_| rng.random_range(-spread..=spread)).collect();
        let hyper = b * x.iter().map(|v| v * v).sum::<f64>() - bp * y.iter().map(|v| v * v).sum::<f64>();
        let rest = level - hyper;
        if rest <= 0.0 {
            continue;
        }
        let weights: Vec<f64> = c_sq.iter().map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let z = weights
            .iter()
            .zip(&c_sq)
            .map(|(w, c)| {
                let r = (rest * w / total * c).sqrt();
                Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        return HandlePoint::new(x, y, z);
    }
}

pub fn q(p: i64, d: i64) -> Q {
    q_frac(p, d)
}
