//! Jumpy words over `{0, …, n−1}`, basins, and the lower bound on the index
//! of orbits that wander through several handles.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Default cap on the number of words an exhaustive check may enumerate.
pub const DEFAULT_WORD_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WordError {
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("exhaustive check needs {} words, budget is {cap}", word_total(*.required))]
    BudgetExceeded { required: u64, cap: u64 },
    #[error("expected {expected} segment actions, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("word {0} is not jumpy")]
    NotJumpy(String),
}

fn word_total(required: u64) -> String {
    if required == u64::MAX {
        format!("more than {}", u64::MAX - 1)
    } else {
        required.to_string()
    }
}

/// A non-empty word over the alphabet `{0, …, n−1}`, `n ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<u32>,
    alphabet: u32,
}

impl Word {
    pub fn new(letters: Vec<u32>, alphabet: u32) -> Result<Self, WordError> {
        if alphabet < 2 {
            return Err(WordError::InvalidWord(format!("alphabet size {alphabet} is below 2")));
        }
        if letters.is_empty() {
            return Err(WordError::InvalidWord("empty word".into()));
        }
        if let Some(&bad) = letters.iter().find(|&&l| l >= alphabet) {
            return Err(WordError::InvalidWord(format!("letter {bad} outside 0..{alphabet}")));
        }
        Ok(Self { letters, alphabet })
    }

    /// Parses digits (`"0101"`) or comma/space separated letters
    /// (`"0, 10, 3"`).
    pub fn parse(s: &str, alphabet: u32) -> Result<Self, WordError> {
        let s = s.trim();
        let separated = s.contains(',') || s.contains(char::is_whitespace);
        let letters: Option<Vec<u32>> = if separated {
            s.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| u32::from_str(t).ok())
                .collect()
        } else {
            s.chars().map(|c| c.to_digit(10)).collect()
        };
        let letters = letters.ok_or_else(|| WordError::InvalidWord(format!("cannot parse {s:?}")))?;
        Self::new(letters, alphabet)
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alphabet <= 10 {
            for l in &self.letters {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.letters.iter().map(u32::to_string).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

/// No two adjacent letters coincide.
pub fn is_jumpy(w: &Word) -> bool {
    w.letters.windows(2).all(|p| p[0] != p[1])
}

/// A basin: letters `i..=j` (1-based) strictly below the equal flanking
/// letters at positions `i−1` and `j+1`, both equal to `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basin {
    pub i: usize,
    pub j: usize,
    pub k: u32,
}

impl Basin {
    /// Checks the defining conditions against `w`.
    pub fn holds_in(&self, w: &Word) -> bool {
        let m = w.len();
        let l = &w.letters;
        1 < self.i
            && self.i <= self.j
            && self.j < m
            && self.k > 0
            && self.k < w.alphabet
            && l[self.i - 2] == self.k
            && l[self.j] == self.k
            && l[self.i - 1..self.j].iter().all(|&v| v < self.k)
    }
}

/// For each left flank position (0-based), the basin it opens, if any: the
/// interior runs up to the first later letter `≥` the flank, which must be
/// equal to it.
fn basins_by_left_flank(w: &Word) -> impl Iterator<Item = Basin> + '_ {
    let l = &w.letters;
    (0..l.len()).filter_map(move |left| {
        let k = l[left];
        let right = (left + 1..l.len()).find(|&r| l[r] >= k)?;
        (right > left + 1 && l[right] == k).then_some(Basin {
            i: left + 2,
            j: right,
            k,
        })
    })
}

/// All basins of `w`, ordered by right end. Each right end closes at most
/// one basin, so the first entry is the leftmost-ending one, which is also
/// innermost among those sharing its end.
pub fn all_basins(w: &Word) -> Vec<Basin> {
    let mut v: Vec<Basin> = basins_by_left_flank(w).collect();
    v.sort_by_key(|b| (b.j, std::cmp::Reverse(b.i)));
    v
}

/// The basin whose right flank comes first, or `None`.
pub fn find_basin(w: &Word) -> Option<Basin> {
    basins_by_left_flank(w).min_by_key(|b| (b.j, std::cmp::Reverse(b.i)))
}

/// Size of a largest family of basins with pairwise disjoint interiors,
/// found by earliest-end-first selection.
pub fn count_disjoint_basins(w: &Word) -> usize {
    disjoint_basins(w).len()
}

/// The basins chosen by [`count_disjoint_basins`].
pub fn disjoint_basins(w: &Word) -> Vec<Basin> {
    let mut chosen: Vec<Basin> = Vec::new();
    for b in all_basins(w) {
        if chosen.last().is_none_or(|last| b.i > last.j) {
            chosen.push(b);
        }
    }
    chosen
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordLemmaMode {
    Exhaustive { cap: u64 },
    Randomized { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordLemmaReport {
    pub n: u32,
    pub word_length: usize,
    pub mode: WordLemmaMode,
    pub words_checked: u64,
    pub counterexamples: Vec<Word>,
}

/// `n·(n−1)^{2ⁿ−1}`, saturating at `u64::MAX`.
pub fn jumpy_word_count(n: u32, length: usize) -> u64 {
    if length == 0 {
        return 0;
    }
    let mut total = n as u64;
    for _ in 1..length {
        total = total.saturating_mul(n as u64 - 1);
    }
    total
}

/// Checks that every jumpy word of length `2ⁿ` has a basin, either over all
/// such words or over random samples.
pub fn verify_word_lemma(n: u32, mode: WordLemmaMode) -> Result<WordLemmaReport, WordError> {
    if !(2..=24).contains(&n) {
        return Err(WordError::InvalidWord(format!("alphabet size {n} outside 2..=24")));
    }
    let length = 1usize << n;
    let mut counterexamples = Vec::new();
    let mut check = |letters: &[u32]| {
        let w = Word {
            letters: letters.to_vec(),
            alphabet: n,
        };
        if find_basin(&w).is_none() {
            counterexamples.push(w);
        }
    };
    let words_checked = match mode {
        WordLemmaMode::Exhaustive { cap } => {
            let required = jumpy_word_count(n, length);
            if required > cap {
                return Err(WordError::BudgetExceeded { required, cap });
            }
            for_each_jumpy_word(n, length, &mut check);
            required
        }
        WordLemmaMode::Randomized { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut buf = vec![0u32; length];
            for _ in 0..samples {
                fill_random_jumpy(&mut rng, n, &mut buf);
                check(&buf);
            }
            samples
        }
    };
    Ok(WordLemmaReport {
        n,
        word_length: length,
        mode,
        words_checked,
        counterexamples,
    })
}

/// Visits every jumpy word of the given length in lexicographic order.
pub fn for_each_jumpy_word(n: u32, length: usize, mut f: impl FnMut(&[u32])) {
    if length == 0 || n < 2 {
        return;
    }
    // Odometer over choices: letter 0 in 0..n, later letters in 0..n-1,
    // mapped past the previous letter.
    let mut choice = vec![0u32; length];
    let mut word = vec![0u32; length];
    loop {
        word[0] = choice[0];
        for p in 1..length {
            let c = choice[p];
            word[p] = if c >= word[p - 1] { c + 1 } else { c };
        }
        f(&word);
        let mut p = length;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            let limit = if p == 0 { n } else { n - 1 };
            choice[p] += 1;
            if choice[p] < limit {
                break;
            }
            choice[p] = 0;
        }
    }
}

fn fill_random_jumpy<R: Rng>(rng: &mut R, n: u32, buf: &mut [u32]) {
    buf[0] = rng.random_range(0..n);
    for p in 1..buf.len() {
        let c = rng.random_range(0..n - 1);
        buf[p] = if c >= buf[p - 1] { c + 1 } else { c };
    }
}

/// A uniformly random jumpy word of the given length.
pub fn random_jumpy_word<R: Rng>(rng: &mut R, n: u32, length: usize) -> Word {
    let mut letters = vec![0u32; length.max(1)];
    fill_random_jumpy(rng, n, &mut letters);
    Word { letters, alphabet: n }
}

/// `max(1, ⌊m/2ⁿ⌋)`.
pub fn c_m(m: u64, n: u32) -> u64 {
    let blocks = if n >= 64 { 0 } else { m >> n };
    blocks.max(1)
}

/// Calibration constants for the wandering-orbit bound: `per_action` is the
/// index gained per unit action inside a handle, `per_threshold` the gain
/// per unit of the action threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Type2Calibration {
    pub per_action: f64,
    pub per_threshold: f64,
}

/// `Σ_j N1·τ_j + N2·c_m(len, n)·T − 4·len·n` for a word `w` whose `len − 1`
/// handle segments carry actions `τ_j`.
pub fn type2_lower_bound(
    w: &Word,
    calibration: Type2Calibration,
    threshold: f64,
    segment_actions: &[f64],
) -> Result<f64, WordError> {
    if !is_jumpy(w) {
        return Err(WordError::NotJumpy(w.to_string()));
    }
    let expected = w.len() - 1;
    if segment_actions.len() != expected {
        return Err(WordError::LengthMismatch {
            expected,
            got: segment_actions.len(),
        });
    }
    let len = w.len() as f64;
    let n = w.alphabet as f64;
    let segments: f64 = segment_actions.iter().map(|t| calibration.per_action * t).sum();
    let spread = c_m(w.len() as u64, w.alphabet) as f64;
    Ok(segments + calibration.per_threshold * spread * threshold - 4.0 * len * n)
}

/// Smallest threshold `T` beyond which [`type2_lower_bound`] exceeds
/// `target` for every word of this length and alphabet with nonnegative
/// segment actions: `(K + 4·len·n)/(N2·c_m)`.
pub fn type2_threshold(target: f64, length: usize, n: u32, per_threshold: f64) -> f64 {
    (target + 4.0 * length as f64 * n as f64) / (per_threshold * c_m(length as u64, n) as f64)
}
