//! Transition matrices of subshifts of finite type.
//!
//! A transition matrix is a square 0/1 matrix with no zero row and no zero
//! column. Entry `(i, j)` of `A^k` counts the allowable words with `k + 1`
//! entries running from symbol `i` to symbol `j`, so word counts are kept as
//! exact big integers: `‖A^n‖` grows like `ρ(A)^n` and the Gelfand-type
//! estimate is evaluated at `n` in the thousands.
//!
//! Symbols are 0-based inside the library. Error payloads that name a row or
//! column use 1-based indices, matching how matrices are written in files.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Iteration cap for power iteration, shared across all strongly connected components.
pub const MAX_POWER_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix has no rows")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("entry ({row}, {col}) is {value}, expected 0 or 1")]
    EntryNotBit { row: usize, col: usize, value: i64 },
    #[error("row {0} has no nonzero entry")]
    ZeroRow(usize),
    #[error("column {0} has no nonzero entry")]
    ZeroColumn(usize),
    #[error("need at least 2 symbols, got {0}")]
    TooSmall(usize),
    #[error("{count} allowable words exceed the enumeration cap {cap}")]
    CountTooLarge { count: BigUint, cap: usize },
    #[error(
        "power iteration did not converge in {iterations} iterations (last {last}, gap {gap})"
    )]
    NoConvergence {
        iterations: usize,
        last: f64,
        gap: f64,
    },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("word length must be at least 1")]
    ZeroLength,
    #[error("malformed matrix JSON: {0}")]
    Parse(String),
}

impl MatrixError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            MatrixError::Empty => "Empty",
            MatrixError::NotSquare { .. } => "NotSquare",
            MatrixError::EntryNotBit { .. } => "EntryNotBit",
            MatrixError::ZeroRow(_) => "ZeroRow",
            MatrixError::ZeroColumn(_) => "ZeroColumn",
            MatrixError::TooSmall(_) => "TooSmall",
            MatrixError::CountTooLarge { .. } => "CountTooLarge",
            MatrixError::NoConvergence { .. } => "NoConvergence",
            MatrixError::InvalidTolerance(_) => "InvalidTolerance",
            MatrixError::ZeroLength => "ZeroLength",
            MatrixError::Parse(_) => "Parse",
        }
    }
}

/// A validated `N × N` transition matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    size: usize,
    bits: Vec<bool>,
}

/// On-disk form: `{"n": 2, "rows": [[1,1],[1,0]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub rows: Vec<Vec<i64>>,
}

impl TransitionMatrix {
    /// Validates a row-major array of entries.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, MatrixError> {
        let size = rows.len();
        if size == 0 {
            return Err(MatrixError::Empty);
        }
        let mut bits = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(MatrixError::NotSquare {
                    row: i + 1,
                    len: row.len(),
                    expected: size,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => bits.push(false),
                    1 => bits.push(true),
                    _ => {
                        return Err(MatrixError::EntryNotBit {
                            row: i + 1,
                            col: j + 1,
                            value: v,
                        })
                    }
                }
            }
        }
        Self::from_bits(size, bits)
    }

    fn from_bits(size: usize, bits: Vec<bool>) -> Result<Self, MatrixError> {
        debug_assert_eq!(bits.len(), size * size);
        let m = TransitionMatrix { size, bits };
        if let Some(i) = (0..size).find(|&i| m.row_sum(i) == 0) {
            return Err(MatrixError::ZeroRow(i + 1));
        }
        if let Some(j) = (0..size).find(|&j| m.col_sum(j) == 0) {
            return Err(MatrixError::ZeroColumn(j + 1));
        }
        Ok(m)
    }

    pub fn from_file(file: &MatrixFile) -> Result<Self, MatrixError> {
        if file.rows.len() != file.n {
            return Err(MatrixError::NotSquare {
                row: file.rows.len(),
                len: file.rows.first().map_or(0, Vec::len),
                expected: file.n,
            });
        }
        Self::from_rows(&file.rows)
    }

    pub fn from_json(text: &str) -> Result<Self, MatrixError> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| MatrixError::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            n: self.size,
            rows: (0..self.size)
                .map(|i| (0..self.size).map(|j| self.get(i, j) as i64).collect())
                .collect(),
        }
    }

    /// All-ones matrix (full shift on `n` symbols).
    pub fn full(n: usize) -> Self {
        assert!(n >= 1);
        TransitionMatrix {
            size: n,
            bits: vec![true; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1);
        let bits = (0..n * n).map(|k| k / n == k % n).collect();
        TransitionMatrix { size: n, bits }
    }

    /// The cyclic permutation `i -> i + 1 mod n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let bits = (0..n * n).map(|k| (k / n + 1) % n == k % n).collect();
        TransitionMatrix { size: n, bits }
    }

    /// `[[1,1],[1,0]]`.
    pub fn golden_mean() -> Self {
        TransitionMatrix {
            size: 2,
            bits: vec![true, true, true, false],
        }
    }

    /// Rejection-samples an admissible matrix with i.i.d. Bernoulli(`density`) entries.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, size: usize, density: f64) -> Self {
        assert!(size >= 1 && density > 0.0 && density <= 1.0);
        loop {
            let bits = (0..size * size).map(|_| rng.gen_bool(density)).collect();
            if let Ok(m) = Self::from_bits(size, bits) {
                return m;
            }
        }
    }

    /// Like [`TransitionMatrix::random`], but keeps only irreducible samples.
    pub fn random_irreducible<R: Rng + ?Sized>(rng: &mut R, size: usize, density: f64) -> Self {
        loop {
            let m = Self::random(rng, size, density);
            if m.is_irreducible() {
                return m;
            }
        }
    }

    /// Every admissible matrix of the given size, in lexicographic bit order.
    pub fn enumerate_all(size: usize) -> impl Iterator<Item = TransitionMatrix> {
        assert!(
            (1..=5).contains(&size),
            "exhaustive enumeration limited to N <= 5"
        );
        let cells = size * size;
        (0u64..(1u64 << cells)).filter_map(move |mask| {
            let bits = (0..cells)
                .map(|k| mask >> (cells - 1 - k) & 1 == 1)
                .collect();
            Self::from_bits(size, bits).ok()
        })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.size + j]
    }

    /// Errors unless the matrix has at least two symbols.
    pub fn require_nontrivial(&self) -> Result<(), MatrixError> {
        if self.size < 2 {
            Err(MatrixError::TooSmall(self.size))
        } else {
            Ok(())
        }
    }

    pub fn row_sum(&self, i: usize) -> usize {
        (0..self.size).filter(|&j| self.get(i, j)).count()
    }

    pub fn col_sum(&self, j: usize) -> usize {
        (0..self.size).filter(|&i| self.get(i, j)).count()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.size).filter(move |&j| self.get(i, j))
    }

    /// Whether every adjacent pair of `word` is permitted.
    pub fn is_allowable(&self, word: &[usize]) -> bool {
        word.iter().all(|&s| s < self.size) && word.windows(2).all(|w| self.get(w[0], w[1]))
    }

    pub fn to_count_matrix(&self) -> CountMatrix {
        CountMatrix {
            size: self.size,
            entries: self
                .bits
                .iter()
                .map(|&b| if b { BigUint::one() } else { BigUint::zero() })
                .collect(),
        }
    }

    /// Exact `A^k`, with `A^0` the identity.
    pub fn power(&self, k: u64) -> CountMatrix {
        let mut result = CountMatrix::identity(self.size);
        let mut base = self.to_count_matrix();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Number of allowable words with `entries` symbols, i.e. `‖A^(entries-1)‖`.
    pub fn count_allowable_words(&self, entries: usize) -> Result<BigUint, MatrixError> {
        if entries == 0 {
            return Err(MatrixError::ZeroLength);
        }
        Ok(self.power(entries as u64 - 1).entrywise_norm())
    }

    /// Calls `visit` on every allowable word with `entries` symbols, in lexicographic order.
    pub fn for_each_allowable_word<F: FnMut(&[usize])>(&self, entries: usize, mut visit: F) {
        if entries == 0 {
            return;
        }
        let n = self.size;
        let mut word = vec![0usize; entries];
        // Depth-first with an explicit cursor per position.
        let mut depth = 0usize;
        let mut next = vec![0usize; entries];
        loop {
            let start = next[depth];
            let found = (start..n).find(|&s| depth == 0 || self.get(word[depth - 1], s));
            match found {
                Some(s) => {
                    word[depth] = s;
                    next[depth] = s + 1;
                    if depth + 1 == entries {
                        visit(&word);
                    } else {
                        depth += 1;
                        next[depth] = 0;
                    }
                }
                None => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
            }
        }
    }

    /// All allowable words with `entries` symbols, refusing when their number exceeds `cap`.
    pub fn enumerate_allowable_words(
        &self,
        entries: usize,
        cap: usize,
    ) -> Result<Vec<Vec<usize>>, MatrixError> {
        let count = self.count_allowable_words(entries)?;
        if count > BigUint::from(cap) {
            return Err(MatrixError::CountTooLarge { count, cap });
        }
        let mut words = Vec::with_capacity(count.to_usize().unwrap_or(0));
        self.for_each_allowable_word(entries, |w| words.push(w.to_vec()));
        Ok(words)
    }

    /// `‖A^n‖^(1/n)` with the entrywise-sum norm.
    pub fn gelfand_estimate(&self, n: u64) -> f64 {
        assert!(n >= 1, "gelfand_estimate needs n >= 1");
        (ln_biguint(&self.power(n).entrywise_norm()) / n as f64).exp()
    }

    /// `ν = max(min row sum, min column sum)`, a lower bound for `ρ(A)`.
    pub fn nu(&self) -> usize {
        let min_row = (0..self.size).map(|i| self.row_sum(i)).min().unwrap_or(0);
        let min_col = (0..self.size).map(|j| self.col_sum(j)).min().unwrap_or(0);
        min_row.max(min_col)
    }

    /// Some row has at least two permitted successors.
    pub fn has_branching(&self) -> bool {
        (0..self.size).any(|i| self.row_sum(i) >= 2)
    }

    /// Whether the directed graph of the matrix is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        let from_zero = self.reachable_from(0);
        if from_zero.iter().any(|r| !r) {
            return false;
        }
        (0..self.size).all(|i| self.reachable_from(i)[0])
    }

    /// Nodes reachable from `start` by a path of length >= 0.
    fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.size];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            for j in self.successors(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen
    }

    /// Strongly connected components, each sorted, in order of their smallest member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let reach: Vec<Vec<bool>> = (0..self.size).map(|i| self.reachable_from(i)).collect();
        let mut assigned = vec![false; self.size];
        let mut comps = Vec::new();
        for i in 0..self.size {
            if assigned[i] {
                continue;
            }
            let comp: Vec<usize> = (i..self.size)
                .filter(|&j| reach[i][j] && reach[j][i])
                .collect();
            for &j in &comp {
                assigned[j] = true;
            }
            comps.push(comp);
        }
        comps
    }

    /// Spectral radius by power iteration.
    ///
    /// Each strongly connected component is iterated separately on `B + I`,
    /// which is primitive, starting from the all-ones vector with max-norm
    /// renormalization. A component is converged when successive Rayleigh
    /// quotients differ by less than `tol` and the Collatz-Wielandt bracket
    /// `[min (Bx)_i/x_i, max (Bx)_i/x_i]` has closed to the same width.
    /// `ρ(A)` is the largest component value minus one. Components that carry
    /// no cycle contribute 0.
    pub fn spectral_radius(&self, tol: f64) -> Result<f64, MatrixError> {
        self.spectral_radius_with(tol, MAX_POWER_ITERATIONS)
    }

    pub fn spectral_radius_with(&self, tol: f64, max_iters: usize) -> Result<f64, MatrixError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(MatrixError::InvalidTolerance(tol));
        }
        let mut budget = max_iters;
        let mut best = 0.0f64;
        for comp in self.strongly_connected_components() {
            if comp.len() == 1 && !self.get(comp[0], comp[0]) {
                continue;
            }
            let rho = self.component_radius(&comp, tol, &mut budget)?;
            best = best.max(rho);
        }
        Ok(best)
    }

    fn component_radius(
        &self,
        comp: &[usize],
        tol: f64,
        budget: &mut usize,
    ) -> Result<f64, MatrixError> {
        let m = comp.len();
        let mut x = vec![1.0f64; m];
        let mut y = vec![0.0f64; m];
        let mut prev = f64::NAN;
        let mut gap = f64::INFINITY;
        let mut iterations = 0usize;
        while *budget > 0 {
            *budget -= 1;
            iterations += 1;
            for (r, &i) in comp.iter().enumerate() {
                let mut acc = x[r];
                for (c, &j) in comp.iter().enumerate() {
                    if self.get(i, j) {
                        acc += x[c];
                    }
                }
                y[r] = acc;
            }
            let num: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            let den: f64 = x.iter().map(|a| a * a).sum();
            let q = num / den;
            // Collatz-Wielandt: min and max of (Bx)_i / x_i bracket the Perron root.
            let (lo, hi) = x
                .iter()
                .zip(&y)
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), (a, b)| {
                    (lo.min(b / a), hi.max(b / a))
                });
            let scale = y.iter().cloned().fold(0.0f64, f64::max);
            for (xi, yi) in x.iter_mut().zip(&y) {
                *xi = yi / scale;
            }
            if iterations > 1 {
                gap = (q - prev).abs();
                // Equal successive quotients alone can be a coincidence; also require a closed bracket.
                let bracket = (hi - lo).max(0.0);
                if gap < tol && bracket < tol.max(64.0 * f64::EPSILON * hi) {
                    return Ok(q - 1.0);
                }
            }
            prev = q;
        }
        Err(MatrixError::NoConvergence {
            iterations,
            last: prev - 1.0,
            gap,
        })
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.size {
            let row: Vec<&str> = (0..self.size)
                .map(|j| if self.get(i, j) { "1" } else { "0" })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Square matrix of exact non-negative integers, e.g. a power of a transition matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    size: usize,
    entries: Vec<BigUint>,
}

impl CountMatrix {
    pub fn identity(size: usize) -> Self {
        let entries = (0..size * size)
            .map(|k| {
                if k / size == k % size {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            })
            .collect();
        CountMatrix { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.size + j]
    }

    pub fn mul(&self, other: &CountMatrix) -> CountMatrix {
        assert_eq!(self.size, other.size);
        let n = self.size;
        let mut entries = vec![BigUint::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        CountMatrix { size: n, entries }
    }

    /// Sum of all entries.
    pub fn entrywise_norm(&self) -> BigUint {
        self.entries.iter().sum()
    }

    pub fn rows_u64(&self) -> Option<Vec<Vec<u64>>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j).to_u64()).collect())
            .collect()
    }
}

/// Natural log of a big integer without overflowing `f64`.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head fits in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
