//! Points of the one-sided subshift `Σ_N^+(A)` and the shift map.
//!
//! A sequence is stored as an explicit head followed by a cycle repeated
//! forever. Eventually periodic points are dense in the subshift and every
//! computation downstream reads finitely many symbols, so this is the only
//! representation needed.
//!
//! The metric is the first-disagreement ultrametric: `d(s, t) = 2^-k` where
//! `k` is the first index with `s_k != t_k`.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::transition::TransitionMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("the repeating cycle must be non-empty")]
    EmptyCycle,
    #[error("symbol {symbol} is out of range 1..={size}")]
    SymbolOutOfRange { symbol: usize, size: usize },
    #[error("transition {from} -> {to} at index {index} is not allowed")]
    NotAllowable {
        index: usize,
        from: usize,
        to: usize,
    },
    #[error("sequences are over different transition matrices")]
    MatrixMismatch,
    #[error("malformed sequence literal {0:?}")]
    Parse(String),
}

/// An eventually periodic point of `Σ_N^+(A)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    matrix: Arc<TransitionMatrix>,
    prefix: Vec<usize>,
    cycle: Vec<usize>,
}

impl SymbolSequence {
    /// Builds `prefix` followed by `cycle` repeated forever (0-based symbols).
    pub fn new(
        matrix: Arc<TransitionMatrix>,
        prefix: Vec<usize>,
        cycle: Vec<usize>,
    ) -> Result<Self, SequenceError> {
        if cycle.is_empty() {
            return Err(SequenceError::EmptyCycle);
        }
        let n = matrix.size();
        if let Some(&s) = prefix.iter().chain(&cycle).find(|&&s| s >= n) {
            return Err(SequenceError::SymbolOutOfRange {
                symbol: s + 1,
                size: n,
            });
        }
        let seq = SymbolSequence {
            matrix,
            prefix,
            cycle,
        };
        // One full pass over the head, the cycle and its wrap-around.
        let span = seq.prefix.len() + seq.cycle.len() + 1;
        for k in 0..span - 1 {
            let (a, b) = (seq.symbol(k), seq.symbol(k + 1));
            if !seq.matrix.get(a, b) {
                return Err(SequenceError::NotAllowable {
                    index: k,
                    from: a + 1,
                    to: b + 1,
                });
            }
        }
        Ok(seq)
    }

    /// Extends a finite allowable word with the shortest cycle reachable from its last symbol.
    ///
    /// The connecting path, if any, is appended to the head, so the head may
    /// come out longer than `word`.
    pub fn from_word(matrix: Arc<TransitionMatrix>, word: &[usize]) -> Result<Self, SequenceError> {
        let Some(&last) = word.last() else {
            return Err(SequenceError::Parse("empty word".into()));
        };
        if let Some(&s) = word.iter().find(|&&s| s >= matrix.size()) {
            return Err(SequenceError::SymbolOutOfRange {
                symbol: s + 1,
                size: matrix.size(),
            });
        }
        let (path, cycle) = shortest_cycle_tail(&matrix, last);
        let mut prefix = word.to_vec();
        prefix.extend(path);
        Self::new(matrix, prefix, cycle)
    }

    /// Seeded random point: `prefix_len` symbols, each drawn uniformly among
    /// the permitted successors, then the shortest reachable cycle.
    pub fn random(matrix: Arc<TransitionMatrix>, seed: u64, prefix_len: usize) -> Self {
        assert!(prefix_len >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(matrix, &mut rng, prefix_len)
    }

    pub fn random_with<R: rand::Rng + ?Sized>(
        matrix: Arc<TransitionMatrix>,
        rng: &mut R,
        prefix_len: usize,
    ) -> Self {
        assert!(prefix_len >= 1);
        let n = matrix.size();
        let mut word = Vec::with_capacity(prefix_len);
        word.push(rng.gen_range(0..n));
        while word.len() < prefix_len {
            let last = *word.last().unwrap();
            let succ: Vec<usize> = matrix.successors(last).collect();
            word.push(*succ.choose(rng).expect("rows are nonzero"));
        }
        Self::from_word(matrix, &word).expect("generated word is allowable")
    }

    /// Parses `"1,2,1,1|1,2"`: 1-based head, then the repeating cycle.
    /// A literal without `|` is purely periodic.
    pub fn parse(matrix: Arc<TransitionMatrix>, literal: &str) -> Result<Self, SequenceError> {
        let parse_list = |s: &str| -> Result<Vec<usize>, SequenceError> {
            let s = s.trim();
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|t| match t.trim().parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(SequenceError::Parse(literal.to_string())),
                })
                .collect()
        };
        let (prefix, cycle) = match literal.split_once('|') {
            Some((p, c)) => (parse_list(p)?, parse_list(c)?),
            None => (Vec::new(), parse_list(literal)?),
        };
        Self::new(matrix, prefix, cycle)
    }

    pub fn matrix(&self) -> &Arc<TransitionMatrix> {
        &self.matrix
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    /// Symbol at index `k` (0-based index, 0-based symbol).
    #[inline]
    pub fn symbol(&self, k: usize) -> usize {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The first `len` symbols.
    pub fn take(&self, len: usize) -> Vec<usize> {
        (0..len).map(|k| self.symbol(k)).collect()
    }

    /// `σ_A`: drop the first symbol.
    pub fn shift(&self) -> Self {
        let (prefix, cycle) = if self.prefix.is_empty() {
            let mut c = self.cycle.clone();
            c.rotate_left(1);
            (Vec::new(), c)
        } else {
            (self.prefix[1..].to_vec(), self.cycle.clone())
        };
        SymbolSequence {
            matrix: Arc::clone(&self.matrix),
            prefix,
            cycle,
        }
    }

    /// `2^-k` for the first disagreement index `k < depth_cap`, else 0.
    pub fn metric(&self, other: &Self, depth_cap: usize) -> Result<f64, SequenceError> {
        if self.matrix != other.matrix {
            return Err(SequenceError::MatrixMismatch);
        }
        Ok((0..depth_cap)
            .find(|&k| self.symbol(k) != other.symbol(k))
            .map_or(0.0, |k| 0.5f64.powi(k as i32)))
    }

    /// The cylinder of the first `len` symbols.
    pub fn cylinder(&self, len: usize) -> Cylinder {
        Cylinder {
            word: self.take(len),
        }
    }
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(|s| (s + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}|{}", join(&self.prefix), join(&self.cycle))
    }
}

/// A finite allowable word, standing for the set of sequences that begin with it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cylinder {
    word: Vec<usize>,
}

impl Cylinder {
    pub fn new(matrix: &TransitionMatrix, word: Vec<usize>) -> Result<Self, SequenceError> {
        if let Some(&s) = word.iter().find(|&&s| s >= matrix.size()) {
            return Err(SequenceError::SymbolOutOfRange {
                symbol: s + 1,
                size: matrix.size(),
            });
        }
        if let Some(k) = word.windows(2).position(|w| !matrix.get(w[0], w[1])) {
            return Err(SequenceError::NotAllowable {
                index: k,
                from: word[k] + 1,
                to: word[k + 1] + 1,
            });
        }
        Ok(Cylinder { word })
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn contains(&self, seq: &SymbolSequence) -> bool {
        self.word
            .iter()
            .enumerate()
            .all(|(k, &s)| seq.symbol(k) == s)
    }
}

/// Shortest directed cycle reachable from `start` in one or more steps.
///
/// Returns the path strictly between `start` and the cycle's entry node, and
/// the cycle listed from its entry node. Ties go to the shorter connecting
/// path, then the smaller entry node.
fn shortest_cycle_tail(matrix: &TransitionMatrix, start: usize) -> (Vec<usize>, Vec<usize>) {
    let n = matrix.size();
    // BFS from start's successors; start itself is only reached again through a cycle.
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for j in matrix.successors(start) {
        if dist[j] == usize::MAX {
            dist[j] = 1;
            parent[j] = start;
            queue.push_back(j);
        }
    }
    let mut order = Vec::new();
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for j in matrix.successors(i) {
            if dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                parent[j] = i;
                queue.push_back(j);
            }
        }
    }
    let mut best: Option<(usize, usize, usize, Vec<usize>)> = None;
    for &v in &order {
        if let Some(cycle) = shortest_cycle_through(matrix, v) {
            let key = (cycle.len(), dist[v], v);
            if best.as_ref().is_none_or(|b| key < (b.0, b.1, b.2)) {
                best = Some((key.0, key.1, key.2, cycle));
            }
        }
    }
    let (_, _, entry, cycle) = best.expect("every row is nonzero, so a cycle is reachable");
    let mut path = Vec::new();
    // Successors of `start` all sit at depth 1, so `start` never appears mid-chain.
    let mut v = parent[entry];
    while v != start {
        path.push(v);
        v = parent[v];
    }
    path.reverse();
    (path, cycle)
}

/// Shortest cycle `v -> ... -> v`, listed from `v`.
fn shortest_cycle_through(matrix: &TransitionMatrix, v: usize) -> Option<Vec<usize>> {
    let n = matrix.size();
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::from([v]);
    let mut seen = vec![false; n];
    seen[v] = true;
    while let Some(i) = queue.pop_front() {
        for j in matrix.successors(i) {
            if j == v {
                let mut cycle = vec![i];
                let mut k = i;
                while k != v {
                    k = parent[k];
                    cycle.push(k);
                }
                cycle.reverse();
                return Some(cycle);
            }
            if !seen[j] {
                seen[j] = true;
                parent[j] = i;
                queue.push_back(j);
            }
        }
    }
    None
}
