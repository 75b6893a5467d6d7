use crate::error::{Error, Result};
use crate::matrix::{CMatrix, MatrixSet};

use super::Word;

/// Lexicographic stream of all products of length `n`.
///
/// Prefix products are cached per position, so advancing the word from
/// `(…, i, k, k, …, k)` to `(…, i+1, 0, …, 0)` costs one multiplication per
/// rewritten position. Every multiplication counts as one visited node; once
/// the node budget is exceeded the stream yields a single
/// [`Error::BudgetExceeded`] carrying the number of nodes visited so far and
/// then ends.
pub struct ProductStream<'a> {
    set: &'a MatrixSet,
    letters: Vec<usize>,
    prefixes: Vec<CMatrix>,
    budget: usize,
    visited: usize,
    state: State,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Fresh,
    Running,
    Done,
}

pub fn enumerate_products(set: &MatrixSet, n: usize, budget: usize) -> Result<ProductStream<'_>> {
    if n == 0 {
        return Err(Error::usage("product length must be at least 1"));
    }
    Ok(ProductStream {
        set,
        letters: vec![0; n],
        prefixes: Vec::with_capacity(n),
        budget,
        visited: 0,
        state: State::Fresh,
    })
}

impl ProductStream<'_> {
    pub fn visited(&self) -> usize {
        self.visited
    }

    /// Rebuilds cached prefixes from position `from` onwards.
    fn rebuild(&mut self, from: usize) -> Result<()> {
        self.prefixes.truncate(from);
        for pos in from..self.letters.len() {
            if self.visited >= self.budget {
                return Err(Error::BudgetExceeded {
                    budget: self.budget,
                    visited: self.visited,
                });
            }
            self.visited += 1;
            let a = self.set.get(self.letters[pos]);
            let next = match self.prefixes.last() {
                Some(p) => p * a,
                None => a.clone(),
            };
            self.prefixes.push(next);
        }
        Ok(())
    }
}

impl Iterator for ProductStream<'_> {
    type Item = Result<(Word, CMatrix)>;

    fn next(&mut self) -> Option<Self::Item> {
        let from = match self.state {
            State::Done => return None,
            State::Fresh => {
                self.state = State::Running;
                0
            }
            State::Running => {
                let k = self.set.len();
                let mut pos = self.letters.len();
                loop {
                    if pos == 0 {
                        self.state = State::Done;
                        return None;
                    }
                    pos -= 1;
                    if self.letters[pos] + 1 < k {
                        self.letters[pos] += 1;
                        for l in &mut self.letters[pos + 1..] {
                            *l = 0;
                        }
                        break;
                    }
                }
                pos
            }
        };
        if let Err(e) = self.rebuild(from) {
            self.state = State::Done;
            return Some(Err(e));
        }
        let product = self.prefixes.last().expect("n ≥ 1").clone();
        Some(Ok((Word::from_letters(&self.letters), product)))
    }
}
