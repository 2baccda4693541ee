//! Symmetric storage for per-pair results over a panel's entities.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// One cell of a pair matrix: either a value or an explicit degenerate
/// marker. Degenerate pairs (e.g. identical series) never leak NaN into
/// downstream sorting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PairCell<T> {
    Value(T),
    Degenerate,
}

impl<T> PairCell<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            PairCell::Value(v) => Some(v),
            PairCell::Degenerate => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, PairCell::Degenerate)
    }
}

/// Symmetric matrix over all unordered entity pairs, diagonal not stored.
/// For n entities exactly n(n-1)/2 cells are kept, indexed by (i, j) with
/// i < j in entity order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix<T> {
    entities: Vec<String>,
    cells: Vec<PairCell<T>>,
}

impl<T: Send> PairMatrix<T> {
    /// Fill the matrix by evaluating `cell` for every unordered pair.
    /// Cells are independent, so the fill runs on a worker pool; each
    /// worker writes a disjoint cell.
    pub fn build<F>(entities: Vec<String>, cell: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<PairCell<T>> + Sync,
    {
        let n = entities.len();
        if n < 2 {
            return Err(Error::Contract(format!(
                "pair matrix needs at least 2 entities, got {n}"
            )));
        }
        let index: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let cells: Result<Vec<PairCell<T>>> =
            index.par_iter().map(|&(i, j)| cell(i, j)).collect();
        Ok(Self {
            entities,
            cells: cells?,
        })
    }
}

impl<T> PairMatrix<T> {
    /// Project every cell through `f`, preserving degenerate markers.
    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> PairMatrix<U> {
        PairMatrix {
            entities: self.entities.clone(),
            cells: self
                .cells
                .iter()
                .map(|c| match c {
                    PairCell::Value(v) => PairCell::Value(f(v)),
                    PairCell::Degenerate => PairCell::Degenerate,
                })
                .collect(),
        }
    }

    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    /// Number of stored pairs: n(n-1)/2.
    pub fn n_pairs(&self) -> usize {
        self.cells.len()
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        let n = self.entities.len();
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(j < n && i != j);
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    /// Cell for the unordered pair (i, j); order of the indices does not
    /// matter. Panics if `i == j` (the diagonal is not stored).
    pub fn get(&self, i: usize, j: usize) -> &PairCell<T> {
        assert!(i != j, "diagonal cells are not stored");
        &self.cells[self.offset(i, j)]
    }

    /// Iterate all stored pairs as (i, j, cell) with i < j.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &PairCell<T>)> {
        let n = self.entities.len();
        (0..n)
            .flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
            .zip(self.cells.iter())
            .map(|((i, j), c)| (i, j, c))
    }

    /// Count of degenerate cells.
    pub fn n_degenerate(&self) -> usize {
        self.cells.iter().filter(|c| c.is_degenerate()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("E{i:02}")).collect()
    }

    #[test]
    fn stores_unique_unordered_pairs() {
        let m = PairMatrix::build(names(19), |i, j| Ok(PairCell::Value((i, j)))).unwrap();
        assert_eq!(m.n_pairs(), 171);
        assert_eq!(m.get(3, 7), &PairCell::Value((3, 7)));
        // symmetric access
        assert_eq!(m.get(7, 3), m.get(3, 7));
        assert_eq!(m.pairs().count(), 171);
    }

    #[test]
    fn two_entities_one_pair() {
        let m = PairMatrix::build(names(2), |_, _| Ok(PairCell::Value(1.0))).unwrap();
        assert_eq!(m.n_pairs(), 1);
    }

    #[test]
    fn single_entity_rejected() {
        assert!(PairMatrix::<f64>::build(names(1), |_, _| Ok(PairCell::Value(0.0))).is_err());
    }

    #[test]
    fn pairs_iterates_in_index_order() {
        let m = PairMatrix::build(names(4), |i, j| Ok(PairCell::Value(10 * i + j))).unwrap();
        let seen: Vec<(usize, usize)> = m.pairs().map(|(i, j, _)| (i, j)).collect();
        assert_eq!(seen, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        for (i, j, c) in m.pairs() {
            assert_eq!(c, &PairCell::Value(10 * i + j));
        }
    }

    #[test]
    #[should_panic(expected = "diagonal")]
    fn diagonal_access_panics() {
        let m = PairMatrix::build(names(3), |_, _| Ok(PairCell::Value(0.0))).unwrap();
        let _ = m.get(1, 1);
    }
}
