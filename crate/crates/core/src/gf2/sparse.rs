use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{BitVector, Echelon};
use crate::error::{Error, Result};

/// Binary matrix stored as one sorted support list per row.
///
/// Duplicate column indices are reduced mod 2 at construction, so every row
/// support is strictly increasing and in range.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SparseBitMatrix {
    rows: usize,
    cols: usize,
    row_support: Vec<Vec<usize>>,
}

fn reduce_mod2(mut support: Vec<usize>) -> Vec<usize> {
    support.sort_unstable();
    let mut out: Vec<usize> = Vec::with_capacity(support.len());
    for c in support {
        if out.last() == Some(&c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

impl SparseBitMatrix {
    /// Builds a `rows.len() × cols` matrix. Repeated indices within a row cancel.
    pub fn from_rows(cols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let row_support: Vec<Vec<usize>> = rows.into_iter().map(reduce_mod2).collect();
        if let Some(&bad) = row_support.iter().flatten().find(|&&c| c >= cols) {
            return Err(Error::DimensionMismatch {
                context: "column index",
                expected: cols,
                found: bad,
            });
        }
        Ok(SparseBitMatrix {
            rows: row_support.len(),
            cols,
            row_support,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseBitMatrix {
            rows,
            cols,
            row_support: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseBitMatrix {
            rows: n,
            cols: n,
            row_support: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn from_dense_rows(cols: usize, rows: &[BitVector]) -> Result<Self> {
        Self::from_rows(cols, rows.iter().map(|r| r.ones_iter().collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.row_support[i]
    }

    pub fn row_supports(&self) -> &[Vec<usize>] {
        &self.row_support
    }

    pub fn nnz(&self) -> usize {
        self.row_support.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.row_support[r].binary_search(&c).is_ok()
    }

    /// Number of ones in each column.
    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for &c in self.row_support.iter().flatten() {
            w[c] += 1;
        }
        w
    }

    pub fn transpose(&self) -> SparseBitMatrix {
        let mut t = vec![Vec::new(); self.cols];
        for (r, row) in self.row_support.iter().enumerate() {
            for &c in row {
                t[c].push(r);
            }
        }
        SparseBitMatrix {
            rows: self.cols,
            cols: self.rows,
            row_support: t,
        }
    }

    /// `M v` over GF(2).
    pub fn matvec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for (i, row) in self.row_support.iter().enumerate() {
            let parity = row.iter().fold(false, |acc, &c| acc ^ v.get(c));
            if parity {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Rows `[start, end)` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> SparseBitMatrix {
        assert!(start <= end && end <= self.rows);
        SparseBitMatrix {
            rows: end - start,
            cols: self.cols,
            row_support: self.row_support[start..end].to_vec(),
        }
    }

    pub fn to_dense_rows(&self) -> Vec<BitVector> {
        self.row_support
            .iter()
            .map(|row| {
                let mut v = BitVector::zeros(self.cols);
                for &c in row {
                    v.set(c, true);
                }
                v
            })
            .collect()
    }

    /// GF(2) row rank.
    pub fn rank(&self) -> usize {
        Echelon::reduce(self.to_dense_rows(), self.cols).rank()
    }

    /// `cols − rank` independent vectors spanning `{v : M v = 0}`.
    pub fn null_space_basis(&self) -> Vec<BitVector> {
        Echelon::reduce(self.to_dense_rows(), self.cols).null_basis(self.cols)
    }

    /// Some `y` with `M y = b`, or `None` when `b` is outside the column span.
    ///
    /// Free variables are set to zero, so the result is deterministic.
    pub fn solve_particular(&self, b: &BitVector) -> Result<Option<BitVector>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "solve_particular right-hand side",
                expected: self.rows,
                found: b.len(),
            });
        }
        let rhs = BitVector::unit(1, 0);
        let zero = BitVector::zeros(1);
        let augmented: Vec<BitVector> = self
            .to_dense_rows()
            .into_iter()
            .enumerate()
            .map(|(i, row)| row.concat(if b.get(i) { &rhs } else { &zero }))
            .collect();
        let ech = Echelon::reduce(augmented, self.cols);
        let rank = ech.rank();
        if ech.rows[rank..].iter().any(|row| row.get(self.cols)) {
            return Ok(None);
        }
        let mut y = BitVector::zeros(self.cols);
        for (r, &p) in ech.pivots.iter().enumerate() {
            if ech.rows[r].get(self.cols) {
                y.set(p, true);
            }
        }
        Ok(Some(y))
    }

    /// Text interchange format: `rows cols` then one line of sorted column
    /// indices per row (empty line for an empty row).
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for row in &self.row_support {
            let mut first = true;
            for c in row {
                if !first {
                    s.push(' ');
                }
                first = false;
                write!(s, "{c}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: 1,
                msg: e.to_string(),
            })?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse {
                line: 1,
                msg: "header must be `rows cols`".into(),
            });
        };
        let mut supports = Vec::with_capacity(rows);
        for r in 0..rows {
            let line = lines.next().unwrap_or("");
            let support: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse {
                    line: r + 2,
                    msg: e.to_string(),
                })?;
            if support.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse {
                    line: r + 2,
                    msg: "row indices must be sorted and distinct".into(),
                });
            }
            supports.push(support);
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::Parse {
                line: rows + 2,
                msg: "trailing rows after the declared count".into(),
            });
        }
        Self::from_rows(cols, supports)
    }
}

impl TryFrom<String> for SparseBitMatrix {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::from_text(&s)
    }
}

impl From<SparseBitMatrix> for String {
    fn from(m: SparseBitMatrix) -> String {
        m.to_text()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    /// Dense mod-2 product computed entry by entry; independent of `matvec`.
    fn dense_product(m: &SparseBitMatrix, v: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(m.rows());
        for r in 0..m.rows() {
            let mut acc = 0u8;
            for c in 0..m.cols() {
                acc ^= (m.get(r, c) && v.get(c)) as u8;
            }
            out.set(r, acc == 1);
        }
        out
    }

    fn random_matrix(rows: usize, cols: usize, density: f64, rng: &mut ChaCha8Rng) -> SparseBitMatrix {
        let supports = (0..rows)
            .map(|_| (0..cols).filter(|_| rng.random_bool(density)).collect())
            .collect();
        SparseBitMatrix::from_rows(cols, supports).unwrap()
    }

    fn all_words(len: usize) -> impl Iterator<Item = BitVector> {
        (0u64..(1 << len)).map(move |x| {
            let mut v = BitVector::zeros(len);
            for i in 0..len {
                if x >> i & 1 == 1 {
                    v.set(i, true);
                }
            }
            v
        })
    }

    #[test]
    fn matvec_examples() {
        let id = SparseBitMatrix::identity(4);
        assert_eq!(id.matvec(&bv("1011")).unwrap(), bv("1011"));
        let m = SparseBitMatrix::from_rows(4, vec![vec![0, 1], vec![1, 2], vec![0, 3]]).unwrap();
        assert_eq!(m.matvec(&BitVector::zeros(4)).unwrap(), BitVector::zeros(3));
        let v = bv("1101");
        assert_eq!(dense_product(&m, &v), bv("010"));
        assert_eq!(m.matvec(&v).unwrap(), bv("010"));
        assert!(matches!(m.matvec(&bv("101")), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn duplicates_cancel_at_construction() {
        let m = SparseBitMatrix::from_rows(5, vec![vec![3, 1, 3, 3, 0]]).unwrap();
        assert_eq!(m.row(0), &[0, 1, 3]);
        let m = SparseBitMatrix::from_rows(5, vec![vec![2, 2]]).unwrap();
        assert!(m.row(0).is_empty());
        assert!(SparseBitMatrix::from_rows(3, vec![vec![3]]).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(SparseBitMatrix::identity(5).rank(), 5);
        assert_eq!(SparseBitMatrix::zeros(3, 4).rank(), 0);
        let dup = SparseBitMatrix::from_rows(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(dup.rank(), 1);
    }

    #[test]
    fn null_space_examples() {
        let m = SparseBitMatrix::from_rows(2, vec![vec![0, 1]]).unwrap();
        assert_eq!(m.null_space_basis(), vec![bv("11")]);
        assert!(SparseBitMatrix::identity(3).null_space_basis().is_empty());
    }

    #[test]
    fn null_space_dimension_matches_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_matrix(4, 8, 0.4, &mut rng);
            let kernel_size = all_words(8).filter(|v| dense_product(&m, v).is_zero()).count();
            let basis = m.null_space_basis();
            assert_eq!(basis.len(), 8 - m.rank());
            assert_eq!(1usize << basis.len(), kernel_size);
        }
    }

    #[test]
    fn solve_examples() {
        let id = SparseBitMatrix::identity(3);
        assert_eq!(id.solve_particular(&bv("000")).unwrap(), Some(bv("000")));
        assert_eq!(id.solve_particular(&bv("011")).unwrap(), Some(bv("011")));
        let m = SparseBitMatrix::from_rows(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(m.solve_particular(&bv("10")).unwrap(), None);
        assert!(m.solve_particular(&bv("1")).is_err());
    }

    #[test]
    fn solve_agrees_with_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_matrix(3, 6, 0.3, &mut rng);
            let b = BitVector::random_uniform(3, &mut rng);
            let exists = all_words(6).any(|y| dense_product(&m, &y) == b);
            match m.solve_particular(&b).unwrap() {
                Some(y) => assert_eq!(dense_product(&m, &y), b),
                None => assert!(!exists, "solver reported infeasible but a solution exists"),
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let m = SparseBitMatrix::from_rows(6, vec![vec![0, 5], vec![], vec![1, 2, 3]]).unwrap();
        let text = m.to_text();
        assert_eq!(text, "3 6\n0 5\n\n1 2 3\n");
        assert_eq!(SparseBitMatrix::from_text(&text).unwrap(), m);
        assert!(SparseBitMatrix::from_text("1 3\n2 1\n").is_err());
        assert!(SparseBitMatrix::from_text("1 3\n0\n1\n").is_err());
    }

    proptest! {
        #[test]
        fn matvec_is_linear(seed in any::<u64>(), rows in 1usize..12, cols in 1usize..80) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(rows, cols, 0.2, &mut rng);
            let a = BitVector::random_uniform(cols, &mut rng);
            let b = BitVector::random_uniform(cols, &mut rng);
            let lhs = m.matvec(&(&a ^ &b)).unwrap();
            let rhs = &m.matvec(&a).unwrap() ^ &m.matvec(&b).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            prop_assert_eq!(m.matvec(&a).unwrap(), dense_product(&m, &a));
        }

        #[test]
        fn null_basis_is_kernel_of_right_size(seed in any::<u64>(), rows in 1usize..15, cols in 1usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(rows, cols, 0.25, &mut rng);
            let basis = m.null_space_basis();
            prop_assert_eq!(basis.len(), cols - m.rank());
            for b in &basis {
                prop_assert!(m.matvec(b).unwrap().is_zero());
            }
            // independence: the basis has full rank as a matrix
            let as_rows = SparseBitMatrix::from_dense_rows(cols, &basis).unwrap();
            prop_assert_eq!(as_rows.rank(), basis.len());
        }

        #[test]
        fn particular_plus_kernel_still_solves(seed in any::<u64>(), rows in 1usize..10, cols in 1usize..30) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(rows, cols, 0.3, &mut rng);
            let b = m.matvec(&BitVector::random_uniform(cols, &mut rng)).unwrap();
            let y = m.solve_particular(&b).unwrap().expect("b is in the column span by construction");
            for k in m.null_space_basis() {
                prop_assert_eq!(m.matvec(&(&y ^ &k)).unwrap(), b.clone());
            }
        }

        #[test]
        fn rank_invariant_under_row_operations(seed in any::<u64>(), rows in 2usize..10, cols in 1usize..30) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(rows, cols, 0.3, &mut rng);
            let mut dense = m.to_dense_rows();
            dense.reverse();
            let i = rng.random_range(0..rows);
            let j = (i + 1 + rng.random_range(0..rows - 1)) % rows;
            let src = dense[j].clone();
            dense[i] ^= &src;
            let m2 = SparseBitMatrix::from_dense_rows(cols, &dense).unwrap();
            prop_assert_eq!(m.rank(), m2.rank());
        }
    }
}
