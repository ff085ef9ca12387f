use super::BitVector;

/// Reduced row echelon form of a set of packed rows.
///
/// Only the first `width` columns are eligible as pivots; any trailing columns
/// (an augmented right-hand side) are carried along by the row operations.
pub(crate) struct Echelon {
    pub rows: Vec<BitVector>,
    /// `pivots[r]` is the pivot column of row `r`, for `r < rank`.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn reduce(mut rows: Vec<BitVector>, width: usize) -> Self {
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..width {
            let Some(found) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, found);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    *row ^= &pivot_row;
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        Echelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of `{v : rows · v = 0}` restricted to the first `width` columns.
    pub fn null_basis(&self, width: usize) -> Vec<BitVector> {
        let mut is_pivot = vec![false; width];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..width)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVector::unit(width, free);
                for (r, &p) in self.pivots.iter().enumerate() {
                    if self.rows[r].get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }
}
