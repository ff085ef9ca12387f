use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::enumerate::{Codebook, Constraint, ENUMERATION_CAP_LOG2};
use crate::analysis::format_sig;
use crate::ensembles::CompoundCode;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, SparseBitMatrix};

/// Number of codewords at each Hamming weight `0..=length`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightHistogram {
    pub length: usize,
    pub counts: Vec<u64>,
}

impl WeightHistogram {
    pub fn new(length: usize) -> Self {
        WeightHistogram {
            length,
            counts: vec![0; length + 1],
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(1/length) log2 count` per weight, `None` where the count is zero.
    pub fn log2_growth(&self) -> Vec<Option<f64>> {
        self.counts
            .iter()
            .map(|&c| (c > 0).then(|| (c as f64).log2() / self.length as f64))
            .collect()
    }

    /// CSV `w,count` with `w` the exact normalized weight.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("w,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{c}\n", format_sig(i as f64 / self.length as f64)));
        }
        out
    }
}

/// Exact weight distribution of the distinct admissible codewords `x = G y`.
pub fn weight_enumerator_exact(code: &CompoundCode, constraint: &Constraint) -> Result<WeightHistogram> {
    let book = Codebook::new(code, constraint)?;
    let mut hist = WeightHistogram::new(code.n());
    book.for_each_distinct::<()>(|_, x| {
        hist.counts[x.weight()] += 1;
        ControlFlow::Continue(())
    });
    Ok(hist)
}

/// Exact weight distribution of `{y : H y = 0}`.
pub fn ldpc_weight_enumerator(h: &SparseBitMatrix) -> Result<WeightHistogram> {
    let basis = h.null_space_basis();
    if basis.len() > ENUMERATION_CAP_LOG2 {
        return Err(Error::EnumerationCap {
            dim: basis.len(),
            cap: ENUMERATION_CAP_LOG2,
        });
    }
    let mut hist = WeightHistogram::new(h.cols());
    let mut y = BitVector::zeros(h.cols());
    hist.counts[0] += 1;
    for step in 1u64..(1u64 << basis.len()) {
        y ^= &basis[step.trailing_zeros() as usize];
        hist.counts[y.weight()] += 1;
    }
    Ok(hist)
}
