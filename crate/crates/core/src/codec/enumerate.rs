use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::ensembles::{AffineSpace, CompoundCode};
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Echelon};

/// Largest information-space dimension an exhaustive loop will visit.
pub const ENUMERATION_CAP_LOG2: usize = 26;

/// Which information words are admissible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `H y = 0` with all lower checks.
    Full,
    /// `H1 y = 0` only.
    Base,
    /// `H1 y = 0` and `H2 y = syndrome`.
    Coset(BitVector),
}

/// The codewords `{(y, G y)}` of an affine information space, walked in
/// Gray-code order so that each step costs one XOR of a precomputed image.
#[derive(Clone, Debug)]
pub struct Codebook {
    n: usize,
    y0: BitVector,
    x0: BitVector,
    basis: Vec<BitVector>,
    images: Vec<BitVector>,
    injective: bool,
    feasible: bool,
}

/// Information space selected by `constraint`; `None` for an unreachable coset.
pub fn information_space(code: &CompoundCode, constraint: &Constraint) -> Result<Option<AffineSpace>> {
    match constraint {
        Constraint::Full => Ok(Some(code.full_space())),
        Constraint::Base => Ok(Some(code.base_space())),
        Constraint::Coset(s) => code.coset(s),
    }
}

impl Codebook {
    pub fn new(code: &CompoundCode, constraint: &Constraint) -> Result<Self> {
        match information_space(code, constraint)? {
            Some(space) => Self::from_space(code, space),
            None => Ok(Codebook {
                n: code.n(),
                y0: BitVector::zeros(code.m()),
                x0: BitVector::zeros(code.n()),
                basis: Vec::new(),
                images: Vec::new(),
                injective: true,
                feasible: false,
            }),
        }
    }

    pub fn from_space(code: &CompoundCode, space: AffineSpace) -> Result<Self> {
        if space.dim() > ENUMERATION_CAP_LOG2 {
            return Err(Error::EnumerationCap {
                dim: space.dim(),
                cap: ENUMERATION_CAP_LOG2,
            });
        }
        let images: Vec<BitVector> = space.basis.iter().map(|b| code.encode(b)).collect::<Result<_>>()?;
        let injective = Echelon::reduce(images.clone(), code.n()).rank() == images.len();
        Ok(Codebook {
            n: code.n(),
            x0: code.encode(&space.offset)?,
            y0: space.offset,
            basis: space.basis,
            images,
            injective,
            feasible: true,
        })
    }

    /// False when the requested coset is empty.
    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }

    /// Number of information words (`0` for an empty coset).
    pub fn len(&self) -> u64 {
        if self.feasible {
            1u64 << self.dim()
        } else {
            0
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.feasible
    }

    /// Whether distinct information words always give distinct codewords.
    pub fn is_injective(&self) -> bool {
        self.injective
    }

    /// Visits every `(y, x)` pair; stops early on `ControlFlow::Break`.
    pub fn for_each<B>(&self, mut visit: impl FnMut(&BitVector, &BitVector) -> ControlFlow<B>) -> Option<B> {
        if !self.feasible {
            return None;
        }
        let mut y = self.y0.clone();
        let mut x = self.x0.clone();
        if let ControlFlow::Break(b) = visit(&y, &x) {
            return Some(b);
        }
        for step in 1u64..(1u64 << self.dim()) {
            let j = step.trailing_zeros() as usize;
            y ^= &self.basis[j];
            x ^= &self.images[j];
            if let ControlFlow::Break(b) = visit(&y, &x) {
                return Some(b);
            }
        }
        None
    }

    /// Visits each distinct codeword `x` once (with the first `y` reaching it).
    pub fn for_each_distinct<B>(&self, mut visit: impl FnMut(&BitVector, &BitVector) -> ControlFlow<B>) -> Option<B> {
        if self.injective {
            return self.for_each(visit);
        }
        let mut seen = HashSet::new();
        self.for_each(|y, x| {
            if seen.insert(x.clone()) {
                visit(y, x)
            } else {
                ControlFlow::Continue(())
            }
        })
    }

    pub fn iter(&self) -> CodewordIter<'_> {
        CodewordIter {
            book: self,
            step: 0,
            y: self.y0.clone(),
            x: self.x0.clone(),
        }
    }
}

/// Owning iterator over `(y, x)` pairs in Gray-code order.
pub struct CodewordIter<'a> {
    book: &'a Codebook,
    step: u64,
    y: BitVector,
    x: BitVector,
}

impl Iterator for CodewordIter<'_> {
    type Item = (BitVector, BitVector);

    fn next(&mut self) -> Option<Self::Item> {
        if self.step >= self.book.len() {
            return None;
        }
        if self.step > 0 {
            let j = self.step.trailing_zeros() as usize;
            self.y ^= &self.book.basis[j];
            self.x ^= &self.book.images[j];
        }
        self.step += 1;
        Some((self.y.clone(), self.x.clone()))
    }
}

/// All `(y, G y)` with `y` admissible under `constraint`.
pub fn enumerate_codewords(code: &CompoundCode, constraint: &Constraint) -> Result<Codebook> {
    Codebook::new(code, constraint)
}
