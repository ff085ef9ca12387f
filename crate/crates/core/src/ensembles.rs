//! Random LDGM and regular LDPC ensembles, and the compound code built from them.
//!
//! A compound code is the set `{G y : H y = 0}`: an `n × m` low-density
//! generator matrix `G` whose `m` information bits are constrained by a
//! `k × m` regular parity-check matrix `H`. The rows of `H` are split into a
//! leading block `H1` (`k1` rows) and a trailing block `H2` (`k2` rows); the
//! syndromes of `H2` index a partition of `{y : H1 y = 0}` into cosets.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitVector, Echelon, SparseBitMatrix};
use crate::rng;

/// Dimensions, degrees and seed of a compound ensemble.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnsembleParams {
    /// Blocklength of the top code.
    pub n: usize,
    /// Information bits.
    pub m: usize,
    /// Lower parity checks.
    pub k: usize,
    /// LDGM row degree.
    pub d_top: usize,
    /// LDPC column degree.
    pub dv: usize,
    /// LDPC row degree.
    pub dc_prime: usize,
    pub seed: u64,
}

impl EnsembleParams {
    pub fn new(n: usize, m: usize, k: usize, d_top: usize, dv: usize, dc_prime: usize, seed: u64) -> Result<Self> {
        let p = EnsembleParams {
            n,
            m,
            k,
            d_top,
            dv,
            dc_prime,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    /// Pure LDGM ensemble (`k = 0`, no lower checks).
    pub fn ldgm(n: usize, m: usize, d_top: usize, seed: u64) -> Result<Self> {
        Self::new(n, m, 0, d_top, 0, 0, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidParams(format!(
                "n and m must be at least 1 (n = {}, m = {})",
                self.n, self.m
            )));
        }
        if self.d_top == 0 {
            return Err(Error::InvalidParams("d_top must be at least 1".into()));
        }
        if self.k > 0 {
            check_ldpc_degrees(self.m, self.k, self.dv, self.dc_prime)?;
        }
        Ok(())
    }

    /// `m / n`.
    pub fn r_g(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    /// `1 − k/m`, which equals `1 − dv/dc′` whenever `k > 0`.
    pub fn r_h(&self) -> f64 {
        1.0 - self.k as f64 / self.m as f64
    }
}

fn check_ldpc_degrees(m: usize, k: usize, dv: usize, dc_prime: usize) -> Result<()> {
    if dv == 0 || dc_prime == 0 {
        return Err(Error::InvalidParams("LDPC degrees must be at least 1".into()));
    }
    if m * dv != k * dc_prime {
        return Err(Error::InvalidParams(format!(
            "edge counts disagree: m·dv = {}·{} = {} but k·dc′ = {}·{} = {}",
            m,
            dv,
            m * dv,
            k,
            dc_prime,
            k * dc_prime
        )));
    }
    if dc_prime > m || dv > k {
        return Err(Error::InvalidParams(format!(
            "no simple {k}×{m} matrix has column degree {dv} and row degree {dc_prime}"
        )));
    }
    Ok(())
}

/// Rates of an assembled code.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeRates {
    pub r_g: f64,
    pub r_h: f64,
    pub nominal: f64,
    /// `log2 |C| / n`, from the rank of `G` restricted to `null(H)`.
    pub effective: f64,
}

/// `n` rows, each the mod-2 sum of `d_top` columns drawn uniformly with
/// replacement. Repeated draws cancel, so a row can be shorter than `d_top`
/// (but always has the same parity).
pub fn sample_ldgm<R: Rng + ?Sized>(n: usize, m: usize, d_top: usize, rng: &mut R) -> Result<SparseBitMatrix> {
    if n == 0 || m == 0 || d_top == 0 {
        return Err(Error::InvalidParams(format!(
            "LDGM needs n, m, d_top ≥ 1 (got {n}, {m}, {d_top})"
        )));
    }
    let rows = (0..n)
        .map(|_| (0..d_top).map(|_| rng.random_range(0..m)).collect())
        .collect();
    SparseBitMatrix::from_rows(m, rows)
}

const MATCHING_ATTEMPTS: usize = 100;
const MAX_REPAIR_SWAPS: usize = 1_000_000;

/// `k × m` matrix with exactly `dv` ones per column and `dc_prime` per row.
///
/// Sockets are matched by a uniform random permutation (configuration
/// model). A matching with a repeated edge is redrawn up to 100 times; after
/// that, repeated edges are removed by random edge swaps, which keep both
/// degree sequences intact. The result is close to, but not exactly, uniform
/// over simple matrices.
pub fn sample_regular_ldpc<R: Rng + ?Sized>(
    m: usize,
    k: usize,
    dv: usize,
    dc_prime: usize,
    rng: &mut R,
) -> Result<SparseBitMatrix> {
    check_ldpc_degrees(m, k, dv, dc_prime)?;
    let mut sockets: Vec<usize> = (0..m).flat_map(|c| std::iter::repeat_n(c, dv)).collect();
    for _ in 0..MATCHING_ATTEMPTS {
        sockets.shuffle(rng);
        if sockets.chunks(dc_prime).all(is_simple_row) {
            return rows_to_matrix(m, &sockets, dc_prime);
        }
    }
    repair_multi_edges(&mut sockets, dc_prime, rng)?;
    rows_to_matrix(m, &sockets, dc_prime)
}

fn is_simple_row(row: &[usize]) -> bool {
    row.iter().enumerate().all(|(i, c)| !row[..i].contains(c))
}

fn rows_to_matrix(m: usize, sockets: &[usize], dc_prime: usize) -> Result<SparseBitMatrix> {
    SparseBitMatrix::from_rows(m, sockets.chunks(dc_prime).map(<[usize]>::to_vec).collect())
}

fn repair_multi_edges<R: Rng + ?Sized>(sockets: &mut [usize], dc_prime: usize, rng: &mut R) -> Result<()> {
    let k = sockets.len() / dc_prime;
    for _ in 0..MAX_REPAIR_SWAPS {
        let Some(bad) = (0..sockets.len()).find(|&i| {
            let r = i / dc_prime;
            sockets[r * dc_prime..i].contains(&sockets[i])
        }) else {
            return Ok(());
        };
        let row = bad / dc_prime;
        let other = rng.random_range(0..sockets.len());
        let other_row = other / dc_prime;
        if other_row == row {
            continue;
        }
        let (a, b) = (sockets[bad], sockets[other]);
        let row_slice = |r: usize| r * dc_prime..(r + 1) * dc_prime;
        if sockets[row_slice(row)].contains(&b) || sockets[row_slice(other_row)].contains(&a) {
            continue;
        }
        sockets.swap(bad, other);
    }
    Err(Error::SamplingFailed(format!(
        "could not remove repeated edges from a {k}-row configuration after {MAX_REPAIR_SWAPS} swaps"
    )))
}

/// An affine subspace `offset ⊕ span(basis)` of information words.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSpace {
    pub offset: BitVector,
    pub basis: Vec<BitVector>,
}

impl AffineSpace {
    pub fn linear(len: usize, basis: Vec<BitVector>) -> Self {
        AffineSpace {
            offset: BitVector::zeros(len),
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, y: &BitVector) -> bool {
        let target = y ^ &self.offset;
        let mut rows = self.basis.clone();
        let rank = Echelon::reduce(rows.clone(), y.len()).rank();
        rows.push(target);
        Echelon::reduce(rows, y.len()).rank() == rank
    }
}

/// Knobs for [`CompoundCode::assemble_with`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembleOptions {
    pub k1: usize,
    /// Rows of `H` kept after `H1`; defaults to `k − k1`. A smaller value
    /// drops the trailing checks, which allows partitions whose sizes do not
    /// satisfy the edge-count identity on their own.
    pub k2: Option<usize>,
    /// Redraw `G` (up to 100 times) until `y ↦ G y` is one-to-one on
    /// `{y : H1 y = 0}`, so that distinct information words give distinct
    /// codewords.
    pub require_injective: bool,
}

impl AssembleOptions {
    pub fn new(k1: usize) -> Self {
        AssembleOptions {
            k1,
            k2: None,
            require_injective: false,
        }
    }
}

const INJECTIVE_ATTEMPTS: usize = 100;

/// An assembled compound code with its lower-check partition.
#[derive(Clone, Debug, PartialEq)]
pub struct CompoundCode {
    params: EnsembleParams,
    g: SparseBitMatrix,
    h: SparseBitMatrix,
    k1: usize,
    k2: usize,
    null_basis_h1: Vec<BitVector>,
    null_basis_h: Vec<BitVector>,
    rates: CodeRates,
}

#[derive(Serialize, Deserialize)]
struct CodeContainer {
    params: EnsembleParams,
    k1: usize,
    k2: usize,
    g: SparseBitMatrix,
    h: SparseBitMatrix,
}

impl CompoundCode {
    /// Samples `G` and `H` from `rng` with `k2 = k − k1`.
    pub fn assemble<R: Rng + ?Sized>(params: &EnsembleParams, k1: usize, rng: &mut R) -> Result<Self> {
        Self::assemble_with(params, &AssembleOptions::new(k1), rng)
    }

    /// Samples with the generator seeded from `params.seed`.
    pub fn assemble_seeded(params: &EnsembleParams, options: &AssembleOptions) -> Result<Self> {
        Self::assemble_with(params, options, &mut rng::from_seed(params.seed))
    }

    pub fn assemble_with<R: Rng + ?Sized>(
        params: &EnsembleParams,
        options: &AssembleOptions,
        rng: &mut R,
    ) -> Result<Self> {
        params.validate()?;
        let k1 = options.k1;
        let k2 = options.k2.unwrap_or(params.k.saturating_sub(k1));
        if k1 + k2 > params.k {
            return Err(Error::InvalidParams(format!(
                "partition k1 + k2 = {k1} + {k2} exceeds k = {}",
                params.k
            )));
        }
        let h_full = if params.k == 0 {
            SparseBitMatrix::zeros(0, params.m)
        } else {
            sample_regular_ldpc(params.m, params.k, params.dv, params.dc_prime, rng)?
        };
        let h = h_full.row_block(0, k1 + k2);
        let attempts = if options.require_injective {
            INJECTIVE_ATTEMPTS
        } else {
            1
        };
        for _ in 0..attempts {
            let g = sample_ldgm(params.n, params.m, params.d_top, rng)?;
            let code = Self::from_parts(params.clone(), g, h.clone(), k1)?;
            if !options.require_injective || code.is_injective_on_h1() {
                return Ok(code);
            }
        }
        Err(Error::SamplingFailed(format!(
            "no generator one-to-one on null(H1) in {INJECTIVE_ATTEMPTS} draws; \
             null(H1) has dimension {} against blocklength {}",
            params.m - h.row_block(0, k1).rank(),
            params.n
        )))
    }

    /// Builds a code from explicit matrices; `H` holds `H1` followed by `H2`.
    pub fn from_parts(params: EnsembleParams, g: SparseBitMatrix, h: SparseBitMatrix, k1: usize) -> Result<Self> {
        if g.cols() != h.cols() {
            return Err(Error::DimensionMismatch {
                context: "G and H column counts",
                expected: g.cols(),
                found: h.cols(),
            });
        }
        if g.rows() != params.n || g.cols() != params.m {
            return Err(Error::DimensionMismatch {
                context: "G rows against n",
                expected: params.n,
                found: g.rows(),
            });
        }
        if k1 > h.rows() {
            return Err(Error::InvalidParams(format!(
                "k1 = {k1} exceeds the {} rows of H",
                h.rows()
            )));
        }
        let k2 = h.rows() - k1;
        let null_basis_h1 = h.row_block(0, k1).null_space_basis();
        let null_basis_h = h.null_space_basis();
        let images: Vec<BitVector> = null_basis_h.iter().map(|b| g.matvec(b)).collect::<Result<_>>()?;
        let code_dim = Echelon::reduce(images, params.n).rank();
        let r_g = params.m as f64 / params.n as f64;
        let r_h = 1.0 - h.rows() as f64 / params.m as f64;
        let rates = CodeRates {
            r_g,
            r_h,
            nominal: r_g * r_h,
            effective: code_dim as f64 / params.n as f64,
        };
        Ok(CompoundCode {
            params,
            g,
            h,
            k1,
            k2,
            null_basis_h1,
            null_basis_h,
            rates,
        })
    }

    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.g.rows()
    }

    pub fn m(&self) -> usize {
        self.g.cols()
    }

    pub fn g(&self) -> &SparseBitMatrix {
        &self.g
    }

    /// Lower checks in use, `H1` stacked over `H2`.
    pub fn h(&self) -> &SparseBitMatrix {
        &self.h
    }

    pub fn h1(&self) -> SparseBitMatrix {
        self.h.row_block(0, self.k1)
    }

    pub fn h2(&self) -> SparseBitMatrix {
        self.h.row_block(self.k1, self.k1 + self.k2)
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn null_basis_h1(&self) -> &[BitVector] {
        &self.null_basis_h1
    }

    pub fn null_basis_h(&self) -> &[BitVector] {
        &self.null_basis_h
    }

    pub fn rates(&self) -> CodeRates {
        self.rates
    }

    /// `x = G y`.
    pub fn encode(&self, y: &BitVector) -> Result<BitVector> {
        self.g.matvec(y)
    }

    /// `H2 y`, the coset label of an information word.
    pub fn syndrome(&self, y: &BitVector) -> Result<BitVector> {
        self.h2().matvec(y)
    }

    /// Whether `y ↦ G y` is one-to-one on `{y : H1 y = 0}`.
    pub fn is_injective_on_h1(&self) -> bool {
        let images: Vec<BitVector> = self.null_basis_h1.iter().map(|b| self.g.matvec(b).unwrap()).collect();
        Echelon::reduce(images, self.n()).rank() == self.null_basis_h1.len()
    }

    /// Information words of the full code, `{y : H y = 0}`.
    pub fn full_space(&self) -> AffineSpace {
        AffineSpace::linear(self.m(), self.null_basis_h.clone())
    }

    /// Information words of the base code, `{y : H1 y = 0}`.
    pub fn base_space(&self) -> AffineSpace {
        AffineSpace::linear(self.m(), self.null_basis_h1.clone())
    }

    /// The coset `{y : H1 y = 0, H2 y = syndrome}`, or `None` when no
    /// information word has that syndrome.
    pub fn coset(&self, syndrome: &BitVector) -> Result<Option<AffineSpace>> {
        coset_code(self, syndrome)
    }

    pub fn to_json(&self) -> String {
        let container = CodeContainer {
            params: self.params.clone(),
            k1: self.k1,
            k2: self.k2,
            g: self.g.clone(),
            h: self.h.clone(),
        };
        serde_json::to_string_pretty(&container).expect("code container serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: CodeContainer = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if c.k1 + c.k2 != c.h.rows() {
            return Err(Error::InvalidParams(format!(
                "container declares k1 + k2 = {} but H has {} rows",
                c.k1 + c.k2,
                c.h.rows()
            )));
        }
        Self::from_parts(c.params, c.g, c.h, c.k1)
    }
}

/// Particular solution of `[H1; H2] y = [0; syndrome]` together with the null
/// basis of the full `H`. `None` means the syndrome is unreachable.
pub fn coset_code(code: &CompoundCode, syndrome: &BitVector) -> Result<Option<AffineSpace>> {
    if syndrome.len() != code.k2 {
        return Err(Error::DimensionMismatch {
            context: "coset syndrome",
            expected: code.k2,
            found: syndrome.len(),
        });
    }
    let rhs = BitVector::zeros(code.k1).concat(syndrome);
    Ok(code.h.solve_particular(&rhs)?.map(|offset| AffineSpace {
        offset,
        basis: code.null_basis_h.clone(),
    }))
}
