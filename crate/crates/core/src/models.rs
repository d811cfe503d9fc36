//! Exact Hamiltonian matrices of two lattice models.
//!
//! Basis states are bit strings read with site 0 leftmost, i.e. site `i`
//! lives in bit `L − 1 − i` of the state index.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcore::{MatrixError, SymMatrix, DENSE_DIM_LIMIT};

pub const ISING_MIN_LENGTH: usize = 3;
pub const ISING_MAX_LENGTH: usize = 14;
pub const HUBBARD_MAX_SITES: usize = 16;

/// Sparse Ising storage from this length on.
const ISING_SPARSE_FROM: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("chain length {0} outside [{ISING_MIN_LENGTH}, {ISING_MAX_LENGTH}]")]
    LengthOutOfRange(usize),
    #[error("unsupported filling: {0}")]
    UnsupportedFilling(String),
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    AntiPeriodic,
    Periodic,
}

/// One-dimensional Hubbard ring at fixed particle numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubbardSpec {
    pub sites: usize,
    pub n_up: usize,
    pub n_down: usize,
    pub t: f64,
    pub u: f64,
    pub boundary: Boundary,
}

impl HubbardSpec {
    /// Four sites at half filling, `t = 1`, anti-periodic boundary.
    pub fn half_filled_four_site(u: f64) -> Self {
        Self {
            sites: 4,
            n_up: 2,
            n_down: 2,
            t: 1.0,
            u,
            boundary: Boundary::AntiPeriodic,
        }
    }

    pub fn basis_dim(&self) -> usize {
        binomial(self.sites, self.n_up) * binomial(self.sites, self.n_down)
    }
}

/// Transverse-field Ising ring `H = −g Σ σˣ − Σ σᶻσᶻ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingSpec {
    pub length: usize,
    pub g: f64,
}

impl IsingSpec {
    pub fn new(length: usize, g: f64) -> Self {
        Self { length, g }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[inline]
fn site_bit(sites: usize, i: usize) -> u32 {
    1 << (sites - 1 - i)
}

/// All `sites`-bit configurations holding `count` particles, ascending.
fn configurations(sites: usize, count: usize) -> Vec<u32> {
    (0u32..(1 << sites))
        .filter(|c| c.count_ones() as usize == count)
        .collect()
}

/// Applies `c†_to c_from` to one spin species. Returns the new configuration
/// and the Jordan–Wigner sign, or `None` if the hop is blocked.
fn hop(config: u32, sites: usize, from: usize, to: usize) -> Option<(u32, f64)> {
    let (bf, bt) = (site_bit(sites, from), site_bit(sites, to));
    if config & bf == 0 || config & bt != 0 {
        return None;
    }
    let (lo, hi) = (from.min(to), from.max(to));
    let between = (lo + 1..hi)
        .filter(|&k| config & site_bit(sites, k) != 0)
        .count();
    let sign = if between % 2 == 0 { 1.0 } else { -1.0 };
    Some((config ^ bf ^ bt, sign))
}

/// Hubbard Hamiltonian in the `(up, down)` occupation basis, up
/// configurations outermost. Fermion operators are ordered up before down,
/// sites ascending; hopping carries `−t`, the boundary bond's sign is
/// flipped under anti-periodic conditions, and each doubly occupied site
/// adds `U` to the diagonal.
pub fn build_hubbard(spec: &HubbardSpec) -> Result<SymMatrix, ModelError> {
    let l = spec.sites;
    if !(3..=HUBBARD_MAX_SITES).contains(&l) {
        return Err(ModelError::UnsupportedFilling(format!(
            "ring needs 3 to {HUBBARD_MAX_SITES} sites, got {l}"
        )));
    }
    if spec.n_up > l || spec.n_down > l {
        return Err(ModelError::UnsupportedFilling(format!(
            "{} up and {} down electrons do not fit on {l} sites",
            spec.n_up, spec.n_down
        )));
    }
    if !(spec.t > 0.0 && spec.t.is_finite() && spec.u.is_finite()) {
        return Err(ModelError::InvalidParameter(format!(
            "need finite U and positive t, got t = {}, U = {}",
            spec.t, spec.u
        )));
    }
    let ups = configurations(l, spec.n_up);
    let downs = configurations(l, spec.n_down);
    let dim = ups.len() * downs.len();
    if dim < 2 {
        return Err(ModelError::UnsupportedFilling(format!(
            "basis has only {dim} state"
        )));
    }
    let index_of = |configs: &[u32], c: u32| {
        configs
            .binary_search(&c)
            .expect("hop keeps particle number")
    };

    let bond_amplitude = |i: usize| {
        let boundary = i == l - 1;
        match (boundary, spec.boundary) {
            (true, Boundary::AntiPeriodic) => spec.t,
            _ => -spec.t,
        }
    };

    let mut triplets = Vec::new();
    for (iu, &up) in ups.iter().enumerate() {
        for (id, &down) in downs.iter().enumerate() {
            let state = iu * downs.len() + id;
            let doubles = (up & down).count_ones() as f64;
            if doubles != 0.0 && spec.u != 0.0 {
                triplets.push((state, state, spec.u * doubles));
            }
            for i in 0..l {
                let j = (i + 1) % l;
                let amp = bond_amplitude(i);
                for (from, to) in [(i, j), (j, i)] {
                    if let Some((nu, sign)) = hop(up, l, from, to) {
                        let target = index_of(&ups, nu) * downs.len() + id;
                        if target > state {
                            triplets.push((target, state, amp * sign));
                        }
                    }
                    if let Some((nd, sign)) = hop(down, l, from, to) {
                        let target = iu * downs.len() + index_of(&downs, nd);
                        if target > state {
                            triplets.push((target, state, amp * sign));
                        }
                    }
                }
            }
        }
    }
    let m = SymMatrix::from_triplets(dim, triplets)?;
    Ok(if dim <= DENSE_DIM_LIMIT {
        m.to_dense()
    } else {
        m
    })
}

/// Ising Hamiltonian in the σᶻ basis (bit 1 ↔ σᶻ = +1) with periodic bonds.
pub fn build_ising(spec: &IsingSpec) -> Result<SymMatrix, ModelError> {
    let l = spec.length;
    if !(ISING_MIN_LENGTH..=ISING_MAX_LENGTH).contains(&l) {
        return Err(ModelError::LengthOutOfRange(l));
    }
    if !(spec.g > 0.0 && spec.g.is_finite()) {
        return Err(ModelError::InvalidParameter(format!(
            "transverse field must be positive, got {}",
            spec.g
        )));
    }
    let dim = 1usize << l;
    let spin = |state: usize, i: usize| -> f64 {
        if state & (1 << (l - 1 - i)) != 0 {
            1.0
        } else {
            -1.0
        }
    };
    let mut triplets = Vec::with_capacity(dim * (l / 2 + 1));
    for state in 0..dim {
        let bonds: f64 = (0..l)
            .map(|i| spin(state, i) * spin(state, (i + 1) % l))
            .sum();
        if bonds != 0.0 {
            triplets.push((state, state, -bonds));
        }
        for i in 0..l {
            let flipped = state ^ (1 << i);
            if flipped > state {
                triplets.push((flipped, state, -spec.g));
            }
        }
    }
    let m = SymMatrix::from_triplets(dim, triplets)?;
    Ok(if l >= ISING_SPARSE_FROM {
        m
    } else {
        m.to_dense()
    })
}
