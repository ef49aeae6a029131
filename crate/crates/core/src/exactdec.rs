//! GF(2) rank and hrank, bit-MAP BER of linear codes, and an exhaustive
//! posterior oracle for small codes of any kind.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{ChannelParam, ReceivedWord, Symbol};
use crate::ensemble::{CheckKind, FactorGraph};
use crate::error::{check_unit, Error, Result};

/// Largest dense block (in bits) eliminated in one piece.
const DENSE_BIT_LIMIT: usize = 1 << 33;
/// Largest `k` for exhaustive enumeration.
pub const BRUTE_FORCE_MAX_K: usize = 24;

/// Dense bit-packed matrix over GF(2), row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(32) {
            let line: String = (0..self.cols.min(96)).map(|c| if self.get(r, c) { '1' } else { '.' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// From rows of 0/1 bytes; all rows must share a length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        m
    }

    /// `rows x cols` with columns given by their supports.
    pub fn from_columns(rows: usize, columns: &[Vec<usize>]) -> Self {
        let mut m = BitMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for &i in c {
                m.toggle(i, j);
            }
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, density: f64, rng: &mut R) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if rng.random::<f64>() < density {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / 64] ^= 1 << (c % 64);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for (wi, &w) in self.row(r).iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let c = wi * 64 + bits.trailing_zeros() as usize;
                    t.set(c, r, true);
                    bits &= bits - 1;
                }
            }
        }
        t
    }

    /// Supports of the columns.
    pub fn column_supports(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.cols];
        for r in 0..self.rows {
            for (wi, &w) in self.row(r).iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    cols[wi * 64 + bits.trailing_zeros() as usize].push(r);
                    bits &= bits - 1;
                }
            }
        }
        cols
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// `x A` for a row vector `x` of length `rows`.
    pub fn left_mul(&self, x: &[bool]) -> Vec<bool> {
        let mut acc = vec![0u64; self.stride];
        for (r, &b) in x.iter().enumerate() {
            if b {
                for (a, w) in acc.iter_mut().zip(self.row(r)) {
                    *a ^= w;
                }
            }
        }
        (0..self.cols).map(|c| (acc[c / 64] >> (c % 64)) & 1 == 1).collect()
    }

    /// Reduced row echelon form in place; returns pivot columns in row order.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.stride + w] & bit != 0) else {
                continue;
            };
            if p != r {
                for x in 0..self.stride {
                    self.data.swap(p * self.stride + x, r * self.stride + x);
                }
            }
            let pivot: Vec<u64> = self.row(r)[w..].to_vec();
            for i in 0..self.rows {
                if i != r && self.data[i * self.stride + w] & bit != 0 {
                    let row = &mut self.data[i * self.stride + w..(i + 1) * self.stride];
                    for (a, b) in row.iter_mut().zip(&pivot) {
                        *a ^= b;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }
}

/// Rank and the set of coordinates forced by `x A = y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HrankResult {
    pub rank: usize,
    /// Rows `j` with `e_j` in the column span of `A`, ascending.
    pub forced: Vec<usize>,
}

impl HrankResult {
    pub fn hrank(&self) -> usize {
        self.forced.len()
    }
}

/// `e_j` lies in the column span exactly when the fully reduced basis of the
/// span contains it as a weight-one vector.
pub fn rank_hrank(a: &BitMatrix) -> HrankResult {
    let mut t = a.transpose();
    let pivots = t.rref();
    let mut forced = Vec::new();
    for (r, &p) in pivots.iter().enumerate() {
        let weight: u32 = t.row(r).iter().map(|w| w.count_ones()).sum();
        if weight == 1 {
            forced.push(p);
        }
    }
    forced.sort_unstable();
    HrankResult { rank: pivots.len(), forced }
}

/// Keep each row with probability `p` and each column with probability `q`.
pub fn subsample<R: Rng + ?Sized>(a: &BitMatrix, p: f64, q: f64, rng: &mut R) -> Result<BitMatrix> {
    check_unit("row keep probability", p)?;
    check_unit("column keep probability", q)?;
    let rows: Vec<usize> = (0..a.rows()).filter(|_| rng.random::<f64>() < p).collect();
    let cols: Vec<usize> = (0..a.cols()).filter(|_| rng.random::<f64>() < q).collect();
    Ok(a.select(&rows, &cols))
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Forced coordinates of a sparse `k`-row matrix given by column supports.
///
/// The matrix splits into connected blocks; each block is eliminated densely.
pub fn forced_sparse(k: usize, columns: &[&[usize]]) -> Result<Vec<usize>> {
    let mut parent: Vec<usize> = (0..k).collect();
    for c in columns {
        if let Some((&first, rest)) = c.split_first() {
            let a = find(&mut parent, first);
            for &v in rest {
                let b = find(&mut parent, v);
                if a != b {
                    parent[b] = a;
                }
            }
            let _ = find(&mut parent, first);
        }
    }
    let mut block_of = vec![usize::MAX; k];
    let mut block_rows: Vec<Vec<usize>> = Vec::new();
    for v in 0..k {
        let root = find(&mut parent, v);
        if block_of[root] == usize::MAX {
            block_of[root] = block_rows.len();
            block_rows.push(Vec::new());
        }
        block_of[v] = block_of[root];
        block_rows[block_of[v]].push(v);
    }
    let mut block_cols: Vec<Vec<usize>> = vec![Vec::new(); block_rows.len()];
    for (j, c) in columns.iter().enumerate() {
        if let Some(&v) = c.first() {
            block_cols[block_of[v]].push(j);
        }
    }
    let mut local = vec![0usize; k];
    for rows in &block_rows {
        for (i, &v) in rows.iter().enumerate() {
            local[v] = i;
        }
    }
    let mut forced = Vec::new();
    for (rows, cols) in block_rows.iter().zip(&block_cols) {
        if cols.is_empty() {
            continue;
        }
        if rows.len().saturating_mul(cols.len()) > DENSE_BIT_LIMIT {
            return Err(Error::TooLarge(format!(
                "connected block of {} rows and {} columns",
                rows.len(),
                cols.len()
            )));
        }
        // Transposed block: one row per column of A.
        let mut t = BitMatrix::zeros(cols.len(), rows.len());
        for (i, &j) in cols.iter().enumerate() {
            for &v in columns[j] {
                t.toggle(i, local[v]);
            }
        }
        let pivots = t.rref();
        for (r, &p) in pivots.iter().enumerate() {
            let weight: u32 = t.row(r).iter().map(|w| w.count_ones()).sum();
            if weight == 1 {
                forced.push(rows[p]);
            }
        }
    }
    forced.sort_unstable();
    Ok(forced)
}

/// Mean and binomial standard error of a BER estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub ber: f64,
    pub stderr: f64,
    pub trials: usize,
}

fn estimate(per_trial: &[f64], bits_per_trial: usize) -> BerEstimate {
    let t = per_trial.len().max(1);
    let ber = per_trial.iter().sum::<f64>() / t as f64;
    let stderr = (ber * (1.0 - ber) / (t * bits_per_trial.max(1)) as f64).sqrt();
    BerEstimate { ber, stderr, trials: per_trial.len() }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial as u64);
    r
}

fn map_ber_columns(k: usize, columns: &[Vec<usize>], eps: f64, trials: usize, seed: u64) -> Result<BerEstimate> {
    check_unit("erasure probability", eps)?;
    let per: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let kept: Vec<&[usize]> =
                columns.iter().filter(|_| rng.random::<f64>() >= eps).map(|c| c.as_slice()).collect();
            forced_sparse(k, &kept).map(|f| (k - f.len()) as f64 / (2 * k) as f64)
        })
        .collect::<Result<_>>()?;
    Ok(estimate(&per, k))
}

/// Bit-MAP BER of the linear code with `k x n` generator `G` over BEC(eps).
pub fn map_ber_linear(g: &BitMatrix, eps: f64, trials: usize, seed: u64) -> Result<BerEstimate> {
    map_ber_columns(g.rows(), &g.column_supports(), eps, trials, seed)
}

/// Generator columns of a linear graph, one per transmitted check.
pub fn linear_columns(graph: &FactorGraph) -> Result<Vec<Vec<usize>>> {
    graph
        .checks
        .iter()
        .map(|c| match c.kind {
            CheckKind::Xor(_) | CheckKind::Maj(1) => Ok(Some(c.vars.clone())),
            CheckKind::Parity(_) => Err(Error::InvalidParameter(
                "parity constraints restrict the source; no generator form".into(),
            )),
            CheckKind::Maj(d) => Err(Error::UnsupportedArity { got: d, expected: "a linear check".into() }),
        })
        .filter_map(|r| r.transpose())
        .collect()
}

pub fn generator_matrix(graph: &FactorGraph) -> Result<BitMatrix> {
    Ok(BitMatrix::from_columns(graph.k, &linear_columns(graph)?))
}

/// Same as [`map_ber_linear`] but reads the generator from a sparse linear graph.
pub fn map_ber_graph(graph: &FactorGraph, eps: f64, trials: usize, seed: u64) -> Result<BerEstimate> {
    map_ber_columns(graph.k, &linear_columns(graph)?, eps, trials, seed)
}

/// Exact posterior `P(S_i = 0 | received)` under a uniform prior.
pub fn brute_force_marginals(graph: &FactorGraph, received: &ReceivedWord) -> Result<Vec<f64>> {
    let k = graph.k;
    if k > BRUTE_FORCE_MAX_K {
        return Err(Error::TooLarge(format!("k = {k} exceeds {BRUTE_FORCE_MAX_K}")));
    }
    if received.len() != graph.n_emitted() {
        return Err(Error::LengthMismatch { expected: graph.n_emitted(), got: received.len() });
    }
    // (mask, kind, observed bit, weight if matched, weight if not)
    let mut cons: Vec<(u32, CheckKind, bool, f64, f64)> = Vec::new();
    let mut pos = 0;
    for c in &graph.checks {
        let mask = c.vars.iter().fold(0u32, |m, &v| m | (1 << v));
        let sym = if c.kind.is_emitted() {
            pos += 1;
            received.symbols[pos - 1]
        } else {
            Symbol::Zero
        };
        let Some(bit) = sym.bit() else { continue };
        let (hit, miss) = match (c.kind, received.channel) {
            (CheckKind::Parity(_), _) | (_, ChannelParam::Bec(_)) => (1.0, 0.0),
            (_, ChannelParam::Bsc(d)) => (1.0 - d, d),
        };
        cons.push((mask, c.kind, bit, hit, miss));
    }
    let eval = |kind: CheckKind, bits: u32| match kind {
        CheckKind::Maj(d) => 2 * bits.count_ones() as usize > d,
        _ => bits.count_ones() % 2 == 1,
    };
    let (mut z, mut w0) = (0.0_f64, vec![0.0_f64; k]);
    for s in 0u32..(1u32 << k) {
        let mut w = 1.0;
        for &(mask, kind, bit, hit, miss) in &cons {
            w *= if eval(kind, s & mask) == bit { hit } else { miss };
            if w == 0.0 {
                break;
            }
        }
        if w == 0.0 {
            continue;
        }
        z += w;
        for (i, acc) in w0.iter_mut().enumerate() {
            if s >> i & 1 == 0 {
                *acc += w;
            }
        }
    }
    if z == 0.0 {
        return Err(Error::Contradiction { var: usize::MAX });
    }
    Ok(w0.into_iter().map(|x| x / z).collect())
}
