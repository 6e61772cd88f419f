//! Delayed block iterations x_i ← Σ_j M_ij x_j (with per-pair delays), their
//! companion operators, spectral radii, random ensembles and the
//! spectral-radius-versus-contraction experiment.

use std::io::Write;

use nalgebra::{DMatrix, DVector, Schur};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsyncError {
    #[error("history depth {kappa} is below the largest delay {max_delay}")]
    KappaTooSmall { kappa: usize, max_delay: usize },
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("bad delay matrix: {0}")]
    BadDelays(String),
    #[error("diagonal block {0} is singular")]
    SingularDiagonalBlock(usize),
    #[error("matrix has zero spectral radius and cannot be normalised")]
    NormalizationDegenerate,
    #[error("spectral radius did not converge to {tol} within {iterations} squarings")]
    NoConvergence { tol: f64, iterations: usize },
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("csv output failed: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, AsyncError>;

/// Square matrix with an ℓ-way block partition of its rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    data: DMatrix<f64>,
    partition: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockMatrix {
    pub fn new(data: DMatrix<f64>, partition: Vec<usize>) -> Result<Self> {
        if !data.is_square() {
            return Err(AsyncError::BadPartition(format!("matrix is {}x{}", data.nrows(), data.ncols())));
        }
        if partition.is_empty() || partition.contains(&0) {
            return Err(AsyncError::BadPartition("block sizes must be positive".into()));
        }
        let total: usize = partition.iter().sum();
        if total != data.nrows() {
            return Err(AsyncError::BadPartition(format!(
                "block sizes sum to {total}, matrix has {} rows",
                data.nrows()
            )));
        }
        let mut offsets = Vec::with_capacity(partition.len());
        let mut acc = 0;
        for &b in &partition {
            offsets.push(acc);
            acc += b;
        }
        Ok(Self {
            data,
            partition,
            offsets,
        })
    }

    /// `n` rows split into `blocks` near-equal parts, larger parts first.
    pub fn equal_partition(n: usize, blocks: usize) -> Result<Vec<usize>> {
        if blocks == 0 || blocks > n {
            return Err(AsyncError::BadPartition(format!("cannot split {n} rows into {blocks} blocks")));
        }
        Ok((0..blocks).map(|b| n / blocks + usize::from(b < n % blocks)).collect())
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn blocks(&self) -> usize {
        self.partition.len()
    }

    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        self.data
            .view((self.offsets[i], self.offsets[j]), (self.partition[i], self.partition[j]))
            .into_owned()
    }

    fn set_block(&mut self, i: usize, j: usize, value: &DMatrix<f64>) {
        self.data
            .view_mut((self.offsets[i], self.offsets[j]), (self.partition[i], self.partition[j]))
            .copy_from(value);
    }

    pub fn block_is_zero(&self, i: usize, j: usize) -> bool {
        self.block(i, j).iter().all(|&x| x == 0.0)
    }

    pub fn has_zero_diagonal_blocks(&self) -> bool {
        (0..self.blocks()).all(|i| self.block_is_zero(i, i))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            data: &self.data * c,
            ..self.clone()
        }
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        spectral_radius(&self.data, DEFAULT_TOL)
    }

    /// Divide by the spectral radius.
    pub fn normalized(&self) -> Result<Self> {
        let rho = self.spectral_radius()?;
        if rho == 0.0 || !rho.is_finite() {
            return Err(AsyncError::NormalizationDegenerate);
        }
        Ok(self.scaled(1.0 / rho))
    }
}

/// δ[j][i]: how many steps old the copy of block j is when block i reads it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DelayMatrix(Vec<Vec<usize>>);

impl DelayMatrix {
    pub fn new(delays: Vec<Vec<usize>>) -> Result<Self> {
        let l = delays.len();
        if delays.iter().any(|row| row.len() != l) {
            return Err(AsyncError::BadDelays("delay matrix must be square".into()));
        }
        if let Some(i) = (0..l).find(|&i| delays[i][i] != 0) {
            return Err(AsyncError::BadDelays(format!("diagonal entry {i} is nonzero")));
        }
        Ok(Self(delays))
    }

    pub fn zeros(l: usize) -> Self {
        Self(vec![vec![0; l]; l])
    }

    /// Every off-diagonal delay equal to `k`.
    pub fn uniform(l: usize, k: usize) -> Self {
        Self((0..l).map(|j| (0..l).map(|i| if i == j { 0 } else { k }).collect()).collect())
    }

    /// Block 0 is `d` steps late toward every other block.
    pub fn single(l: usize, d: usize) -> Self {
        let mut m = Self::zeros(l);
        for i in 1..l {
            m.0[0][i] = d;
        }
        m
    }

    pub fn blocks(&self) -> usize {
        self.0.len()
    }

    /// δ_ji, the delay of information from block `from` to block `to`.
    pub fn get(&self, from: usize, to: usize) -> usize {
        self.0[from][to]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn max(&self) -> usize {
        self.0.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// The linear map on stacked histories (x⁽ᵏ⁾, …, x⁽ᵏ⁻ᵏᵃᵖᵖᵃ⁾) advancing one
/// step. Stored as its top block row; the rest is an identity shift.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionOperator {
    top: DMatrix<f64>,
    kappa: usize,
}

pub fn build_companion(m: &BlockMatrix, delays: &DelayMatrix, kappa: usize) -> Result<CompanionOperator> {
    if delays.blocks() != m.blocks() {
        return Err(AsyncError::BadPartition(format!(
            "{} delay blocks for a {}-block matrix",
            delays.blocks(),
            m.blocks()
        )));
    }
    if kappa < delays.max() {
        return Err(AsyncError::KappaTooSmall {
            kappa,
            max_delay: delays.max(),
        });
    }
    let n = m.dim();
    let mut top = DMatrix::zeros(n, (kappa + 1) * n);
    for i in 0..m.blocks() {
        for j in 0..m.blocks() {
            let col = delays.get(j, i) * n + m.offsets[j];
            top.view_mut((m.offsets[i], col), (m.partition[i], m.partition[j]))
                .copy_from(&m.block(i, j));
        }
    }
    Ok(CompanionOperator { top, kappa })
}

impl CompanionOperator {
    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn size(&self) -> usize {
        self.top.ncols()
    }

    /// One step on a stacked history vector (newest block first).
    pub fn apply(&self, z: &DVector<f64>) -> DVector<f64> {
        let n = self.top.nrows();
        let mut out = DVector::zeros(z.len());
        out.rows_mut(0, n).copy_from(&(&self.top * z));
        out.rows_mut(n, z.len() - n).copy_from(&z.rows(0, z.len() - n));
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.top.nrows();
        let size = self.size();
        let mut d = DMatrix::zeros(size, size);
        d.rows_mut(0, n).copy_from(&self.top);
        for r in n..size {
            d[(r, r - n)] = 1.0;
        }
        d
    }

    pub fn spectral_radius(&self, tol: f64) -> Result<f64> {
        spectral_radius(&self.to_dense(), tol)
    }
}

pub const DEFAULT_TOL: f64 = 1e-12;

/// Largest matrix handled by a dense eigensolve.
pub const EIGEN_SIZE_LIMIT: usize = 600;

/// ρ(A): dense real Schur for small matrices, Gelfand's formula beyond.
pub fn spectral_radius(a: &DMatrix<f64>, tol: f64) -> Result<f64> {
    assert!(a.is_square(), "spectral radius of a non-square matrix");
    if a.nrows() == 0 {
        return Ok(0.0);
    }
    if a.nrows() <= EIGEN_SIZE_LIMIT {
        if let Some(schur) = Schur::try_new(a.clone(), f64::EPSILON, 1000 * a.nrows()) {
            return Ok(schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    gelfand_spectral_radius(a, tol, 64)
}

/// ‖A^k‖^{1/k} for k = 2^s by repeated squaring with renormalisation, with
/// one Richardson step to cancel the O(1/k) bias.
pub fn gelfand_spectral_radius(a: &DMatrix<f64>, tol: f64, max_squarings: usize) -> Result<f64> {
    let norm = a.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let mut b = a / norm;
    let mut log_norm = norm.ln();
    let mut k = 1.0f64;
    let mut est_prev = norm;
    let mut extrap_prev: Option<f64> = None;
    for _ in 0..max_squarings {
        b = &b * &b;
        let nb = b.norm();
        if nb == 0.0 {
            return Ok(0.0);
        }
        b /= nb;
        log_norm = 2.0 * log_norm + nb.ln();
        k *= 2.0;
        let est = (log_norm / k).exp();
        let extrap = 2.0 * est - est_prev;
        if let Some(prev) = extrap_prev {
            if (extrap - prev).abs() <= tol * extrap.abs().max(1.0) {
                return Ok(extrap);
            }
        }
        extrap_prev = Some(extrap);
        est_prev = est;
    }
    Err(AsyncError::NoConvergence {
        tol,
        iterations: max_squarings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Iid,
    Goe,
    Wishart,
}

impl Ensemble {
    pub const ALL: [Ensemble; 3] = [Ensemble::Iid, Ensemble::Goe, Ensemble::Wishart];

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Iid => "iid",
            Ensemble::Goe => "goe",
            Ensemble::Wishart => "wishart",
        }
    }
}

/// Gaussian X, then M = X, X + Xᵀ or XXᵀ, scaled to unit spectral radius.
pub fn sample_ensemble(ensemble: Ensemble, partition: &[usize], seed: u64) -> Result<BlockMatrix> {
    let n: usize = partition.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let m = match ensemble {
        Ensemble::Iid => x,
        Ensemble::Goe => &x + x.transpose(),
        Ensemble::Wishart => &x * x.transpose(),
    };
    BlockMatrix::new(m, partition.to_vec())?.normalized()
}

/// C_ii = 0, C_ij = M_ii⁻¹ M_ij (negated when `negate`), scaled to unit
/// spectral radius.
pub fn block_jacobi_matrix(m: &BlockMatrix, negate: bool) -> Result<BlockMatrix> {
    let mut c = BlockMatrix::new(DMatrix::zeros(m.dim(), m.dim()), m.partition.clone())?;
    let sign = if negate { -1.0 } else { 1.0 };
    for i in 0..m.blocks() {
        let inv = m
            .block(i, i)
            .try_inverse()
            .ok_or(AsyncError::SingularDiagonalBlock(i))?;
        for j in 0..m.blocks() {
            if i != j {
                c.set_block(i, j, &(&inv * m.block(i, j) * sign));
            }
        }
    }
    c.normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayLawCheck {
    pub rho_m: f64,
    pub rho_kappa: f64,
    pub rho_kappa_prime: f64,
    pub cospectral_ok: bool,
    /// Present when all off-diagonal delays equal some k and M has zero
    /// diagonal blocks.
    pub uniform: Option<UniformCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformCheck {
    pub k: usize,
    pub predicted: f64,
    pub uniform_ok: bool,
}

/// Common off-diagonal delay, if there is one.
pub fn uniform_delay(delays: &DelayMatrix) -> Option<usize> {
    let l = delays.blocks();
    let mut off = (0..l).flat_map(|j| (0..l).filter(move |&i| i != j).map(move |i| (j, i)));
    let first = off.next().map(|(j, i)| delays.get(j, i))?;
    off.all(|(j, i)| delays.get(j, i) == first).then_some(first)
}

pub fn verify_delay_laws(m: &BlockMatrix, delays: &DelayMatrix, kappa: usize, kappa_prime: usize, tol: f64) -> Result<DelayLawCheck> {
    let rho_m = m.spectral_radius()?;
    let rho_kappa = build_companion(m, delays, kappa)?.spectral_radius(DEFAULT_TOL)?;
    let rho_kappa_prime = build_companion(m, delays, kappa_prime)?.spectral_radius(DEFAULT_TOL)?;
    let uniform = match uniform_delay(delays) {
        Some(k) if m.has_zero_diagonal_blocks() => {
            let predicted = rho_m.powf(1.0 / (k as f64 + 1.0));
            Some(UniformCheck {
                k,
                predicted,
                uniform_ok: (rho_kappa - predicted).abs() < tol,
            })
        }
        _ => None,
    };
    Ok(DelayLawCheck {
        rho_m,
        rho_kappa,
        rho_kappa_prime,
        cospectral_ok: (rho_kappa - rho_kappa_prime).abs() < tol,
        uniform,
    })
}

/// Mean δ_ji over the nonzero off-diagonal blocks M_ij.
pub fn mean_effective_delay(m: &BlockMatrix, delays: &DelayMatrix) -> f64 {
    let mut sum = 0usize;
    let mut count = 0usize;
    for i in 0..m.blocks() {
        for j in 0..m.blocks() {
            if i != j && !m.block_is_zero(i, j) {
                sum += delays.get(j, i);
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum as f64 / count as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DelayPattern {
    Single { delay: usize },
    Poisson { mean: f64 },
    Uniform { k: usize },
    Explicit { delays: Vec<Vec<usize>> },
}

impl DelayPattern {
    /// Concrete delays for `l` blocks; Poisson draws come from `seed`.
    pub fn realize(&self, l: usize, seed: u64) -> Result<DelayMatrix> {
        match self {
            DelayPattern::Single { delay } => Ok(DelayMatrix::single(l, *delay)),
            DelayPattern::Uniform { k } => Ok(DelayMatrix::uniform(l, *k)),
            DelayPattern::Explicit { delays } => {
                let d = DelayMatrix::new(delays.clone())?;
                if d.blocks() != l {
                    return Err(AsyncError::BadDelays(format!("{} delay blocks, expected {l}", d.blocks())));
                }
                Ok(d)
            }
            DelayPattern::Poisson { mean } => {
                let dist = Poisson::new(*mean)
                    .map_err(|e| AsyncError::InvalidConfig(format!("poisson mean {mean}: {e}")))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut d = DelayMatrix::zeros(l);
                for j in 0..l {
                    for i in 0..l {
                        if i != j {
                            d.0[j][i] = dist.sample(&mut rng) as usize;
                        }
                    }
                }
                Ok(d)
            }
        }
    }
}

fn default_n() -> usize {
    16
}

fn default_blocks() -> usize {
    4
}

fn default_trials() -> usize {
    50
}

/// 0.05, 0.10, …, 0.95.
pub fn default_c_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 / 20.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ensemble: Ensemble,
    #[serde(default)]
    pub block_jacobi: bool,
    #[serde(default)]
    pub negate_offdiag: bool,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_blocks")]
    pub blocks: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub delay_pattern: DelayPattern,
    #[serde(default = "default_c_grid")]
    pub c_grid: Vec<f64>,
}

impl ExperimentConfig {
    pub fn new(ensemble: Ensemble, block_jacobi: bool, delay_pattern: DelayPattern, seed: u64) -> Self {
        Self {
            ensemble,
            block_jacobi,
            negate_offdiag: false,
            n: default_n(),
            blocks: default_blocks(),
            trials: default_trials(),
            seed,
            delay_pattern,
            c_grid: default_c_grid(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(AsyncError::InvalidConfig("trials must be at least 1".into()));
        }
        if let Some(c) = self.c_grid.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
            return Err(AsyncError::InvalidConfig(format!("c = {c} not in (0, 1)")));
        }
        BlockMatrix::equal_partition(self.n, self.blocks)?;
        Ok(())
    }

    /// The realised delay matrix (fixed across trials).
    pub fn delays(&self) -> Result<DelayMatrix> {
        self.delay_pattern.realize(self.blocks, derive_seed(self.seed, DELAY_STREAM, 0))
    }
}

const TRIAL_STREAM: u64 = 1;
const DELAY_STREAM: u64 = 2;

/// Seed for item `index` of `stream`, a pure function of the master seed.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    // splitmix64 finaliser over a combined counter
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub ensemble: String,
    pub jacobi: bool,
    pub trial: usize,
    pub seed: u64,
    pub c: f64,
    pub rho: f64,
    pub bound: f64,
}

pub const CSV_HEADER: [&str; 7] = ["ensemble", "jacobi", "trial", "seed", "c", "rho", "bound"];

/// ρ((cM)^(δ)) for every trial and c. Trials run in parallel; rows come back
/// in (trial, c) order regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    cfg.validate()?;
    let partition = BlockMatrix::equal_partition(cfg.n, cfg.blocks)?;
    let delays = cfg.delays()?;
    let kappa = delays.max();
    let bound_exp = 1.0 / (kappa as f64 + 1.0);
    let per_trial: Vec<Result<Vec<ExperimentRow>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = derive_seed(cfg.seed, TRIAL_STREAM, trial as u64);
            let mut m = sample_ensemble(cfg.ensemble, &partition, seed)?;
            if cfg.block_jacobi {
                m = block_jacobi_matrix(&m, cfg.negate_offdiag)?;
            }
            cfg.c_grid
                .iter()
                .map(|&c| {
                    let rho = build_companion(&m.scaled(c), &delays, kappa)?.spectral_radius(DEFAULT_TOL)?;
                    Ok(ExperimentRow {
                        ensemble: cfg.ensemble.name().to_string(),
                        jacobi: cfg.block_jacobi,
                        trial,
                        seed,
                        c,
                        rho,
                        bound: c.powf(bound_exp),
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(cfg.trials * cfg.c_grid.len());
    for r in per_trial {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER).map_err(|e| AsyncError::Csv(e.to_string()))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| AsyncError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| AsyncError::Csv(e.to_string()))
}

/// Share of rows with rho ≤ bound (within `slack`). Reported only; the bound
/// is a conjecture.
pub fn fraction_below_bound(rows: &[ExperimentRow], slack: f64) -> f64 {
    if rows.is_empty() {
        return 1.0;
    }
    rows.iter().filter(|r| r.rho <= r.bound + slack).count() as f64 / rows.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_blocks(rows: &[&[f64]]) -> BlockMatrix {
        let n = rows.len();
        let data = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        BlockMatrix::new(data, vec![1; n]).unwrap()
    }

    #[test]
    fn radius_examples() {
        let d = DMatrix::from_row_slice(2, 2, &[0.3, 0.0, 0.0, -0.7]);
        assert!((spectral_radius(&d, 1e-12).unwrap() - 0.7).abs() < 1e-14);
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!((spectral_radius(&rot, 1e-12).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(spectral_radius(&DMatrix::zeros(3, 3), 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn gelfand_agrees_with_eigensolve() {
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::from_fn(8, 8, |_, _| StandardNormal.sample(&mut rng));
            let eig = spectral_radius(&a, 1e-12).unwrap();
            let gel = gelfand_spectral_radius(&a, 1e-12, 64).unwrap();
            assert!((eig - gel).abs() < 1e-6, "seed {seed}: {eig} vs {gel}");
        }
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!((gelfand_spectral_radius(&rot, 1e-12, 64).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_delay_companion_is_m() {
        let m = sample_ensemble(Ensemble::Iid, &[2, 2], 3).unwrap();
        let comp = build_companion(&m, &DelayMatrix::zeros(2), 0).unwrap();
        assert_eq!(comp.to_dense(), *m.data());
    }

    #[test]
    fn swap_with_unit_delay() {
        let m = scalar_blocks(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let comp = build_companion(&m, &DelayMatrix::uniform(2, 1), 1).unwrap();
        assert_eq!(comp.size(), 4);
        assert!((comp.spectral_radius(1e-12).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn companion_matches_recurrence() {
        let m = sample_ensemble(Ensemble::Goe, &[2, 1, 2], 8).unwrap();
        let delays = DelayMatrix::new(vec![vec![0, 2, 1], vec![1, 0, 0], vec![3, 1, 0]]).unwrap();
        let kappa = 3;
        let comp = build_companion(&m, &delays, kappa).unwrap();
        let n = m.dim();
        let offsets = [0usize, 2, 3];
        let sizes = [2usize, 1, 2];
        // history[t] = x^(t); start with kappa+1 arbitrary vectors
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut history: Vec<DVector<f64>> = (0..=kappa)
            .map(|_| DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng)))
            .collect();
        let stack = |h: &[DVector<f64>]| {
            let mut z = DVector::zeros((kappa + 1) * n);
            for q in 0..=kappa {
                z.rows_mut(q * n, n).copy_from(&h[h.len() - 1 - q]);
            }
            z
        };
        let mut z = stack(&history);
        for _ in 0..5 {
            let now = history.len() - 1;
            let mut next = DVector::zeros(n);
            for i in 0..3 {
                for j in 0..3 {
                    let src = &history[now - delays.get(j, i)];
                    let part = m.block(i, j) * src.rows(offsets[j], sizes[j]);
                    let mut rows = next.rows_mut(offsets[i], sizes[i]);
                    rows += part;
                }
            }
            history.push(next);
            z = comp.apply(&z);
            assert!((&z - stack(&history)).norm() < 1e-12);
        }
    }

    #[test]
    fn kappa_checked() {
        let m = sample_ensemble(Ensemble::Iid, &[1, 1], 0).unwrap();
        assert_eq!(
            build_companion(&m, &DelayMatrix::uniform(2, 2), 1),
            Err(AsyncError::KappaTooSmall { kappa: 1, max_delay: 2 })
        );
        assert!(DelayMatrix::new(vec![vec![1, 0], vec![0, 0]]).is_err());
    }

    #[test]
    fn ensembles_are_normalised_and_deterministic() {
        for e in Ensemble::ALL {
            let a = sample_ensemble(e, &[3, 3], 42).unwrap();
            assert!((a.spectral_radius().unwrap() - 1.0).abs() < 1e-9);
            assert_eq!(a, sample_ensemble(e, &[3, 3], 42).unwrap());
        }
        let w = sample_ensemble(Ensemble::Wishart, &[4], 5).unwrap();
        assert!((w.data() - w.data().transpose()).norm() < 1e-12);
        assert!(w.data().symmetric_eigenvalues().iter().all(|&x| x > -1e-12));
    }

    #[test]
    fn block_jacobi_examples() {
        let m = scalar_blocks(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let c = block_jacobi_matrix(&m, false).unwrap();
        assert!((c.data() - DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).norm() < 1e-12);
        let diag = scalar_blocks(&[&[2.0, 0.0], &[0.0, 3.0]]);
        assert_eq!(block_jacobi_matrix(&diag, false), Err(AsyncError::NormalizationDegenerate));
        let sing = scalar_blocks(&[&[0.0, 1.0], &[1.0, 2.0]]);
        assert_eq!(block_jacobi_matrix(&sing, false), Err(AsyncError::SingularDiagonalBlock(0)));
        let big = sample_ensemble(Ensemble::Goe, &[2, 3, 2], 1).unwrap();
        assert!(block_jacobi_matrix(&big, true).unwrap().has_zero_diagonal_blocks());
    }

    #[test]
    fn quarter_radius_unit_delay() {
        let m = scalar_blocks(&[&[0.0, 0.25], &[0.25, 0.0]]);
        let check = verify_delay_laws(&m, &DelayMatrix::uniform(2, 1), 1, 4, 1e-10).unwrap();
        assert!((check.rho_kappa - 0.5).abs() < 1e-12);
        assert!(check.cospectral_ok);
        assert!(check.uniform.unwrap().uniform_ok);
    }

    #[test]
    fn zero_delays_keep_radius() {
        let m = sample_ensemble(Ensemble::Iid, &[2, 2, 2], 11).unwrap().scaled(0.7);
        for kappa in [0, 2, 5] {
            let rho = build_companion(&m, &DelayMatrix::zeros(3), kappa)
                .unwrap()
                .spectral_radius(1e-12)
                .unwrap();
            assert!((rho - 0.7).abs() < 1e-10);
        }
    }

    #[test]
    fn delay_patterns() {
        let s = DelayPattern::Single { delay: 5 }.realize(4, 0).unwrap();
        assert_eq!(s.rows()[0], vec![0, 5, 5, 5]);
        assert!(s.rows()[1..].iter().flatten().all(|&d| d == 0));
        let p = DelayPattern::Poisson { mean: 3.0 };
        assert_eq!(p.realize(4, 9).unwrap(), p.realize(4, 9).unwrap());
        assert!((0..4).all(|i| p.realize(4, 9).unwrap().get(i, i) == 0));
    }

    #[test]
    fn experiment_is_deterministic_and_well_formed() {
        let mut cfg = ExperimentConfig::new(Ensemble::Goe, true, DelayPattern::Uniform { k: 1 }, 7);
        cfg.trials = 3;
        cfg.n = 8;
        cfg.c_grid = vec![0.25, 0.5];
        let rows = run_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows, run_experiment(&cfg).unwrap());
        for r in &rows {
            assert!((r.rho - r.c.sqrt()).abs() < 1e-9);
        }
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("ensemble,jacobi,trial,seed,c,rho,bound\n"));
        assert_eq!(text.lines().count(), 7);
    }
}
