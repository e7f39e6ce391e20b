//! Random large-MIMO / random-spreading channel realizations.
//!
//! A channel is an N×K real matrix S of unit-norm signature columns, a
//! per-bit amplitude profile A, and a noise level σ. Transmission produces
//! r = S·A·b + m and the matched-filter statistic y = Sᵀr; all detectors
//! work from y, the crosscorrelation matrix R = SᵀS, and the energy-weighted
//! matrix H = A·R·A.

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::mat::{dot, Matrix};
use crate::seed::stream_rng;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub mod io;

/// Per-bit signal amplitudes A_k (symbol energies are A_k²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfile {
    amplitudes: Vec<f64>,
}

impl EnergyProfile {
    /// Equal unit energy for all `k` bits.
    pub fn equal(k: usize) -> Self {
        EnergyProfile {
            amplitudes: vec![1.0; k],
        }
    }

    /// Profile from explicit amplitudes; all must be strictly positive.
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimensions("empty energy profile".into()));
        }
        if amplitudes.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidConfig(
                "amplitudes must be finite and > 0".into(),
            ));
        }
        Ok(EnergyProfile { amplitudes })
    }

    /// Two amplitude classes: the first ⌈fraction·k⌉ bits get `a1`, the rest `a2`.
    pub fn two_class(k: usize, fraction_first: f64, a1: f64, a2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction_first) {
            return Err(Error::InvalidConfig("fraction must lie in [0,1]".into()));
        }
        let first = ((fraction_first * k as f64).ceil() as usize).min(k);
        let mut amplitudes = vec![a1; first];
        amplitudes.resize(k, a2);
        EnergyProfile::from_amplitudes(amplitudes)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitude(&self, k: usize) -> f64 {
        self.amplitudes[k]
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// Mean symbol energy (1/K)·Σ A_k².
    pub fn mean_energy(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>() / self.amplitudes.len() as f64
    }

    /// True when the mean symbol energy is 1 within 1e−9.
    pub fn is_normalized(&self) -> bool {
        (self.mean_energy() - 1.0).abs() <= 1e-9
    }

    /// Rescaled copy with mean symbol energy exactly normalized to 1.
    pub fn normalized(&self) -> Self {
        let scale = self.mean_energy().sqrt();
        EnergyProfile {
            amplitudes: self.amplitudes.iter().map(|a| a / scale).collect(),
        }
    }
}

/// How dense signature entries are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChipDistribution {
    /// Equiprobable ±N^(−1/2) entries.
    Binary,
    /// i.i.d. Gaussian entries, columns renormalized.
    Gaussian,
}

/// Signature model recorded with each realization (and in exported files).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelTag {
    DenseBinary,
    DenseGaussian,
    /// Sparse signatures with the given number of nonzero chips per column.
    Sparse(u32),
    /// Directly constructed (analytic or imported) columns.
    Custom,
}

/// One channel realization: signatures, correlation structure, amplitudes,
/// and the operating noise level. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ChannelInstance {
    columns: Matrix,
    crosscorr: Matrix,
    weighted: Matrix,
    profile: EnergyProfile,
    noise_sigma: f64,
    n: usize,
    k: usize,
    seed: u64,
    model: ModelTag,
}

impl ChannelInstance {
    fn assemble(
        columns: Matrix,
        crosscorr: Matrix,
        profile: EnergyProfile,
        noise_sigma: f64,
        seed: u64,
        model: ModelTag,
    ) -> Self {
        let n = columns.rows();
        let k = columns.cols();
        let a = profile.amplitudes();
        let mut weighted = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                weighted.set(i, j, a[i] * crosscorr.get(i, j) * a[j]);
            }
        }
        ChannelInstance {
            columns,
            crosscorr,
            weighted,
            profile,
            noise_sigma,
            n,
            k,
            seed,
            model,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Channel load α = K/N.
    pub fn load(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Signature matrix S (N×K, unit-norm columns).
    pub fn columns(&self) -> &Matrix {
        &self.columns
    }

    /// Crosscorrelation matrix R = SᵀS (K×K, unit diagonal).
    pub fn crosscorr(&self) -> &Matrix {
        &self.crosscorr
    }

    /// Energy-weighted matrix H = A·R·A (K×K, H_kk = A_k²).
    pub fn weighted(&self) -> &Matrix {
        &self.weighted
    }

    pub fn profile(&self) -> &EnergyProfile {
        &self.profile
    }

    pub fn amplitude(&self, k: usize) -> f64 {
        self.profile.amplitude(k)
    }

    /// Per-dimension noise standard deviation used by [`transmit`].
    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    /// Copy at a different operating noise level (same signatures).
    pub fn with_noise_sigma(&self, sigma: f64) -> Self {
        assert!(sigma >= 0.0 && sigma.is_finite());
        let mut out = self.clone();
        out.noise_sigma = sigma;
        out
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }
}

/// Dense realization with equiprobable binary ±N^(−1/2) chips.
///
/// The crosscorrelation matrix is computed exactly from sign agreements, so
/// the same seed gives bitwise-identical R on any platform.
pub fn generate_dense(
    n: usize,
    k: usize,
    profile: &EnergyProfile,
    noise_sigma: f64,
    seed: u64,
) -> Result<ChannelInstance> {
    generate_dense_chips(n, k, ChipDistribution::Binary, profile, noise_sigma, seed)
}

/// Dense realization with the chip distribution made explicit.
pub fn generate_dense_chips(
    n: usize,
    k: usize,
    chips: ChipDistribution,
    profile: &EnergyProfile,
    noise_sigma: f64,
    seed: u64,
) -> Result<ChannelInstance> {
    check_dims(n, k, profile, noise_sigma)?;
    let mut rng = stream_rng(seed, 0x6368_616e, 0);
    match chips {
        ChipDistribution::Binary => {
            let words = n.div_ceil(64);
            let mut bits = vec![0u64; words * k];
            for w in bits.iter_mut() {
                *w = rng.random();
            }
            if n % 64 != 0 {
                let mask = (1u64 << (n % 64)) - 1;
                for col in 0..k {
                    bits[col * words + words - 1] &= mask;
                }
            }
            let scale = 1.0 / (n as f64).sqrt();
            let mut columns = Matrix::zeros(n, k);
            for col in 0..k {
                let cw = &bits[col * words..(col + 1) * words];
                for row in 0..n {
                    let sign = (cw[row / 64] >> (row % 64)) & 1;
                    columns.set(row, col, if sign == 1 { scale } else { -scale });
                }
            }
            let crosscorr = sign_gram(&bits, words, n, k);
            Ok(ChannelInstance::assemble(
                columns,
                crosscorr,
                profile.clone(),
                noise_sigma,
                seed,
                ModelTag::DenseBinary,
            ))
        }
        ChipDistribution::Gaussian => {
            let mut columns = Matrix::zeros(n, k);
            for col in 0..k {
                let mut norm2 = 0.0;
                let mut raw = vec![0.0; n];
                for v in raw.iter_mut() {
                    *v = rng.sample::<f64, _>(StandardNormal);
                    norm2 += *v * *v;
                }
                let inv = 1.0 / norm2.sqrt();
                for (row, v) in raw.iter().enumerate() {
                    columns.set(row, col, v * inv);
                }
            }
            let crosscorr = dense_gram(&columns);
            Ok(ChannelInstance::assemble(
                columns,
                crosscorr,
                profile.clone(),
                noise_sigma,
                seed,
                ModelTag::DenseGaussian,
            ))
        }
    }
}

/// Sparse realization: every column carries exactly `l` nonzero chips of
/// magnitude L^(−1/2) at distinct random positions with random signs.
pub fn generate_sparse(
    n: usize,
    k: usize,
    l: usize,
    profile: &EnergyProfile,
    noise_sigma: f64,
    seed: u64,
) -> Result<ChannelInstance> {
    check_dims(n, k, profile, noise_sigma)?;
    if l == 0 || l > n {
        return Err(Error::InvalidDimensions(format!(
            "nonzero chip count {l} must lie in 1..={n}"
        )));
    }
    let mut rng = stream_rng(seed, 0x7370_6172, 0);
    let magnitude = 1.0 / (l as f64).sqrt();
    // norm² = l·magnitude²; rescale so every column norm is exactly 1.
    let value = magnitude / ((l as f64) * magnitude * magnitude).sqrt();
    let mut columns = Matrix::zeros(n, k);
    let mut supports: Vec<Vec<(usize, f64)>> = Vec::with_capacity(k);
    for col in 0..k {
        let mut positions = rand::seq::index::sample(&mut rng, n, l).into_vec();
        positions.sort_unstable();
        let mut entries = Vec::with_capacity(l);
        for pos in positions {
            let v = if rng.random::<bool>() { value } else { -value };
            columns.set(pos, col, v);
            entries.push((pos, v));
        }
        supports.push(entries);
    }
    let mut crosscorr = Matrix::zeros(k, k);
    for i in 0..k {
        crosscorr.set(i, i, 1.0);
        for j in (i + 1)..k {
            let r = sparse_dot(&supports[i], &supports[j]);
            crosscorr.set(i, j, r);
            crosscorr.set(j, i, r);
        }
    }
    Ok(ChannelInstance::assemble(
        columns,
        crosscorr,
        profile.clone(),
        noise_sigma,
        seed,
        ModelTag::Sparse(l as u32),
    ))
}

/// Exact two-bit channel with crosscorrelation ρ and amplitudes (a1, a2).
pub fn two_bit_channel(rho: f64, a1: f64, a2: f64, noise_sigma: f64) -> ChannelInstance {
    assert!(rho.abs() <= 1.0, "|rho| must be at most 1");
    assert!(a1 > 0.0 && a2 > 0.0);
    assert!(noise_sigma >= 0.0);
    let ortho = (1.0 - rho * rho).sqrt();
    let columns = Matrix::from_vec(2, 2, vec![1.0, rho, 0.0, ortho]);
    let crosscorr = Matrix::from_vec(2, 2, vec![1.0, rho, rho, 1.0]);
    let profile = EnergyProfile::from_amplitudes(vec![a1, a2]).unwrap();
    ChannelInstance::assemble(columns, crosscorr, profile, noise_sigma, 0, ModelTag::Custom)
}

/// Channel from explicit columns (already unit norm within 1e−9).
pub fn from_columns(
    columns: Matrix,
    profile: &EnergyProfile,
    noise_sigma: f64,
    seed: u64,
    model: ModelTag,
) -> Result<ChannelInstance> {
    let n = columns.rows();
    let k = columns.cols();
    check_dims(n, k, profile, noise_sigma)?;
    for col in 0..k {
        let mut norm2 = 0.0;
        for row in 0..n {
            let v = columns.get(row, col);
            norm2 += v * v;
        }
        if (norm2.sqrt() - 1.0).abs() > 1e-9 {
            return Err(Error::MalformedFile(format!(
                "column {col} has norm {} (must be 1 within 1e-9)",
                norm2.sqrt()
            )));
        }
    }
    let crosscorr = dense_gram(&columns);
    Ok(ChannelInstance::assemble(
        columns,
        crosscorr,
        profile.clone(),
        noise_sigma,
        seed,
        model,
    ))
}

fn check_dims(n: usize, k: usize, profile: &EnergyProfile, noise_sigma: f64) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidDimensions(format!("n={n}, k={k}")));
    }
    if profile.len() != k {
        return Err(Error::InvalidDimensions(format!(
            "profile has {} amplitudes for k={k}",
            profile.len()
        )));
    }
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::InvalidConfig("noise sigma must be >= 0".into()));
    }
    Ok(())
}

/// Gram matrix of packed ±1 sign columns scaled by N^(−1/2): the inner
/// product of columns j,k is (N − 2·disagreements)/N, computed exactly.
fn sign_gram(bits: &[u64], words: usize, n: usize, k: usize) -> Matrix {
    let mut r = Matrix::zeros(k, k);
    let nf = n as f64;
    for i in 0..k {
        r.set(i, i, 1.0);
        let ci = &bits[i * words..(i + 1) * words];
        for j in (i + 1)..k {
            let cj = &bits[j * words..(j + 1) * words];
            let mut disagree = 0u32;
            for (a, b) in ci.iter().zip(cj) {
                disagree += (a ^ b).count_ones();
            }
            let v = (n as f64 - 2.0 * f64::from(disagree)) / nf;
            r.set(i, j, v);
            r.set(j, i, v);
        }
    }
    r
}

/// Gram matrix by direct column dot products (general columns).
fn dense_gram(columns: &Matrix) -> Matrix {
    let n = columns.rows();
    let k = columns.cols();
    let mut r = Matrix::zeros(k, k);
    // Work column-major once to keep the pairwise dots contiguous.
    let mut cols: Vec<Vec<f64>> = vec![vec![0.0; n]; k];
    for row in 0..n {
        let data = columns.row(row);
        for (col, c) in cols.iter_mut().enumerate() {
            c[row] = data[col];
        }
    }
    for i in 0..k {
        r.set(i, i, 1.0);
        for j in (i + 1)..k {
            let v = dot(&cols[i], &cols[j]);
            r.set(i, j, v);
            r.set(j, i, v);
        }
    }
    r
}

fn sparse_dot(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let mut acc = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Noise level for a target E_b/N₀ in dB: σ = √(Ē / (2·10^(dB/10))),
/// where Ē is the mean symbol energy.
pub fn snr_db_to_sigma(snr_db: f64, mean_energy: f64) -> f64 {
    assert!(mean_energy > 0.0);
    (mean_energy / (2.0 * 10f64.powf(snr_db / 10.0))).sqrt()
}

/// E_b/N₀ in dB for a noise level: 10·log₁₀(Ē/(2σ²)).
pub fn sigma_to_snr_db(sigma: f64, mean_energy: f64) -> f64 {
    assert!(sigma > 0.0 && mean_energy > 0.0);
    10.0 * (mean_energy / (2.0 * sigma * sigma)).log10()
}

/// One received frame: the channel output r, the matched-filter statistic
/// y = Sᵀr, and the transmitted truth retained for scoring.
#[derive(Debug, Clone)]
pub struct Observation {
    received: Vec<f64>,
    mf_output: Vec<f64>,
    truth: BitVector,
}

impl Observation {
    /// Builds an observation directly from a matched-filter statistic, for
    /// analytic studies in y-space (no received vector).
    pub fn from_mf_output(mf_output: Vec<f64>, truth: BitVector) -> Self {
        Observation {
            received: Vec::new(),
            mf_output,
            truth,
        }
    }

    pub fn received(&self) -> &[f64] {
        &self.received
    }

    pub fn mf_output(&self) -> &[f64] {
        &self.mf_output
    }

    pub fn truth(&self) -> &BitVector {
        &self.truth
    }
}

/// Transmits b through the channel: r = S·A·b + m with m ~ N(0, σ²I),
/// and forms y = Sᵀr.
pub fn transmit(ch: &ChannelInstance, b: &BitVector, noise_seed: u64) -> Observation {
    assert_eq!(b.len(), ch.k(), "bit vector length must match K");
    let a = ch.profile().amplitudes();
    let x: Vec<f64> = (0..ch.k()).map(|k| a[k] * b.get_f(k)).collect();
    let mut r = vec![0.0; ch.n()];
    ch.columns().matvec(&x, &mut r);
    if ch.noise_sigma() > 0.0 {
        let mut rng = stream_rng(noise_seed, 0x6e6f_6973, 0);
        for v in r.iter_mut() {
            *v += ch.noise_sigma() * rng.sample::<f64, _>(StandardNormal);
        }
    }
    let mut y = vec![0.0; ch.k()];
    ch.columns().matvec_t(&r, &mut y);
    Observation {
        received: r,
        mf_output: y,
        truth: b.clone(),
    }
}
