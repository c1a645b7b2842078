//! Block propagators and density-matrix evolution.
//!
//! Exact propagation diagonalizes each Hermitian block once and reuses the
//! eigenpairs for every τ. Model 1 replaces each constant-Hamiltonian
//! interval by the first-order product (e^{−iH₀Δτ/n} e^{−iΩ_jΔτ/n})^n;
//! Model 2 replaces it by a free drift over Δτ⁽¹⁾ and a strong short pulse
//! e^{−i(Ω_j/ε̃)Δτ⁽²⁾} with Δτ⁽²⁾ = ε̃Δτ⁽¹⁾, so the pulse factor is
//! e^{−iΩ_jΔτ⁽¹⁾} for every ε̃. Reported times count both subintervals.

use crate::basis::{z_value, ExcitationBasis, Partition};
use crate::error::{Error, Result};
use crate::hamiltonian::BlockHamiltonian;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Exact,
    Model1 { trotter_n: usize },
    Model2 { eps_tilde: f64 },
}

/// Unitary blocks U⁽ᵏ⁾ per excitation sector; block 0 is the scalar U₀.
#[derive(Debug, Clone)]
pub struct BlockPropagator {
    pub basis: Arc<ExcitationBasis>,
    pub blocks: Vec<Array2<Complex64>>,
    pub provenance: Provenance,
}

impl BlockPropagator {
    pub fn u0(&self) -> Complex64 {
        self.blocks[0][[0, 0]]
    }

    pub fn sector(&self, k: usize) -> &Array2<Complex64> {
        &self.blocks[k]
    }
}

/// Eigenpairs of every block, cached so τ-scans cost one matmul per point.
#[derive(Debug, Clone)]
pub struct BlockEigen {
    pub basis: Arc<ExcitationBasis>,
    pairs: Vec<(Array1<f64>, Array2<f64>)>,
}

impl BlockEigen {
    pub fn new(h: &BlockHamiltonian) -> Result<Self> {
        let mut pairs = Vec::with_capacity(h.blocks.len());
        for block in &h.blocks {
            if block.nrows() == 1 {
                pairs.push((Array1::from_elem(1, block[[0, 0]]), Array2::eye(1)));
                continue;
            }
            let (vals, vecs) = block
                .eigh(UPLO::Lower)
                .map_err(|e| Error::Dimension(format!("eigendecomposition failed: {e}")))?;
            pairs.push((vals, vecs));
        }
        Ok(Self { basis: Arc::clone(&h.basis), pairs })
    }

    pub fn sector_dim(&self, k: usize) -> usize {
        self.pairs[k].0.len()
    }

    pub fn kmax(&self) -> usize {
        self.pairs.len() - 1
    }

    /// exp(−i H⁽ᵏ⁾ τ) as a dense matrix.
    pub fn sector_propagator(&self, k: usize, tau: f64) -> Array2<Complex64> {
        let (vals, vecs) = &self.pairs[k];
        let dim = vals.len();
        // V · diag(e^{−iEτ}) · Vᵀ via two real matmuls.
        let mut re = Array2::<f64>::zeros((dim, dim));
        let mut im = Array2::<f64>::zeros((dim, dim));
        for (r, &e) in vals.iter().enumerate() {
            let (s, c) = (-e * tau).sin_cos();
            for col in 0..dim {
                let v = vecs[[col, r]];
                re[[r, col]] = c * v;
                im[[r, col]] = s * v;
            }
        }
        let pre = vecs.dot(&re);
        let pim = vecs.dot(&im);
        let mut out = Array2::<Complex64>::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                out[[i, j]] = Complex64::new(pre[[i, j]], pim[[i, j]]);
            }
        }
        out
    }

    /// Selected columns of exp(−i H⁽ᵏ⁾ τ).
    pub fn sector_columns(&self, k: usize, cols: &[usize], tau: f64) -> Array2<Complex64> {
        let (vals, vecs) = &self.pairs[k];
        let dim = vals.len();
        let m = cols.len();
        let mut re = Array2::<f64>::zeros((dim, m));
        let mut im = Array2::<f64>::zeros((dim, m));
        for (r, &e) in vals.iter().enumerate() {
            let (s, c) = (-e * tau).sin_cos();
            for (jc, &col) in cols.iter().enumerate() {
                let v = vecs[[col, r]];
                re[[r, jc]] = c * v;
                im[[r, jc]] = s * v;
            }
        }
        let pre = vecs.dot(&re);
        let pim = vecs.dot(&im);
        let mut out = Array2::<Complex64>::zeros((dim, m));
        for i in 0..dim {
            for j in 0..m {
                out[[i, j]] = Complex64::new(pre[[i, j]], pim[[i, j]]);
            }
        }
        out
    }

    pub fn propagator(&self, tau: f64) -> BlockPropagator {
        let blocks = (0..self.pairs.len()).map(|k| self.sector_propagator(k, tau)).collect();
        BlockPropagator { basis: Arc::clone(&self.basis), blocks, provenance: Provenance::Exact }
    }
}

/// exp(−iHτ) for every block.
pub fn exact_propagator(h: &BlockHamiltonian, tau: f64) -> Result<BlockPropagator> {
    if tau < 0.0 {
        return Err(Error::Parameter(format!("tau must be >= 0, got {tau}")));
    }
    Ok(BlockEigen::new(h)?.propagator(tau))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlModel {
    /// Step-wise Larmor schedule, Trotterized with n factors per interval.
    StepWise { trotter_n: usize },
    /// Short-pulse schedule with relative pulse length ε̃.
    Pulse { eps_tilde: f64 },
}

/// Piecewise-constant Larmor amplitudes over K_ω equal intervals.
///
/// The free parameters are ã for the first N_Ω−1 controlled sites;
/// amplitudes are a = 2 sin ã and the last controlled site carries minus the
/// sum of the others, which enforces Σ_k a_kj = 0 on every interval.
#[derive(Debug, Clone)]
pub struct ControlSchedule {
    pub n: usize,
    pub n_omega: usize,
    pub k_omega: usize,
    pub tau_reg: f64,
    /// (N_Ω − 1) × K_ω free parameters ã.
    pub a_tilde: Array2<f64>,
    pub model: ControlModel,
}

impl ControlModel {
    pub fn step_wise(trotter_n: usize) -> Self {
        ControlModel::StepWise { trotter_n }
    }

    pub fn pulse(eps_tilde: f64) -> Self {
        ControlModel::Pulse { eps_tilde }
    }

    pub fn eps_tilde(&self) -> Option<f64> {
        match self {
            ControlModel::Pulse { eps_tilde } => Some(*eps_tilde),
            _ => None,
        }
    }
}

impl ControlSchedule {
    pub fn new(
        n: usize,
        n_omega: usize,
        k_omega: usize,
        tau_reg: f64,
        a_tilde: Array2<f64>,
        model: ControlModel,
    ) -> Result<Self> {
        if n_omega < 1 || n_omega > n {
            return Err(Error::Schedule(format!("N_Omega = {n_omega} invalid for N = {n}")));
        }
        if k_omega < 1 {
            return Err(Error::Schedule("K_omega must be >= 1".into()));
        }
        if tau_reg < 0.0 {
            return Err(Error::Schedule(format!("tau_reg must be >= 0, got {tau_reg}")));
        }
        if a_tilde.dim() != (n_omega - 1, k_omega) {
            return Err(Error::Schedule(format!(
                "a_tilde shape {:?}, expected ({}, {})",
                a_tilde.dim(),
                n_omega - 1,
                k_omega
            )));
        }
        match model {
            ControlModel::StepWise { trotter_n } if trotter_n < 1 => {
                return Err(Error::Schedule("Trotterization number must be >= 1".into()));
            }
            ControlModel::Pulse { .. } => {
                let eps = model.eps_tilde().unwrap();
                if !(0.0..1.0).contains(&eps) || eps == 0.0 {
                    return Err(Error::Schedule(format!("eps_tilde must be in (0,1), got {eps}")));
                }
            }
            _ => {}
        }
        Ok(Self { n, n_omega, k_omega, tau_reg, a_tilde, model })
    }

    /// Full amplitude matrix, N_Ω × K_ω, rows ordered by controlled site.
    pub fn amplitudes(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n_omega, self.k_omega));
        for j in 0..self.k_omega {
            let mut sum = 0.0;
            for k in 0..self.n_omega - 1 {
                let v = 2.0 * self.a_tilde[[k, j]].sin();
                a[[k, j]] = v;
                sum += v;
            }
            a[[self.n_omega - 1, j]] = -sum;
        }
        a
    }

    /// Controlled chain sites, ascending (the last N_Ω sites).
    pub fn controlled_sites(&self) -> Vec<usize> {
        (self.n - self.n_omega + 1..=self.n).collect()
    }

    /// Site-resolved ω vector on interval j (0-based), zeros elsewhere.
    pub fn omega(&self, j: usize) -> Vec<f64> {
        let a = self.amplitudes();
        let mut w = vec![0.0; self.n];
        for (row, site) in self.controlled_sites().into_iter().enumerate() {
            w[site - 1] = a[[row, j]];
        }
        w
    }

    pub fn delta_tau(&self) -> f64 {
        self.tau_reg / self.k_omega as f64
    }

    /// Drift and pulse subinterval lengths of the pulse model, scaled so the
    /// K_ω intervals sum to exactly tau_reg.
    pub fn pulse_subintervals(&self) -> Option<(f64, f64)> {
        let eps = self.model.eps_tilde()?;
        let dt1 = self.tau_reg / (self.k_omega as f64 * (1.0 + eps));
        Some((dt1, eps * dt1))
    }
}

/// Diagonal of Σ_i ω_i Z_i in sector k, per configuration.
pub fn omega_sector_diag(basis: &ExcitationBasis, k: usize, omega: &[(usize, f64)]) -> Array1<f64> {
    let configs = basis.sector(k);
    let mut d = Array1::zeros(configs.len());
    for (idx, &c) in configs.iter().enumerate() {
        d[idx] = omega.iter().map(|&(site, w)| w * z_value(c, site)).sum();
    }
    d
}

fn site_amplitudes(sched: &ControlSchedule, j: usize) -> Vec<(usize, f64)> {
    let a = sched.amplitudes();
    sched
        .controlled_sites()
        .into_iter()
        .enumerate()
        .map(|(row, site)| (site, a[[row, j]]))
        .collect()
}

fn phase_diag(diag: &Array1<f64>, dt: f64) -> Array1<Complex64> {
    diag.mapv(|w| Complex64::from_polar(1.0, -w * dt))
}

fn scale_cols(m: &Array2<Complex64>, d: &Array1<Complex64>) -> Array2<Complex64> {
    let mut out = m.clone();
    for (mut col, &ph) in out.columns_mut().into_iter().zip(d.iter()) {
        col.mapv_inplace(|v| v * ph);
    }
    out
}

fn matrix_power(m: &Array2<Complex64>, mut e: usize) -> Array2<Complex64> {
    let mut base = m.clone();
    let mut acc = Array2::eye(m.nrows());
    while e > 0 {
        if e & 1 == 1 {
            acc = base.dot(&acc);
        }
        e >>= 1;
        if e > 0 {
            base = base.dot(&base);
        }
    }
    acc
}

/// Trotterized step-wise propagator: Π_j (e^{−iH₀Δτ/n} e^{−iΩ_jΔτ/n})^n.
pub fn model1_propagator(eig: &BlockEigen, sched: &ControlSchedule) -> Result<BlockPropagator> {
    let ControlModel::StepWise { trotter_n } = sched.model else {
        return Err(Error::Schedule("model1_propagator needs a step-wise schedule".into()));
    };
    let dt = sched.delta_tau() / trotter_n as f64;
    let mut blocks = Vec::with_capacity(eig.kmax() + 1);
    for k in 0..=eig.kmax() {
        let drift = eig.sector_propagator(k, dt);
        let mut u = Array2::eye(eig.sector_dim(k));
        for j in 0..sched.k_omega {
            let diag = omega_sector_diag(&eig.basis, k, &site_amplitudes(sched, j));
            // e^{−iH₀ dt} e^{−iΩ_j dt}, raised to the Trotter number.
            let factor = scale_cols(&drift, &phase_diag(&diag, dt));
            u = matrix_power(&factor, trotter_n).dot(&u);
        }
        blocks.push(u);
    }
    Ok(BlockPropagator {
        basis: Arc::clone(&eig.basis),
        blocks,
        provenance: Provenance::Model1 { trotter_n },
    })
}

/// Pulse-model propagator: Π_j e^{−iH₀Δτ⁽¹⁾} e^{−i(Ω_j/ε̃)Δτ⁽²⁾}.
///
/// The pulse phase Ω_jΔτ⁽¹⁾ is ε̃-independent by construction; ε̃ only sets
/// how much of the interval the pulse occupies.
pub fn model2_propagator(eig: &BlockEigen, sched: &ControlSchedule) -> Result<BlockPropagator> {
    let Some((dt1, _dt2)) = sched.pulse_subintervals() else {
        return Err(Error::Schedule("model2_propagator needs a pulse schedule".into()));
    };
    let eps = sched.model.eps_tilde().unwrap();
    let mut blocks = Vec::with_capacity(eig.kmax() + 1);
    for k in 0..=eig.kmax() {
        let drift = eig.sector_propagator(k, dt1);
        let mut u = Array2::eye(eig.sector_dim(k));
        for j in 0..sched.k_omega {
            let diag = omega_sector_diag(&eig.basis, k, &site_amplitudes(sched, j));
            let factor = scale_cols(&drift, &phase_diag(&diag, dt1));
            u = factor.dot(&u);
        }
        blocks.push(u);
    }
    Ok(BlockPropagator {
        basis: Arc::clone(&eig.basis),
        blocks,
        provenance: Provenance::Model2 { eps_tilde: eps },
    })
}

/// Exact evolution under the schedule's piecewise-constant Hamiltonian.
///
/// Step-wise: Π_j e^{−i(H₀+Ω_j)Δτ}. Pulse: Π_j e^{−iH₀Δτ⁽¹⁾}
/// e^{−i(H₀+Ω_j/ε̃)Δτ⁽²⁾}, i.e. the drift is never dropped.
pub fn exact_schedule_propagator(
    h0: &BlockHamiltonian,
    sched: &ControlSchedule,
) -> Result<BlockPropagator> {
    let basis = &h0.basis;
    let mut blocks = Vec::with_capacity(h0.blocks.len());
    match sched.model {
        ControlModel::StepWise { .. } => {
            let dt = sched.delta_tau();
            for k in 0..h0.blocks.len() {
                let mut u = Array2::eye(h0.blocks[k].nrows());
                for j in 0..sched.k_omega {
                    let diag = omega_sector_diag(basis, k, &site_amplitudes(sched, j));
                    let mut hk = h0.blocks[k].clone();
                    for (i, &w) in diag.iter().enumerate() {
                        hk[[i, i]] += w;
                    }
                    u = expm_hermitian(&hk, dt)?.dot(&u);
                }
                blocks.push(u);
            }
        }
        ControlModel::Pulse { .. } => {
            let (dt1, dt2) = sched.pulse_subintervals().unwrap();
            let eps = sched.model.eps_tilde().unwrap();
            for k in 0..h0.blocks.len() {
                let drift = expm_hermitian(&h0.blocks[k], dt1)?;
                let mut u = Array2::eye(h0.blocks[k].nrows());
                for j in 0..sched.k_omega {
                    let diag = omega_sector_diag(basis, k, &site_amplitudes(sched, j));
                    let mut hk = h0.blocks[k].clone();
                    for (i, &w) in diag.iter().enumerate() {
                        hk[[i, i]] += w / eps;
                    }
                    u = drift.dot(&expm_hermitian(&hk, dt2)?).dot(&u);
                }
                blocks.push(u);
            }
        }
    }
    Ok(BlockPropagator { basis: Arc::clone(basis), blocks, provenance: Provenance::Exact })
}

/// exp(−i H τ) of a single real symmetric matrix.
pub fn expm_hermitian(h: &Array2<f64>, tau: f64) -> Result<Array2<Complex64>> {
    let dim = h.nrows();
    if dim == 1 {
        let mut out = Array2::zeros((1, 1));
        out[[0, 0]] = Complex64::from_polar(1.0, -h[[0, 0]] * tau);
        return Ok(out);
    }
    let (vals, vecs) = h
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Dimension(format!("eigendecomposition failed: {e}")))?;
    let mut re = Array2::<f64>::zeros((dim, dim));
    let mut im = Array2::<f64>::zeros((dim, dim));
    for (r, &e) in vals.iter().enumerate() {
        let (s, c) = (-e * tau).sin_cos();
        for col in 0..dim {
            let v = vecs[[col, r]];
            re[[r, col]] = c * v;
            im[[r, col]] = s * v;
        }
    }
    let pre = vecs.dot(&re);
    let pim = vecs.dot(&im);
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            out[[i, j]] = Complex64::new(pre[[i, j]], pim[[i, j]]);
        }
    }
    Ok(out)
}

/// Block-diagonal density matrix (the zero-order coherence part).
#[derive(Debug, Clone)]
pub struct BlockDensityMatrix {
    pub basis: Arc<ExcitationBasis>,
    pub blocks: Vec<Array2<Complex64>>,
}

impl BlockDensityMatrix {
    /// Everything in the ground state.
    pub fn ground(basis: &Arc<ExcitationBasis>) -> Self {
        let mut blocks: Vec<Array2<Complex64>> =
            (0..=basis.kmax()).map(|k| Array2::zeros((basis.sector_dim(k), basis.sector_dim(k)))).collect();
        blocks[0][[0, 0]] = Complex64::new(1.0, 0.0);
        Self { basis: Arc::clone(basis), blocks }
    }

    /// Sender blocks ⊗ ground state of the rest of the chain.
    ///
    /// `sender_blocks[k]` is indexed by ascending sender k-excitation labels.
    pub fn from_sender_blocks(
        sender_blocks: &[Array2<Complex64>],
        part: &Partition,
        basis: &Arc<ExcitationBasis>,
    ) -> Result<Self> {
        if sender_blocks.len() > basis.kmax() + 1 {
            return Err(Error::SectorUnavailable {
                needed: sender_blocks.len() - 1,
                kmax: basis.kmax(),
            });
        }
        let mut rho = Self::ground(basis);
        rho.blocks[0][[0, 0]] = Complex64::new(0.0, 0.0);
        for (k, sb) in sender_blocks.iter().enumerate() {
            let labels = crate::basis::combinations(part.n_s, k);
            if sb.nrows() != labels.len() {
                return Err(Error::Dimension(format!(
                    "sender block {k} has dim {}, expected {}",
                    sb.nrows(),
                    labels.len()
                )));
            }
            for (a, &la) in labels.iter().enumerate() {
                let pa = basis.position_in_sector(part.embed_sender(la))?;
                for (b, &lb) in labels.iter().enumerate() {
                    let pb = basis.position_in_sector(part.embed_sender(lb))?;
                    rho.blocks[k][[pa, pb]] = sb[[a, b]];
                }
            }
        }
        Ok(rho)
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.diag().iter().map(|v| v.re).sum::<f64>()).sum()
    }

    /// Hermiticity, unit trace, and per-block positive semidefiniteness.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(Error::State(format!("trace {tr} differs from 1")));
        }
        for (k, b) in self.blocks.iter().enumerate() {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    if (b[[i, j]] - b[[j, i]].conj()).norm() > tol {
                        return Err(Error::State(format!("block {k} not Hermitian")));
                    }
                }
            }
            if b.nrows() > 1 {
                let (vals, _) = b
                    .eigh(UPLO::Lower)
                    .map_err(|e| Error::State(format!("eigh failed: {e}")))?;
                if vals.iter().any(|&v| v < -tol) {
                    return Err(Error::State(format!("block {k} has negative eigenvalue")));
                }
            } else if b.nrows() == 1 && b[[0, 0]].re < -tol {
                return Err(Error::State(format!("block {k} negative")));
            }
        }
        Ok(())
    }
}

/// ρ⁽ᵏ⁾ → U⁽ᵏ⁾ ρ⁽ᵏ⁾ U⁽ᵏ⁾† per sector.
pub fn evolve_density(rho: &BlockDensityMatrix, u: &BlockPropagator) -> Result<BlockDensityMatrix> {
    if !Arc::ptr_eq(&rho.basis, &u.basis) && rho.blocks.len() != u.blocks.len() {
        return Err(Error::BasisMismatch);
    }
    let blocks = rho
        .blocks
        .iter()
        .zip(&u.blocks)
        .map(|(r, uk)| {
            if r.nrows() != uk.nrows() {
                return Err(Error::BasisMismatch);
            }
            let tmp = uk.dot(r);
            Ok(tmp.dot(&uk.t().mapv(|v| v.conj())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockDensityMatrix { basis: Arc::clone(&rho.basis), blocks })
}

/// Tr_{S,TL} ρ — receiver-site reduced density matrix in mirror labels.
pub fn partial_trace_receiver(
    rho: &BlockDensityMatrix,
    part: &Partition,
) -> Result<BlockDensityMatrix> {
    let n = part.n();
    if rho.basis.n() != n {
        return Err(Error::BasisMismatch);
    }
    let kmax_out = part.n_r.min(rho.basis.kmax());
    let out_basis = ExcitationBasis::new(part.n_r, kmax_out)?;
    let mut out = BlockDensityMatrix::ground(&out_basis);
    out.blocks[0][[0, 0]] = Complex64::new(0.0, 0.0);
    for k in 0..=rho.basis.kmax() {
        let configs = rho.basis.sector(k);
        // Group sector configurations by their non-receiver part.
        let mut groups: HashMap<u64, Vec<(usize, u64)>> = HashMap::new();
        for (pos, &c) in configs.iter().enumerate() {
            groups.entry(part.non_receiver_part(c)).or_default().push((pos, part.receiver_label(c)));
        }
        let mut keys: Vec<u64> = groups.keys().copied().collect();
        keys.sort_unstable();
        for rest in keys {
            let members = &groups[&rest];
            for &(pa, la) in members {
                let ka = la.count_ones() as usize;
                if ka > kmax_out {
                    continue;
                }
                let ra = out_basis.position_in_sector(la)?;
                for &(pb, lb) in members {
                    if lb.count_ones() != la.count_ones() {
                        continue;
                    }
                    let rb = out_basis.position_in_sector(lb)?;
                    out.blocks[ka][[ra, rb]] += rho.blocks[k][[pa, pb]];
                }
            }
        }
    }
    Ok(out)
}
