//! Block-diagonal XXZ Hamiltonian in the excitation basis.
//!
//! H = Σ_{j>i} D_ij (X_i X_j + Y_i Y_j − 2 Z_i Z_j) + Σ_j ω_j Z_j with the
//! spin-1/2 operators carrying their 1/2 factors. Every matrix element is
//! real, so blocks are stored as real symmetric matrices; propagators become
//! complex only through exp(−iHτ).

use crate::basis::{z_value, ExcitationBasis};
use crate::error::{Error, Result};
use crate::lattice::CouplingMatrix;
use ndarray::Array2;
use num_complex::Complex64;
use std::sync::Arc;

/// Hermitian blocks H⁽ᵏ⁾, one per excitation sector.
#[derive(Debug, Clone)]
pub struct BlockHamiltonian {
    pub basis: Arc<ExcitationBasis>,
    pub blocks: Vec<Array2<f64>>,
}

impl BlockHamiltonian {
    /// The 0-sector scalar.
    pub fn h0_scalar(&self) -> f64 {
        self.blocks[0][[0, 0]]
    }
}

/// Project the coupling + Larmor Hamiltonian onto each excitation sector.
///
/// `omega[i]` is the Larmor frequency of site i+1; pass zeros for
/// uncontrolled sites. Any ω is accepted here — the Σω = 0 gauge constraint
/// belongs to schedule construction.
pub fn build_blocks(
    d: &CouplingMatrix,
    omega: &[f64],
    basis: &Arc<ExcitationBasis>,
) -> Result<BlockHamiltonian> {
    let n = basis.n();
    if d.d.nrows() != n || omega.len() != n {
        return Err(Error::Dimension(format!(
            "coupling {}x{} and omega length {} for N = {}",
            d.d.nrows(),
            d.d.ncols(),
            omega.len(),
            n
        )));
    }
    let mut blocks = Vec::with_capacity(basis.kmax() + 1);
    for k in 0..=basis.kmax() {
        let configs = basis.sector(k);
        let dim = configs.len();
        let mut h = Array2::zeros((dim, dim));
        for (row, &c) in configs.iter().enumerate() {
            let mut diag = 0.0;
            for i in 1..=n {
                let zi = z_value(c, i);
                diag += omega[i - 1] * zi;
                for j in i + 1..=n {
                    let dij = d.d[[i - 1, j - 1]];
                    if dij == 0.0 {
                        continue;
                    }
                    diag += -2.0 * dij * zi * z_value(c, j);
                    // Flip-flop term: (XX+YY) moves one excitation i <-> j.
                    let bi = c >> (i - 1) & 1;
                    let bj = c >> (j - 1) & 1;
                    if bi != bj {
                        let c2 = c ^ (1 << (i - 1)) ^ (1 << (j - 1));
                        let col = basis.position_in_sector(c2)?;
                        h[[row, col]] += dij / 2.0;
                    }
                }
            }
            h[[row, row]] = diag;
        }
        blocks.push(h);
    }
    Ok(BlockHamiltonian { basis: Arc::clone(basis), blocks })
}

/// Dense 2^N × 2^N Hamiltonian assembled literally from tensor products.
///
/// Test oracle for the block construction; O(4^N) memory, guarded to N ≤ 12.
/// Basis index = configuration integer (site 1 is the fastest bit).
pub fn brute_force_full_hamiltonian(
    d: &CouplingMatrix,
    omega: &[f64],
    n: usize,
) -> Result<Array2<Complex64>> {
    if n > 12 {
        return Err(Error::TooLarge(format!("brute force limited to N <= 12, got {n}")));
    }
    if d.d.nrows() != n || omega.len() != n {
        return Err(Error::Dimension("coupling/omega size".into()));
    }
    let x = pauli_half('x');
    let y = pauli_half('y');
    let z = pauli_half('z');
    let dim = 1usize << n;
    let mut h = Array2::<Complex64>::zeros((dim, dim));
    for i in 1..=n {
        for j in i + 1..=n {
            let dij = d.d[[i - 1, j - 1]];
            if dij == 0.0 {
                continue;
            }
            let term = &(&two_site(&x, &x, i, j, n) + &two_site(&y, &y, i, j, n))
                - &(&two_site(&z, &z, i, j, n) * Complex64::new(2.0, 0.0));
            h = &h + &(&term * Complex64::new(dij, 0.0));
        }
    }
    for i in 1..=n {
        if omega[i - 1] != 0.0 {
            h = &h + &(&one_site(&z, i, n) * Complex64::new(omega[i - 1], 0.0));
        }
    }
    Ok(h)
}

fn pauli_half(which: char) -> Array2<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let half = Complex64::new(0.5, 0.0);
    match which {
        'x' => ndarray::array![[zero, half], [half, zero]],
        'y' => ndarray::array![
            [zero, Complex64::new(0.0, -0.5)],
            [Complex64::new(0.0, 0.5), zero]
        ],
        'z' => ndarray::array![[half, zero], [zero, -half]],
        _ => unreachable!(),
    }
}

/// Kronecker product with `b` as the fast index.
fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for ia in 0..ra {
        for ja in 0..ca {
            let av = a[[ia, ja]];
            for ib in 0..rb {
                for jb in 0..cb {
                    out[[ia * rb + ib, ja * cb + jb]] = av * b[[ib, jb]];
                }
            }
        }
    }
    out
}

/// op acting on `site` (1-based), identity elsewhere. Site 1 is the least
/// significant bit, so it is the last Kronecker factor.
fn one_site(op: &Array2<Complex64>, site: usize, n: usize) -> Array2<Complex64> {
    let mut acc = eye(1);
    for s in (1..=n).rev() {
        let factor = if s == site { op.clone() } else { eye(2) };
        acc = kron(&acc, &factor);
    }
    acc
}

fn two_site(
    op_i: &Array2<Complex64>,
    op_j: &Array2<Complex64>,
    i: usize,
    j: usize,
    n: usize,
) -> Array2<Complex64> {
    let mut acc = eye(1);
    for s in (1..=n).rev() {
        let factor = if s == i {
            op_i.clone()
        } else if s == j {
            op_j.clone()
        } else {
            eye(2)
        };
        acc = kron(&acc, &factor);
    }
    acc
}

fn eye(dim: usize) -> Array2<Complex64> {
    Array2::eye(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::combinations;
    use crate::lattice::{build_geometry, coupling_matrix, CouplingMode, GeometryKind, GeometrySpec};
    use approx::assert_abs_diff_eq;
    use ndarray::Array1;

    fn chain_coupling(n: usize, mode: CouplingMode) -> CouplingMatrix {
        let spec = GeometrySpec { kind: GeometryKind::Linear, n, y0: 0.0, chi: 0.0, channels: 0, dy: 1.0 };
        coupling_matrix(&build_geometry(&spec).unwrap(), mode).unwrap()
    }

    #[test]
    fn two_site_flip_flop_element() {
        let basis = ExcitationBasis::new(2, 2).unwrap();
        let d = chain_coupling(2, CouplingMode::NearestNeighbor);
        let h = build_blocks(&d, &[0.0, 0.0], &basis).unwrap();
        // Sector 1 couples |10> and |01> with D/2.
        assert_abs_diff_eq!(h.blocks[1][[0, 1]], 0.5);
        assert_abs_diff_eq!(h.blocks[1][[1, 0]], 0.5);
    }

    #[test]
    fn ground_sector_scalar_is_half_coupling_sum() {
        let n = 5;
        let d = chain_coupling(n, CouplingMode::IsotropicDipolar);
        let basis = ExcitationBasis::new(n, 1).unwrap();
        let h = build_blocks(&d, &vec![0.0; n], &basis).unwrap();
        let mut sum = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                sum += d.d[[i, j]];
            }
        }
        assert_abs_diff_eq!(h.h0_scalar(), -0.5 * sum, epsilon = 1e-14);
    }

    #[test]
    fn blocks_match_brute_force_projection() {
        let n = 6;
        let d = chain_coupling(n, CouplingMode::IsotropicDipolar);
        let omega = vec![0.0, 0.0, 0.0, 0.0, 0.7, -0.7];
        let basis = ExcitationBasis::new(n, n).unwrap();
        let h = build_blocks(&d, &omega, &basis).unwrap();
        let full = brute_force_full_hamiltonian(&d, &omega, n).unwrap();
        for k in 0..=n {
            let configs = basis.sector(k);
            for (r, &cr) in configs.iter().enumerate() {
                for (c, &cc) in configs.iter().enumerate() {
                    let f = full[[cr as usize, cc as usize]];
                    assert_abs_diff_eq!(f.re, h.blocks[k][[r, c]], epsilon = 1e-12);
                    assert_abs_diff_eq!(f.im, 0.0, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn full_hamiltonian_commutes_with_total_z() {
        let n = 5;
        let d = chain_coupling(n, CouplingMode::IsotropicDipolar);
        let omega = vec![0.1, -0.3, 0.0, 0.25, 0.4];
        let full = brute_force_full_hamiltonian(&d, &omega, n).unwrap();
        let dim = 1usize << n;
        let mut iz = Array1::<f64>::zeros(dim);
        for c in 0..dim as u64 {
            iz[c as usize] = (1..=n).map(|s| z_value(c, s)).sum();
        }
        for r in 0..dim {
            for c in 0..dim {
                let comm = full[[r, c]] * (iz[c] - iz[r]);
                assert_abs_diff_eq!(comm.norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn uniform_larmor_shift_is_identity_within_sector() {
        let n = 4;
        let d = chain_coupling(n, CouplingMode::IsotropicDipolar);
        let basis = ExcitationBasis::new(n, 2).unwrap();
        let h0 = build_blocks(&d, &vec![0.0; n], &basis).unwrap();
        let shift = 0.37;
        let h1 = build_blocks(&d, &vec![shift; n], &basis).unwrap();
        for k in 0..=2 {
            // Uniform omega adds (N/2 − k)·c on sector k.
            let expected = shift * (n as f64 / 2.0 - k as f64);
            let diff = &h1.blocks[k] - &h0.blocks[k];
            for (idx, v) in diff.indexed_iter() {
                let want = if idx.0 == idx.1 { expected } else { 0.0 };
                assert_abs_diff_eq!(*v, want, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(30, 3).len(), 4060);
        assert_eq!(combinations(5, 0), vec![0]);
    }
}
