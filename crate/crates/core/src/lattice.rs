//! Spin geometries and dipolar coupling constants.
//!
//! All coordinates are stored in units of the reference spacing (Δ along the
//! chain axis, Δ_x between columns of the rectangular lattice), so the
//! reference coupling γ²/Δ³ is 1 and times are the dimensionless τ used
//! throughout. The magnetic-field orientation enters through the angle χ
//! between the field and the x′ axis.

use crate::error::{Error, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Linear,
    Zigzag,
    Rectangular,
}

/// How pairwise couplings are computed from the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    /// D_ij = 1/r³ in units of the reference coupling.
    IsotropicDipolar,
    /// D_ij = (3cos²φ_ij − 1) / (2r³), field at angle χ to the x′ axis.
    AngularDipolar,
    /// D_ij = 1 iff |i − j| = 1.
    NearestNeighbor,
}

/// Declarative description of a geometry, as read from a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub kind: GeometryKind,
    pub n: usize,
    /// Zigzag offset of even sites; ignored for rectangular.
    #[serde(default)]
    pub y0: f64,
    /// Field angle χ in radians.
    #[serde(default)]
    pub chi: f64,
    /// Channel count K for rectangular lattices.
    #[serde(default)]
    pub channels: usize,
    /// Row spacing ratio Δ_y/Δ_x for rectangular lattices.
    #[serde(default = "one")]
    pub dy: f64,
}

fn one() -> f64 {
    1.0
}

/// Site coordinates plus the magnetic-field angle.
#[derive(Debug, Clone)]
pub struct SpinGeometry {
    pub kind: GeometryKind,
    pub n: usize,
    /// (x′, y′) pairs in units of the reference spacing.
    pub coords: Vec<(f64, f64)>,
    pub chi: f64,
}

/// Symmetric dimensionless coupling matrix.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    pub d: Array2<f64>,
    pub mode: CouplingMode,
}

/// Lay out site coordinates for the requested geometry.
///
/// A linear chain is the zigzag with y0 = 0. Rectangular sites fill channel
/// by channel within each column: x′_n = ⌊(n−1)/K⌋, y′_n = ((n−1) mod K)·Δy.
pub fn build_geometry(spec: &GeometrySpec) -> Result<SpinGeometry> {
    if spec.n < 2 {
        return Err(Error::Geometry(format!("need at least 2 sites, got {}", spec.n)));
    }
    let coords = match spec.kind {
        GeometryKind::Linear => (0..spec.n).map(|j| (j as f64, 0.0)).collect(),
        GeometryKind::Zigzag => {
            if spec.y0 < 0.0 {
                return Err(Error::Geometry(format!("y0 must be >= 0, got {}", spec.y0)));
            }
            (0..spec.n)
                .map(|j| (j as f64, if j % 2 == 0 { 0.0 } else { spec.y0 }))
                .collect()
        }
        GeometryKind::Rectangular => {
            let k = spec.channels;
            if k == 0 || spec.n % k != 0 {
                return Err(Error::Geometry(format!(
                    "channel count {} must divide N = {}",
                    k, spec.n
                )));
            }
            if spec.dy <= 0.0 {
                return Err(Error::Geometry(format!("dy must be > 0, got {}", spec.dy)));
            }
            (0..spec.n)
                .map(|m| (((m / k) as f64), (m % k) as f64 * spec.dy))
                .collect()
        }
    };
    let geom = SpinGeometry { kind: spec.kind, n: spec.n, coords, chi: spec.chi };
    for i in 0..geom.n {
        for j in i + 1..geom.n {
            if distance(&geom, i, j) == 0.0 {
                return Err(Error::Geometry(format!("sites {} and {} coincide", i + 1, j + 1)));
            }
        }
    }
    Ok(geom)
}

fn distance(geom: &SpinGeometry, i: usize, j: usize) -> f64 {
    let (xi, yi) = geom.coords[i];
    let (xj, yj) = geom.coords[j];
    ((xj - xi).powi(2) + (yj - yi).powi(2)).sqrt()
}

/// Dimensionless couplings for the given geometry and mode.
pub fn coupling_matrix(geom: &SpinGeometry, mode: CouplingMode) -> Result<CouplingMatrix> {
    let n = geom.n;
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let r = distance(geom, i, j);
            if r == 0.0 {
                return Err(Error::Geometry(format!("zero distance between {} and {}", i, j)));
            }
            let dij = match mode {
                CouplingMode::IsotropicDipolar => 1.0 / r.powi(3),
                CouplingMode::AngularDipolar => {
                    let (xi, yi) = geom.coords[i];
                    let (xj, yj) = geom.coords[j];
                    let cos_phi = ((xj - xi) * geom.chi.cos() + (yj - yi) * geom.chi.sin()) / r;
                    (3.0 * cos_phi * cos_phi - 1.0) / (2.0 * r.powi(3))
                }
                CouplingMode::NearestNeighbor => {
                    if j == i + 1 {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            d[[i, j]] = dij;
            d[[j, i]] = dij;
        }
    }
    Ok(CouplingMatrix { d, mode })
}
