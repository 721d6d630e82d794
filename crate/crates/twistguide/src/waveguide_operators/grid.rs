use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::cross_section::{CrossSectionDomain, TangentialOperator};
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::math;

/// Required clearance between the active region and the truncation ends.
pub const SUPPORT_MARGIN: f64 = 2.0;

/// Largest transverse node count accepted; the modal solver keeps a dense
/// eigenbasis of the section.
pub const MAX_TRANSVERSE_NODES: usize = 4000;

/// How the straight parts beyond `[-L, L]` are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EndCondition {
    /// Homogeneous Dirichlet data at `s = +-L`.
    #[default]
    Dirichlet,
    /// The straight semi-infinite exteriors are eliminated exactly, mode by
    /// mode, so the truncated problem reproduces the infinite discrete tube
    /// below the threshold.
    Transparent,
}

/// Transverse discretization shared by every slab: the section, its
/// stiffness `K` and tangential operator, and the dense eigenbasis of `K`.
#[derive(Debug, Clone)]
pub struct TransverseBasis {
    domain: CrossSectionDomain,
    tangential: TangentialOperator,
    stiffness: CsrMatrix,
    modes: DMatrix<f64>,
    energies: Vec<f64>,
}

impl TransverseBasis {
    pub fn new(domain: CrossSectionDomain) -> Result<Self> {
        let n = domain.len();
        if n > MAX_TRANSVERSE_NODES {
            return Err(Error::DegenerateDiscretization(format!(
                "{n} transverse nodes exceed the dense basis limit {MAX_TRANSVERSE_NODES}"
            )));
        }
        let stiffness = domain.stiffness();
        let eig = SymmetricEigen::new(stiffness.to_dense());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut modes = DMatrix::zeros(n, n);
        let mut energies = Vec::with_capacity(n);
        for (c, &k) in order.iter().enumerate() {
            let col = eig.eigenvectors.column(k);
            // fix the sign by the largest component
            let (imax, _) = col.iter().enumerate().fold((0, 0.0), |m, (i, v)| if v.abs() > m.1 { (i, v.abs()) } else { m });
            let sgn = if col[imax] < 0.0 { -1.0 } else { 1.0 };
            modes.column_mut(c).copy_from(&(col * sgn));
            energies.push(eig.eigenvalues[k]);
        }
        let tangential = domain.tangential();
        Ok(Self { domain, tangential, stiffness, modes, energies })
    }

    pub fn domain(&self) -> &CrossSectionDomain {
        &self.domain
    }

    pub fn tangential(&self) -> &TangentialOperator {
        &self.tangential
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Orthonormal (Euclidean) eigenvectors of `K` as columns, ascending.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Discrete threshold `E1`.
    pub fn e1(&self) -> f64 {
        self.energies[0]
    }
}

/// Truncated tube `[-L, L] x omega`. Slabs sit at `s_k = -L + (k + 1) ds`,
/// `k = 0..n` with `n = 2L/ds - 1`; edge `e = 0..=n` sits at the half-integer
/// point between slabs `e - 1` and `e` and carries the `d1` differences.
/// Unknowns are ordered slab-major.
#[derive(Debug, Clone)]
pub struct TruncatedTubeGrid {
    half_length: f64,
    ds: f64,
    slabs: usize,
    end: EndCondition,
    transverse: Arc<TransverseBasis>,
}

impl TruncatedTubeGrid {
    pub fn new(transverse: Arc<TransverseBasis>, half_length: f64, ds: f64, end: EndCondition) -> Result<Self> {
        if !(half_length > 0.0 && ds > 0.0) {
            return Err(Error::param("half_length", format!("L = {half_length} and ds = {ds} must be positive")));
        }
        let cells = 2.0 * half_length / ds;
        let rounded = math::round(cells);
        if (cells - rounded).abs() > 1e-9 * cells.max(1.0) || rounded < 4.0 {
            return Err(Error::DegenerateDiscretization(format!(
                "2L/ds = {cells} must be an integer of at least 4"
            )));
        }
        Ok(Self { half_length, ds, slabs: rounded as usize - 1, end, transverse })
    }

    /// Same section and spacing, different length.
    pub fn with_half_length(&self, half_length: f64) -> Result<Self> {
        Self::new(self.transverse.clone(), half_length, self.ds, self.end)
    }

    pub fn with_end(&self, end: EndCondition) -> Self {
        Self { end, ..self.clone() }
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    pub fn slabs(&self) -> usize {
        self.slabs
    }

    pub fn end(&self) -> EndCondition {
        self.end
    }

    pub fn transverse(&self) -> &TransverseBasis {
        &self.transverse
    }

    pub fn transverse_arc(&self) -> &Arc<TransverseBasis> {
        &self.transverse
    }

    pub fn nt(&self) -> usize {
        self.transverse.len()
    }

    pub fn dofs(&self) -> usize {
        self.slabs * self.nt()
    }

    /// Position of slab `k`; negative and out-of-range indices continue the lattice.
    pub fn slab_s(&self, k: isize) -> f64 {
        -self.half_length + (k + 1) as f64 * self.ds
    }

    pub fn edge_s(&self, e: usize) -> f64 {
        -self.half_length + (e as f64 + 0.5) * self.ds
    }

    /// Fails when `support` is not inside `(-L + margin, L - margin)`.
    pub fn check_support(&self, support: Option<(f64, f64)>) -> Result<()> {
        if let Some((a, b)) = support {
            let lim = self.half_length - SUPPORT_MARGIN;
            if a <= -lim || b >= lim {
                return Err(Error::param(
                    "half_length",
                    format!(
                        "active region ({a}, {b}) must lie in (-L + {SUPPORT_MARGIN}, L - {SUPPORT_MARGIN}) with L = {}",
                        self.half_length
                    ),
                ));
            }
        }
        Ok(())
    }
}
