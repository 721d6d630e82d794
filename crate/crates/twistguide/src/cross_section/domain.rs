use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::Shape;
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::math;

/// Smallest admissible boundary fraction; keeps `1/theta` finite for nodes
/// that sit almost on the boundary.
pub const THETA_FLOOR: f64 = 1e-3;

/// Directions `+t2, -t2, +t3, -t3`.
pub const DIRS: [[f64; 2]; 4] = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Link {
    Node(usize),
    /// Boundary met at fraction `theta` of the grid step.
    Boundary { theta: f64 },
}

impl Link {
    pub fn theta(&self) -> f64 {
        match *self {
            Link::Node(_) => 1.0,
            Link::Boundary { theta } => theta,
        }
    }

    pub fn node(&self) -> Option<usize> {
        match *self {
            Link::Node(n) => Some(n),
            Link::Boundary { .. } => None,
        }
    }
}

/// Grid edge carrying one term of the stiffness quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseEdge {
    pub a: usize,
    /// `None` when the edge ends on the boundary (zero value there).
    pub b: Option<usize>,
    pub axis: usize,
    pub theta: f64,
    /// `1 / (theta delta)`, shared so every assembler sees the same bits.
    pub inv_len: f64,
    pub midpoint: [f64; 2],
}

/// Where a grid line from a node leaves the section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub node: usize,
    pub dir: usize,
    pub theta: f64,
    pub point: [f64; 2],
    pub normal: [f64; 2],
}

/// Uniform grid of spacing `delta` restricted to the interior of a shape.
///
/// The lattice is anchored at the lower-left bounding-box corner so that
/// rectangle sides fall on grid lines whenever the side is a multiple of
/// `delta`. Nodes are numbered line by line along the shorter box side.
#[derive(Debug, Clone)]
pub struct CrossSectionDomain {
    shape: Shape,
    delta: f64,
    origin: [f64; 2],
    dims: [usize; 2],
    points: Vec<[f64; 2]>,
    grid_index: Vec<[usize; 2]>,
    links: Vec<[Link; 4]>,
    edges: Vec<TransverseEdge>,
    crossings: Vec<Crossing>,
    radius: f64,
}

impl CrossSectionDomain {
    pub fn new(shape: Shape, delta: f64) -> Result<Self> {
        shape.validate()?;
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::DegenerateDiscretization(format!("grid spacing {delta} must be positive")));
        }
        let bb = shape.bbox();
        let origin = [bb[0], bb[1]];
        let dims = [
            math::ceil((bb[2] - bb[0]) / delta - 1e-9) as usize,
            math::ceil((bb[3] - bb[1]) / delta - 1e-9) as usize,
        ];
        let inner_first = dims[0] <= dims[1];
        let mut id = vec![usize::MAX; (dims[0] + 1) * (dims[1] + 1)];
        let flat = |i: usize, j: usize| i * (dims[1] + 1) + j;
        let mut points = Vec::new();
        let mut grid_index = Vec::new();
        let (outer, inner) = if inner_first { (dims[1], dims[0]) } else { (dims[0], dims[1]) };
        for o in 0..=outer {
            for n in 0..=inner {
                let (i, j) = if inner_first { (n, o) } else { (o, n) };
                let p = [origin[0] + i as f64 * delta, origin[1] + j as f64 * delta];
                if shape.contains(p) {
                    id[flat(i, j)] = points.len();
                    points.push(p);
                    grid_index.push([i, j]);
                }
            }
        }
        if points.len() < 2 {
            return Err(Error::DegenerateDiscretization(format!(
                "spacing {delta} leaves {} interior node(s)",
                points.len()
            )));
        }
        let mut links = Vec::with_capacity(points.len());
        let mut crossings = Vec::new();
        for (n, (&p, &[i, j])) in points.iter().zip(&grid_index).enumerate() {
            let mut l = [Link::Boundary { theta: 1.0 }; 4];
            for (d, dir) in DIRS.iter().enumerate() {
                let (ii, jj) = (i as isize + dir[0] as isize, j as isize + dir[1] as isize);
                let nb = if ii >= 0 && jj >= 0 && ii as usize <= dims[0] && jj as usize <= dims[1] {
                    id[flat(ii as usize, jj as usize)]
                } else {
                    usize::MAX
                };
                // a neighbour counts only if the segment to it stays inside
                let cut = shape.crossing(p, *dir, delta);
                l[d] = if nb != usize::MAX && cut.is_none() {
                    Link::Node(nb)
                } else {
                    let t = cut.unwrap_or(delta) / delta;
                    let theta = t.clamp(THETA_FLOOR, 1.0);
                    let q = [p[0] + dir[0] * t * delta, p[1] + dir[1] * t * delta];
                    crossings.push(Crossing { node: n, dir: d, theta, point: q, normal: shape.outward_normal(q) });
                    Link::Boundary { theta }
                };
            }
            links.push(l);
        }
        // a node link is used in both directions; make sure they agree
        for (n, l) in links.iter().enumerate() {
            for (d, link) in l.iter().enumerate() {
                if let Link::Node(m) = *link {
                    if links[m][d ^ 1] != Link::Node(n) {
                        return Err(Error::DegenerateDiscretization(format!("asymmetric grid link between nodes {n} and {m}")));
                    }
                }
            }
        }
        let mut edges = Vec::new();
        for (n, l) in links.iter().enumerate() {
            for (d, link) in l.iter().enumerate() {
                let axis = d / 2;
                let dir = DIRS[d];
                match *link {
                    Link::Node(m) if d % 2 == 0 => {
                        let p = points[n];
                        edges.push(TransverseEdge {
                            a: n,
                            b: Some(m),
                            axis,
                            theta: 1.0,
                            inv_len: 1.0 / delta,
                            midpoint: [p[0] + 0.5 * dir[0] * delta, p[1] + 0.5 * dir[1] * delta],
                        });
                    }
                    Link::Boundary { theta } => {
                        let p = points[n];
                        // oriented so that (psi_b - psi_a) is the derivative along +axis
                        let (a, b) = (n, None);
                        edges.push(TransverseEdge {
                            a,
                            b,
                            axis,
                            theta,
                            inv_len: if d % 2 == 0 { 1.0 / (theta * delta) } else { -1.0 / (theta * delta) },
                            midpoint: [p[0] + 0.5 * dir[0] * theta * delta, p[1] + 0.5 * dir[1] * theta * delta],
                        });
                    }
                    _ => {}
                }
            }
        }
        let radius = shape.radius_about_origin();
        Ok(Self { shape, delta, origin, dims, points, grid_index, links, edges, crossings, radius })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn grid_dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn grid_index(&self) -> &[[usize; 2]] {
        &self.grid_index
    }

    pub fn links(&self) -> &[[Link; 4]] {
        &self.links
    }

    pub fn edges(&self) -> &[TransverseEdge] {
        &self.edges
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    /// `a = sup |t|` over the section (taken from the shape, not the nodes).
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Lumped mass per node, `delta^2`.
    pub fn cell_area(&self) -> f64 {
        self.delta * self.delta
    }

    /// Discrete `L^2(omega)` inner product.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.cell_area() * crate::linalg::dot(f, g)
    }

    /// Stiffness of the Dirichlet Laplacian divided by the lumped mass, so that
    /// `E phi = K phi` is the discrete eigenproblem.
    pub fn stiffness(&self) -> CsrMatrix {
        let mut t = TripletBuilder::new(self.len(), self.len());
        for e in &self.edges {
            EdgeFunctional::difference(e).accumulate(&mut t, 0, e.theta);
        }
        t.build()
    }

    /// Tangential derivative `d_tau = t3 d2 - t2 d3` with its quadrature.
    pub fn tangential(&self) -> TangentialOperator {
        TangentialOperator::new(self)
    }

    pub fn node_mean_square(&self, f: &[f64]) -> f64 {
        self.inner(f, f)
    }
}

/// Sparse linear functional `sum c_i psi_i`, reused by all assemblers.
#[derive(Debug, Clone, Default)]
pub struct EdgeFunctional {
    pub terms: Vec<(usize, f64)>,
}

impl EdgeFunctional {
    /// `(psi_b - psi_a) / (theta delta)` along the edge axis.
    pub fn difference(e: &TransverseEdge) -> Self {
        let mut terms = Vec::with_capacity(2);
        match e.b {
            Some(b) => {
                terms.push((e.a, -e.inv_len));
                terms.push((b, e.inv_len));
            }
            None => terms.push((e.a, -e.inv_len)),
        }
        Self { terms }
    }

    /// Adds `w f f^T` into `t`, offsetting indices by `offset`. Each product is
    /// formed as `w * (c_i c_j)` so the result is symmetric bit for bit.
    pub fn accumulate(&self, t: &mut TripletBuilder, offset: usize, w: f64) {
        for &(i, ci) in &self.terms {
            for &(j, cj) in &self.terms {
                t.push(offset + i, offset + j, w * (ci * cj));
            }
        }
    }
}

/// Discrete tangential derivative.
///
/// Rows `0..n` are the nodal values of `d_tau phi` (non-uniform centred
/// differences with zero boundary values); the remaining rows sample
/// `d_tau phi` at boundary crossings and close the quadrature over the strip
/// between the last node layer and the boundary. `||d_tau phi||^2 / delta^2 =
/// sum_r w_r (T phi)_r^2`.
#[derive(Debug, Clone)]
pub struct TangentialOperator {
    rows: CsrMatrix,
    weights: Vec<f64>,
    nodes: usize,
    row_points: Vec<[f64; 2]>,
}

impl TangentialOperator {
    fn new(dom: &CrossSectionDomain) -> Self {
        let n = dom.len();
        let d = dom.delta;
        let mut t = TripletBuilder::new(n + dom.crossings.len(), n);
        let mut row_points = Vec::with_capacity(n + dom.crossings.len());
        for (p, (pt, l)) in dom.points.iter().zip(&dom.links).enumerate() {
            // d2 with factor t3, d3 with factor -t2
            for (axis, factor) in [(0usize, pt[1]), (1usize, -pt[0])] {
                let (lp, lm) = (l[2 * axis], l[2 * axis + 1]);
                let hp = lp.theta() * d;
                let hm = lm.theta() * d;
                let den = hp * hm * (hp + hm);
                if let Some(q) = lp.node() {
                    t.push(p, q, factor * (hm * hm / den));
                }
                if let Some(q) = lm.node() {
                    t.push(p, q, factor * (-(hp * hp) / den));
                }
                if hp != hm {
                    t.push(p, p, factor * ((hp * hp - hm * hm) / den));
                }
            }
            row_points.push(*pt);
        }
        let mut weights = vec![1.0; n];
        let mut r = n;
        for c in &dom.crossings {
            let dir = DIRS[c.dir];
            let ne = c.normal[0] * dir[0] + c.normal[1] * dir[1];
            if ne.abs() < 0.5 {
                continue;
            }
            let tn = c.point[1] * c.normal[0] - c.point[0] * c.normal[1];
            let h1 = c.theta * d;
            // one step back into the section along the same line
            match dom.links[c.node][c.dir ^ 1].node() {
                Some(pp) => {
                    let h2 = h1 + d;
                    t.push(r, c.node, tn * (-h2 / (h1 * d)));
                    t.push(r, pp, tn * (h1 / (h2 * d)));
                }
                None => t.push(r, c.node, tn * (-1.0 / h1)),
            }
            weights.push(0.5 * c.theta);
            row_points.push(c.point);
            r += 1;
        }
        let mut rows = t.build();
        rows.truncate_rows(r);
        Self { rows, weights, nodes: n, row_points }
    }

    pub fn rows(&self) -> &CsrMatrix {
        &self.rows
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row_points(&self) -> &[[f64; 2]] {
        &self.row_points
    }

    /// Nodal values of `d_tau phi`.
    pub fn apply_nodal(&self, phi: &[f64]) -> Vec<f64> {
        let mut out = self.rows.apply(phi);
        out.truncate(self.nodes);
        out
    }

    /// `||d_tau phi||^2` in the normalized (per node area) units.
    pub fn energy(&self, phi: &[f64]) -> f64 {
        let v = self.rows.apply(phi);
        v.iter().zip(&self.weights).map(|(x, w)| w * x * x).sum()
    }

    /// `T^T W T`
    pub fn gram(&self) -> CsrMatrix {
        self.rows.gram(Some(&self.weights))
    }
}
