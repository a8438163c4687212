//! Truncated computational domains: a geometrically graded radial mesh on
//! `[0, R]` and a uniform tensor grid on `[-L, L]^3`. Both carry homogeneous
//! Dirichlet data on the outer boundary.

use std::fmt::Write as _;

use serde::Serialize;

use crate::{Error, Result};

/// Nodes `0 = r_0 < r_1 < ... < r_M = R` with element sizes growing by `q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialMesh {
    pub nodes: Vec<f64>,
    pub grading: f64,
}

impl RadialMesh {
    pub fn new(radius: f64, elements: usize, grading: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::config("geometry.radius", "truncation radius must be positive"));
        }
        if elements < 8 {
            return Err(Error::config(
                "geometry.elements",
                "radial mesh needs at least 8 elements",
            ));
        }
        if !(grading >= 1.0 && grading.is_finite()) {
            return Err(Error::config("geometry.grading", "grading factor must be >= 1"));
        }
        let mut nodes = Vec::with_capacity(elements + 1);
        nodes.push(0.0);
        if grading == 1.0 {
            for i in 1..elements {
                nodes.push(radius * i as f64 / elements as f64);
            }
        } else {
            // r_i = R (q^i - 1) / (q^M - 1), evaluated through expm1 for small q - 1
            let lq = grading.ln();
            let denom = (elements as f64 * lq).exp_m1();
            for i in 1..elements {
                nodes.push(radius * (i as f64 * lq).exp_m1() / denom);
            }
        }
        nodes.push(radius);
        Ok(RadialMesh { nodes, grading })
    }

    pub fn elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn radius(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    /// Copy with every node multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        RadialMesh {
            nodes: self.nodes.iter().map(|r| r * s).collect(),
            grading: self.grading,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,r\n");
        for (i, r) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "{i},{r:.16e}");
        }
        out
    }
}

/// Uniform grid on `[-L, L]^3` with an odd number of nodes per axis, so the
/// origin is a node. Boundary nodes are Dirichlet; unknowns live on the
/// `(n - 2)^3` interior nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid3D {
    pub half_width: f64,
    pub nodes_per_axis: usize,
    pub spacing: f64,
}

impl Grid3D {
    pub fn new(half_width: f64, nodes_per_axis: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::config("geometry.half_width", "half-width must be positive"));
        }
        if nodes_per_axis < 9 || nodes_per_axis.is_multiple_of(2) {
            return Err(Error::config(
                "geometry.nodes",
                "nodes per axis must be odd and at least 9 so the origin is a grid node",
            ));
        }
        Ok(Grid3D {
            half_width,
            nodes_per_axis,
            spacing: 2.0 * half_width / (nodes_per_axis - 1) as f64,
        })
    }

    pub fn interior_per_axis(&self) -> usize {
        self.nodes_per_axis - 2
    }

    pub fn interior_count(&self) -> usize {
        self.interior_per_axis().pow(3)
    }

    pub fn center_index(&self) -> usize {
        (self.nodes_per_axis - 1) / 2
    }

    /// Coordinate of grid index `i` along one axis; exactly 0 at the center
    /// and exactly antisymmetric about it.
    pub fn coordinate(&self, i: usize) -> f64 {
        (i as f64 - self.center_index() as f64) * self.spacing
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        i == 0 || i + 1 == self.nodes_per_axis
    }

    /// Degree-of-freedom number of an interior node.
    pub fn dof(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        if self.is_boundary(i) || self.is_boundary(j) || self.is_boundary(k) {
            return None;
        }
        let m = self.interior_per_axis();
        Some(((i - 1) * m + (j - 1)) * m + (k - 1))
    }

    pub fn node_of_dof(&self, dof: usize) -> [usize; 3] {
        let m = self.interior_per_axis();
        [dof / (m * m) + 1, (dof / m) % m + 1, dof % m + 1]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Grid3D {
            half_width: self.half_width * s,
            nodes_per_axis: self.nodes_per_axis,
            spacing: self.spacing * s,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,k,x,y,z,dirichlet\n");
        let n = self.nodes_per_axis;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let _ = writeln!(
                        out,
                        "{i},{j},{k},{:.16e},{:.16e},{:.16e},{}",
                        self.coordinate(i),
                        self.coordinate(j),
                        self.coordinate(k),
                        u8::from(self.dof(i, j, k).is_none())
                    );
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh() {
        let m = RadialMesh::new(1.0, 10, 1.0).unwrap();
        for (i, r) in m.nodes.iter().enumerate() {
            assert!((r - i as f64 / 10.0).abs() < 1e-15);
        }
    }

    #[test]
    fn graded_first_element() {
        let m = RadialMesh::new(1.0, 10, 2.0).unwrap();
        assert!((m.nodes[1] - 1.0 / 1023.0).abs() < 1e-16);
        assert_eq!(m.radius(), 1.0);
    }

    #[test]
    fn graded_ratio_and_total_length() {
        let m = RadialMesh::new(10.0, 256, 1.05).unwrap();
        // oracle: element lengths follow h_{i+1} = q h_i from h_0 = R (q-1)/(q^M-1)
        let mut h = 10.0 * 0.05 / (1.05f64.powi(256) - 1.0);
        let mut total = 0.0;
        for e in 0..m.elements() {
            let (a, b) = m.element(e);
            assert!(((b - a) - h).abs() <= 1e-9 * h, "element {e}");
            if e > 0 {
                let (a0, b0) = m.element(e - 1);
                assert!(((b - a) / (b0 - a0) - 1.05).abs() < 1e-12);
            }
            total += b - a;
            h *= 1.05;
        }
        assert!((total - 10.0).abs() < 1e-12 * 10.0);
        assert_eq!(m.nodes[0], 0.0);
        assert_eq!(m.nodes.len(), 257);
    }

    #[test]
    fn radial_preconditions() {
        assert!(RadialMesh::new(0.0, 10, 1.0).is_err());
        assert!(RadialMesh::new(1.0, 7, 1.0).is_err());
        assert!(RadialMesh::new(1.0, 10, 0.9).is_err());
    }

    #[test]
    fn grid_spacing_and_counts() {
        let g = Grid3D::new(1.0, 9).unwrap();
        assert_eq!(g.spacing, 0.25);
        assert_eq!(g.coordinate(g.center_index()), 0.0);
        let g = Grid3D::new(5.0, 41).unwrap();
        assert_eq!(g.nodes_per_axis.pow(3), 68921);
        assert_eq!(g.interior_count(), 39usize.pow(3));
        assert!(Grid3D::new(1.0, 8).is_err());
    }

    #[test]
    fn interior_nodes_have_six_neighbours_in_grid() {
        let g = Grid3D::new(1.0, 11).unwrap();
        let n = g.nodes_per_axis as isize;
        for dof in 0..g.interior_count() {
            let [i, j, k] = g.node_of_dof(dof);
            assert_eq!(g.dof(i, j, k), Some(dof));
            for (di, dj, dk) in [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)] {
                let (a, b, c) = (i as isize + di, j as isize + dj, k as isize + dk);
                assert!((0..n).contains(&a) && (0..n).contains(&b) && (0..n).contains(&c));
            }
        }
    }
}
