//! Discrete forms of the energy, mass and Hardy functionals.
//!
//! - stiffness `A ~ int |x|^alpha grad u . grad v dx` (the energy inner product),
//! - mass `B ~ int g u v dx`, possibly indefinite, and `B+` for `g1 + g2` alone,
//! - Hardy `H ~ int u v / |x|^{2-alpha} dx`,
//! - a volume quadrature for `L^p` norms.
//!
//! Radial mode uses P1 elements on `[0, R]` with measure `|S^{N-1}| r^{N-1} dr`;
//! stiffness element integrals are closed form, the others use 4-point Gauss
//! (with dyadic refinement of the element touching the origin and splits at
//! weight discontinuities). 3D mode uses 7-point flux differences with lumped
//! `B` and `H`.

use serde::Serialize;

use crate::linalg::CsrMatrix;
use crate::mesh::{Grid3D, RadialMesh};
use crate::quadrature::{panels, unit_sphere_area, GaussLegendre};
use crate::weights::WeightSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Geometry {
    Radial(RadialMesh),
    Grid(Grid3D),
}

/// A volume quadrature point: `u(point) = shape[0] u[dofs[0]] + shape[1] u[dofs[1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub weight: f64,
    pub dofs: [usize; 2],
    pub shape: [f64; 2],
}

impl QuadPoint {
    fn value(&self, u: &[f64]) -> f64 {
        self.shape[0] * u[self.dofs[0]] + self.shape[1] * u[self.dofs[1]]
    }
}

/// Stiffness, mass and Hardy matrices on one shared numbering of unknowns.
#[derive(Debug, Clone)]
pub struct DiscreteOperatorPair {
    pub dimension: usize,
    pub alpha: f64,
    pub weight: WeightSpec,
    pub geometry: Geometry,
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub mass_plus: CsrMatrix,
    pub hardy: CsrMatrix,
    pub quadrature: Vec<QuadPoint>,
}

/// `int_a^b r^s dr` for `s > -1`, accurate when `b - a << a`.
pub fn power_integral(a: f64, b: f64, s: f64) -> f64 {
    let p = s + 1.0;
    if a == 0.0 {
        b.powf(p) / p
    } else {
        a.powf(p) * (p * ((b - a) / a).ln_1p()).exp_m1() / p
    }
}

pub fn assemble_radial(
    mesh: &RadialMesh,
    dimension: usize,
    alpha: f64,
    spec: &WeightSpec,
) -> Result<DiscreteOperatorPair> {
    let rule = GaussLegendre::new(4);
    let omega = unit_sphere_area(dimension);
    let n = dimension as i32;
    let m = mesh.elements();
    // the node at r = R carries the Dirichlet condition and is eliminated
    let order = m;
    let breaks = spec.discontinuities();

    let mut a_trip = Vec::with_capacity(4 * m);
    let mut b_trip = Vec::with_capacity(4 * m);
    let mut bp_trip = Vec::with_capacity(4 * m);
    let mut h_trip = Vec::with_capacity(4 * m);
    let mut quadrature = Vec::new();

    for e in 0..m {
        let (ra, rb) = mesh.element(e);
        let h = rb - ra;
        let k = omega * power_integral(ra, rb, alpha + dimension as f64 - 1.0) / (h * h);

        let mut cuts = vec![ra];
        cuts.extend(breaks.iter().copied().filter(|&x| x > ra && x < rb));
        cuts.push(rb);
        let mut bl = [[0.0; 2]; 2];
        let mut bpl = [[0.0; 2]; 2];
        let mut hl = [[0.0; 2]; 2];
        for w in cuts.windows(2) {
            for (lo, hi) in panels(w[0], w[1], 1) {
                for (r, wq) in rule.mapped(lo, hi) {
                    let phi = [(rb - r) / h, (r - ra) / h];
                    let vol = omega * wq * r.powi(n - 1);
                    let s = spec.split_radial(r, dimension, alpha).map_err(|err| Error::Assembly {
                        element: e,
                        source: Box::new(err),
                    })?;
                    let g = s.value();
                    let gp = s.positive();
                    let hw = omega * wq * r.powf(alpha + dimension as f64 - 3.0);
                    for i in 0..2 {
                        for j in 0..2 {
                            bl[i][j] += vol * g * phi[i] * phi[j];
                            bpl[i][j] += vol * gp * phi[i] * phi[j];
                            hl[i][j] += hw * phi[i] * phi[j];
                        }
                    }
                    let right_free = e + 1 < m;
                    quadrature.push(QuadPoint {
                        weight: vol,
                        dofs: [e, if right_free { e + 1 } else { e }],
                        shape: [phi[0], if right_free { phi[1] } else { 0.0 }],
                    });
                }
            }
        }
        // symmetric by construction: the (1,0) entry is copied from (0,1)
        let nodes = [e, e + 1];
        let al = [[k, -k], [-k, k]];
        for i in 0..2 {
            for j in 0..2 {
                let (gi, gj) = (nodes[i], nodes[j]);
                if gi >= order || gj >= order {
                    continue;
                }
                let (ii, jj) = if i <= j { (i, j) } else { (j, i) };
                a_trip.push((gi, gj, al[ii][jj]));
                b_trip.push((gi, gj, bl[ii][jj]));
                bp_trip.push((gi, gj, bpl[ii][jj]));
                h_trip.push((gi, gj, hl[ii][jj]));
            }
        }
    }

    Ok(DiscreteOperatorPair {
        dimension,
        alpha,
        weight: spec.clone(),
        geometry: Geometry::Radial(mesh.clone()),
        stiffness: CsrMatrix::from_triplets(order, a_trip),
        mass: CsrMatrix::from_triplets(order, b_trip),
        mass_plus: CsrMatrix::from_triplets(order, bp_trip),
        hardy: CsrMatrix::from_triplets(order, h_trip),
        quadrature,
    })
}

// Euclidean norm summed in a fixed (sorted) order, so coordinate
// permutations give bit-identical results.
fn sym_norm(x: [f64; 3]) -> f64 {
    let mut s = [x[0] * x[0], x[1] * x[1], x[2] * x[2]];
    s.sort_by(f64::total_cmp);
    ((s[0] + s[1]) + s[2]).sqrt()
}

/// `int_{[-h/2, h/2]^3} |x|^beta dx` for `beta > -3`.
pub fn origin_cell_power_integral(h: f64, beta: f64) -> f64 {
    // divergence theorem with the field x |x|^beta over the unit cube,
    // leaving a smooth face integral
    let rule = GaussLegendre::new(24);
    let mut face = 0.0;
    for (s, ws) in rule.mapped(-0.5, 0.5) {
        for (t, wt) in rule.mapped(-0.5, 0.5) {
            face += ws * wt * (0.25 + s * s + t * t).powf(0.5 * beta);
        }
    }
    let unit = 6.0 * 0.5 * face / (beta + 3.0);
    h.powf(3.0 + beta) * unit
}

pub fn assemble_grid3d(grid: &Grid3D, alpha: f64, spec: &WeightSpec) -> Result<DiscreteOperatorPair> {
    let n = grid.nodes_per_axis;
    if n.is_multiple_of(2) || grid.coordinate(grid.center_index()) != 0.0 {
        return Err(Error::Assembly {
            element: 0,
            source: Box::new(Error::InvalidOperator("origin is not a grid node".into())),
        });
    }
    let hs = grid.spacing;
    let c = grid.center_index();
    let order = grid.interior_count();
    let origin_coef = hs.powf(alpha) / (alpha + 1.0);
    let cell = hs * hs * hs;
    let half = |twice: usize| (twice as f64 / 2.0 - c as f64) * hs;

    let mut a_trip = Vec::with_capacity(7 * order);
    let mut b_diag = vec![0.0; order];
    let mut bp_diag = vec![0.0; order];
    let mut h_diag = vec![0.0; order];
    let mut quadrature = Vec::with_capacity(order);

    for dof in 0..order {
        let p = grid.node_of_dof(dof);
        let mut faces = [0.0; 6];
        let mut f = 0;
        for axis in 0..3 {
            for step in [-1isize, 1] {
                let mut q = p;
                q[axis] = (p[axis] as isize + step) as usize;
                let coef = if p == [c, c, c] || q == [c, c, c] {
                    origin_coef
                } else {
                    let mid = [half(p[0] + q[0]), half(p[1] + q[1]), half(p[2] + q[2])];
                    sym_norm(mid).powf(alpha)
                };
                faces[f] = coef * hs;
                f += 1;
                if let Some(qd) = grid.dof(q[0], q[1], q[2]) {
                    a_trip.push((dof, qd, -coef * hs));
                }
            }
        }
        faces.sort_by(f64::total_cmp);
        a_trip.push((dof, dof, faces.iter().sum()));

        let x = [grid.coordinate(p[0]), grid.coordinate(p[1]), grid.coordinate(p[2])];
        let r = sym_norm(x);
        let s = spec.split_radial(r, 3, alpha).map_err(|err| Error::Assembly {
            element: dof,
            source: Box::new(err),
        })?;
        b_diag[dof] = s.value() * cell;
        bp_diag[dof] = s.positive() * cell;
        h_diag[dof] = if r == 0.0 {
            origin_cell_power_integral(hs, alpha - 2.0)
        } else {
            r.powf(alpha - 2.0) * cell
        };
        quadrature.push(QuadPoint {
            weight: cell,
            dofs: [dof, dof],
            shape: [1.0, 0.0],
        });
    }

    Ok(DiscreteOperatorPair {
        dimension: 3,
        alpha,
        weight: spec.clone(),
        geometry: Geometry::Grid(grid.clone()),
        stiffness: CsrMatrix::from_triplets(order, a_trip),
        mass: CsrMatrix::from_diagonal(&b_diag),
        mass_plus: CsrMatrix::from_diagonal(&bp_diag),
        hardy: CsrMatrix::from_diagonal(&h_diag),
        quadrature,
    })
}

impl DiscreteOperatorPair {
    pub fn assemble(geometry: &Geometry, dimension: usize, alpha: f64, spec: &WeightSpec) -> Result<Self> {
        match geometry {
            Geometry::Radial(mesh) => assemble_radial(mesh, dimension, alpha, spec),
            Geometry::Grid(grid) => {
                if dimension != 3 {
                    return Err(Error::config("problem.dimension", "grid mode requires N = 3"));
                }
                assemble_grid3d(grid, alpha, spec)
            }
        }
    }

    pub fn order(&self) -> usize {
        self.stiffness.order()
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                found: u.len(),
            });
        }
        Ok(())
    }

    /// `u^T A v`, the discrete `<u, v>_alpha`.
    pub fn energy_inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.stiffness.bilinear(u, v))
    }

    /// `u^T B v`, the discrete `int g u v`.
    pub fn mass_inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.mass.bilinear(u, v))
    }

    /// `u^T B+ v`, the discrete `int (g1 + g2) u v`.
    pub fn mass_plus_inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.mass_plus.bilinear(u, v))
    }

    /// `u^T H v`, the discrete `int u v / |x|^{2-alpha}`.
    pub fn hardy_inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.hardy.bilinear(u, v))
    }

    /// `(sum_q w_q |u(x_q)|^p)^{1/p}` over the volume quadrature.
    pub fn lp_norm(&self, u: &[f64], p: f64) -> Result<f64> {
        self.check(u)?;
        if !(p >= 1.0) {
            return Err(Error::config("p", "L^p norm needs p >= 1"));
        }
        let s: f64 = self
            .quadrature
            .iter()
            .map(|q| q.weight * q.value(u).abs().powf(p))
            .sum();
        Ok(s.powf(1.0 / p))
    }

    /// `int u dx` over the volume quadrature.
    pub fn volume_integral(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        Ok(self.quadrature.iter().map(|q| q.weight * q.value(u)).sum())
    }

    /// Spatial coordinates of every unknown (`[r]` radially, `[x, y, z]` on the grid).
    pub fn dof_coordinates(&self) -> Vec<Vec<f64>> {
        match &self.geometry {
            Geometry::Radial(mesh) => mesh.nodes[..self.order()].iter().map(|&r| vec![r]).collect(),
            Geometry::Grid(grid) => (0..self.order())
                .map(|d| grid.node_of_dof(d).iter().map(|&i| grid.coordinate(i)).collect())
                .collect(),
        }
    }

    /// Distance of every unknown from the origin.
    pub fn dof_radii(&self) -> Vec<f64> {
        match &self.geometry {
            Geometry::Radial(mesh) => mesh.nodes[..self.order()].to_vec(),
            Geometry::Grid(grid) => (0..self.order())
                .map(|d| {
                    let p = grid.node_of_dof(d);
                    sym_norm([grid.coordinate(p[0]), grid.coordinate(p[1]), grid.coordinate(p[2])])
                })
                .collect(),
        }
    }

    /// Nodal interpolant of the radial profile `f(|x|)`.
    pub fn interpolate(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.dof_radii().into_iter().map(f).collect()
    }

    pub fn truncation_radius(&self) -> f64 {
        match &self.geometry {
            Geometry::Radial(mesh) => mesh.radius(),
            Geometry::Grid(grid) => grid.half_width,
        }
    }

    /// Reassembles on the geometry shrunk by `t`, so that a nodal vector `u`
    /// represents the dilate `x -> u(t x)`.
    pub fn dilated(&self, t: f64) -> Result<Self> {
        let geometry = match &self.geometry {
            Geometry::Radial(mesh) => Geometry::Radial(mesh.scaled(1.0 / t)),
            Geometry::Grid(grid) => Geometry::Grid(grid.scaled(1.0 / t)),
        };
        Self::assemble(&geometry, self.dimension, self.alpha, &self.weight)
    }

    /// CSV of a nodal vector with its coordinates.
    pub fn vector_csv(&self, u: &[f64]) -> String {
        use std::fmt::Write as _;
        let coords = self.dof_coordinates();
        let mut out = match self.geometry {
            Geometry::Radial(_) => String::from("r,value\n"),
            Geometry::Grid(_) => String::from("x,y,z,value\n"),
        };
        for (x, v) in coords.iter().zip(u) {
            for c in x {
                let _ = write!(out, "{c:.16e},");
            }
            let _ = writeln!(out, "{v:.16e}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn gaussian() -> WeightSpec {
        WeightSpec::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
        }
    }

    #[test]
    fn classical_limit_matches_p1_matrices() {
        // alpha = 0, N = 3, g = 1, uniform mesh: A_ij = 4 pi int r^2 phi_i' phi_j'
        let mesh = RadialMesh::new(1.0, 8, 1.0).unwrap();
        let pair = assemble_radial(&mesh, 3, 0.0, &WeightSpec::IndicatorBall { radius: 2.0 }).unwrap();
        let h: f64 = 1.0 / 8.0;
        for i in 0..7 {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let k = 4.0 * PI * (b.powi(3) - a.powi(3)) / 3.0 / (h * h);
            assert!((pair.stiffness.get(i, i + 1) + k).abs() < 1e-13 * k);
            // mass off-diagonal: 4 pi int r^2 phi_i phi_{i+1} = 4 pi h (a^2/12 + a h/10 + h^2/30) ... checked by quadrature
            let m = GaussLegendre::new(10).integrate(a, b, |r| 4.0 * PI * r * r * (b - r) / h * (r - a) / h);
            assert!((pair.mass.get(i, i + 1) - m).abs() < 1e-14);
        }
    }

    #[test]
    fn single_element_stiffness_closed_form() {
        // oracle: int_0^h r^{alpha+N-1} (1/h)(-1/h) dr = -h^{alpha+N-2}/(alpha+N)
        let mesh = RadialMesh::new(1.0, 8, 1.0).unwrap();
        let (alpha, n) = (1.0, 3);
        let pair = assemble_radial(&mesh, n, alpha, &gaussian()).unwrap();
        let h: f64 = 0.125;
        let expected = -unit_sphere_area(3) * h.powf(alpha + 1.0) / (alpha + 3.0);
        assert!((pair.stiffness.get(0, 1) - expected).abs() < 1e-14 * expected.abs());
    }

    #[test]
    fn ring_mass_has_negative_diagonal() {
        let mesh = RadialMesh::new(4.0, 40, 1.0).unwrap();
        let ring = WeightSpec::SignChangingRing {
            inner_radius: 1.0,
            outer_radius: 2.0,
            positive_amplitude: 1.0,
            negative_amplitude: 0.5,
        };
        let pair = assemble_radial(&mesh, 3, 1.0, &ring).unwrap();
        assert!(pair.mass.diagonal().iter().any(|&d| d < 0.0));
        assert!(pair.mass_plus.diagonal().iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn tabulated_out_of_range_names_element() {
        let mesh = RadialMesh::new(4.0, 8, 1.0).unwrap();
        let t = WeightSpec::Tabulated(crate::weights::TabulatedWeight {
            radii: vec![0.0, 1.0, 2.0],
            values: vec![1.0, 1.0, 1.0],
            ..Default::default()
        });
        match assemble_radial(&mesh, 3, 1.0, &t) {
            Err(Error::Assembly { element, .. }) => assert_eq!(element, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn matrices_are_symmetric_and_stiffness_positive() {
        let mesh = RadialMesh::new(10.0, 64, 1.05).unwrap();
        let pair = assemble_radial(&mesh, 3, 1.5, &gaussian()).unwrap();
        for m in [&pair.stiffness, &pair.mass, &pair.mass_plus, &pair.hardy] {
            assert!(m.is_symmetric());
        }
        assert!(pair.stiffness.diagonal().iter().all(|&d| d > 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u: Vec<f64> = (0..pair.order()).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(pair.energy_inner(&u, &u).unwrap() > 0.0);
        }
        assert_eq!(
            pair.energy_inner(&vec![0.0; pair.order()], &vec![0.0; pair.order()])
                .unwrap(),
            0.0
        );
        assert!(pair.energy_inner(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn mass_inner_is_bilinear() {
        let mesh = RadialMesh::new(10.0, 64, 1.05).unwrap();
        let pair = assemble_radial(&mesh, 3, 1.0, &gaussian()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rv = || -> Vec<f64> { (0..pair.order()).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let (u, v, w) = (rv(), rv(), rv());
        let vw: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        let lhs = pair.mass_inner(&u, &vw).unwrap();
        let rhs = pair.mass_inner(&u, &v).unwrap() + pair.mass_inner(&u, &w).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()));
    }

    #[test]
    fn hat_near_boundary_has_positive_mass() {
        let mesh = RadialMesh::new(3.0, 32, 1.0).unwrap();
        let pair = assemble_radial(&mesh, 3, 1.0, &gaussian()).unwrap();
        let mut u = vec![0.0; pair.order()];
        let i = pair.order() - 1;
        u[i] = 1.0;
        let (a, c) = (mesh.nodes[i - 1], mesh.nodes[i + 1]);
        let b = mesh.nodes[i];
        // oracle: direct quadrature of 4 pi g r^2 phi^2 over the hat support
        let rule = GaussLegendre::new(20);
        let g = |r: f64| (-r * r).exp();
        let left = rule.integrate(a, b, |r| 4.0 * PI * g(r) * r * r * ((r - a) / (b - a)).powi(2));
        let right = rule.integrate(b, c, |r| 4.0 * PI * g(r) * r * r * ((c - r) / (c - b)).powi(2));
        let m = pair.mass_inner(&u, &u).unwrap();
        assert!(m > 0.0);
        assert!((m - (left + right)).abs() < 1e-7 * m);
    }

    #[test]
    fn lp_norm_volume_and_mass_consistency() {
        let mesh = RadialMesh::new(2.0, 64, 1.03).unwrap();
        let pair = assemble_radial(&mesh, 3, 1.0, &WeightSpec::IndicatorBall { radius: 5.0 }).unwrap();
        // constant 1 on the free nodes; the hat at r = R is absent, so add it through the
        // quadrature directly: integrate 1 over the ball
        let vol: f64 = pair.quadrature.iter().map(|q| q.weight).sum();
        assert!((vol - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12 * vol);
        let u: Vec<f64> = (0..pair.order()).map(|i| 1.0 + (i as f64 * 0.1).sin()).collect();
        let l2 = pair.lp_norm(&u, 2.0).unwrap();
        let m = pair.mass_inner(&u, &u).unwrap();
        assert!((l2 * l2 - m).abs() <= 1e-10 * m);
        let l1 = pair.lp_norm(&u, 1.0).unwrap();
        let scaled: Vec<f64> = u.iter().map(|x| -2.5 * x).collect();
        assert!((pair.lp_norm(&scaled, 1.0).unwrap() - 2.5 * l1).abs() < 1e-12 * l1);
        assert!(pair.lp_norm(&u, 0.5).is_err());
    }

    #[test]
    fn lp_norm_of_constant_approximates_ball_volume() {
        // constant 1 everywhere except the Dirichlet hat at R: volume minus that hat's share
        let mesh = RadialMesh::new(1.0, 512, 1.0).unwrap();
        let pair = assemble_radial(&mesh, 3, 1.0, &gaussian()).unwrap();
        let ones = vec![1.0; pair.order()];
        let l1 = pair.lp_norm(&ones, 1.0).unwrap();
        let ball = 4.0 / 3.0 * PI;
        assert!((l1 - ball).abs() < 2.0 * 4.0 * PI / 512.0);
    }

    #[test]
    fn grid_alpha_to_zero_is_seven_point_laplacian() {
        let grid = Grid3D::new(1.0, 9).unwrap();
        let pair = assemble_grid3d(&grid, 1e-300, &gaussian()).unwrap();
        let hs = grid.spacing;
        let d = grid.dof(3, 4, 5).unwrap();
        assert!((pair.stiffness.get(d, d) - 6.0 * hs).abs() < 1e-12);
        let nb = grid.dof(3, 4, 6).unwrap();
        assert!((pair.stiffness.get(d, nb) + hs).abs() < 1e-12);
    }

    #[test]
    fn grid_origin_cell_hardy_weight_is_finite() {
        let grid = Grid3D::new(1.0, 9).unwrap();
        let pair = assemble_grid3d(&grid, 1.0, &gaussian()).unwrap();
        let c = grid.center_index();
        let o = grid.dof(c, c, c).unwrap();
        let w = pair.hardy.get(o, o);
        assert!(w.is_finite() && w > 0.0);
        // oracle: brute-force midpoint sum of 1/|x| over the cube with 200^3 cells
        let h = grid.spacing;
        let m = 200;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let x = (i as f64 + 0.5) / m as f64 - 0.5;
                    let y = (j as f64 + 0.5) / m as f64 - 0.5;
                    let z = (k as f64 + 0.5) / m as f64 - 0.5;
                    s += 1.0 / (x * x + y * y + z * z).sqrt();
                }
            }
        }
        let brute = s / (m * m * m) as f64 * h * h;
        assert!((w - brute).abs() < 2e-3 * brute);
    }

    #[test]
    fn grid_commutes_with_coordinate_swap() {
        let grid = Grid3D::new(2.0, 11).unwrap();
        let pair = assemble_grid3d(&grid, 1.3, &gaussian()).unwrap();
        let swap = |d: usize| {
            let [i, j, k] = grid.node_of_dof(d);
            grid.dof(j, i, k).unwrap()
        };
        let swap_z = |d: usize| {
            let [i, j, k] = grid.node_of_dof(d);
            grid.dof(k, j, i).unwrap()
        };
        for d in 0..pair.order() {
            for (e, v) in pair.stiffness.row(d) {
                assert_eq!(pair.stiffness.get(swap(d), swap(e)), v);
                assert_eq!(pair.stiffness.get(swap_z(d), swap_z(e)), v);
            }
            assert_eq!(pair.mass.get(swap(d), swap(d)), pair.mass.get(d, d));
        }
        assert!(pair.stiffness.is_symmetric());
    }

    #[test]
    fn grid_quadrature_consistent_with_lumped_mass() {
        let grid = Grid3D::new(2.0, 11).unwrap();
        let pair = assemble_grid3d(&grid, 1.0, &WeightSpec::IndicatorBall { radius: 10.0 }).unwrap();
        let u: Vec<f64> = (0..pair.order()).map(|i| (i as f64).cos()).collect();
        let l2 = pair.lp_norm(&u, 2.0).unwrap();
        assert!((l2 * l2 - pair.mass_inner(&u, &u).unwrap()).abs() < 1e-12 * l2 * l2);
        assert!((dot(&u, &u) * grid.spacing.powi(3) - l2 * l2).abs() < 1e-12 * l2 * l2);
    }
}
