use ckn_eigen::assembly::{assemble_radial, DiscreteOperatorPair, Geometry};
use ckn_eigen::eigensolve::{solve_successive, SolverSettings};
use ckn_eigen::inequalities::{hardy_constant, CknParams};
use ckn_eigen::mesh::{Grid3D, RadialMesh};
use ckn_eigen::quadrature::GaussLegendre;
use ckn_eigen::weights::{catalogue, eval_remark_h, WeightSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sphere(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        4 => 2.0 * std::f64::consts::PI.powi(2),
        _ => unreachable!(),
    }
}

// int_a^b r^s dr by 40-point Gauss on 8 geometric panels (or closed form from 0)
fn reference_power(a: f64, b: f64, s: f64) -> f64 {
    if a == 0.0 {
        return b.powf(s + 1.0) / (s + 1.0);
    }
    let g = GaussLegendre::new(40);
    let step = (b - a) / 8.0;
    (0..8)
        .map(|i| g.integrate(a + i as f64 * step, a + (i + 1) as f64 * step, |r| r.powf(s)))
        .sum()
}

fn gaussian() -> WeightSpec {
    WeightSpec::GaussianBump {
        amplitude: 1.0,
        width: 1.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn radial_stiffness_matches_reference_integration(
        alpha in 0.01f64..1.99,
        n in 2usize..=4,
        elements in 8usize..200,
        grading in 1.0f64..1.05,
        radius in 0.5f64..20.0,
        pick in 0.0f64..1.0,
    ) {
        let mesh = RadialMesh::new(radius, elements, grading).unwrap();
        let pair = assemble_radial(&mesh, n, alpha, &gaussian()).unwrap();
        let s = alpha + n as f64 - 1.0;
        let e = ((pick * (elements - 1) as f64) as usize).min(elements - 2);
        let (a, b) = mesh.element(e);
        let h = b - a;
        let expected = -sphere(n) * reference_power(a, b, s) / (h * h);
        let got = pair.stiffness.get(e, e + 1);
        prop_assert!(((got - expected) / expected).abs() <= 1e-13, "{got} vs {expected}");

        let (a0, b0) = mesh.element(e + 1);
        let diag = sphere(n) * (reference_power(a, b, s) / (h * h) + reference_power(a0, b0, s) / ((b0 - a0) * (b0 - a0)));
        let got = pair.stiffness.get(e + 1, e + 1);
        prop_assert!(((got - diag) / diag).abs() <= 1e-13, "{got} vs {diag}");
    }

    #[test]
    fn energy_of_interpolant_converges_at_second_order(alpha in 0.05f64..1.95, n in 2usize..=4) {
        let radius = 2.0f64;
        // u = (1 - r^2/R^2)^2, so u'^2 = 16 r^2/R^4 (1 - 2 r^2/R^2 + r^4/R^4)
        let s = alpha + n as f64 - 1.0;
        let exact = 16.0 / radius.powi(4)
            * sphere(n)
            * [(1.0f64, 0), (-2.0, 1), (1.0, 2)]
                .iter()
                .map(|&(c, k)| {
                    let e = s + 3.0 + 2.0 * k as f64;
                    c * radius.powf(e) / (e * radius.powi(2 * k))
                })
                .sum::<f64>();
        let errors: Vec<f64> = [128, 256, 512, 1024]
            .iter()
            .map(|&m| {
                let mesh = RadialMesh::new(radius, m, 1.0).unwrap();
                let pair = assemble_radial(&mesh, n, alpha, &gaussian()).unwrap();
                let u = pair.interpolate(|r| (1.0 - r * r / (radius * radius)).powi(2));
                (pair.energy_inner(&u, &u).unwrap() - exact).abs()
            })
            .collect();
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            prop_assert!(order >= 1.8, "order {order} from {errors:?}");
        }
    }

    #[test]
    fn discrete_hardy_holds_for_random_vectors(
        alpha in 0.01f64..1.99,
        n in 3usize..=4,
        elements in 16usize..256,
        seed in any::<u64>(),
    ) {
        let mesh = RadialMesh::new(5.0, elements, 1.0).unwrap();
        let pair = assemble_radial(&mesh, n, alpha, &gaussian()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..pair.order()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h = pair.hardy_inner(&u, &u).unwrap();
        let e = pair.energy_inner(&u, &u).unwrap();
        prop_assert!(h <= hardy_constant(n, alpha) * e * (1.0 + 1e-3), "{h} > C {e}");
    }

    #[test]
    fn radial_mesh_lengths_sum_to_radius(radius in 1e-3f64..1e3, elements in 8usize..2000, grading in 1.0f64..1.1) {
        let mesh = RadialMesh::new(radius, elements, grading).unwrap();
        prop_assert_eq!(mesh.elements(), elements);
        prop_assert_eq!(mesh.element(0).0, 0.0);
        prop_assert_eq!(mesh.element(elements - 1).1, radius);
        let total: f64 = (0..elements).map(|e| { let (a, b) = mesh.element(e); b - a }).sum();
        prop_assert!((total - radius).abs() <= 1e-12 * radius);
    }

    #[test]
    fn weight_split_is_the_evaluation_path(x in prop::array::uniform3(-50.0f64..50.0), alpha in 0.01f64..1.99) {
        for spec in catalogue() {
            let split = spec.eval_g_split(&x, alpha).unwrap();
            let g = spec.eval_g(&x, alpha).unwrap();
            prop_assert_eq!(g.to_bits(), (split.g1 + split.g2 - split.gminus).to_bits(), "{}", spec.name());
        }
    }

    #[test]
    fn rayleigh_quotient_is_scale_invariant(seed in any::<u64>(), c in prop_oneof![-1e6f64..-1e-6, 1e-6f64..1e6]) {
        let mesh = RadialMesh::new(6.0, 64, 1.0).unwrap();
        let pair = assemble_radial(&mesh, 3, 1.0, &gaussian()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..pair.order()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = u.iter().map(|x| c * x).collect();
        let q = |w: &[f64]| pair.energy_inner(w, w).unwrap() / pair.mass_inner(w, w).unwrap();
        prop_assert!((q(&u) - q(&v)).abs() <= 1e-12 * q(&u));
    }

    #[test]
    fn pencil_is_symmetric(seed in any::<u64>(), alpha in 0.01f64..1.99) {
        let spec = WeightSpec::SignChangingRing { inner_radius: 1.0, outer_radius: 2.0, positive_amplitude: 1.0, negative_amplitude: 0.5 };
        let mesh = RadialMesh::new(6.0, 48, 1.01).unwrap();
        let pair = assemble_radial(&mesh, 3, alpha, &spec).unwrap();
        prop_assert!(pair.stiffness.is_symmetric() && pair.mass.is_symmetric());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..pair.order()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..pair.order()).map(|_| rng.random_range(-1.0..1.0)).collect();
        for m in [&pair.stiffness, &pair.mass] {
            let (uv, vu) = (m.bilinear(&u, &v), m.bilinear(&v, &u));
            prop_assert!((uv - vu).abs() <= 1e-13 * (uv.abs() + vu.abs() + 1.0));
        }
    }

    #[test]
    fn ckn_rejects_inconsistent_q(
        n in 3usize..=5,
        a in -0.9f64..0.0,
        p in 1.5f64..3.0,
        offset in prop_oneof![-0.5f64..-1e-6, 1e-6f64..0.5],
    ) {
        let params = CknParams::new(n, p, a, a + 0.5).unwrap();
        prop_assert!(CknParams::with_q(n, p, a, a + 0.5, params.q).is_ok());
        prop_assert!(CknParams::with_q(n, p, a, a + 0.5, params.q + offset).is_err());
    }
}

#[test]
fn no_random_vector_beats_the_first_eigenvalue() {
    let mesh = RadialMesh::new(6.0, 32, 1.0).unwrap();
    let pair = DiscreteOperatorPair::assemble(&Geometry::Radial(mesh), 3, 1.0, &gaussian()).unwrap();
    let seq = solve_successive(
        &pair,
        &SolverSettings {
            count: 1,
            ..SolverSettings::default()
        },
    )
    .unwrap();
    let lambda1 = seq.pairs[0].lambda;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut best = f64::INFINITY;
    for _ in 0..10_000 {
        let u: Vec<f64> = (0..pair.order()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = pair.mass_inner(&u, &u).unwrap();
        if b > 0.0 {
            best = best.min(pair.energy_inner(&u, &u).unwrap() / b);
        }
    }
    assert!(best >= lambda1 - 1e-9, "{best} < {lambda1}");
}

#[test]
fn remark_h_deviation_from_one_shrinks_toward_origin() {
    let dev: Vec<f64> = [1e-2, 1e-4, 1e-6]
        .iter()
        .map(|&r| (eval_remark_h(&[r, 0.0, 0.0], 3, 1.0) - 1.0).abs())
        .collect();
    assert!(dev[1] < dev[0] && dev[2] < dev[1], "{dev:?}");
}

#[test]
fn grid_interior_nodes_have_six_neighbours() {
    let grid = Grid3D::new(2.0, 9).unwrap();
    let m = grid.interior_per_axis();
    for dof in 0..grid.interior_count() {
        let [i, j, k] = grid.node_of_dof(dof);
        assert_eq!(grid.dof(i, j, k), Some(dof));
        for (di, dj, dk) in [(1, 0, 0), (0, 1, 0), (0, 0, 1)] {
            for sign in [-1i64, 1] {
                let q = [i as i64 + sign * di, j as i64 + sign * dj, k as i64 + sign * dk];
                assert!(q.iter().all(|&c| c >= 0 && c <= m as i64 + 1), "{q:?} outside the grid");
            }
        }
    }
}
