//! Gauss-Legendre rules and a composite integrator for radial integrals
//! that may carry an integrable singularity at the origin.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev-like initial guess, refined by Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Points and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Number of dyadic levels used to resolve `[0, c]` toward the origin.
pub const ORIGIN_LEVELS: usize = 52;

/// Splits `[a, b]` into panels suited to Gauss quadrature: dyadic panels
/// accumulating at 0 when `a == 0`, logarithmic panels when `b / a` is large,
/// uniform panels otherwise.
pub fn panels(a: f64, b: f64, uniform: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if b <= a {
        return out;
    }
    if a == 0.0 {
        let mut hi = b;
        let mut levels = Vec::with_capacity(ORIGIN_LEVELS);
        for _ in 0..ORIGIN_LEVELS {
            let lo = 0.5 * hi;
            levels.push((lo, hi));
            hi = lo;
        }
        levels.push((0.0, hi));
        levels.reverse();
        out.extend(levels);
    } else if b / a > 2.0 {
        let count = uniform.max((4.0 * (b / a).log2()).ceil() as usize);
        let ratio = (b / a).powf(1.0 / count as f64);
        let mut lo = a;
        for i in 0..count {
            let hi = if i + 1 == count { b } else { lo * ratio };
            out.push((lo, hi));
            lo = hi;
        }
    } else {
        let count = uniform.max(1);
        let h = (b - a) / count as f64;
        for i in 0..count {
            let lo = a + h * i as f64;
            let hi = if i + 1 == count { b } else { lo + h };
            out.push((lo, hi));
        }
    }
    out
}

/// Composite integral of `f` over `[a, b]`, split at the sorted `breaks`.
pub fn composite(rule: &GaussLegendre, a: f64, b: f64, breaks: &[f64], uniform: usize, f: impl Fn(f64) -> f64) -> f64 {
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut sum = 0.0;
    for w in cuts.windows(2) {
        for (lo, hi) in panels(w[0], w[1], uniform) {
            sum += rule.integrate(lo, hi, &f);
        }
    }
    sum
}

/// Area of the unit sphere in `R^n`, `2 pi^{n/2} / Gamma(n/2)`.
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

// Gamma(n/2) for a positive integer n.
fn gamma_half_integer(n: usize) -> f64 {
    let (mut g, mut x) = if n.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = n as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_point_rule_matches_tabulated_values() {
        let rule = GaussLegendre::new(4);
        let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
        assert!((rule.nodes[2] - a).abs() < 1e-15);
        assert!((rule.nodes[3] - b).abs() < 1e-15);
        let wa = (18.0 + 30f64.sqrt()) / 36.0;
        assert!((rule.weights[2] - wa).abs() < 1e-15);
    }

    #[test]
    fn rule_is_exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in 1..12 {
            let rule = GaussLegendre::new(n);
            for deg in 0..(2 * n) {
                let exact = (2.0f64.powi(deg as i32 + 1) - 0.0) / (deg as f64 + 1.0);
                let approx = rule.integrate(0.0, 2.0, |x| x.powi(deg as i32));
                assert!((approx - exact).abs() <= 1e-13 * exact.max(1.0), "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn composite_resolves_origin_singularity() {
        let rule = GaussLegendre::new(8);
        let val = composite(&rule, 0.0, 1.0, &[], 4, |r| r.powf(-0.5));
        assert!((val - 2.0).abs() < 1e-7);
    }

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }
}
