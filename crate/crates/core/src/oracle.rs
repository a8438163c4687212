//! Radial shooting solver for `-(r^{alpha+N-1} u')' = lambda g r^{N-1} u`,
//! `u(R) = 0`, bounded at the origin.
//!
//! With `v = r^{alpha+N-1} u'` and `t = ln r` the system reads
//! `du/dt = v r^{-(alpha+N-2)}`, `dv/dt = -lambda g r^N u`, integrated by an
//! adaptive Dormand-Prince 5(4) pair from `r_eps = 1e-6 R`. Eigenvalues are
//! indexed by the number of sign changes of `u` and located by bisection.

use serde::Serialize;

use crate::quadrature::{composite, GaussLegendre};
use crate::weights::WeightSpec;
use crate::{Error, Result};

/// Relative offset of the starting radius.
pub const START_OFFSET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootSettings {
    pub rtol: f64,
    /// Relative bracket width at which bisection stops.
    pub bisection_width: f64,
    pub lambda_start: f64,
    pub lambda_cap: f64,
}

impl Default for ShootSettings {
    fn default() -> Self {
        ShootSettings {
            rtol: 1e-12,
            bisection_width: 1e-10,
            lambda_start: 1e-3,
            lambda_cap: 1e15,
        }
    }
}

/// Outcome of one shot at fixed `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shot {
    /// `u(R)`, up to a positive rescaling.
    pub miss: f64,
    /// Sign changes of `u` on `(r_eps, R]`.
    pub zero_count: usize,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingResult {
    pub n: usize,
    pub lambda: f64,
    /// Interior zeros of the eigenfunction, `n - 1` when certified.
    pub index: usize,
    pub bracket: (f64, f64),
    pub steps: usize,
    pub miss: f64,
    pub certified: bool,
}

/// Radial problem data shared by all shots.
#[derive(Debug, Clone)]
pub struct RadialProblem<'a> {
    pub dimension: usize,
    pub alpha: f64,
    pub weight: &'a WeightSpec,
    pub radius: f64,
}

impl RadialProblem<'_> {
    fn validate(&self) -> Result<()> {
        if self.dimension < 3 {
            return Err(Error::config("dimension", "N must be at least 3"));
        }
        if !(0.0..2.0).contains(&self.alpha) {
            return Err(Error::config("alpha", "alpha must lie in [0, 2) for the oracle"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::config("radius", "truncation radius must be positive"));
        }
        self.weight.validate()
    }

    fn g(&self, r: f64) -> Result<f64> {
        Ok(self.weight.split_radial(r, self.dimension, self.alpha)?.value())
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const RESCALE_AT: f64 = 1e100;

/// Integrates from `r_eps` to `R` at fixed `lambda`.
pub fn shoot(problem: &RadialProblem, lambda: f64, rtol: f64) -> Result<Shot> {
    problem.validate()?;
    let n = problem.dimension as f64;
    let alpha = problem.alpha;
    let r_eps = START_OFFSET * problem.radius;
    let breaks = problem.weight.discontinuities();

    // flux of the regular solution: v(r_eps) = -lambda int_0^{r_eps} g s^{N-1} ds
    let rule = GaussLegendre::new(8);
    let failure = std::cell::RefCell::new(None);
    let flux = composite(&rule, 0.0, r_eps, &breaks, 1, |s| match problem.g(s) {
        Ok(g) => g * s.powf(n - 1.0),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    });
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut y = [1.0, -lambda * flux];
    if lambda == 0.0 {
        return Ok(Shot {
            miss: 1.0,
            zero_count: 0,
            steps: 0,
        });
    }

    // `g_at` is the radius where g is sampled, kept inside the current piece
    let rhs = |t: f64, y: [f64; 2], g_at: f64| -> Result<[f64; 2]> {
        let r = t.exp();
        let g = problem.g(g_at)?;
        Ok([y[1] * r.powf(-(alpha + n - 2.0)), -lambda * g * r.powf(n) * y[0]])
    };

    let mut cuts = vec![r_eps.ln()];
    cuts.extend(
        breaks
            .iter()
            .filter(|&&b| b > r_eps && b < problem.radius)
            .map(|b| b.ln()),
    );
    cuts.push(problem.radius.ln());

    let mut zero_count = 0;
    let mut steps = 0;
    let mut scale = [1.0f64, y[1].abs().max(f64::MIN_POSITIVE)];
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        // g is sampled strictly inside the piece, giving one-sided values at jumps
        let inside = |t: f64| -> f64 {
            let r = t.exp();
            let (lo, hi) = (t0.exp(), t1.exp());
            if r <= lo {
                lo + 1e-12 * (hi - lo)
            } else if r >= hi {
                hi - 1e-12 * (hi - lo)
            } else {
                r
            }
        };
        let mut t = t0;
        let mut h = ((t1 - t0) / 64.0).min(0.05);
        while t < t1 {
            if t + h > t1 {
                h = t1 - t;
            }
            let mut k = [[0.0; 2]; 7];
            for s in 0..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    ys[0] += h * A[s][j] * kj[0];
                    ys[1] += h * A[s][j] * kj[1];
                }
                let ts = t + C[s] * h;
                k[s] = rhs(ts, ys, inside(ts))?;
            }
            let mut y5 = y;
            let mut err = 0.0f64;
            for i in 0..2 {
                let mut d5 = 0.0;
                let mut d4 = 0.0;
                for s in 0..7 {
                    d5 += B5[s] * k[s][i];
                    d4 += B4[s] * k[s][i];
                }
                y5[i] = y[i] + h * d5;
                let tol = rtol * (y[i].abs().max(y5[i].abs()).max(1e-3 * scale[i]));
                err = err.max((h * (d5 - d4)).abs() / tol);
            }
            if !err.is_finite() {
                h *= 0.2;
                continue;
            }
            if err <= 1.0 {
                if y5[0] != 0.0 && y[0] != 0.0 && (y5[0] > 0.0) != (y[0] > 0.0) {
                    zero_count += 1;
                }
                t += h;
                y = y5;
                steps += 1;
                scale[0] = scale[0].max(y[0].abs());
                scale[1] = scale[1].max(y[1].abs());
                let m = y[0].abs().max(y[1].abs());
                if m > RESCALE_AT {
                    y[0] /= m;
                    y[1] /= m;
                    scale[0] /= m;
                    scale[1] /= m;
                }
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
            if h < 1e-14 * (t1 - t0).max(1.0) {
                return Err(Error::Numerical(format!(
                    "shooting step size underflow at r = {:e}",
                    t.exp()
                )));
            }
        }
    }
    Ok(Shot {
        miss: y[0],
        zero_count,
        steps,
    })
}

/// The `n`-th eigenvalue by sweep and bisection on the zero count.
pub fn oracle_eigen(problem: &RadialProblem, n: usize, settings: &ShootSettings) -> Result<ShootingResult> {
    problem.validate()?;
    if n == 0 {
        return Err(Error::config("n", "mode number starts at 1"));
    }
    let enough = |lambda: f64| -> Result<(bool, Shot)> {
        let s = shoot(problem, lambda, settings.rtol)?;
        Ok((s.zero_count >= n, s))
    };

    let mut lo = 0.0;
    let mut hi = settings.lambda_start;
    let (mut ok, mut hi_shot) = enough(hi)?;
    if ok {
        // the eigenvalue lies below the starting value: walk down
        let mut candidate = hi;
        loop {
            candidate *= 0.5;
            if candidate < 1e-12 * settings.lambda_start {
                lo = 0.0;
                break;
            }
            let (o, s) = enough(candidate)?;
            if o {
                hi = candidate;
                hi_shot = s;
            } else {
                lo = candidate;
                break;
            }
        }
    } else {
        while !ok {
            lo = hi;
            hi *= 2.0;
            if hi > settings.lambda_cap {
                return Err(Error::NoBracket {
                    n,
                    lo: settings.lambda_start,
                    hi: settings.lambda_cap,
                });
            }
            let r = enough(hi)?;
            ok = r.0;
            hi_shot = r.1;
        }
    }
    let mut lo_shot = shoot(problem, lo, settings.rtol)?;
    while hi - lo > settings.bisection_width * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (o, s) = enough(mid)?;
        if o {
            hi = mid;
            hi_shot = s;
        } else {
            lo = mid;
            lo_shot = s;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let at = shoot(problem, lambda, settings.rtol)?;
    let certified = lo_shot.miss * hi_shot.miss < 0.0 && lo_shot.zero_count == n - 1;
    Ok(ShootingResult {
        n,
        lambda,
        index: lo_shot.zero_count,
        bracket: (lo, hi),
        steps: at.steps,
        miss: at.miss,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ball(alpha: f64) -> (WeightSpec, f64) {
        (WeightSpec::IndicatorBall { radius: 1.0 }, alpha)
    }

    #[test]
    fn zero_lambda_gives_constant_solution() {
        let g = WeightSpec::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
        };
        let p = RadialProblem {
            dimension: 3,
            alpha: 1.0,
            weight: &g,
            radius: 5.0,
        };
        let s = shoot(&p, 0.0, 1e-12).unwrap();
        assert_eq!(s.miss, 1.0);
        assert_eq!(s.zero_count, 0);
    }

    #[test]
    fn classical_ball_eigenvalues() {
        // oracle: sin(sqrt(lambda) r)/r vanishes at r = 1 for lambda = (k pi)^2
        let (g, alpha) = ball(0.0);
        let p = RadialProblem {
            dimension: 3,
            alpha,
            weight: &g,
            radius: 1.0,
        };
        let s = ShootSettings::default();
        let l1 = oracle_eigen(&p, 1, &s).unwrap();
        let l2 = oracle_eigen(&p, 2, &s).unwrap();
        assert!((l1.lambda - PI * PI).abs() < 1e-8 * PI * PI, "{}", l1.lambda);
        assert!(
            (l2.lambda - 4.0 * PI * PI).abs() < 1e-8 * 4.0 * PI * PI,
            "{}",
            l2.lambda
        );
        assert!(l1.certified && l2.certified);
        assert_eq!(l2.index, 1);

        let (g, alpha) = ball(1e-6);
        let p = RadialProblem {
            dimension: 3,
            alpha,
            weight: &g,
            radius: 1.0,
        };
        let l1 = oracle_eigen(&p, 1, &s).unwrap();
        assert!((l1.lambda - PI * PI).abs() < 1e-5 * PI * PI);
    }

    #[test]
    fn zero_count_is_monotone_for_positive_weight() {
        let g = WeightSpec::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
        };
        let p = RadialProblem {
            dimension: 3,
            alpha: 1.0,
            weight: &g,
            radius: 10.0,
        };
        let mut last = 0;
        for i in 0..40 {
            let lambda = 0.5 * 1.25f64.powi(i);
            let z = shoot(&p, lambda, 1e-10).unwrap().zero_count;
            assert!(z >= last);
            last = z;
        }
        assert!(last >= 4);
    }

    #[test]
    fn gaussian_modes_are_ordered_and_stable() {
        let g = WeightSpec::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
        };
        let p = RadialProblem {
            dimension: 3,
            alpha: 1.0,
            weight: &g,
            radius: 10.0,
        };
        let s = ShootSettings::default();
        let fine = ShootSettings { rtol: 0.5e-12, ..s };
        let mut prev = 0.0;
        for n in 1..=3 {
            let r = oracle_eigen(&p, n, &s).unwrap();
            assert!(r.certified);
            assert!(r.lambda > prev);
            assert!(r.bracket.0 < r.lambda && r.lambda < r.bracket.1);
            prev = r.lambda;
            let r2 = oracle_eigen(&p, n, &fine).unwrap();
            assert!((r2.lambda - r.lambda).abs() <= 1e-8 * r.lambda);
        }
    }

    #[test]
    fn rejects_invalid_problems() {
        let g = WeightSpec::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
        };
        let p = RadialProblem {
            dimension: 2,
            alpha: 1.0,
            weight: &g,
            radius: 1.0,
        };
        assert!(shoot(&p, 1.0, 1e-10).is_err());
        let p = RadialProblem {
            dimension: 3,
            alpha: 1.0,
            weight: &g,
            radius: 1.0,
        };
        assert!(oracle_eigen(&p, 0, &ShootSettings::default()).is_err());
    }
}
