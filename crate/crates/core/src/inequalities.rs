//! Quotient checks for the weighted inequalities
//!
//! ```text
//! (int |x|^{-bq} |u|^q)^{p/q} <= C_{a,b} int |x|^{-ap} |grad u|^p     (CKN)
//! int u^2 / |x|^{2-alpha}     <= (2/(N-2+alpha))^2 int |x|^alpha |grad u|^2
//! (int |u|^{2*})^{2/2*}       <= C int |x|^alpha |grad u|^2,   2* = 2N/(N-2+alpha)
//! ```
//!
//! on discrete vectors (through the assembled matrices) and on radial
//! profiles (through 1D quadrature with measure `|S^{N-1}| r^{N-1} dr`).

use serde::Serialize;

use crate::assembly::{DiscreteOperatorPair, Geometry};
use crate::quadrature::{composite, unit_sphere_area, GaussLegendre};
use crate::{Error, Result};

/// `2N / (N - 2 + alpha)`.
pub fn critical_exponent(dimension: usize, alpha: f64) -> f64 {
    2.0 * dimension as f64 / (dimension as f64 - 2.0 + alpha)
}

/// `(2 / (N - 2 + alpha))^2`.
pub fn hardy_constant(dimension: usize, alpha: f64) -> f64 {
    let d = 2.0 / (dimension as f64 - 2.0 + alpha);
    d * d
}

/// Exponents of the CKN inequality; `q` is always derived from the others.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CknParams {
    pub dimension: usize,
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub q: f64,
}

impl CknParams {
    pub fn new(dimension: usize, p: f64, a: f64, b: f64) -> Result<Self> {
        let n = dimension as f64;
        if dimension < 1 {
            return Err(Error::config("ckn.dimension", "N must be positive"));
        }
        if !(p > 1.0 && p < n) {
            return Err(Error::config(
                "ckn.p",
                format!("constraint 1 < p < N violated: p = {p}, N = {n}"),
            ));
        }
        if !(a < (n - p) / p) {
            return Err(Error::config(
                "ckn.a",
                format!(
                    "constraint a < (N - p)/p violated: a = {a}, (N - p)/p = {}",
                    (n - p) / p
                ),
            ));
        }
        if !(a <= b) {
            return Err(Error::config(
                "ckn.b",
                format!("constraint a <= b violated: a = {a}, b = {b}"),
            ));
        }
        if !(b <= a + 1.0) {
            return Err(Error::config(
                "ckn.b",
                format!("constraint b <= a + 1 violated: a = {a}, b = {b}"),
            ));
        }
        let q = n * p / (n - p * (1.0 + a - b));
        Ok(CknParams { dimension, p, a, b, q })
    }

    /// As [`CknParams::new`], rejecting a supplied `q` that differs from the
    /// derived one by more than `1e-12`.
    pub fn with_q(dimension: usize, p: f64, a: f64, b: f64, q: f64) -> Result<Self> {
        let params = Self::new(dimension, p, a, b)?;
        if !((params.q - q).abs() <= 1e-12 * params.q.abs().max(1.0)) {
            return Err(Error::config(
                "ckn.q",
                format!(
                    "q = Np/(N - p(1 + a - b)) = {} does not match the supplied {q}",
                    params.q
                ),
            ));
        }
        Ok(params)
    }

    /// `a = -alpha/2, b = 1 - alpha/2, p = 2`: the weighted Hardy instance.
    pub fn hardy(dimension: usize, alpha: f64) -> Result<Self> {
        Self::new(dimension, 2.0, -alpha / 2.0, 1.0 - alpha / 2.0)
    }

    /// `a = -alpha/2, b = 0, p = 2`: the weighted Sobolev instance.
    pub fn sobolev(dimension: usize, alpha: f64) -> Result<Self> {
        Self::new(dimension, 2.0, -alpha / 2.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckVerdict {
    Pass,
    Fail,
    /// Zero test function: the quotient is undefined.
    Undefined,
    /// No reference constant; the finite quotient is recorded.
    Recorded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityEntry {
    pub name: String,
    pub left: f64,
    /// The integral on the right, without any constant.
    pub right: f64,
    pub quotient: f64,
    pub constant: Option<f64>,
    /// `constant (1 + slack) - quotient` when a constant is known.
    pub margin: Option<f64>,
    pub verdict: CheckVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub inequality: String,
    pub entries: Vec<InequalityEntry>,
    pub min_quotient: f64,
    pub max_quotient: f64,
    /// Relative spread `(max - min) / |first|` of the quotients.
    pub spread: f64,
    pub verdict: CheckVerdict,
}

impl InequalityReport {
    fn from_entries(inequality: &str, entries: Vec<InequalityEntry>) -> Self {
        let defined: Vec<f64> = entries
            .iter()
            .filter(|e| e.verdict != CheckVerdict::Undefined)
            .map(|e| e.quotient)
            .collect();
        let min_quotient = defined.iter().copied().fold(f64::INFINITY, f64::min);
        let max_quotient = defined.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let spread = defined
            .first()
            .map_or(f64::NAN, |&q0| (max_quotient - min_quotient) / q0.abs());
        let verdict = if entries.iter().any(|e| e.verdict == CheckVerdict::Fail) {
            CheckVerdict::Fail
        } else if defined.is_empty() {
            CheckVerdict::Undefined
        } else if entries.iter().any(|e| e.verdict == CheckVerdict::Pass) {
            CheckVerdict::Pass
        } else {
            CheckVerdict::Recorded
        };
        InequalityReport {
            inequality: inequality.to_string(),
            entries,
            min_quotient,
            max_quotient,
            spread,
            verdict,
        }
    }

    pub fn merge(inequality: &str, reports: Vec<InequalityReport>) -> Self {
        Self::from_entries(inequality, reports.into_iter().flat_map(|r| r.entries).collect())
    }
}

fn entry(name: &str, left: f64, right: f64, constant: Option<f64>, slack: f64) -> InequalityEntry {
    if right == 0.0 && left == 0.0 {
        return InequalityEntry {
            name: name.to_string(),
            left,
            right,
            quotient: f64::NAN,
            constant,
            margin: None,
            verdict: CheckVerdict::Undefined,
        };
    }
    let quotient = left / right;
    let margin = constant.map(|c| c * (1.0 + slack) - quotient);
    let verdict = match margin {
        Some(m) if m >= 0.0 => CheckVerdict::Pass,
        Some(_) => CheckVerdict::Fail,
        None if quotient.is_finite() && quotient > 0.0 => CheckVerdict::Recorded,
        None => CheckVerdict::Fail,
    };
    InequalityEntry {
        name: name.to_string(),
        left,
        right,
        quotient,
        constant,
        margin,
        verdict,
    }
}

/// Default relative allowance for quadrature error in discrete checks.
pub const DEFAULT_SLACK: f64 = 1e-3;

/// `hardy_inner(u, u) / energy_inner(u, u)` against the Hardy constant.
pub fn check_hardy(pair: &DiscreteOperatorPair, u: &[f64], slack: f64) -> Result<InequalityReport> {
    let left = pair.hardy_inner(u, u)?;
    let right = pair.energy_inner(u, u)?;
    let c = hardy_constant(pair.dimension, pair.alpha);
    Ok(InequalityReport::from_entries(
        "hardy",
        vec![entry("u", left, right, Some(c), slack)],
    ))
}

/// Dilation factors used by [`check_sobolev`].
pub const DILATIONS: [f64; 3] = [0.5, 1.0, 2.0];

/// `||u||_{2*}^2 / energy_inner(u, u)` for `u` and its dilates `u(t x)`.
pub fn check_sobolev(pair: &DiscreteOperatorPair, u: &[f64]) -> Result<InequalityReport> {
    let p = critical_exponent(pair.dimension, pair.alpha);
    let mut entries = Vec::new();
    for t in DILATIONS {
        let scaled;
        let target = if t == 1.0 {
            pair
        } else {
            scaled = pair.dilated(t)?;
            &scaled
        };
        let l = target.lp_norm(u, p)?;
        let right = target.energy_inner(u, u)?;
        entries.push(entry(&format!("t={t}"), l * l, right, None, 0.0));
    }
    Ok(InequalityReport::from_entries("sobolev", entries))
}

/// A radial test function `u(|x|)` supported in `[0, support]`.
pub trait RadialProfile {
    fn name(&self) -> String;
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    /// Radii where `u` or `u'` is not smooth.
    fn breakpoints(&self) -> Vec<f64>;
    fn support(&self) -> f64;
}

/// Continuous piecewise-linear profile through `(nodes[i], values[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseLinear {
    /// The radial finite element function with coefficient vector `u`
    /// (zero at the Dirichlet node).
    pub fn from_pair(pair: &DiscreteOperatorPair, u: &[f64]) -> Result<Self> {
        let Geometry::Radial(mesh) = &pair.geometry else {
            return Err(Error::config(
                "geometry",
                "piecewise-linear profiles need a radial mesh",
            ));
        };
        if u.len() != pair.order() {
            return Err(Error::DimensionMismatch {
                expected: pair.order(),
                found: u.len(),
            });
        }
        let mut values = u.to_vec();
        values.push(0.0);
        Ok(PiecewiseLinear {
            nodes: mesh.nodes.clone(),
            values,
        })
    }

    fn locate(&self, r: f64) -> Option<usize> {
        if r < 0.0 || r > *self.nodes.last()? {
            return None;
        }
        let i = self.nodes.partition_point(|&x| x <= r);
        Some(i.clamp(1, self.nodes.len() - 1) - 1)
    }
}

impl RadialProfile for PiecewiseLinear {
    fn name(&self) -> String {
        "piecewise-linear".into()
    }

    fn value(&self, r: f64) -> f64 {
        self.locate(r).map_or(0.0, |e| {
            let (a, b) = (self.nodes[e], self.nodes[e + 1]);
            let t = (r - a) / (b - a);
            self.values[e] * (1.0 - t) + self.values[e + 1] * t
        })
    }

    fn derivative(&self, r: f64) -> f64 {
        self.locate(r).map_or(0.0, |e| {
            (self.values[e + 1] - self.values[e]) / (self.nodes[e + 1] - self.nodes[e])
        })
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.nodes.clone()
    }

    fn support(&self) -> f64 {
        *self.nodes.last().unwrap_or(&0.0)
    }
}

/// `exp(-r^2/w^2) - exp(-R^2/w^2)` on `[0, R]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGaussian {
    pub width: f64,
    pub radius: f64,
}

impl RadialProfile for TruncatedGaussian {
    fn name(&self) -> String {
        format!("truncated-gaussian(w={})", self.width)
    }

    fn value(&self, r: f64) -> f64 {
        if r > self.radius {
            return 0.0;
        }
        (-(r / self.width).powi(2)).exp() - (-(self.radius / self.width).powi(2)).exp()
    }

    fn derivative(&self, r: f64) -> f64 {
        if r > self.radius {
            return 0.0;
        }
        -2.0 * r / (self.width * self.width) * (-(r / self.width).powi(2)).exp()
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.radius]
    }

    fn support(&self) -> f64 {
        self.radius
    }
}

/// `(1 - (r/rho)^2)^2` on `[0, rho]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub radius: f64,
}

impl RadialProfile for Bump {
    fn name(&self) -> String {
        format!("bump(rho={})", self.radius)
    }

    fn value(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        let s = 1.0 - (r / self.radius).powi(2);
        s * s
    }

    fn derivative(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        let s = 1.0 - (r / self.radius).powi(2);
        -4.0 * r / (self.radius * self.radius) * s
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.radius]
    }

    fn support(&self) -> f64 {
        self.radius
    }
}

/// Hardy near-optimizer: `r0^{-beta+eps}` on `[0, r0]`, `r^{-beta+eps}` on
/// `[r0, 1]`, `2 - r` on `[1, 2]`, with `beta = (N - 2 + alpha)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCutoff {
    pub dimension: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub r0: f64,
}

impl PowerCutoff {
    pub fn new(dimension: usize, alpha: f64, epsilon: f64) -> Self {
        PowerCutoff {
            dimension,
            alpha,
            epsilon,
            r0: 1e-6,
        }
    }

    pub fn beta(&self) -> f64 {
        (self.dimension as f64 - 2.0 + self.alpha) / 2.0
    }

    fn exponent(&self) -> f64 {
        -self.beta() + self.epsilon
    }
}

impl RadialProfile for PowerCutoff {
    fn name(&self) -> String {
        format!("power-cutoff(eps={})", self.epsilon)
    }

    fn value(&self, r: f64) -> f64 {
        if r < self.r0 {
            self.r0.powf(self.exponent())
        } else if r <= 1.0 {
            r.powf(self.exponent())
        } else if r <= 2.0 {
            2.0 - r
        } else {
            0.0
        }
    }

    fn derivative(&self, r: f64) -> f64 {
        if r < self.r0 {
            0.0
        } else if r <= 1.0 {
            self.exponent() * r.powf(self.exponent() - 1.0)
        } else if r <= 2.0 {
            -1.0
        } else {
            0.0
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.r0, 1.0, 2.0]
    }

    fn support(&self) -> f64 {
        2.0
    }
}

/// Quadrature resolution for profile integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileQuadrature {
    pub points: usize,
    /// Panels per smooth piece.
    pub panels: usize,
}

impl Default for ProfileQuadrature {
    fn default() -> Self {
        ProfileQuadrature { points: 16, panels: 8 }
    }
}

/// Both sides of the CKN inequality for a radial profile.
pub fn ckn_sides(params: &CknParams, profile: &dyn RadialProfile, quad: &ProfileQuadrature) -> (f64, f64) {
    let n = params.dimension as f64;
    let omega = unit_sphere_area(params.dimension);
    let rule = GaussLegendre::new(quad.points);
    let mut breaks = profile.breakpoints();
    breaks.sort_by(f64::total_cmp);
    let support = profile.support();
    let lhs_int = composite(&rule, 0.0, support, &breaks, quad.panels, |r| {
        r.powf(-params.b * params.q + n - 1.0) * profile.value(r).abs().powf(params.q)
    });
    let rhs_int = composite(&rule, 0.0, support, &breaks, quad.panels, |r| {
        r.powf(-params.a * params.p + n - 1.0) * profile.derivative(r).abs().powf(params.p)
    });
    ((omega * lhs_int).powf(params.p / params.q), omega * rhs_int)
}

/// CKN quotient of a radial profile; `constant` (when known) turns the
/// recorded quotient into a pass/fail check.
pub fn check_ckn_radial(
    params: &CknParams,
    profiles: &[&dyn RadialProfile],
    quad: &ProfileQuadrature,
    constant: Option<f64>,
    slack: f64,
) -> InequalityReport {
    let entries = profiles
        .iter()
        .map(|p| {
            let (l, r) = ckn_sides(params, *p, quad);
            entry(&p.name(), l, r, constant, slack)
        })
        .collect();
    InequalityReport::from_entries("ckn", entries)
}

/// Relative gaps between the CKN quotient of the finite element function `u`
/// and the matrix-based Hardy and Sobolev quotients of the same vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionGaps {
    pub hardy: f64,
    pub sobolev: f64,
}

pub fn reduction_gaps(pair: &DiscreteOperatorPair, u: &[f64]) -> Result<ReductionGaps> {
    let profile = PiecewiseLinear::from_pair(pair, u)?;
    let quad = ProfileQuadrature { points: 16, panels: 1 };
    let (hl, hr) = ckn_sides(&CknParams::hardy(pair.dimension, pair.alpha)?, &profile, &quad);
    let (sl, sr) = ckn_sides(&CknParams::sobolev(pair.dimension, pair.alpha)?, &profile, &quad);
    let hq = check_hardy(pair, u, DEFAULT_SLACK)?.entries[0].quotient;
    let p = critical_exponent(pair.dimension, pair.alpha);
    let l = pair.lp_norm(u, p)?;
    let sq = l * l / pair.energy_inner(u, u)?;
    Ok(ReductionGaps {
        hardy: (hl / hr - hq).abs() / hq,
        sobolev: (sl / sr - sq).abs() / sq,
    })
}

/// `|Q_h - Q| / Q` for the Hardy quotient `Q` of a smooth profile and the
/// quotient `Q_h` of its nodal interpolant on `pair`.
pub fn hardy_interpolation_gap(pair: &DiscreteOperatorPair, profile: &dyn RadialProfile) -> Result<f64> {
    let params = CknParams::hardy(pair.dimension, pair.alpha)?;
    let (l, r) = ckn_sides(&params, profile, &ProfileQuadrature { points: 20, panels: 64 });
    let exact = l / r;
    let u = pair.interpolate(|r| profile.value(r));
    let discrete = pair.hardy_inner(&u, &u)? / pair.energy_inner(&u, &u)?;
    Ok((discrete - exact).abs() / exact)
}

/// `u(r / factor)`: a profile rescaled in radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledProfile<P> {
    pub inner: P,
    pub factor: f64,
}

impl<P: RadialProfile> RadialProfile for ScaledProfile<P> {
    fn name(&self) -> String {
        format!("{}@{}", self.inner.name(), self.factor)
    }

    fn value(&self, r: f64) -> f64 {
        self.inner.value(r / self.factor)
    }

    fn derivative(&self, r: f64) -> f64 {
        self.inner.derivative(r / self.factor) / self.factor
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().iter().map(|b| b * self.factor).collect()
    }

    fn support(&self) -> f64 {
        self.inner.support() * self.factor
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_radial;
    use crate::mesh::RadialMesh;
    use crate::weights::WeightSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponent_and_constant_examples() {
        assert_eq!(critical_exponent(3, 1.0), 3.0);
        assert!((critical_exponent(3, 1e-12) - 6.0).abs() < 1e-10);
        assert!((critical_exponent(4, 0.5) - 3.2).abs() < 1e-15);
        assert_eq!(hardy_constant(3, 1.0), 1.0);
        assert_eq!(hardy_constant(4, 0.0), 1.0);
        assert!((hardy_constant(5, 0.5) - (2.0f64 / 3.5).powi(2)).abs() < 1e-15);
        assert!((hardy_constant(5, 0.5) - 0.3265).abs() < 1e-4);
    }

    #[test]
    fn ckn_parameter_constraints() {
        assert_eq!(CknParams::new(3, 2.0, 0.0, 0.0).unwrap().q, 6.0);
        assert_eq!(CknParams::new(3, 2.0, 0.0, 1.0).unwrap().q, 2.0);
        assert_eq!(CknParams::hardy(3, 1.0).unwrap().q, 2.0);
        assert_eq!(CknParams::sobolev(3, 1.0).unwrap().q, 3.0);
        assert!(CknParams::with_q(3, 2.0, 0.0, 0.0, 6.0).is_ok());
        let msg = CknParams::with_q(3, 2.0, 0.0, 0.0, 5.9).unwrap_err().to_string();
        assert!(msg.contains("does not match"));
        let msg = CknParams::new(3, 2.0, 0.6, 1.0).unwrap_err().to_string();
        assert!(msg.contains("a < (N - p)/p"), "{msg}");
        let msg = CknParams::new(3, 2.0, 0.0, 1.5).unwrap_err().to_string();
        assert!(msg.contains("b <= a + 1"), "{msg}");
        let msg = CknParams::new(3, 2.0, 0.2, 0.1).unwrap_err().to_string();
        assert!(msg.contains("a <= b"), "{msg}");
        assert!(CknParams::new(3, 3.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn power_cutoff_matches_closed_form() {
        // oracle: hardy side = r0^{2 eps}/(2 beta) + (1 - r0^{2 eps})/(2 eps) + tail,
        // energy side = (beta - eps)^2 (1 - r0^{2 eps})/(2 eps) + tail, all over 4 pi
        let (n, alpha) = (3, 1.0);
        let params = CknParams::hardy(n, alpha).unwrap();
        for eps in [0.4, 0.1, 0.01] {
            let p = PowerCutoff::new(n, alpha, eps);
            let beta = p.beta();
            let r0: f64 = p.r0;
            let s = r0.powf(2.0 * eps);
            // tails by composite Simpson on [1, 2]
            let m = 20_000;
            let h = 1.0 / m as f64;
            let simpson = |f: &dyn Fn(f64) -> f64| {
                let mut acc = f(1.0) + f(2.0);
                for i in 1..m {
                    let r = 1.0 + i as f64 * h;
                    acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(r);
                }
                acc * h / 3.0
            };
            let tail_h = simpson(&|r: f64| r.powf(alpha - 2.0 + 2.0) * (2.0 - r).powi(2));
            let tail_e = simpson(&|r: f64| r.powf(alpha + 2.0));
            let hardy = s / (2.0 * beta) + (1.0 - s) / (2.0 * eps) + tail_h;
            let energy = (beta - eps).powi(2) * (1.0 - s) / (2.0 * eps) + tail_e;
            let (l, r) = ckn_sides(&params, &p, &ProfileQuadrature::default());
            let omega = 4.0 * std::f64::consts::PI;
            assert!((l - omega * hardy).abs() < 1e-9 * l, "eps {eps}");
            assert!((r - omega * energy).abs() < 1e-9 * r, "eps {eps}");
        }
    }

    #[test]
    fn near_optimizers_increase_toward_the_constant() {
        for alpha in [0.5, 1.0, 1.5] {
            let params = CknParams::hardy(3, alpha).unwrap();
            let c = hardy_constant(3, alpha);
            let mut last = 0.0;
            let beta = (1.0 + alpha) / 2.0;
            for f in [0.4, 0.2, 0.1, 0.05, 0.02, 0.01] {
                let p = PowerCutoff::new(3, alpha, f * beta);
                let (l, r) = ckn_sides(&params, &p, &ProfileQuadrature::default());
                let q = l / r;
                assert!(q > last, "alpha {alpha} f {f}");
                assert!(q <= c * (1.0 + DEFAULT_SLACK));
                last = q;
            }
            assert!(last > 0.5 * c);
        }
    }

    fn pair(alpha: f64, m: usize) -> DiscreteOperatorPair {
        let mesh = RadialMesh::new(6.0, m, 1.005f64.powf(512.0 / m as f64)).unwrap();
        assemble_radial(
            &mesh,
            3,
            alpha,
            &WeightSpec::GaussianBump {
                amplitude: 1.0,
                width: 1.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn discrete_hardy_holds_for_random_vectors() {
        let pr = pair(1.0, 256);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let u: Vec<f64> = (0..pr.order()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let rep = check_hardy(&pr, &u, DEFAULT_SLACK).unwrap();
            assert_eq!(rep.verdict, CheckVerdict::Pass);
        }
        let zero = vec![0.0; pr.order()];
        assert_eq!(
            check_hardy(&pr, &zero, DEFAULT_SLACK).unwrap().verdict,
            CheckVerdict::Undefined
        );
    }

    #[test]
    fn sobolev_quotient_is_scale_and_dilation_invariant() {
        let pr = pair(1.0, 256);
        let u = pr.interpolate(|r| (-r * r).exp() - (-36.0f64).exp());
        let rep = check_sobolev(&pr, &u).unwrap();
        assert!(rep.spread <= 2e-2);
        assert!(rep.entries.iter().all(|e| e.quotient > 0.0));
        let cu: Vec<f64> = u.iter().map(|x| -7.5 * x).collect();
        let rep2 = check_sobolev(&pr, &cu).unwrap();
        let (a, b) = (rep.entries[1].quotient, rep2.entries[1].quotient);
        assert!((a - b).abs() <= 1e-13 * a);
    }

    #[test]
    fn reductions_agree_with_matrix_quotients() {
        for alpha in [0.5, 1.0, 1.5] {
            let pr = pair(alpha, 512);
            let u = pr.interpolate(|r| (1.0 - (r / 6.0).powi(2)).powi(2));
            let gaps = reduction_gaps(&pr, &u).unwrap();
            assert!(gaps.hardy <= 1e-8, "alpha {alpha} {gaps:?}");
            assert!(gaps.sobolev <= 1e-8, "alpha {alpha} {gaps:?}");
        }
    }

    #[test]
    fn interpolation_gap_shrinks() {
        let profile = TruncatedGaussian {
            width: 1.0,
            radius: 6.0,
        };
        let coarse = hardy_interpolation_gap(&pair(1.0, 128), &profile).unwrap();
        let fine = hardy_interpolation_gap(&pair(1.0, 512), &profile).unwrap();
        assert!(fine * 2.0 <= coarse, "{coarse} {fine}");
    }
}
