//! The singular coefficient `|x|^alpha` and the weight catalogue.
//!
//! Every weight carries an explicit split `g = g1 + g2 - g_minus` into
//! nonnegative parts: `g1` is meant to lie in `L^{N/(2-alpha)}(R^N)` and
//! `g2` to satisfy `|x - y|^{2-alpha} g2(x) -> 0` as `x -> y` for every `y`
//! and as `|x| -> infinity`. [`verify_condition_g`] samples both properties.
//! All catalogue weights are radial.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::quadrature::{composite, unit_sphere_area, GaussLegendre};
use crate::{Error, Result};

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `|x|^alpha`, zero at the origin.
pub fn eval_alpha_weight(x: &[f64], alpha: f64) -> f64 {
    let r = norm(x);
    if r == 0.0 {
        0.0
    } else {
        r.powf(alpha)
    }
}

/// `h(x) = |x|^{alpha-2} [log(2 + |x|^{2-alpha})]^{(alpha-2)/N}` with `h(0) = 1`.
pub fn eval_remark_h(x: &[f64], dimension: usize, alpha: f64) -> f64 {
    remark_h_radial(norm(x), dimension, alpha)
}

pub fn remark_h_radial(r: f64, dimension: usize, alpha: f64) -> f64 {
    if r == 0.0 {
        return 1.0;
    }
    let e = alpha - 2.0;
    r.powf(e) * (2.0 + r.powf(-e)).ln().powf(e / dimension as f64)
}

/// Pointwise values of the three nonnegative parts of a weight.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct GSplit {
    pub g1: f64,
    pub g2: f64,
    pub gminus: f64,
}

impl GSplit {
    pub fn value(&self) -> f64 {
        (self.g1 + self.g2) - self.gminus
    }

    pub fn positive(&self) -> f64 {
        self.g1 + self.g2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    #[default]
    Linear,
    Nearest,
}

/// A radial weight sampled at increasing radii.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedWeight {
    #[serde(default)]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default)]
    pub interpolation: Interpolation,
    /// Two-column CSV with header `r,g`; loaded into `radii`/`values`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl TabulatedWeight {
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let cols: Vec<&str> = headers.iter().map(str::trim).collect();
        if cols != ["r", "g"] {
            return Err(Error::Parse(format!(
                "{}: expected header `r,g`, found `{}`",
                path.display(),
                cols.join(",")
            )));
        }
        let mut radii = Vec::new();
        let mut values = Vec::new();
        for (line, rec) in reader.records().enumerate() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("{}: bad number on line {}", path.display(), line + 2)))
            };
            radii.push(parse(0)?);
            values.push(parse(1)?);
        }
        let table = TabulatedWeight {
            radii,
            values,
            interpolation: Interpolation::Linear,
            path: Some(path.to_path_buf()),
        };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<()> {
        if self.radii.len() < 2 || self.radii.len() != self.values.len() {
            return Err(Error::config(
                "weight.radii",
                "tabulated weight needs at least two (r, g) samples of equal length",
            ));
        }
        if self.radii[0] < 0.0 || self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "weight.radii",
                "tabulated radii must be nonnegative and strictly increasing",
            ));
        }
        Ok(())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.radii[0], *self.radii.last().unwrap())
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&r) {
            return Err(Error::OutOfRange { value: r, lo, hi });
        }
        let i = self.radii.partition_point(|&x| x <= r).clamp(1, self.radii.len() - 1);
        let (r0, r1) = (self.radii[i - 1], self.radii[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        Ok(match self.interpolation {
            Interpolation::Linear => v0 + (v1 - v0) * (r - r0) / (r1 - r0),
            Interpolation::Nearest => {
                if r - r0 <= r1 - r {
                    v0
                } else {
                    v1
                }
            }
        })
    }
}

/// A weight `g` together with its split into `g1`, `g2` and `g_minus`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightSpec {
    /// `amplitude * exp(-|x|^2 / width^2)`, all in `g1`.
    GaussianBump {
        amplitude: f64,
        width: f64,
    },
    /// Smooth bump supported in `|x| < radius`, equal to `amplitude` at 0; all in `g1`.
    CompactBump {
        radius: f64,
        amplitude: f64,
    },
    /// `+positive_amplitude` on `inner <= |x| <= outer` (assigned to `g2`),
    /// `-|negative_amplitude|` on `outer < |x| <= 2 outer - inner` (`g_minus`).
    SignChangingRing {
        inner_radius: f64,
        outer_radius: f64,
        positive_amplitude: f64,
        negative_amplitude: f64,
    },
    /// Indicator of the closed ball, all in `g1`.
    IndicatorBall {
        radius: f64,
    },
    /// The borderline weight `h`, all in `g2`.
    RemarkH,
    /// `|x|^{alpha-2}` in `g2`: violates the decay requirement at infinity.
    CriticalPower,
    Tabulated(TabulatedWeight),
}

impl WeightSpec {
    pub fn name(&self) -> &'static str {
        match self {
            WeightSpec::GaussianBump { .. } => "gaussian-bump",
            WeightSpec::CompactBump { .. } => "compact-bump",
            WeightSpec::SignChangingRing { .. } => "sign-changing-ring",
            WeightSpec::IndicatorBall { .. } => "indicator-ball",
            WeightSpec::RemarkH => "remark-h",
            WeightSpec::CriticalPower => "critical-power",
            WeightSpec::Tabulated(_) => "tabulated",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!("weight.{field}"), "must be positive and finite"))
            }
        };
        match self {
            WeightSpec::GaussianBump { amplitude, width } => {
                positive("amplitude", *amplitude)?;
                positive("width", *width)
            }
            WeightSpec::CompactBump { radius, amplitude } => {
                positive("radius", *radius)?;
                positive("amplitude", *amplitude)
            }
            WeightSpec::SignChangingRing {
                inner_radius,
                outer_radius,
                positive_amplitude,
                negative_amplitude,
            } => {
                if !(*inner_radius >= 0.0 && outer_radius > inner_radius) {
                    return Err(Error::config(
                        "weight.outer_radius",
                        "ring needs 0 <= inner_radius < outer_radius",
                    ));
                }
                positive("positive_amplitude", *positive_amplitude)?;
                if !negative_amplitude.is_finite() {
                    return Err(Error::config("weight.negative_amplitude", "must be finite"));
                }
                Ok(())
            }
            WeightSpec::IndicatorBall { radius } => positive("radius", *radius),
            WeightSpec::RemarkH | WeightSpec::CriticalPower => Ok(()),
            WeightSpec::Tabulated(t) => t.validate(),
        }
    }

    /// `true` when the split is valid by construction.
    pub fn split_verified(&self) -> bool {
        !matches!(self, WeightSpec::Tabulated(_))
    }

    /// Radii where the weight jumps; quadrature splits there.
    pub fn discontinuities(&self) -> Vec<f64> {
        match self {
            WeightSpec::SignChangingRing {
                inner_radius,
                outer_radius,
                ..
            } => {
                let mut v = vec![*outer_radius, 2.0 * outer_radius - inner_radius];
                if *inner_radius > 0.0 {
                    v.insert(0, *inner_radius);
                }
                v
            }
            WeightSpec::IndicatorBall { radius } => vec![*radius],
            WeightSpec::CompactBump { radius, .. } => vec![*radius],
            WeightSpec::Tabulated(t) => t.radii.clone(),
            _ => Vec::new(),
        }
    }

    /// Split at radius `r` in ambient dimension `dimension`.
    pub fn split_radial(&self, r: f64, dimension: usize, alpha: f64) -> Result<GSplit> {
        let mut s = GSplit::default();
        match self {
            WeightSpec::GaussianBump { amplitude, width } => {
                s.g1 = amplitude * (-(r / width).powi(2)).exp();
            }
            WeightSpec::CompactBump { radius, amplitude } => {
                let t = r / radius;
                if t < 1.0 {
                    s.g1 = amplitude * (1.0 - 1.0 / (1.0 - t * t)).exp();
                }
            }
            WeightSpec::SignChangingRing {
                inner_radius,
                outer_radius,
                positive_amplitude,
                negative_amplitude,
            } => {
                let shell_end = 2.0 * outer_radius - inner_radius;
                if r >= *inner_radius && r <= *outer_radius {
                    s.g2 = *positive_amplitude;
                } else if r > *outer_radius && r <= shell_end {
                    s.gminus = negative_amplitude.abs();
                }
            }
            WeightSpec::IndicatorBall { radius } => {
                if r <= *radius {
                    s.g1 = 1.0;
                }
            }
            WeightSpec::RemarkH => s.g2 = remark_h_radial(r, dimension, alpha),
            WeightSpec::CriticalPower => {
                s.g2 = if r == 0.0 { 1.0 } else { r.powf(alpha - 2.0) };
            }
            WeightSpec::Tabulated(t) => {
                let v = t.eval(r)?;
                if v >= 0.0 {
                    s.g1 = v;
                } else {
                    s.gminus = -v;
                }
            }
        }
        Ok(s)
    }

    pub fn eval_g_split(&self, x: &[f64], alpha: f64) -> Result<GSplit> {
        self.split_radial(norm(x), x.len(), alpha)
    }

    /// `g(x) = g1 + g2 - g_minus`, through the same evaluation path as the split.
    pub fn eval_g(&self, x: &[f64], alpha: f64) -> Result<f64> {
        Ok(self.eval_g_split(x, alpha)?.value())
    }
}

/// Builtin weights with their default parameters.
pub fn catalogue() -> Vec<WeightSpec> {
    vec![
        WeightSpec::GaussianBump {
            amplitude: 1.0,
            width: 1.0,
        },
        WeightSpec::CompactBump {
            radius: 2.0,
            amplitude: 1.0,
        },
        WeightSpec::SignChangingRing {
            inner_radius: 1.0,
            outer_radius: 2.0,
            positive_amplitude: 1.0,
            negative_amplitude: 0.5,
        },
        WeightSpec::IndicatorBall { radius: 1.0 },
        WeightSpec::RemarkH,
        WeightSpec::CriticalPower,
    ]
}

/// Radii and probe centers for [`verify_condition_g`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GSampling {
    pub radii: Vec<f64>,
    pub centers: Vec<Vec<f64>>,
}

impl GSampling {
    /// Radii `10^lo ..= 10^hi` (one per decade) and centers on the first
    /// axis at distances 0, 0.5, 1, 1.5, 2, 2.5 (the origin first).
    pub fn decades(dimension: usize, lo: i32, hi: i32) -> Self {
        let radii = (lo..=hi).map(|k| 10f64.powi(k)).collect();
        let centers = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5]
            .iter()
            .map(|&d| {
                let mut c = vec![0.0; dimension];
                c[0] = d;
                c
            })
            .collect();
        GSampling { radii, centers }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Unverifiable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrability {
    Finite,
    Diverges,
    Unverifiable,
}

/// Shell-by-shell estimate of `int |f|^p dx` over the sampled radii.
#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    pub exponent: f64,
    /// `(radius, int_{|x| < radius} |f|^p dx)` at each sampling radius.
    pub cumulative: Vec<(f64, f64)>,
    pub shells: Vec<f64>,
    /// `(int |f|^p)^{1/p}` over the sampled ball.
    pub norm: f64,
    pub verdict: Integrability,
}

/// Sampled `r -> r^{2-alpha} sup_{|x-y|=r} g2(x)` in its limit order.
#[derive(Debug, Clone, Serialize)]
pub struct DecayProbe {
    /// `None` for the probe at infinity.
    pub center: Option<Vec<f64>>,
    pub samples: Vec<(f64, f64)>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct GReport {
    pub weight: String,
    pub dimension: usize,
    pub alpha: f64,
    pub split_verified: bool,
    pub positive_part_nonzero: bool,
    pub g1_norm: NormEstimate,
    /// Informational: the condition puts no integrability demand on `g2`.
    pub g2_norm: NormEstimate,
    pub local_decay: Vec<DecayProbe>,
    pub decay_at_infinity: DecayProbe,
    pub decay_verdict: Verdict,
    pub verdict: Verdict,
}

// consecutive values (in limit order) must strictly decrease, or stay at 0
fn tail_decreasing(values: &[f64]) -> bool {
    let tail = &values[values.len().saturating_sub(3)..];
    tail.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0))
}

/// Sampled numerical check of the integrability/decay split of `spec`.
pub fn verify_condition_g(spec: &WeightSpec, dimension: usize, alpha: f64, sampling: &GSampling) -> Result<GReport> {
    let radii = &sampling.radii;
    if radii.len() < 2 || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(
            "sampling.radii",
            "radii must be positive and strictly increasing",
        ));
    }
    if radii.last().unwrap() / radii[0] < 1e4 {
        return Err(Error::config("sampling.radii", "radii must span at least 4 decades"));
    }
    let local: Vec<f64> = radii.iter().rev().copied().filter(|&r| r < 1.0).collect();
    let far: Vec<f64> = radii.iter().copied().filter(|&r| r > 1.0).collect();
    if local.len() < 3 || far.len() < 3 {
        return Err(Error::config(
            "sampling.radii",
            "need at least three radii below 1 and three above 1",
        ));
    }
    if sampling.centers.iter().any(|c| c.len() != dimension) {
        return Err(Error::config("sampling.centers", "center dimension differs from N"));
    }

    let tabulated = matches!(spec, WeightSpec::Tabulated(_));
    let part = |r: f64, which: u8| -> Option<f64> {
        spec.split_radial(r, dimension, alpha)
            .ok()
            .map(|s| if which == 1 { s.g1 } else { s.g2 })
    };
    let p = dimension as f64 / (2.0 - alpha);

    let g1_norm = norm_estimate(spec, dimension, p, radii, |r| part(r, 1), tabulated);
    let g2_norm = norm_estimate(spec, dimension, p, radii, |r| part(r, 2), tabulated);

    let mut any_unverifiable = false;
    let mut local_decay = Vec::new();
    for center in &sampling.centers {
        let c = norm(center);
        let mut samples = Vec::with_capacity(local.len());
        let mut ok = true;
        for &r in &local {
            let (lo, hi) = ((c - r).abs(), c + r);
            let mut sup = 0.0f64;
            for i in 0..=64 {
                let s = lo + (hi - lo) * i as f64 / 64.0;
                match part(s, 2) {
                    Some(v) => sup = sup.max(v),
                    None => ok = false,
                }
            }
            samples.push((r, r.powf(2.0 - alpha) * sup));
        }
        let verdict = if !ok {
            any_unverifiable = true;
            Verdict::Unverifiable
        } else if tail_decreasing(&samples.iter().map(|s| s.1).collect::<Vec<_>>()) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        local_decay.push(DecayProbe {
            center: Some(center.clone()),
            samples,
            verdict,
        });
    }

    let mut samples = Vec::with_capacity(far.len());
    let mut far_ok = true;
    for &r in &far {
        match part(r, 2) {
            Some(v) => samples.push((r, r.powf(2.0 - alpha) * v)),
            None => far_ok = false,
        }
    }
    let far_verdict = if !far_ok {
        any_unverifiable = true;
        Verdict::Unverifiable
    } else if tail_decreasing(&samples.iter().map(|s| s.1).collect::<Vec<_>>()) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let decay_at_infinity = DecayProbe {
        center: None,
        samples,
        verdict: far_verdict,
    };

    let mut probes: Vec<f64> = radii.clone();
    probes.push(0.0);
    probes.extend(spec.discontinuities());
    let positive_part_nonzero = probes.iter().any(|&r| {
        spec.split_radial(r, dimension, alpha)
            .map(|s| s.positive() > 0.0)
            .unwrap_or(false)
    });

    let decay_fail = local_decay
        .iter()
        .chain(std::iter::once(&decay_at_infinity))
        .any(|d| d.verdict == Verdict::Fail);
    let decay_verdict = if decay_fail {
        Verdict::Fail
    } else if any_unverifiable || tabulated {
        Verdict::Unverifiable
    } else {
        Verdict::Pass
    };
    let verdict =
        if !positive_part_nonzero || decay_verdict == Verdict::Fail || g1_norm.verdict == Integrability::Diverges {
            Verdict::Fail
        } else if tabulated || decay_verdict == Verdict::Unverifiable {
            Verdict::Unverifiable
        } else {
            Verdict::Pass
        };

    Ok(GReport {
        weight: spec.name().to_string(),
        dimension,
        alpha,
        split_verified: spec.split_verified(),
        positive_part_nonzero,
        g1_norm,
        g2_norm,
        local_decay,
        decay_at_infinity,
        decay_verdict,
        verdict,
    })
}

fn norm_estimate(
    spec: &WeightSpec,
    dimension: usize,
    p: f64,
    radii: &[f64],
    part: impl Fn(f64) -> Option<f64>,
    tabulated: bool,
) -> NormEstimate {
    let rule = GaussLegendre::new(8);
    let omega = unit_sphere_area(dimension);
    let breaks = spec.discontinuities();
    let integrand = |r: f64| -> f64 { part(r).map_or(0.0, |v| omega * v.abs().powf(p) * r.powi(dimension as i32 - 1)) };
    let core = composite(&rule, 0.0, radii[0], &breaks, 4, integrand);
    let mut shells = Vec::with_capacity(radii.len());
    shells.push(core);
    for w in radii.windows(2) {
        shells.push(composite(&rule, w[0], w[1], &breaks, 8, integrand));
    }
    let mut cumulative = Vec::with_capacity(radii.len());
    let mut acc = 0.0;
    for (i, &r) in radii.iter().enumerate() {
        acc += shells[i];
        cumulative.push((r, acc));
    }
    let total = acc;
    let floor = 1e-12 * total.max(f64::MIN_POSITIVE);
    let converging = |last: f64, prev: f64| last <= floor || last <= 0.5 * prev;
    let m = shells.len();
    // shells[1] = [r0, r1] and shells[2] = [r1, r2] are the innermost full decades
    let inner_ok = converging(shells[1], shells[2]);
    let outer_ok = converging(shells[m - 1], shells[m - 2]);
    let verdict = if tabulated {
        Integrability::Unverifiable
    } else if inner_ok && outer_ok && total.is_finite() {
        Integrability::Finite
    } else {
        Integrability::Diverges
    };
    NormEstimate {
        exponent: p,
        cumulative,
        shells,
        norm: total.powf(1.0 / p),
        verdict,
    }
}
