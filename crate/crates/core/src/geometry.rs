//! Planar curves described by their signed curvature in arc length.
//!
//! Operators downstream depend only on `κ(s)` and the length, so the embedding
//! `γ(s)` is never built. Self-intersection of the tube is not checked beyond
//! positivity of the metric factor `1 - εtκ(s)`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;

/// Default number of arc-length samples for generated closed curves.
pub const DEFAULT_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub enum CurveGeometry {
    Closed(ClosedCurve),
    Open(OpenCurve),
}

/// Closed curve of length `ell` with `κ` sampled at `s_i = i·ell/N`, `i < N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    ell: f64,
    samples: Vec<f64>,
    kappa_max: f64,
}

/// Curvature profile of an open curve on the window `[-L, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OpenProfile {
    /// `amp · exp(-s²/width²)`.
    Gaussian { amp: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpenCurve {
    half_length: f64,
    profile: OpenProfile,
    kappa_max: f64,
}

impl ClosedCurve {
    pub fn from_samples(ell: f64, samples: Vec<f64>) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::Argument(format!("curve length must be positive, got {ell}")));
        }
        if samples.is_empty() {
            return Err(Error::Argument("closed curve needs at least one curvature sample".into()));
        }
        let kappa_max = samples.iter().fold(0.0f64, |m, k| m.max(k.abs()));
        Ok(Self { ell, samples, kappa_max })
    }

    pub fn length(&self) -> f64 {
        self.ell
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Samples with the periodic endpoint `κ(ell) = κ(0)` appended.
    pub fn closed_samples(&self) -> Vec<f64> {
        let mut v = self.samples.clone();
        v.push(self.samples[0]);
        v
    }

    /// Trapezoid approximation of `∮κ ds`.
    pub fn total_curvature(&self) -> f64 {
        self.ell / self.samples.len() as f64 * self.samples.iter().sum::<f64>()
    }
}

impl OpenCurve {
    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn profile(&self) -> OpenProfile {
        self.profile
    }

    pub fn kappa(&self, s: f64) -> f64 {
        match self.profile {
            OpenProfile::Gaussian { amp, width } => amp * (-(s / width).powi(2)).exp(),
        }
    }
}

impl CurveGeometry {
    pub fn kappa_max(&self) -> f64 {
        match self {
            CurveGeometry::Closed(c) => c.kappa_max,
            CurveGeometry::Open(o) => o.kappa_max,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, CurveGeometry::Closed(_))
    }

    /// Length of the closed curve, or of the window `2L` for an open one.
    pub fn period(&self) -> f64 {
        match self {
            CurveGeometry::Closed(c) => c.ell,
            CurveGeometry::Open(o) => 2.0 * o.half_length,
        }
    }

    /// `(origin, κ samples)` of the curvature on a uniform periodic grid
    /// `origin + i·period/n`; closed curves with `n` different from their
    /// stored size are resampled by trigonometric interpolation.
    pub fn periodic_samples(&self, n: usize) -> Result<(f64, Vec<f64>)> {
        if n == 0 {
            return Err(Error::Argument("sample count must be positive".into()));
        }
        match self {
            CurveGeometry::Closed(c) => {
                if c.samples.len() == n {
                    Ok((0.0, c.samples.clone()))
                } else {
                    Ok((0.0, trig_resample(&c.samples, n)?))
                }
            }
            CurveGeometry::Open(o) => {
                let h = 2.0 * o.half_length / n as f64;
                let v = (0..n).map(|i| o.kappa(-o.half_length + i as f64 * h)).collect();
                Ok((-o.half_length, v))
            }
        }
    }
}

/// Band-limited resampling of a periodic sequence to `n` points.
fn trig_resample(x: &[f64], n: usize) -> Result<Vec<f64>> {
    use crate::numerics::{fft_forward, fft_inverse};
    use num_complex::Complex64;
    let m = x.len();
    let input: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let c = fft_forward(&input)?;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    // keep |r| < min(m, n)/2, splitting a shared Nyquist term symmetrically
    let half = m.min(n) / 2;
    for r in 0..=half {
        let w = if 2 * r == m.min(n) { 0.5 } else { 1.0 };
        if r == 0 {
            out[0] = c[0];
            continue;
        }
        out[r] += c[r] * w;
        out[n - r] += c[m - r] * w;
    }
    Ok(fft_inverse(&out)?.iter().map(|z| z.re).collect())
}

pub fn circle(radius: f64, ns: usize) -> Result<CurveGeometry> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Argument(format!("radius must be positive, got {radius}")));
    }
    if ns == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    Ok(CurveGeometry::Closed(ClosedCurve::from_samples(
        TAU * radius,
        vec![1.0 / radius; ns],
    )?))
}

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson slopes.
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut d = vec![0.0; n];
        d[0] = delta[0];
        d[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        Self { x, y, d }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

/// Result of building an ellipse, with the quantities used to check it.
#[derive(Debug, Clone)]
pub struct EllipseConstruction {
    pub geometry: CurveGeometry,
    /// Perimeter from composite Gauss–Legendre quadrature.
    pub perimeter: f64,
    /// `∮κ ds` on the fine parameter grid, before resampling.
    pub total_curvature_parametric: f64,
}

/// Ellipse with semi-axes `a` (along x) and `b`, sampled uniformly in arc length.
pub fn ellipse(a: f64, b: f64, ns: usize) -> Result<CurveGeometry> {
    Ok(ellipse_construction(a, b, ns)?.geometry)
}

pub fn ellipse_construction(a: f64, b: f64, ns: usize) -> Result<EllipseConstruction> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Argument(format!("ellipse axes must be positive, got a={a}, b={b}")));
    }
    if ns == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let speed = |th: f64| (a * a * th.sin().powi(2) + b * b * th.cos().powi(2)).sqrt();
    let kappa = |th: f64| a * b / speed(th).powi(3);
    let rule = gauss_legendre(10)?;
    let panels = (16 * ns).max(4096);
    let dth = TAU / panels as f64;
    let mut theta = Vec::with_capacity(panels + 1);
    let mut arc = Vec::with_capacity(panels + 1);
    theta.push(0.0);
    arc.push(0.0);
    let mut total_k = 0.0;
    for j in 0..panels {
        let t0 = j as f64 * dth;
        let t1 = t0 + dth;
        let ds = rule.integrate_on(t0, t1, speed);
        arc.push(arc[j] + ds);
        theta.push(t1);
        total_k += dth * kappa(t0) * speed(t0);
    }
    let ell = arc[panels];
    let inverse = Pchip::new(arc.clone(), theta.clone());
    let samples = (0..ns)
        .map(|i| {
            let target = ell * i as f64 / ns as f64;
            let mut th = inverse.eval(target);
            // Newton on s(θ) = target, measuring s from the nearest fine node
            for _ in 0..8 {
                let j = ((th / dth).floor() as usize).min(panels - 1);
                let s = arc[j] + rule.integrate_on(theta[j], th, speed);
                let step = (s - target) / speed(th);
                th -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            kappa(th)
        })
        .collect();
    let geometry = CurveGeometry::Closed(ClosedCurve::from_samples(ell, samples)?);
    Ok(EllipseConstruction {
        geometry,
        perimeter: ell,
        total_curvature_parametric: total_k,
    })
}

/// Open line bent by a Gaussian curvature bump on `[-L, L]`.
pub fn bump_line(amp: f64, width: f64, half_length: f64) -> Result<CurveGeometry> {
    if !amp.is_finite() {
        return Err(Error::Argument(format!("amplitude must be finite, got {amp}")));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Argument(format!("bump width must be positive, got {width}")));
    }
    if !(half_length.is_finite() && half_length >= 8.0 * width) {
        return Err(Error::Argument(format!(
            "window L={half_length} too small for width {width}: need L >= 8 width"
        )));
    }
    let curve = OpenCurve {
        half_length,
        profile: OpenProfile::Gaussian { amp, width },
        kappa_max: amp.abs(),
    };
    if amp != 0.0 && curve.kappa(half_length).abs() >= 1e-10 * amp.abs() {
        return Err(Error::Argument(format!(
            "curvature tail at the window edge is not negligible (L={half_length}, width={width})"
        )));
    }
    Ok(CurveGeometry::Open(curve))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValidationCheck {
    FiniteCurvature,
    TotalCurvature,
    MetricPositivity,
}

impl fmt::Display for ValidationCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValidationCheck::FiniteCurvature => "finite curvature",
            ValidationCheck::TotalCurvature => "total curvature 2π",
            ValidationCheck::MetricPositivity => "metric positivity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: ValidationCheck,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub epsilon: Option<f64>,
    pub outcomes: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> Vec<ValidationCheck> {
        self.outcomes.iter().filter(|o| !o.passed).map(|o| o.check).collect()
    }

    /// `Ok(())` when every check passed, otherwise a geometry error carrying the report.
    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            Err(Error::Geometry(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed: Vec<String> = self
            .outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| format!("{} ({})", o.check, o.detail))
            .collect();
        if failed.is_empty() {
            write!(f, "all checks passed")
        } else {
            write!(f, "{}", failed.join("; "))
        }
    }
}

fn shape_outcomes(geom: &CurveGeometry) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let finite = geom.kappa_max().is_finite();
    out.push(CheckOutcome {
        check: ValidationCheck::FiniteCurvature,
        passed: finite,
        detail: format!("kappa_max = {}", geom.kappa_max()),
    });
    if let CurveGeometry::Closed(c) = geom {
        let total = c.total_curvature();
        let tol = 1e-8 * (1.0 + c.ell);
        out.push(CheckOutcome {
            check: ValidationCheck::TotalCurvature,
            passed: (total - TAU).abs() <= tol,
            detail: format!("∮κ = {total}, deviation {:e}, tolerance {tol:e}", (total - TAU).abs()),
        });
    }
    out
}

/// Width-independent checks: finite curvature and, for closed curves, `∮κ = 2π`.
pub fn validate_shape(geom: &CurveGeometry) -> ValidationReport {
    ValidationReport {
        epsilon: None,
        outcomes: shape_outcomes(geom),
    }
}

/// Shape checks plus metric positivity `ε·kappa_max < 1`.
pub fn validate(geom: &CurveGeometry, epsilon: f64) -> Result<ValidationReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Argument(format!("width must be positive, got {epsilon}")));
    }
    let mut outcomes = shape_outcomes(geom);
    let product = epsilon * geom.kappa_max();
    outcomes.push(CheckOutcome {
        check: ValidationCheck::MetricPositivity,
        passed: product < 1.0,
        detail: format!("epsilon * kappa_max = {product}"),
    });
    Ok(ValidationReport {
        epsilon: Some(epsilon),
        outcomes,
    })
}

/// On-disk JSON form of a geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeometryDocument {
    Closed { ell: f64, samples: Vec<f64> },
    Open {
        #[serde(rename = "L")]
        half_length: f64,
        amp: f64,
        width: f64,
    },
}

impl From<&CurveGeometry> for GeometryDocument {
    fn from(g: &CurveGeometry) -> Self {
        match g {
            CurveGeometry::Closed(c) => GeometryDocument::Closed {
                ell: c.ell,
                samples: c.samples.clone(),
            },
            CurveGeometry::Open(o) => match o.profile {
                OpenProfile::Gaussian { amp, width } => GeometryDocument::Open {
                    half_length: o.half_length,
                    amp,
                    width,
                },
            },
        }
    }
}

impl GeometryDocument {
    pub fn into_geometry(self) -> Result<CurveGeometry> {
        match self {
            GeometryDocument::Closed { ell, samples } => {
                if samples.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Argument("curvature samples must be finite".into()));
                }
                Ok(CurveGeometry::Closed(ClosedCurve::from_samples(ell, samples)?))
            }
            GeometryDocument::Open { half_length, amp, width } => bump_line(amp, width, half_length),
        }
    }
}

/// `∫κ² ds` of the Gaussian profile, `amp²·width·sqrt(π/2)`.
pub fn gaussian_kappa_squared_integral(amp: f64, width: f64) -> f64 {
    amp * amp * width * (PI / 2.0).sqrt()
}
