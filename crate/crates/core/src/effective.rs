//! One-dimensional effective operators governing the second-order term of
//! the thin-width eigenvalue asymptotics.
//!
//! Two models are built: the Schrödinger model `(D_s + flux)² - κ²/π²` and
//! the Weyl quantization of the full effective symbol
//! `ν₁(ξ, εm) + εκ(s)ξ·M(ξ, εm)` on the Fourier lattice `ξ_p = ε(2πp/ℓ + π/ℓ)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{validate, validate_shape, CurveGeometry};
use crate::numerics::{
    fft_forward, hermitian_eigenvalues, symmetric_tridiagonal_eigenvalues, HermitianMatrix,
};
use crate::transverse::{momentum_m, nu, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    SchrodingerTaylor,
    FullSymbolWeyl,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::SchrodingerTaylor => "schrodinger_taylor",
            Model::FullSymbolWeyl => "full_symbol_weyl",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Plane waves `e^{2πips/ℓ}` for `p = p_min..=p_max`.
    Fourier { p_min: i64, p_max: i64, ell: f64 },
    /// Interior nodes `-L + i·h`, `i = 1..=n`, with Dirichlet ends.
    Grid { h: f64, half_length: f64, n: usize },
}

/// Momentum shift in the closed-curve Schrödinger model, in units of `1/ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FluxChoice {
    /// `(π + 2)/ℓ`.
    PiPlusTwo,
    /// `(2 - π)/ℓ`.
    TwoMinusPi,
    /// `(π - 2)/ℓ`.
    PiMinusTwo,
    /// `c/ℓ` for an arbitrary `c`.
    Custom(f64),
}

impl FluxChoice {
    pub fn coefficient(self) -> f64 {
        match self {
            FluxChoice::PiPlusTwo => PI + 2.0,
            FluxChoice::TwoMinusPi => 2.0 - PI,
            FluxChoice::PiMinusTwo => PI - 2.0,
            FluxChoice::Custom(c) => c,
        }
    }

    pub fn value(self, ell: f64) -> f64 {
        self.coefficient() / ell
    }

    /// Flux of the Taylor model matching a full-symbol `sign_choice`.
    ///
    /// Completing the square in `2ξ²/π + sεκξM₀` with `M₀ = -4/π²` and
    /// gauging away the periodic part of `κ/π` leaves `π/ℓ - 2s/ℓ`.
    pub fn for_sign_choice(sign: Sign) -> Self {
        match sign {
            Sign::Plus => FluxChoice::PiMinusTwo,
            Sign::Minus => FluxChoice::PiPlusTwo,
        }
    }

    pub fn label(self) -> String {
        match self {
            FluxChoice::PiPlusTwo => "pi+2".into(),
            FluxChoice::TwoMinusPi => "2-pi".into(),
            FluxChoice::PiMinusTwo => "pi-2".into(),
            FluxChoice::Custom(c) => format!("{c}"),
        }
    }
}

impl fmt::Display for FluxChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for FluxChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "πp2" | "pip2" | "pi+2" | "π+2" => Ok(FluxChoice::PiPlusTwo),
            "2mπ" | "2mpi" | "2-pi" | "2-π" => Ok(FluxChoice::TwoMinusPi),
            "πm2" | "pim2" | "pi-2" | "π-2" => Ok(FluxChoice::PiMinusTwo),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|c| c.is_finite())
                .map(FluxChoice::Custom)
                .ok_or_else(|| Error::Argument(format!("unknown flux choice '{other}'"))),
        }
    }
}

/// Storage of an effective operator; grid models stay tridiagonal.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorMatrix {
    Dense(HermitianMatrix),
    /// Real symmetric tridiagonal with `off[i]` coupling `i` and `i + 1`.
    Tridiagonal { diag: Vec<f64>, off: Vec<f64> },
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        match self {
            OperatorMatrix::Dense(h) => h.dim(),
            OperatorMatrix::Tridiagonal { diag, .. } => diag.len(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self {
            OperatorMatrix::Dense(h) => h.get(i, j),
            OperatorMatrix::Tridiagonal { diag, off } => Complex64::new(
                if i == j {
                    diag[i]
                } else if i.abs_diff(j) == 1 {
                    off[i.min(j)]
                } else {
                    0.0
                },
                0.0,
            ),
        }
    }

    pub fn to_dense(&self) -> Result<HermitianMatrix> {
        match self {
            OperatorMatrix::Dense(h) => Ok(h.clone()),
            OperatorMatrix::Tridiagonal { .. } => HermitianMatrix::from_fn(self.dim(), |i, j| self.get(i, j)),
        }
    }
}

/// A finite Hermitian model of a 1D effective operator.
#[derive(Debug, Clone)]
pub struct EffectiveOperator {
    pub model: Model,
    pub matrix: OperatorMatrix,
    pub basis: Basis,
    /// The momentum shift actually used (zero on the open line).
    pub flux: f64,
    pub epsilon: Option<f64>,
    pub m: Option<f64>,
    pub sign_choice: Option<Sign>,
}

impl EffectiveOperator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Sample count used to take Fourier coefficients for a lattice with `modes` plane waves.
fn fourier_samples(geom: &CurveGeometry, modes: usize) -> usize {
    let stored = match geom {
        CurveGeometry::Closed(c) => c.samples().len(),
        CurveGeometry::Open(_) => 0,
    };
    stored.max((4 * modes).next_power_of_two())
}

/// Fourier coefficients `f̂_r` of periodic samples, taken as zero for `|r| >= n/2`.
pub(crate) struct Coefficients {
    c: Vec<Complex64>,
}

impl Coefficients {
    pub(crate) fn new(samples: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Ok(Self { c: fft_forward(&v)? })
    }

    pub(crate) fn get(&self, r: i64) -> Complex64 {
        let n = self.c.len() as i64;
        if 2 * r.abs() >= n {
            return Complex64::new(0.0, 0.0);
        }
        self.c[r.rem_euclid(n) as usize]
    }
}

fn precondition(geom: &CurveGeometry) -> Result<()> {
    validate_shape(geom)
        .into_result()
        .map_err(|e| Error::Precondition(format!("geometry is not valid: {e}")))
}

/// Schrödinger model `(D_s + flux)² - κ²/π²`.
///
/// Closed curves use plane waves `p ∈ [-resolution, resolution]` and the
/// default flux `(π + 2)/ℓ`; open curves use centered second differences on
/// `resolution` interior nodes of `[-L, L]` with Dirichlet ends.
pub fn schrodinger_matrix(
    geom: &CurveGeometry,
    resolution: usize,
    flux_override: Option<FluxChoice>,
) -> Result<EffectiveOperator> {
    precondition(geom)?;
    if resolution == 0 {
        return Err(Error::Argument("resolution must be positive".into()));
    }
    match geom {
        CurveGeometry::Closed(c) => {
            let ell = c.length();
            let p = resolution as i64;
            let modes = (2 * p + 1) as usize;
            let flux = flux_override.unwrap_or(FluxChoice::PiPlusTwo).value(ell);
            let (_, kappa) = geom.periodic_samples(fourier_samples(geom, modes))?;
            let pot: Vec<f64> = kappa.iter().map(|k| -k * k / (PI * PI)).collect();
            let vhat = Coefficients::new(&pot)?;
            let matrix = HermitianMatrix::from_fn(modes, |i, j| {
                let (pi, pj) = (i as i64 - p, j as i64 - p);
                let mut z = vhat.get(pi - pj);
                if i == j {
                    z.im = 0.0;
                    z.re += (2.0 * PI * pi as f64 / ell + flux).powi(2);
                }
                z
            })?;
            Ok(EffectiveOperator {
                model: Model::SchrodingerTaylor,
                matrix: OperatorMatrix::Dense(matrix),
                basis: Basis::Fourier { p_min: -p, p_max: p, ell },
                flux,
                epsilon: None,
                m: None,
                sign_choice: None,
            })
        }
        CurveGeometry::Open(o) => {
            let n = resolution;
            let half = o.half_length();
            let h = 2.0 * half / (n + 1) as f64;
            let diag: Vec<f64> = (1..=n)
                .map(|i| {
                    let s = -half + i as f64 * h;
                    2.0 / (h * h) - o.kappa(s).powi(2) / (PI * PI)
                })
                .collect();
            let off = vec![-1.0 / (h * h); n - 1];
            Ok(EffectiveOperator {
                model: Model::SchrodingerTaylor,
                matrix: OperatorMatrix::Tridiagonal { diag, off },
                basis: Basis::Grid { h, half_length: half, n },
                flux: 0.0,
                epsilon: None,
                m: None,
                sign_choice: None,
            })
        }
    }
}

/// Weyl quantization of `ν₁(ξ, εm) + εκ(s)ξ·(s_c·M(ξ, εm))` on `p ∈ [-P, P]`.
///
/// Entry `(p', p)` is `δ ν₁(ξ_p) + ε κ̂_{p'-p} ξ_mid s_c M(ξ_mid)` with the
/// midpoint momentum `ξ_mid = (ξ_p + ξ_{p'})/2`.
pub fn full_symbol_matrix(
    geom: &CurveGeometry,
    epsilon: f64,
    m: f64,
    p: usize,
    sign_choice: Sign,
) -> Result<EffectiveOperator> {
    let CurveGeometry::Closed(c) = geom else {
        return Err(Error::Precondition("the full-symbol model needs a closed curve".into()));
    };
    let report = validate(geom, epsilon)?;
    report
        .into_result()
        .map_err(|e| Error::Precondition(format!("geometry is not valid at epsilon={epsilon}: {e}")))?;
    if !m.is_finite() {
        return Err(Error::Argument(format!("mass must be finite, got {m}")));
    }
    let ell = c.length();
    let pp = p as i64;
    let modes = (2 * pp + 1) as usize;
    let mu = epsilon * m;
    let (_, kappa) = geom.periodic_samples(fourier_samples(geom, modes))?;
    let khat = Coefficients::new(&kappa)?;
    let xi = |q: f64| epsilon * (2.0 * PI * q / ell + PI / ell);
    let diag: Vec<f64> = (-pp..=pp).map(|q| nu(1, xi(q as f64), mu)).collect::<Result<_>>()?;
    // coupling depends on p + p' only; tabulate once
    let coupling: Vec<f64> = (-2 * pp..=2 * pp)
        .map(|sum| {
            let x = xi(sum as f64 / 2.0);
            momentum_m(x, mu).map(|mm| epsilon * x * sign_choice.value() * mm)
        })
        .collect::<Result<_>>()?;
    let matrix = HermitianMatrix::from_fn(modes, |i, j| {
        let (pi, pj) = (i as i64 - pp, j as i64 - pp);
        let mut z = khat.get(pi - pj) * coupling[(pi + pj + 2 * pp) as usize];
        if i == j {
            z.im = 0.0;
            z.re += diag[i];
        }
        z
    })?;
    Ok(EffectiveOperator {
        model: Model::FullSymbolWeyl,
        matrix: OperatorMatrix::Dense(matrix),
        basis: Basis::Fourier { p_min: -pp, p_max: pp, ell },
        flux: PI / ell,
        epsilon: Some(epsilon),
        m: Some(m),
        sign_choice: Some(sign_choice),
    })
}

/// The `count` smallest eigenvalues, ascending.
pub fn effective_eigs(op: &EffectiveOperator, count: usize) -> Result<Vec<f64>> {
    if count > op.dim() {
        return Err(Error::Argument(format!(
            "requested {count} eigenvalues of a {}-dimensional operator",
            op.dim()
        )));
    }
    let mut values = match &op.matrix {
        OperatorMatrix::Tridiagonal { diag, off } => symmetric_tridiagonal_eigenvalues(diag, off)?,
        OperatorMatrix::Dense(h) => hermitian_eigenvalues(h, false)?.values,
    };
    values.truncate(count);
    Ok(values)
}

/// Number of negative eigenvalues of the Schrödinger model, required to
/// agree at the last two resolutions of the schedule.
pub fn count_negative(geom: &CurveGeometry, resolution_schedule: &[usize]) -> Result<usize> {
    precondition(geom)?;
    if resolution_schedule.len() < 2 {
        return Err(Error::Argument("resolution schedule needs at least two entries".into()));
    }
    let counts: Vec<usize> = resolution_schedule
        .iter()
        .map(|&r| {
            let op = schrodinger_matrix(geom, r, None)?;
            Ok(effective_eigs(&op, op.dim())?.iter().filter(|&&v| v < 0.0).count())
        })
        .collect::<Result<_>>()?;
    let k = counts.len();
    if counts[k - 1] != counts[k - 2] {
        return Err(Error::Resolution(format!(
            "negative-eigenvalue count changed from {} to {} between resolutions {} and {}; refine the schedule",
            counts[k - 2],
            counts[k - 1],
            resolution_schedule[k - 2],
            resolution_schedule[k - 1]
        )));
    }
    Ok(counts[k - 1])
}

/// Number of negative eigenvalues of `D_s² - κ²/π²` on the whole line, by
/// Sturm oscillation: the count equals the number of zeros on `ℝ` of the
/// zero-energy solution that is constant to the left of the support.
///
/// Outside `[-L, L]` the curvature is negligible and the solution is affine,
/// so its zeros beyond `L` are found from `u(L)` and `u'(L)`.
pub fn count_negative_on_line(geom: &CurveGeometry, steps: usize) -> Result<usize> {
    let CurveGeometry::Open(o) = geom else {
        return Err(Error::Precondition("line count needs an open curve".into()));
    };
    if steps < 2 {
        return Err(Error::Argument("need at least two integration steps".into()));
    }
    let half = o.half_length();
    let h = 2.0 * half / steps as f64;
    let v = |s: f64| -o.kappa(s).powi(2) / (PI * PI);
    // u'' = V u, classical RK4 on (u, u')
    let f = |s: f64, y: [f64; 2]| [y[1], v(s) * y[0]];
    let mut y = [1.0, 0.0];
    let mut zeros = 0;
    for i in 0..steps {
        let s = -half + i as f64 * h;
        let k1 = f(s, y);
        let k2 = f(s + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(s + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(s + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if next[0] == 0.0 || next[0].signum() != y[0].signum() {
            zeros += 1;
        }
        y = next;
    }
    if y[0] * y[1] < 0.0 {
        zeros += 1;
    }
    Ok(zeros)
}
