//! The fibered one-dimensional Dirac operator `ξσ₁ + σ₂D_t + μσ₃` on
//! `(-1, 1)` with the infinite-mass condition `∓σ₁ψ(±1) = ψ(±1)`.
//!
//! At `ξ = 0` the eigenvalues are `±ν_n(0, μ)`; the spinors solve
//! `-φ₂' + μφ₁ = λφ₁`, `φ₁' - μφ₂ = λφ₂` and are built from `cos(kt)` and
//! `sin(kt)` where the wavenumber `k` solves `μ = -k / tan(2k)`. For
//! `μ < -1/2` the lowest branch turns hyperbolic (`k = i k̃`), and at
//! `μ = -1/2` it degenerates to a linear polynomial.

pub mod series;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, QuadratureRule, RootFinder};

pub use series::{series_k1, series_k1_exact, series_nu1, series_nu1_exact, PiPolynomial, SeriesExpansion};

/// `|μ + 1/2|` below which the lowest branch is treated as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;
/// Below this wavenumber the normalization uses its Taylor expansion.
pub const SMALL_K: f64 = 1e-4;
/// Gauss–Legendre size used for overlap integrals in this module.
pub const QUADRATURE_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseParams {
    pub mu: f64,
    pub xi: f64,
}

impl TransverseParams {
    pub fn new(mu: f64, xi: f64) -> Result<Self> {
        if !(mu.is_finite() && xi.is_finite()) {
            return Err(Error::Argument(format!("non-finite parameters mu={mu}, xi={xi}")));
        }
        Ok(Self { mu, xi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_value(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::Argument(format!("sign must be +1 or -1, got {v}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeKind {
    Oscillatory,
    Hyperbolic,
    Degenerate,
}

/// `σ₁ (a, b) = (b, a)`.
pub fn sigma1(v: [f64; 2]) -> [f64; 2] {
    [v[1], v[0]]
}

/// `(ξσ₁ + σ₂D_t + μσ₃)φ` from values and first derivatives of a real spinor.
pub fn dirac_apply(phi: [f64; 2], dphi: [f64; 2], xi: f64, mu: f64) -> [f64; 2] {
    [
        -dphi[1] + mu * phi[0] + xi * phi[1],
        dphi[0] - mu * phi[1] + xi * phi[0],
    ]
}

fn is_degenerate(mu: f64) -> bool {
    (mu + 0.5).abs() <= DEGENERATE_TOL
}

fn check_finite(mu: f64) -> Result<()> {
    if mu.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("mass parameter must be finite, got {mu}")))
    }
}

fn finder() -> RootFinder {
    RootFinder {
        xtol: 0.0,
        ftol: 0.0,
        max_iter: 2000,
    }
}

/// `sin(x)/x` with the removable singularity filled in.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// `tanh(x)/x` with the removable singularity filled in.
fn tanhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 3.0 + 2.0 * x.powi(4) / 15.0
    } else {
        x.tanh() / x
    }
}

/// Taylor sum `Σ_{n≥1} s^{n+1} x^{2n+1} a_n(x)` helper for cancellation-prone
/// differences; `alternating` selects the trigonometric (`s = -1`) variant.
fn odd_series(x: f64, alternating: bool, coeff: impl Fn(u32) -> f64) -> f64 {
    let x2 = x * x;
    let mut pow = x * x2;
    let mut sum = 0.0;
    for n in 1..40u32 {
        let sign = if alternating && n % 2 == 0 { -1.0 } else { 1.0 };
        let term = sign * coeff(n) * pow;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        pow *= x2;
    }
    sum
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `x - sin(x)` without cancellation for small `x`.
fn x_minus_sin(x: f64) -> f64 {
    if x.abs() < 1.0 {
        odd_series(x, true, |n| 1.0 / factorial(2 * n + 1))
    } else {
        x - x.sin()
    }
}

/// `sinh(x) - x` without cancellation for small `x`.
fn sinh_minus_x(x: f64) -> f64 {
    if x.abs() < 1.0 {
        odd_series(x, false, |n| 1.0 / factorial(2 * n + 1))
    } else {
        x.sinh() - x
    }
}

/// `sin(x) - x cos(x)`.
fn sin_minus_x_cos(x: f64) -> f64 {
    if x.abs() < 1.0 {
        odd_series(x, true, |n| 2.0 * n as f64 / factorial(2 * n + 1))
    } else {
        x.sin() - x * x.cos()
    }
}

/// `x cosh(x) - sinh(x)`.
fn x_cosh_minus_sinh(x: f64) -> f64 {
    if x.abs() < 1.0 {
        odd_series(x, false, |n| 2.0 * n as f64 / factorial(2 * n + 1))
    } else {
        x * x.cosh() - x.sinh()
    }
}

/// `n`-th positive root of `μ = -k / tan(2k)`, located in `((n-1)π/2, nπ/2)`.
///
/// The branch `n = 1` exists only for `μ > -1/2`; below that use [`k_tilde`].
pub fn k_branch(n: usize, mu: f64) -> Result<f64> {
    check_finite(mu)?;
    if n == 0 {
        return Err(Error::Argument("branch index starts at 1".into()));
    }
    if n == 1 {
        if mu <= -0.5 {
            return Err(Error::BranchDomain(format!(
                "k_1 is real only for mu > -1/2 (got {mu}); use k_tilde"
            )));
        }
        // (μ sin 2k + k cos 2k) / k, positive at 0 and equal to -1 at π/2
        let f = |k: f64| 2.0 * mu * sinc(2.0 * k) + (2.0 * k).cos();
        return finder().solve(f, 0.0, FRAC_PI_2).map_err(|e| bracket_diag(e, n, mu));
    }
    // μ sin 2k + k cos 2k has no poles and flips sign across the interval
    let lo = (n - 1) as f64 * FRAC_PI_2;
    let hi = n as f64 * FRAC_PI_2;
    let f = |k: f64| mu * (2.0 * k).sin() + k * (2.0 * k).cos();
    finder().solve(f, lo, hi).map_err(|e| bracket_diag(e, n, mu))
}

fn bracket_diag(e: Error, n: usize, mu: f64) -> Error {
    Error::Internal(format!("dispersion root for branch {n} at mu={mu} failed: {e}"))
}

/// Unique non-negative root of `μ = -k̃ / tanh(2k̃)` for `μ <= -1/2`.
pub fn k_tilde(mu: f64) -> Result<f64> {
    check_finite(mu)?;
    if mu > -0.5 + DEGENERATE_TOL {
        return Err(Error::BranchDomain(format!(
            "k_tilde is defined for mu <= -1/2 (got {mu})"
        )));
    }
    if is_degenerate(mu) {
        return Ok(0.0);
    }
    // (μ tanh 2k̃ + k̃)/k̃ goes from 2μ + 1 < 0 at 0 to 1 as k̃ → ∞; k̃ < |μ|
    let f = |k: f64| 2.0 * mu * tanhc(2.0 * k) + 1.0;
    finder()
        .solve(f, 0.0, mu.abs())
        .map_err(|e| Error::Internal(format!("hyperbolic dispersion root at mu={mu} failed: {e}")))
}

/// `ν_j(0, μ)`, the `j`-th positive eigenvalue at zero longitudinal momentum.
pub fn nu0(j: usize, mu: f64) -> Result<f64> {
    check_finite(mu)?;
    if j == 0 {
        return Err(Error::Argument("branch index starts at 1".into()));
    }
    if j == 1 {
        if is_degenerate(mu) {
            return Ok(0.5);
        }
        if mu < -0.5 {
            let kt = k_tilde(mu)?;
            // μ² - k̃² = k̃² / sinh²(2k̃)
            return Ok(if kt == 0.0 { 0.5 } else { 0.5 / tanhc(2.0 * kt) / (2.0 * kt).cosh() });
        }
    }
    let k = k_branch(j, mu)?;
    Ok(mu.hypot(k))
}

/// `ν_j(ξ, μ) = sqrt(ξ² + ν_j(0, μ)²)`.
pub fn nu(j: usize, xi: f64, mu: f64) -> Result<f64> {
    if !xi.is_finite() {
        return Err(Error::Argument(format!("momentum must be finite, got {xi}")));
    }
    let n0 = nu0(j, mu)?;
    Ok((xi * xi + n0 * n0).sqrt())
}

/// Essential-spectrum threshold `ε⁻¹ ν₁(0, εm)` of the waveguide of half-width `ε`.
pub fn threshold(epsilon: f64, m: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Argument(format!("width must be positive, got {epsilon}")));
    }
    Ok(nu0(1, epsilon * m)? / epsilon)
}

/// One signed eigenpair `(±ν_n(0, μ), φ_{0,μ,n±})` of `σ₂D_t + μσ₃`.
///
/// The spinor is real: `c (e(t), -o(t))` or its `σ₁` image, where `e` and `o`
/// are the even and odd profiles `cos(kt)/cos k` and `sin(kt)/sin k` (or
/// their hyperbolic and polynomial counterparts).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseMode {
    pub n: usize,
    pub kind: ModeKind,
    /// Wavenumber; for the hyperbolic kind this is `k̃` with `k = i k̃`.
    pub k: f64,
    pub mu: f64,
    pub nu: f64,
    pub sign: Sign,
    pub c: f64,
    even_first: bool,
}

impl TransverseMode {
    /// Signed eigenvalue `σν`.
    pub fn eigenvalue(&self) -> f64 {
        self.sign.value() * self.nu
    }

    fn profiles(&self, t: f64) -> (f64, f64, f64, f64) {
        let k = self.k;
        match self.kind {
            ModeKind::Degenerate => (1.0, t, 0.0, 1.0),
            ModeKind::Oscillatory => {
                let (ck, sk) = (k.cos(), k.sin());
                let (ckt, skt) = ((k * t).cos(), (k * t).sin());
                (ckt / ck, skt / sk, -k * skt / ck, k * ckt / sk)
            }
            ModeKind::Hyperbolic => {
                if k < 20.0 {
                    let (ck, sk) = (k.cosh(), k.sinh());
                    let (ckt, skt) = ((k * t).cosh(), (k * t).sinh());
                    (ckt / ck, skt / sk, k * skt / ck, k * ckt / sk)
                } else {
                    // ratios of exponentials, safe for large k̃
                    let a = (k * (t - 1.0)).exp();
                    let b = (-k * (t + 1.0)).exp();
                    let q = (-2.0 * k).exp();
                    let e = (a + b) / (1.0 + q);
                    let o = (a - b) / (1.0 - q);
                    (e, o, k * o, k * e)
                }
            }
        }
    }

    /// Spinor value `φ(t)`.
    pub fn eval(&self, t: f64) -> [f64; 2] {
        let (e, o, _, _) = self.profiles(t);
        self.arrange(e, o)
    }

    /// Closed-form derivative `φ'(t)`.
    pub fn deriv(&self, t: f64) -> [f64; 2] {
        let (_, _, de, d_o) = self.profiles(t);
        self.arrange(de, d_o)
    }

    fn arrange(&self, e: f64, o: f64) -> [f64; 2] {
        if self.even_first {
            [self.c * e, -self.c * o]
        } else {
            [-self.c * o, self.c * e]
        }
    }

    /// The partner mode `σ₁φ` with eigenvalue `-σν`.
    pub fn partner(&self) -> Self {
        Self {
            sign: self.sign.flip(),
            even_first: !self.even_first,
            ..*self
        }
    }
}

fn normalization_oscillatory(k: f64) -> f64 {
    if k < SMALL_K {
        (0.375 - k * k / 5.0).sqrt()
    } else {
        (k * (2.0 * k).sin().powi(2) / x_minus_sin(4.0 * k)).sqrt()
    }
}

fn normalization_hyperbolic(k: f64) -> f64 {
    if k < SMALL_K {
        (0.375 + k * k / 5.0).sqrt()
    } else if k < 20.0 {
        (k * (2.0 * k).sinh().powi(2) / sinh_minus_x(4.0 * k)).sqrt()
    } else {
        // k̃ sinh²(2k̃) / (sinh 4k̃ - 4k̃) = k̃ / (2 coth 2k̃ - 4k̃ / sinh² 2k̃)
        let s = (2.0 * k).sinh();
        (k / (2.0 / (2.0 * k).tanh() - 4.0 * k / (s * s))).sqrt()
    }
}

/// Normalized eigenvector of branch `n` with sign `sigma` at mass `mu`.
pub fn mode(n: usize, sigma: Sign, mu: f64) -> Result<TransverseMode> {
    check_finite(mu)?;
    if n == 0 {
        return Err(Error::Argument("branch index starts at 1".into()));
    }
    let plus = if n == 1 && is_degenerate(mu) {
        TransverseMode {
            n,
            kind: ModeKind::Degenerate,
            k: 0.0,
            mu,
            nu: 0.5,
            sign: Sign::Plus,
            c: 0.375f64.sqrt(),
            even_first: true,
        }
    } else if n == 1 && mu < -0.5 {
        let kt = k_tilde(mu)?;
        TransverseMode {
            n,
            kind: ModeKind::Hyperbolic,
            k: kt,
            mu,
            nu: nu0(1, mu)?,
            sign: Sign::Plus,
            c: normalization_hyperbolic(kt),
            even_first: true,
        }
    } else {
        let k = k_branch(n, mu)?;
        // c (e, -o) has eigenvalue k / sin(2k); keep it when that is positive
        let even_first = (2.0 * k).sin() > 0.0;
        TransverseMode {
            n,
            kind: ModeKind::Oscillatory,
            k,
            mu,
            nu: mu.hypot(k),
            sign: Sign::Plus,
            c: normalization_oscillatory(k),
            even_first,
        }
    };
    Ok(match sigma {
        Sign::Plus => plus,
        Sign::Minus => plus.partner(),
    })
}

/// Modes `n = 1..=nt`, both signs, ordered `(1,+), (1,-), (2,+), ...`.
pub fn mode_family(nt: usize, mu: f64) -> Result<Vec<TransverseMode>> {
    let mut out = Vec::with_capacity(2 * nt);
    for n in 1..=nt {
        let m = mode(n, Sign::Plus, mu)?;
        out.push(m);
        out.push(m.partner());
    }
    Ok(out)
}

/// Lowest-branch eigenvector of the full fiber `ξσ₁ + σ₂D_t + μσ₃`,
/// obtained by rotating `φ_{0,μ,1}` and `σ₁φ_{0,μ,1}` into each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberMode {
    pub xi: f64,
    pub mu: f64,
    pub sign: Sign,
    pub base: TransverseMode,
    /// `c_ξ = ((E + ν) / 2E)^{1/2}` with `E = sqrt(ξ² + ν²)`.
    pub c_xi: f64,
    /// `c¹_ξ = ξ / (E + ν)`.
    pub c1: f64,
    /// Signed eigenvalue `±E`.
    pub energy: f64,
}

impl FiberMode {
    fn combine(&self, v: [f64; 2]) -> [f64; 2] {
        let s = sigma1(v);
        match self.sign {
            Sign::Plus => [self.c_xi * (v[0] + self.c1 * s[0]), self.c_xi * (v[1] + self.c1 * s[1])],
            Sign::Minus => [self.c_xi * (s[0] - self.c1 * v[0]), self.c_xi * (s[1] - self.c1 * v[1])],
        }
    }

    pub fn eval(&self, t: f64) -> [f64; 2] {
        self.combine(self.base.eval(t))
    }

    pub fn deriv(&self, t: f64) -> [f64; 2] {
        self.combine(self.base.deriv(t))
    }
}

pub fn mode_xi(xi: f64, mu: f64, sigma: Sign) -> Result<FiberMode> {
    if !xi.is_finite() {
        return Err(Error::Argument(format!("momentum must be finite, got {xi}")));
    }
    let base = mode(1, Sign::Plus, mu)?;
    let nu = base.nu;
    let e = (xi * xi + nu * nu).sqrt();
    Ok(FiberMode {
        xi,
        mu,
        sign: sigma,
        base,
        c_xi: ((e + nu) / (2.0 * e)).sqrt(),
        c1: xi / (e + nu),
        energy: sigma.value() * e,
    })
}

/// The two evaluations of `⟨φ_{ξ,μ,1}, σ₁ t φ_{ξ,μ,1}⟩` that [`momentum_m`] compares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumOverlap {
    /// `|c_ξ|²(1 + |c¹_ξ|²) · 2c²(1 - 2k cot 2k)/(2k²)`, continued to the
    /// hyperbolic and degenerate cases.
    pub closed_form: f64,
    /// Gauss–Legendre integral of the explicit spinor.
    pub quadrature: f64,
}

pub fn momentum_overlap(xi: f64, mu: f64) -> Result<MomentumOverlap> {
    let fm = mode_xi(xi, mu, Sign::Plus)?;
    let base = fm.base;
    let k = base.k;
    // (1 - 2k cot 2k) / (2k²) with x = 2k: 2 (sin x - x cos x) / (x² sin x)
    let ratio = match base.kind {
        ModeKind::Degenerate => 2.0 / 3.0,
        ModeKind::Oscillatory if k < SMALL_K => 2.0 / 3.0 + 8.0 * k * k / 45.0,
        ModeKind::Oscillatory => {
            let x = 2.0 * k;
            2.0 * sin_minus_x_cos(x) / (x * x * x.sin())
        }
        ModeKind::Hyperbolic if k < SMALL_K => 2.0 / 3.0 - 8.0 * k * k / 45.0,
        ModeKind::Hyperbolic => {
            let x = 2.0 * k;
            2.0 * x_cosh_minus_sinh(x) / (x * x * x.sinh())
        }
    };
    let closed_form = fm.c_xi.powi(2) * (1.0 + fm.c1 * fm.c1) * 2.0 * base.c * base.c * ratio;
    let rule = gauss_legendre(QUADRATURE_NODES)?;
    let quadrature = rule.integrate(|t| {
        let v = fm.eval(t);
        let s = sigma1(v);
        t * (v[0] * s[0] + v[1] * s[1])
    });
    Ok(MomentumOverlap { closed_form, quadrature })
}

/// Momentum overlap `⟨φ_{ξ,μ,1}, σ₁ t φ_{ξ,μ,1}⟩`.
///
/// The closed form only fixes the magnitude; the sign returned is that of
/// the quadrature of the explicit eigenvector (negative for these spinors).
pub fn momentum_m(xi: f64, mu: f64) -> Result<f64> {
    let m = momentum_overlap(xi, mu)?;
    let scale = m.closed_form.abs().max(1.0);
    if (m.closed_form.abs() - m.quadrature.abs()).abs() > 1e-10 * scale {
        return Err(Error::Internal(format!(
            "momentum overlap mismatch at xi={xi}, mu={mu}: closed form {} vs quadrature {}",
            m.closed_form, m.quadrature
        )));
    }
    Ok(m.quadrature.signum() * m.closed_form.abs())
}

/// `⟨u, v⟩` of two real spinor fields under a quadrature rule.
pub fn inner<F, G>(rule: &QuadratureRule, u: F, v: G) -> f64
where
    F: Fn(f64) -> [f64; 2],
    G: Fn(f64) -> [f64; 2],
{
    rule.integrate(|t| {
        let a = u(t);
        let b = v(t);
        a[0] * b[0] + a[1] * b[1]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{find_root_bracketed, hermitian_eigenvalues, HermitianMatrix};
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn rule() -> QuadratureRule {
        gauss_legendre(64).unwrap()
    }

    const MUS: [f64; 9] = [-3.0, -1.2, -0.5, -0.4999, -0.3, 0.0, 0.3, 1.0, 4.0];

    #[test]
    fn k1_at_zero_mass() {
        assert!((k_branch(1, 0.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn k1_vanishes_at_minus_half() {
        let k = k_branch(1, -0.499).unwrap();
        assert!(k > 0.0 && k < 0.06, "{k}");
        // independent bisection on the raw dispersion relation
        let oracle = find_root_bracketed(|k: f64| -0.499 + k / (2.0 * k).tan(), 1e-6, 0.5, 1e-15).unwrap();
        assert!((k - oracle).abs() < 1e-12);
    }

    #[test]
    fn k2_at_large_mass_approaches_pi() {
        // the gap to π closes like π/(2μ): (π - d) cot(2d) = μ
        let k = k_branch(2, 1e3).unwrap();
        let d = PI - k;
        assert!(d > 0.0 && d < 2e-3, "{d}");
        assert!(((PI - d) / (2.0 * d).tan() - 1e3).abs() < 1e-6);
        let d_far = PI - k_branch(2, 1e6).unwrap();
        assert!(d_far < 1e-5);
    }

    #[test]
    fn k1_domain_error_below_minus_half() {
        assert!(matches!(k_branch(1, -0.5), Err(Error::BranchDomain(_))));
        assert!(matches!(k_branch(1, -2.0), Err(Error::BranchDomain(_))));
        assert!(k_branch(2, -2.0).is_ok());
    }

    #[test]
    fn k_tilde_values() {
        assert_eq!(k_tilde(-0.5).unwrap(), 0.0);
        let kt = k_tilde(-2.0).unwrap();
        let oracle = find_root_bracketed(|k: f64| -2.0 + k / (2.0 * k).tanh(), 1.5, 2.0, 1e-15).unwrap();
        assert!((kt - oracle).abs() < 1e-12, "{kt} vs {oracle}");
        assert!(nu0(1, -50.0).unwrap() < 0.01);
        assert!(matches!(k_tilde(-0.4), Err(Error::BranchDomain(_))));
    }

    #[test]
    fn k_branches_are_ordered_and_bracketed() {
        for &mu in &MUS {
            let mut prev = 0.0;
            for n in 2..=7 {
                let k = k_branch(n, mu).unwrap();
                assert!(k > (n - 1) as f64 * FRAC_PI_2 && k < n as f64 * FRAC_PI_2);
                assert!(k > prev);
                prev = k;
            }
        }
    }

    #[test]
    fn nu0_values() {
        assert!((nu0(1, 0.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(nu0(1, -0.5).unwrap(), 0.5);
        let k1 = k_branch(1, 10.0).unwrap();
        let ratio = nu0(1, 10.0).unwrap() / 10.0;
        let reference = (1.0 + k1 * k1 / 100.0).sqrt();
        assert!(ratio > 0.99 * reference && ratio < 1.01 * reference);
        assert!((k1 - FRAC_PI_2).abs() < 0.1);
        assert!(nu0(0, 0.0).is_err());
    }

    #[test]
    fn hyperbolic_nu_matches_difference_of_squares() {
        for &mu in &[-0.6, -1.0, -2.0, -5.0] {
            let kt = k_tilde(mu).unwrap();
            let a = nu0(1, mu).unwrap();
            assert!((a * a - (mu * mu - kt * kt)).abs() < 1e-12, "mu={mu}");
        }
    }

    #[test]
    fn nu_with_momentum() {
        assert!((super::nu(1, 0.0, 0.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        let v = super::nu(1, 1.0, 0.0).unwrap();
        assert!((v - (1.0 + PI * PI / 16.0).sqrt()).abs() < 1e-14);
        let n3 = nu0(3, 0.2).unwrap();
        let block = HermitianMatrix::new(
            2,
            vec![
                Complex64::new(n3, 0.0),
                Complex64::new(0.7, 0.0),
                Complex64::new(0.7, 0.0),
                Complex64::new(-n3, 0.0),
            ],
        )
        .unwrap();
        let e = hermitian_eigenvalues(&block, false).unwrap();
        assert!((e.values[1] - super::nu(3, 0.7, 0.2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn branch_ordering() {
        for &mu in &MUS {
            for n in 1..=6 {
                assert!(nu0(n, mu).unwrap() < nu0(n + 1, mu).unwrap(), "mu={mu} n={n}");
            }
        }
    }

    #[test]
    fn continuous_across_branch_switch() {
        for &h in &[1e-3, 1e-4] {
            let a = nu0(1, -0.5 - h).unwrap();
            let b = nu0(1, -0.5 + h).unwrap();
            assert!((a - b).abs() <= 5.0 * h);
        }
    }

    #[test]
    fn dispersion_identity() {
        for j in 1..=5 {
            for &xi in &[0.0, 0.5, -0.5, 1.0, -1.0] {
                for &mu in &[-0.3, 0.0, 0.3] {
                    let a = super::nu(j, xi, mu).unwrap();
                    let b = nu0(j, mu).unwrap();
                    assert!((a * a - xi * xi - b * b).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn threshold_values() {
        assert!((threshold(1.0, 0.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((threshold(0.1, 0.0).unwrap() - 10.0 * FRAC_PI_4).abs() < 1e-13);
        let s = series_nu1(4);
        let t = threshold(0.1, 1.0).unwrap();
        let approx = 10.0 * s.eval(0.1);
        assert!((t - approx).abs() < 10.0 * 0.1f64.powi(5) * 5.0, "{t} vs {approx}");
        assert!(threshold(0.0, 1.0).is_err());
    }

    #[test]
    fn series_matches_finite_differences_of_root() {
        let h = 1e-3;
        let k = |m: f64| k_branch(1, m).unwrap();
        let (f0, f1, fm1, f2, fm2) = (k(0.0), k(h), k(-h), k(2.0 * h), k(-2.0 * h));
        let d1 = (f1 - fm1) / (2.0 * h);
        let d2 = (f1 - 2.0 * f0 + fm1) / (h * h);
        let d3 = (f2 - 2.0 * f1 + 2.0 * fm1 - fm2) / (2.0 * h.powi(3));
        let fd = [f0, d1, d2 / 2.0, d3 / 6.0];
        let s = series_k1(3);
        for (j, (a, b)) in fd.iter().zip(&s.coefficients).enumerate() {
            assert!((a - b).abs() < 1e-5, "coefficient {j}: fd {a} vs series {b}");
        }
    }

    fn check_mode_invariants(m: &TransverseMode, rule: &QuadratureRule) {
        let norm = inner(rule, |t| m.eval(t), |t| m.eval(t));
        assert!((norm - 1.0).abs() < 1e-10, "{m:?} norm {norm}");
        let top = m.eval(1.0);
        let bottom = m.eval(-1.0);
        // ψ₂(1) = -ψ₁(1), ψ₂(-1) = ψ₁(-1)
        assert!((top[1] + top[0]).abs() < 1e-10, "{m:?}");
        assert!((bottom[1] - bottom[0]).abs() < 1e-10, "{m:?}");
        let lam = m.eigenvalue();
        for &t in &rule.nodes {
            let lhs = dirac_apply(m.eval(t), m.deriv(t), 0.0, m.mu);
            let v = m.eval(t);
            assert!((lhs[0] - lam * v[0]).abs() < 1e-9 * lam.abs().max(1.0), "{m:?} t={t}");
            assert!((lhs[1] - lam * v[1]).abs() < 1e-9 * lam.abs().max(1.0), "{m:?} t={t}");
        }
        match m.kind {
            ModeKind::Oscillatory => {
                assert!((m.mu + m.k / (2.0 * m.k).tan()).abs() < 1e-10);
                assert!((m.nu * m.nu - m.mu * m.mu - m.k * m.k).abs() < 1e-10);
            }
            ModeKind::Hyperbolic => {
                assert!((m.mu + m.k / (2.0 * m.k).tanh()).abs() < 1e-10);
                assert!((m.nu * m.nu - m.mu * m.mu + m.k * m.k).abs() < 1e-10);
            }
            ModeKind::Degenerate => assert_eq!(m.nu, 0.5),
        }
    }

    #[test]
    fn mode_invariants_across_masses() {
        let rule = rule();
        for &mu in &MUS {
            for n in 1..=6 {
                for sigma in [Sign::Plus, Sign::Minus] {
                    let m = mode(n, sigma, mu).unwrap();
                    check_mode_invariants(&m, &rule);
                }
            }
        }
        for &mu in &[-0.50001, -0.49999, -0.5 + 1e-9, -8.0, -30.0] {
            let m = mode(1, Sign::Plus, mu).unwrap();
            check_mode_invariants(&m, &rule);
        }
    }

    #[test]
    fn degenerate_modes() {
        let plus = mode(1, Sign::Plus, -0.5).unwrap();
        let minus = mode(1, Sign::Minus, -0.5).unwrap();
        assert_eq!(plus.kind, ModeKind::Degenerate);
        let c = 0.375f64.sqrt();
        for i in 0..16 {
            let t = -1.0 + 2.0 * i as f64 / 15.0;
            let p = plus.eval(t);
            let q = minus.eval(t);
            assert!((p[0] - c).abs() < 1e-10 && (p[1] + c * t).abs() < 1e-10);
            assert!((q[0] + c * t).abs() < 1e-10 && (q[1] - c).abs() < 1e-10);
        }
    }

    #[test]
    fn massless_ground_state_at_center() {
        let m = mode(1, Sign::Plus, 0.0).unwrap();
        assert!((m.c * m.c - 0.25).abs() < 1e-14);
        let v = m.eval(0.0);
        assert!((v[0].abs() - m.c / FRAC_PI_4.cos()).abs() < 1e-14);
        assert_eq!(v[1], 0.0);
    }

    #[test]
    fn supersymmetric_pairing() {
        for &mu in &MUS {
            for n in 1..=5 {
                let p = mode(n, Sign::Plus, mu).unwrap();
                let q = mode(n, Sign::Minus, mu).unwrap();
                for i in 0..=20 {
                    let t = -1.0 + i as f64 / 10.0;
                    let a = sigma1(p.eval(t));
                    let b = q.eval(t);
                    assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn signed_modes_are_orthonormal() {
        let rule = rule();
        for &mu in &[-0.7, -0.5, 0.0, 0.4] {
            let modes = mode_family(4, mu).unwrap();
            for (i, a) in modes.iter().enumerate() {
                for (j, b) in modes.iter().enumerate() {
                    let g = inner(&rule, |t| a.eval(t), |t| b.eval(t));
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((g - target).abs() < 1e-10, "mu={mu} ({i},{j}) {g}");
                }
            }
        }
    }

    #[test]
    fn fiber_mode_reduces_at_zero_momentum() {
        let f = mode_xi(0.0, 0.2, Sign::Plus).unwrap();
        let m = mode(1, Sign::Plus, 0.2).unwrap();
        assert_eq!(f.c_xi, 1.0);
        for i in 0..=10 {
            let t = -1.0 + 0.2 * i as f64;
            assert_eq!(f.eval(t), m.eval(t));
        }
        let fm = mode_xi(0.0, 0.2, Sign::Minus).unwrap();
        let mm = mode(1, Sign::Minus, 0.2).unwrap();
        assert_eq!(fm.eval(0.3), mm.eval(0.3));
    }

    #[test]
    fn fiber_mode_large_momentum_overlap() {
        let rule = rule();
        let f = mode_xi(1e3, 0.0, Sign::Plus).unwrap();
        let m = mode(1, Sign::Plus, 0.0).unwrap();
        let overlap = inner(&rule, |t| f.eval(t), |t| m.eval(t)).abs();
        assert!((overlap - 0.5f64.sqrt()).abs() < 1e-3, "{overlap}");
    }

    #[test]
    fn fiber_mode_residuals() {
        let rule = rule();
        for &(xi, mu) in &[(0.5, 0.0), (-1.3, 0.2), (2.0, -0.9), (0.1, -0.5)] {
            for sigma in [Sign::Plus, Sign::Minus] {
                let f = mode_xi(xi, mu, sigma).unwrap();
                let norm = inner(&rule, |t| f.eval(t), |t| f.eval(t));
                assert!((norm - 1.0).abs() < 1e-10);
                assert!((f.energy.abs() - super::nu(1, xi, mu).unwrap()).abs() < 1e-14);
                for &t in &rule.nodes {
                    let lhs = dirac_apply(f.eval(t), f.deriv(t), xi, mu);
                    let v = f.eval(t);
                    assert!((lhs[0] - f.energy * v[0]).abs() < 1e-9);
                    assert!((lhs[1] - f.energy * v[1]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn momentum_overlap_values() {
        let m = momentum_overlap(0.0, 0.0).unwrap();
        assert!((m.closed_form - 4.0 / (PI * PI)).abs() < 1e-10);
        assert!((m.quadrature.abs() - 4.0 / (PI * PI)).abs() < 1e-10);
        // explicit spinor gives -2c² ∫ t sin(kt)cos(kt)/(sin k cos k) dt < 0
        assert!(m.quadrature < 0.0);
        assert!((momentum_m(0.0, 0.0).unwrap() + 4.0 / (PI * PI)).abs() < 1e-10);

        // √(3/8)(1, -t): ⟨u, σ₁ t u⟩ = (3/8) ∫ -2t² dt = -1/2
        assert!((momentum_m(0.0, -0.5).unwrap() + 0.5).abs() < 1e-12);

        for &xi in &[0.0, 0.3] {
            for &mu in &[-0.3, 0.0, 0.1, -0.8, 2.0] {
                let o = momentum_overlap(xi, mu).unwrap();
                assert!((o.closed_form.abs() - o.quadrature.abs()).abs() < 1e-10, "xi={xi} mu={mu}");
                assert!(o.quadrature < 0.0);
            }
        }
    }
}
