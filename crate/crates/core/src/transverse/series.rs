//! Taylor coefficients of `k₁(μ)` and `ν₁(0, μ)` at `μ = 0`.
//!
//! `k₁` solves `dk/dμ = k / (μ + 2μ² + 2k²)` with `k(0) = π/4`. Substituting
//! a power series and matching powers of `μ` gives a recurrence whose
//! coefficients are finite sums `Σ q_p π^p` with rational `q_p`; they are
//! carried exactly as [`PiPolynomial`] values.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Finite sum `Σ_p q_p π^p` with rational `q_p` and integer `p`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PiPolynomial {
    terms: BTreeMap<i32, BigRational>,
}

impl PiPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(num: i64, den: i64, power: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(power, BigRational::new(BigInt::from(num), BigInt::from(den)));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, power: i32, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(power).or_insert_with(BigRational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&power);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&p, q) in &other.terms {
            out.add_term(p, q.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&p, q) in &other.terms {
            out.add_term(p, -q.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&p1, q1) in &self.terms {
            for (&p2, q2) in &other.terms {
                out.add_term(p1 + p2, q1 * q2);
            }
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = Self::zero();
        for (&p, c) in &self.terms {
            out.add_term(p, c * q);
        }
        out
    }

    /// Division by a single term `q π^power`.
    pub fn div_monomial(&self, q: &BigRational, power: i32) -> Self {
        let inv = q.recip();
        let mut out = Self::zero();
        for (&p, c) in &self.terms {
            out.add_term(p - power, c * &inv);
        }
        out
    }

    /// The single term of a monomial, if it is one.
    pub fn as_monomial(&self) -> Option<(BigRational, i32)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(&p, q)| (q.clone(), p))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        // evaluate monomials separately and sum, smallest magnitude first
        let mut parts: Vec<f64> = self
            .terms
            .iter()
            .map(|(&p, q)| q.to_f64().unwrap_or(f64::NAN) * PI.powi(p))
            .collect();
        parts.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        parts.iter().sum()
    }
}

fn superscript(n: i32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    if n == 1 {
        return String::new();
    }
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

impl fmt::Display for PiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&p, q)) in self.terms.iter().enumerate() {
            let negative = q.is_negative();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let q = q.abs();
            let num = q.numer();
            let den = q.denom();
            let pi = format!("π{}", superscript(p.abs()));
            match p.cmp(&0) {
                std::cmp::Ordering::Equal => {
                    if den.is_one() {
                        write!(f, "{num}")?
                    } else {
                        write!(f, "{num}/{den}")?
                    }
                }
                std::cmp::Ordering::Greater => {
                    let lead = if num.is_one() { String::new() } else { num.to_string() };
                    if den.is_one() {
                        write!(f, "{lead}{pi}")?
                    } else {
                        write!(f, "{lead}{pi}/{den}")?
                    }
                }
                std::cmp::Ordering::Less => {
                    if den.is_one() {
                        write!(f, "{num}/{pi}")?
                    } else {
                        write!(f, "{num}/({den}{pi})")?
                    }
                }
            }
        }
        Ok(())
    }
}

/// Coefficients `c_j` of `Σ_j c_j μ^j`, `j = 0..=order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesExpansion {
    pub order: usize,
    pub coefficients: Vec<f64>,
}

impl SeriesExpansion {
    pub fn eval(&self, mu: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * mu + c)
    }
}

/// Exact coefficients of `k₁(μ)` through `μ^order`.
pub fn series_k1_exact(order: usize) -> Vec<PiPolynomial> {
    let mut a = vec![PiPolynomial::monomial(1, 4, 1)];
    let (a0q, a0p) = a[0].as_monomial().expect("leading term is a monomial");
    // D_0 = 2 a_0²
    let d0q = BigRational::from_integer(BigInt::from(2)) * &a0q * &a0q;
    let d0p = 2 * a0p;
    // d[i] = coefficient of μ^i in μ + 2μ² + 2k²
    let mut d: Vec<PiPolynomial> = Vec::new();
    let two = BigRational::from_integer(BigInt::from(2));
    let d_coeff = |j: usize, a: &[PiPolynomial]| {
        let mut s = PiPolynomial::zero();
        for i in 0..=j {
            s = s.add(&a[i].mul(&a[j - i]));
        }
        let mut s = s.scale(&two);
        if j == 1 {
            s = s.add(&PiPolynomial::monomial(1, 1, 0));
        }
        if j == 2 {
            s = s.add(&PiPolynomial::monomial(2, 1, 0));
        }
        s
    };
    d.push(d_coeff(0, &a));
    for n in 0..order {
        // a_n = Σ_{i=0}^{n} D_i (n-i+1) a_{n-i+1}; solve for a_{n+1}
        if d.len() <= n {
            d.push(d_coeff(n, &a));
        }
        let mut rhs = a[n].clone();
        for i in 1..=n {
            let factor = BigRational::from_integer(BigInt::from((n - i + 1) as i64));
            rhs = rhs.sub(&d[i].mul(&a[n - i + 1]).scale(&factor));
        }
        let denom = &d0q * BigRational::from_integer(BigInt::from((n + 1) as i64));
        a.push(rhs.div_monomial(&denom, d0p));
    }
    a
}

/// Exact coefficients of `ν₁(0, μ) = sqrt(μ² + k₁(μ)²)` through `μ^order`.
pub fn series_nu1_exact(order: usize) -> Vec<PiPolynomial> {
    let k = series_k1_exact(order);
    // c = coefficients of μ² + k²
    let mut c: Vec<PiPolynomial> = (0..=order)
        .map(|j| {
            let mut s = PiPolynomial::zero();
            for i in 0..=j {
                s = s.add(&k[i].mul(&k[j - i]));
            }
            s
        })
        .collect();
    if order >= 2 {
        c[2] = c[2].add(&PiPolynomial::monomial(1, 1, 0));
    }
    let mut s = vec![k[0].clone()];
    let (s0q, s0p) = s[0].as_monomial().expect("leading term is a monomial");
    let two_s0 = BigRational::from_integer(BigInt::from(2)) * s0q;
    for n in 1..=order {
        let mut rhs = c[n].clone();
        for i in 1..n {
            rhs = rhs.sub(&s[i].mul(&s[n - i]));
        }
        s.push(rhs.div_monomial(&two_s0, s0p));
    }
    s
}

pub fn series_k1(order: usize) -> SeriesExpansion {
    SeriesExpansion {
        order,
        coefficients: series_k1_exact(order).iter().map(PiPolynomial::to_f64).collect(),
    }
}

pub fn series_nu1(order: usize) -> SeriesExpansion {
    SeriesExpansion {
        order,
        coefficients: series_nu1_exact(order).iter().map(PiPolynomial::to_f64).collect(),
    }
}
