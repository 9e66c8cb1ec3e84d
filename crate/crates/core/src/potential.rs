//! Mean-zero piecewise-constant potentials on `[0, π]`.
//!
//! A [`StepPotential`] is stored as its breakpoints and per-piece values.
//! Every Fourier quantity is computed from per-piece closed forms, so no
//! quadrature error leaks into the series and bounds built on top of it.
//!
//! Breakpoints that are rational multiples of π (for example `π/2`) keep
//! that exact form next to their `f64` value. Trigonometric factors such as
//! `sin(k c)` are then reduced in integer arithmetic, so `sin(2nπ/2)` is
//! exactly zero rather than `1e-16`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance on `Σ v_j (x_j - x_{j-1})` for a potential to count as mean-zero.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// A point of `[0, π]`, optionally known exactly as `(num/den)·π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint {
    value: f64,
    pi_ratio: Option<(i64, i64)>,
}

impl Breakpoint {
    pub fn new(value: f64) -> Self {
        Self { value, pi_ratio: None }
    }

    /// `num/den · π`, reduced. `den` must be positive.
    pub fn pi_ratio(num: i64, den: i64) -> Self {
        assert!(den > 0, "denominator must be positive");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let (num, den) = (num / g, den / g);
        Self {
            value: PI * num as f64 / den as f64,
            pi_ratio: Some((num, den)),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn as_pi_ratio(&self) -> Option<(i64, i64)> {
        self.pi_ratio
    }

    /// `π - x`.
    pub fn mirrored(&self) -> Self {
        match self.pi_ratio {
            Some((num, den)) => Self::pi_ratio(den - num, den),
            None => Self::new(PI - self.value),
        }
    }

    /// `sin(k x)`.
    pub fn sin_mul(&self, k: i64) -> f64 {
        match self.reduced(k) {
            Some((m, den)) => sin_pi_ratio(m, den),
            None => (k as f64 * self.value).sin(),
        }
    }

    /// `cos(k x)`.
    pub fn cos_mul(&self, k: i64) -> f64 {
        match self.reduced(k) {
            Some((m, den)) => cos_pi_ratio(m, den),
            None => (k as f64 * self.value).cos(),
        }
    }

    /// `e^{i k x}`.
    pub fn cis_mul(&self, k: i64) -> Complex64 {
        Complex64::new(self.cos_mul(k), self.sin_mul(k))
    }

    /// `k·x/π` as `m/den` with `m` reduced modulo `2·den`.
    fn reduced(&self, k: i64) -> Option<(i64, i64)> {
        let (num, den) = self.pi_ratio?;
        let period = 2 * den;
        let m = ((k as i128 * num as i128).rem_euclid(period as i128)) as i64;
        Some((m, den))
    }
}

impl From<f64> for Breakpoint {
    fn from(value: f64) -> Self {
        Self::new(value)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// `sin(π m / den)` for `0 ≤ m < 2 den`, exact at multiples of `π/2`.
fn sin_pi_ratio(m: i64, den: i64) -> f64 {
    let m = m.rem_euclid(2 * den);
    if (2 * m) % den == 0 {
        // quarter turns
        match (2 * m) / den {
            0 | 2 => 0.0,
            1 => 1.0,
            _ => -1.0,
        }
    } else {
        let m = if m > den { m - 2 * den } else { m };
        (PI * m as f64 / den as f64).sin()
    }
}

fn cos_pi_ratio(m: i64, den: i64) -> f64 {
    let m = m.rem_euclid(2 * den);
    if (2 * m) % den == 0 {
        match (2 * m) / den {
            0 => 1.0,
            2 => -1.0,
            _ => 0.0,
        }
    } else {
        let m = if m > den { m - 2 * den } else { m };
        (PI * m as f64 / den as f64).cos()
    }
}

/// Mean-zero step potential: value `values[j]` on `(breakpoints[j], breakpoints[j+1]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPotential {
    breakpoints: Vec<Breakpoint>,
    values: Vec<f64>,
}

impl StepPotential {
    /// Builds a potential from interior breakpoints and one value per piece.
    ///
    /// The outer endpoints `0` and `π` are added here. Rejects potentials
    /// whose mean exceeds [`MEAN_ZERO_TOL`] instead of shifting them.
    pub fn from_pieces(interior: &[Breakpoint], values: &[f64]) -> Result<Self> {
        if values.len() != interior.len() + 1 {
            return Err(Error::Domain(format!(
                "{} pieces need {} interior breakpoints, got {}",
                values.len(),
                values.len().saturating_sub(1),
                interior.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("potential values must be finite".into()));
        }
        let mut breakpoints = Vec::with_capacity(interior.len() + 2);
        breakpoints.push(Breakpoint::pi_ratio(0, 1));
        breakpoints.extend_from_slice(interior);
        breakpoints.push(Breakpoint::pi_ratio(1, 1));
        for w in breakpoints.windows(2) {
            if !(w[0].value < w[1].value) {
                return Err(Error::Domain(format!(
                    "breakpoints must be strictly increasing inside (0, π), got {} then {}",
                    w[0].value, w[1].value
                )));
            }
        }
        let q = Self { breakpoints, values: values.to_vec() };
        let mean = q.integral();
        if mean.abs() > MEAN_ZERO_TOL * q.max_abs().max(1.0) {
            return Err(Error::Domain(format!(
                "potential is not mean-zero: ∫q = {mean:e}"
            )));
        }
        Ok(q)
    }

    /// Two-piece potential `a` on `[0, c]`, `b` on `(c, π]`; requires `a < b`
    /// and `a c + b (π - c) = 0`.
    pub fn from_abc(a: f64, b: f64, c: impl Into<Breakpoint>) -> Result<Self> {
        let c = c.into();
        check_breakpoint(&c)?;
        if !(a < b) {
            return Err(Error::Domain(format!("a < b required, got a = {a}, b = {b}")));
        }
        Self::from_pieces(&[c], &[a, b])
    }

    /// The identically zero potential, stored as two zero pieces split at π/2.
    pub fn zero() -> Self {
        Self {
            breakpoints: vec![
                Breakpoint::pi_ratio(0, 1),
                Breakpoint::pi_ratio(1, 2),
                Breakpoint::pi_ratio(1, 1),
            ],
            values: vec![0.0, 0.0],
        }
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_pieces(&self) -> usize {
        self.values.len()
    }

    /// Iterator over `(left, right, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (Breakpoint, Breakpoint, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    /// `M = max_j |v_j|`.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(a, b, c)` when the potential has exactly two pieces.
    pub fn two_piece(&self) -> Option<(f64, f64, Breakpoint)> {
        match self.values.as_slice() {
            [a, b] => Some((*a, *b, self.breakpoints[1])),
            _ => None,
        }
    }

    /// Jump `b - a` of a two-piece potential.
    pub fn jump(&self) -> Option<f64> {
        self.two_piece().map(|(a, b, _)| b - a)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `q(x)`; at a breakpoint the left piece wins, matching `[0, c]`.
    pub fn value_at(&self, x: f64) -> f64 {
        for (_, right, v) in self.pieces() {
            if x <= right.value {
                return v;
            }
        }
        *self.values.last().expect("at least one piece")
    }

    /// `∫_0^π q`.
    pub fn integral(&self) -> f64 {
        self.pieces()
            .map(|(l, r, v)| v * (r.value - l.value))
            .sum()
    }

    /// Cosine coefficient `C_k = (1/π) ∫_0^π q(x) cos(kx) dx`.
    pub fn cosine_coeff(&self, k: i64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let s: f64 = self
            .pieces()
            .map(|(l, r, v)| v * (r.sin_mul(k) - l.sin_mul(k)))
            .sum();
        s / (PI * k as f64)
    }

    /// Exponential coefficient `q_k = (1/π) ∫_0^π q(x) e^{-ikx} dx`; `q_0 = 0`.
    pub fn exp_coeff(&self, k: i64) -> Complex64 {
        if k == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let s: Complex64 = self
            .pieces()
            .map(|(l, r, v)| v * (l.cis_mul(-k) - r.cis_mul(-k)))
            .sum();
        s / Complex64::new(0.0, PI * k as f64)
    }

    /// Exact antiderivative `Q(x) = ∫_0^x q`.
    pub fn primitive(&self, x: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, π]")));
        }
        Ok(self.primitive_unchecked(x))
    }

    pub(crate) fn primitive_unchecked(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (l, r, v) in self.pieces() {
            if x <= l.value {
                break;
            }
            acc += v * (x.min(r.value) - l.value);
        }
        acc
    }

    /// `p(x) = q(π - x)`: pieces reversed about `π/2`.
    ///
    /// Its coefficients satisfy `p_k = (-1)^k q_{-k}`.
    pub fn reflect(&self) -> Self {
        let interior: Vec<Breakpoint> = self.breakpoints[1..self.breakpoints.len() - 1]
            .iter()
            .rev()
            .map(Breakpoint::mirrored)
            .collect();
        let mut breakpoints = Vec::with_capacity(self.breakpoints.len());
        breakpoints.push(Breakpoint::pi_ratio(0, 1));
        breakpoints.extend(interior);
        breakpoints.push(Breakpoint::pi_ratio(1, 1));
        Self {
            breakpoints,
            values: self.values.iter().rev().copied().collect(),
        }
    }

    /// `-q`.
    pub fn negated(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

fn check_breakpoint(c: &Breakpoint) -> Result<()> {
    if !(c.value > 0.0 && c.value < PI) {
        return Err(Error::Domain(format!("c = {} must lie in (0, π)", c.value)));
    }
    Ok(())
}

/// Kronig–Penney potential with jump `b - a = jump` at `c`, normalised to mean zero:
/// `a = -jump (π - c)/π`, `b = jump c/π`.
pub fn make_kronig_penney(jump: f64, c: impl Into<Breakpoint>) -> Result<StepPotential> {
    let c = c.into();
    check_breakpoint(&c)?;
    if !(jump > 0.0) || !jump.is_finite() {
        return Err(Error::Domain(format!("jump must be positive, got {jump}")));
    }
    // exact rationals when c = (num/den)·π
    let (a, b) = match c.as_pi_ratio() {
        Some((num, den)) => {
            let frac = num as f64 / den as f64;
            let rest = (den - num) as f64 / den as f64;
            (-jump * rest, jump * frac)
        }
        None => (-jump * (PI - c.value) / PI, jump * c.value / PI),
    };
    StepPotential::from_pieces(&[c], &[a, b])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> StepPotential {
        make_kronig_penney(1.0, Breakpoint::pi_ratio(1, 2)).unwrap()
    }

    #[test]
    fn kronig_penney_unit_step() {
        let q = half();
        let (a, b, c) = q.two_piece().unwrap();
        assert_eq!(a, -0.5);
        assert_eq!(b, 0.5);
        assert_eq!(c.value(), PI / 2.0);
        assert!(q.integral().abs() < 1e-15);
        assert_eq!(q.max_abs(), 0.5);
        assert_eq!(q.jump(), Some(1.0));
    }

    #[test]
    fn kronig_penney_third() {
        let q = make_kronig_penney(2.0, Breakpoint::pi_ratio(1, 3)).unwrap();
        let (a, b, c) = q.two_piece().unwrap();
        assert!((a + 4.0 / 3.0).abs() < 1e-15);
        assert!((b - 2.0 / 3.0).abs() < 1e-15);
        assert!((a * c.value() + b * (PI - c.value())).abs() < 1e-14);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(make_kronig_penney(0.0, 1.0).is_err());
        assert!(make_kronig_penney(-1.0, 1.0).is_err());
        assert!(make_kronig_penney(1.0, 0.0).is_err());
        assert!(make_kronig_penney(1.0, PI).is_err());
        assert!(StepPotential::from_abc(0.0, 0.0, 1.0).is_err());
        assert!(StepPotential::from_abc(0.5, -0.5, PI / 2.0).is_err());
        // not mean-zero
        assert!(StepPotential::from_abc(-0.5, 0.6, PI / 2.0).is_err());
        assert!(StepPotential::from_abc(-0.5, 0.5, PI / 2.0).is_ok());
    }

    #[test]
    fn cosine_coeff_closed_form() {
        let q = half();
        assert!((q.cosine_coeff(1) + 1.0 / PI).abs() < 1e-16);
        assert_eq!(q.cosine_coeff(2), 0.0);
        assert_eq!(q.cosine_coeff(0), 0.0);
        assert_eq!(q.cosine_coeff(-3), q.cosine_coeff(3));
        // KP closed form C_k = (a - b) sin(kc)/(πk)
        let q = make_kronig_penney(2.0, 1.1).unwrap();
        let (a, b, c) = q.two_piece().unwrap();
        for k in 1..30 {
            let closed = (a - b) * (k as f64 * c.value()).sin() / (PI * k as f64);
            assert!((q.cosine_coeff(k) - closed).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_coeff_matches_closed_form() {
        let q = half();
        let q2 = q.exp_coeff(2);
        assert!(q2.re.abs() < 1e-16 && (q2.im - 1.0 / PI).abs() < 1e-16);
        assert_eq!(q.exp_coeff(0), Complex64::new(0.0, 0.0));
        assert_eq!(q.exp_coeff(-1), q.exp_coeff(1).conj());

        let q = make_kronig_penney(1.3, 0.7).unwrap();
        let (a, b, c) = q.two_piece().unwrap();
        for k in [-7i64, -2, -1, 1, 2, 5, 12] {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let lit = ((b - a) * Complex64::from_polar(1.0, -(k as f64) * c.value()) + a
                - sign * b)
                / Complex64::new(0.0, PI * k as f64);
            assert!((q.exp_coeff(k) - lit).norm() < 1e-15, "k = {k}");
        }
    }

    #[test]
    fn primitive_values() {
        let q = half();
        assert!((q.primitive(PI / 2.0).unwrap() + PI / 4.0).abs() < 1e-15);
        assert_eq!(q.primitive(0.0).unwrap(), 0.0);
        assert!(q.primitive(PI).unwrap().abs() < 1e-15);
        assert!(q.primitive(-0.1).is_err());
        assert!(q.primitive(4.0).is_err());
    }

    #[test]
    fn reflect_mirrors_pieces() {
        let q = half();
        let p = q.reflect();
        assert_eq!(p.values(), &[0.5, -0.5]);
        assert_eq!(p.breakpoints()[1].value(), PI / 2.0);
        assert_eq!(p.reflect(), q);

        let q = make_kronig_penney(1.0, Breakpoint::pi_ratio(1, 3)).unwrap();
        let p = q.reflect();
        assert_eq!(p.breakpoints()[1].as_pi_ratio(), Some((2, 3)));
        for k in -9i64..=9 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((p.exp_coeff(k) - sign * q.exp_coeff(-k)).norm() < 1e-15);
        }
    }

    #[test]
    fn exact_trig_at_pi_ratios() {
        let c = Breakpoint::pi_ratio(1, 2);
        for n in 1..50 {
            assert_eq!(c.sin_mul(2 * n), 0.0);
            assert_eq!(c.cos_mul(2 * n), if n % 2 == 0 { 1.0 } else { -1.0 });
        }
        let c = Breakpoint::pi_ratio(1, 3);
        assert_eq!(c.sin_mul(3), 0.0);
        assert!((c.sin_mul(1) - (PI / 3.0).sin()).abs() < 1e-16);
        assert!((c.cos_mul(-2) - (2.0 * PI / 3.0).cos()).abs() < 1e-16);
    }

    #[test]
    fn multi_piece() {
        let q = StepPotential::from_pieces(
            &[Breakpoint::pi_ratio(1, 4), Breakpoint::pi_ratio(1, 2)],
            &[1.0, -3.0, 1.0],
        )
        .unwrap();
        assert_eq!(q.num_pieces(), 3);
        assert!(q.two_piece().is_none());
        assert_eq!(q.value_at(0.1), 1.0);
        assert_eq!(q.value_at(1.0), -3.0);
        assert!(q.primitive(PI).unwrap().abs() < 1e-14);
        assert!(StepPotential::from_pieces(&[1.0.into(), 0.5.into()], &[1.0, 0.0, -1.0]).is_err());
    }
}
