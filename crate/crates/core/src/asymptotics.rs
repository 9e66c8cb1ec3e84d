//! Sharp large-`n` asymptotics.
//!
//! For a source potential `q` and index `n`,
//!
//! ```text
//! Q(x,n) = ∫_0^x q(t) e^{i2nt} dt - q_{-2n} x
//! G(x,n) = ∫_0^x q(t) e^{i2nt} dt + (π/2) q_{-2n} (e^{ix} - 1)
//! D_1(n,f) = i/(4nπ) ∫_0^π f(x) (Q(x,n) - Q_{n,0}) e^{-i2nx} dx
//! D_2(n,f) = i/(4nπ) ∫_0^π f(x) G(x,n) e^{-i2nx} dx
//! B_{1,n}  = -(1/π) ∫_0^π Q(x)² cos 2nx dx,   Q(x) = ∫_0^x q
//! ```
//!
//! with `Q_{n,0}` the mean of `Q(·,n)` and `p(x) = q(π - x)`. The published
//! identities built from these (`a1_identity`, `sharp_estimate`,
//! `second_order_kp`, `kp_closed_forms`) are transcribed as stated; the
//! `*_corrected` variants are the versions that agree with the direct
//! series and the transfer-matrix oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::potential::StepPotential;
use crate::quadrature::{panels, GaussLegendre};
use crate::sum::NeumaierSum;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    Ok(())
}

/// `Q(·,n)` and `G(·,n)` for one source potential, in closed form.
#[derive(Clone, Debug)]
pub struct AuxFunctions {
    omega: f64,
    // (left, right, value, e^{iωl}, e^{iωr})
    pieces: Vec<(f64, f64, f64, Complex64, Complex64)>,
    q_minus_2n: Complex64,
    q_mean: Complex64,
}

impl AuxFunctions {
    pub fn new(q: &StepPotential, n: u32) -> Result<Self> {
        check_n(n)?;
        let k = 2 * n as i64;
        let omega = k as f64;
        let pieces: Vec<_> = q
            .pieces()
            .map(|(l, r, v)| (l.value(), r.value(), v, l.cis_mul(k), r.cis_mul(k)))
            .collect();
        let q_minus_2n = q.exp_coeff(-k);
        let iw = Complex64::new(0.0, omega);
        // ∫_0^π of the running integral, piece by piece
        let mut int_prim = Complex64::new(0.0, 0.0);
        for &(l, r, v, el, er) in &pieces {
            let clamped = l * el + (er - el) / iw + (PI - r) * er;
            int_prim += v * (clamped - PI * el) / iw;
        }
        let q_mean = int_prim / PI - q_minus_2n * PI / 2.0;
        Ok(Self { omega, pieces, q_minus_2n, q_mean })
    }

    /// `∫_0^x q(t) e^{i2nt} dt`.
    fn running(&self, x: f64) -> Complex64 {
        let iw = Complex64::new(0.0, self.omega);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(l, r, v, el, er) in &self.pieces {
            if x <= l {
                break;
            }
            let ex = if x >= r { er } else { Complex64::from_polar(1.0, self.omega * x) };
            acc += v * (ex - el);
        }
        acc / iw
    }

    pub fn q_aux(&self, x: f64) -> Complex64 {
        self.running(x) - self.q_minus_2n * x
    }

    pub fn g_aux(&self, x: f64) -> Complex64 {
        self.running(x) + (PI / 2.0) * self.q_minus_2n * (Complex64::from_polar(1.0, x) - 1.0)
    }

    /// `Q_{n,0}`.
    pub fn q_mean(&self) -> Complex64 {
        self.q_mean
    }

    /// `q_{-2n}`.
    pub fn q_minus_2n(&self) -> Complex64 {
        self.q_minus_2n
    }
}

/// `(Q(x,n), G(x,n))`.
pub fn eval_aux(q: &StepPotential, n: u32, x: f64) -> Result<(Complex64, Complex64)> {
    if !(0.0..=PI).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, π]")));
    }
    let aux = AuxFunctions::new(q, n)?;
    Ok((aux.q_aux(x), aux.g_aux(x)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DParts {
    pub d1: Complex64,
    pub d2: Complex64,
}

impl DParts {
    pub fn total(&self) -> Complex64 {
        self.d1 + self.d2
    }
}

/// `D_1(n, weight)` and `D_2(n, weight)` with `Q`, `G` built from `source`.
pub fn d_parts(source: &StepPotential, weight: &StepPotential, n: u32) -> Result<DParts> {
    let aux = AuxFunctions::new(source, n)?;
    let cuts: Vec<f64> = source
        .breakpoints()
        .iter()
        .chain(weight.breakpoints())
        .map(|b| b.value())
        .collect();
    let rule = GaussLegendre::standard();
    let omega = aux.omega;
    let q0 = aux.q_mean;
    let (mut i1, mut i2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (lo, hi) in panels(&cuts, PI / omega) {
        let w = weight.value_at(0.5 * (lo + hi));
        if w == 0.0 {
            continue;
        }
        i1 += w * rule.integrate_complex(lo, hi, |x| {
            (aux.q_aux(x) - q0) * Complex64::from_polar(1.0, -omega * x)
        });
        i2 += w * rule.integrate_complex(lo, hi, |x| {
            aux.g_aux(x) * Complex64::from_polar(1.0, -omega * x)
        });
    }
    let pre = I / (4.0 * n as f64 * PI);
    Ok(DParts { d1: pre * i1, d2: pre * i2 })
}

/// `D(n, f) = D_1(n, f) + D_2(n, f)` with `Q`, `G` built from `q`.
pub fn d_functional(q: &StepPotential, f: &StepPotential, n: u32) -> Result<Complex64> {
    Ok(d_parts(q, f, n)?.total())
}

/// `B_{1,n} = -(1/π) ∫_0^π Q(x)² cos 2nx dx`, exact.
pub fn b_integral(q: &StepPotential, n: u32) -> Result<f64> {
    check_n(n)?;
    let k = 2 * n as i64;
    let w = k as f64;
    // antiderivatives of x^m cos(wx), m = 0, 1, 2
    let f = |x: f64, s: f64, c: f64| {
        (
            s / w,
            x * s / w + c / (w * w),
            x * x * s / w + 2.0 * x * c / (w * w) - 2.0 * s / (w * w * w),
        )
    };
    let mut acc = NeumaierSum::new();
    for (l, r, v) in q.pieces() {
        let alpha = q.primitive_unchecked(l.value()) - v * l.value();
        let (l0, l1, l2) = f(l.value(), l.sin_mul(k), l.cos_mul(k));
        let (r0, r1, r2) = f(r.value(), r.sin_mul(k), r.cos_mul(k));
        acc += alpha * alpha * (r0 - l0);
        acc += 2.0 * alpha * v * (r1 - l1);
        acc += v * v * (r2 - l2);
    }
    Ok(-acc.sum() / PI)
}

/// Kronig–Penney closed forms, transcribed term by term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KpClosedForms {
    pub d1q: f64,
    pub d2q: Complex64,
    pub dq: Complex64,
    pub d1p: Complex64,
    pub d2p: Complex64,
    pub dp: Complex64,
    pub b: f64,
    /// Closed form of `-C_{2n} + A_{1,n} - B_{1,n}`.
    pub combined: Complex64,
}

pub fn kp_closed_forms(q: &StepPotential, n: u32) -> Result<KpClosedForms> {
    check_n(n)?;
    let (a, b, c) = q
        .two_piece()
        .ok_or(Error::NotTwoPiece { pieces: q.num_pieces() })?;
    let ni = n as i64;
    let nf = n as f64;
    let (n2, n3, n4) = (nf * nf, nf.powi(3), nf.powi(4));
    let m1 = 2.0 * nf - 1.0;
    let ba = b - a;
    let b2a2 = b * b - a * a;
    let pi2 = PI * PI;

    let sin2 = c.sin_mul(2 * ni);
    let cos2 = c.cos_mul(2 * ni);
    let cos4 = c.cos_mul(4 * ni);
    let e2 = c.cis_mul(2 * ni);
    let em2 = c.cis_mul(-2 * ni);
    let e1 = c.cis_mul(1);
    let e2m1 = c.cis_mul(2 * ni - 1);
    let sin2m1 = c.sin_mul(2 * ni - 1);
    let sin4m1 = c.sin_mul(4 * ni - 1);
    let cos4m1 = c.cos_mul(4 * ni - 1);

    let d1q = -a * b / (8.0 * n2) + b2a2 * sin2 / (16.0 * PI * n3)
        - ba * ba * (1.0 - cos2) / (8.0 * pi2 * n4);

    let d2q = -a * b / (8.0 * n2) + I * b2a2 * (em2 - 1.0) / (16.0 * PI * n3)
        - I * b * ba * (1.0 - em2) * (e2 + e1) / (16.0 * n2 * m1)
        + I * b * ba * (cos2 - 1.0) / (16.0 * n3)
        + ba * ba * (cos2 - 1.0) / (32.0 * PI * n4)
        + ba * (em2 - 1.0) * ((b + a) * e2 + ba * e1) / (16.0 * PI * n2 * m1 * m1);

    let dq = -a * b / (4.0 * n2) + b2a2 * sin2 / (8.0 * PI * n3)
        - ba * ba * (1.0 - cos2) / (8.0 * pi2 * n4)
        + I * b2a2 * (cos2 - 1.0) / (16.0 * PI * n3)
        + I * b * ba * (cos2 - 1.0) / (16.0 * n3)
        - I * b * ba * (1.0 - em2) * (e2 + e1) / (16.0 * n2 * m1)
        + ba * ba * (cos2 - 1.0) / (32.0 * PI * n4)
        + ba * (em2 - 1.0) * ((b + a) * e2 + ba * e1) / (16.0 * PI * n2 * m1 * m1);

    let sq = (e2 - 1.0) * (e2 - 1.0);
    let d1p = a * b / (8.0 * n2) - I * ba * (b + 3.0 * a) * sq / (32.0 * PI * n3)
        + ba * ba * sq / (16.0 * pi2 * n4);

    let d2p = a * b / (8.0 * n2) + I * ba * (1.0 - e2m1) * (e2 - 1.0) / (16.0 * n2 * m1)
        + (b2a2 + ba * ba * e2m1) * (e2 - 1.0) / (16.0 * PI * n2 * m1 * m1)
        - I * a * ba * sq / (32.0 * n3)
        + ba * ba * sq / (64.0 * PI * n4)
        + I * a * ba * sq / (16.0 * PI * n3);

    let dp = a * b / (4.0 * n2) + I * (a * a - b * b) * sq / (32.0 * PI * n3)
        + I * ba * (1.0 - e2m1) * (e2 - 1.0) / (16.0 * n2 * m1)
        - I * a * ba * sq / (32.0 * n3)
        + ba * ba * sq / (64.0 * PI * n4)
        + ba * ba * sq / (16.0 * pi2 * n4)
        + (b2a2 + ba * ba * e2m1) * (e2 - 1.0) / (16.0 * PI * n2 * m1 * m1);

    let bb = a * b * cos2 / (2.0 * n2) - b2a2 * sin2 / (4.0 * PI * n3);

    let combined = ba / (2.0 * PI * nf) * sin2
        + a * b * (1.0 - 2.0 * cos2) / (4.0 * n2)
        + ba * (cos2 - 1.0) * (2.0 * a * sin2 + I * b) / (16.0 * n3)
        + b2a2 * (2.0 * sin2 * (2.0 + cos2) + I * (cos2 - 1.0)) / (16.0 * PI * n3)
        + ba * ba * cos2 * (cos2 - 1.0) / (16.0 * pi2 * n4)
        - (-ba * (2.0 * (sin2 + sin2m1 - sin4m1) + I * b * (1.0 - em2) * (e2 + e1)))
            / (16.0 * n2 * m1)
        + ba * ba * (cos4 - cos2) / (32.0 * PI * n4)
        + (b2a2 * (em2 - 1.0) - ba * ba * (e1 + e2m1 - 2.0 * cos4m1))
            / (16.0 * PI * n2 * m1 * m1);

    Ok(KpClosedForms { d1q, d2q, dq, d1p, d2p, dp, b: bb, combined })
}

/// Truncated `(A_{1,n}, B_{1,n})` at `λ = n²`:
/// `Σ_{|k| ≤ cutoff, k ∉ {0, -2n}} C_k² / (n² - (n+k)²)` and the same with `C_k C_{k+2n}`.
pub fn direct_series_a1b1(q: &StepPotential, n: u32, cutoff: u64) -> Result<(f64, f64)> {
    check_n(n)?;
    if cutoff < 10 * n as u64 {
        return Err(Error::Domain(format!("cutoff {cutoff} below 10·n = {}", 10 * n)));
    }
    let n = n as i64;
    let k_max = cutoff as i64;
    let offset = k_max;
    let table: Vec<f64> = (-k_max..=k_max + 2 * n).map(|k| q.cosine_coeff(k)).collect();
    let c = |k: i64| table[(k + offset) as usize];
    let (mut a, mut b) = (NeumaierSum::new(), NeumaierSum::new());
    // largest |k| first so the tail is accumulated before the dominant terms
    for k in (1..=k_max).rev().flat_map(|k| [k, -k]) {
        if k == -2 * n {
            continue;
        }
        let den = -((k * (2 * n + k)) as f64);
        let ck = c(k);
        a += ck * ck / den;
        b += ck * c(k + 2 * n) / den;
    }
    Ok((a.sum(), b.sum()))
}

/// Literal right-hand side `C_{2n}²/(4n²) + D(n,q) + 2 Re D(n,p)`.
pub fn a1_identity(q: &StepPotential, n: u32) -> Result<Complex64> {
    let p = q.reflect();
    let c2n = q.cosine_coeff(2 * n as i64);
    let nf = n as f64;
    let dq = d_functional(q, q, n)?;
    let dp = d_functional(q, &p, n)?;
    Ok(c2n * c2n / (4.0 * nf * nf) + dq + 2.0 * dp.re)
}

/// `A_{1,n}(n²)` through the functionals, in the form that matches the series.
///
/// `Re(I_1) + Re(2 I_2) - C_{2n}²/(4n²)` with
/// `I_1 = D_1(q;q) + D_2(q;q) - iπ q_{-2n} q_{2n-1}/(8n)` and
/// `2 I_2 = D_1(p;q) - D_2(p;q) + iπ p_{-2n} q_{2n-1}/(8n)`, where
/// `D(src;w)` builds `Q`, `G` from `src` and weights by `w`.
pub fn a1_identity_corrected(q: &StepPotential, n: u32) -> Result<f64> {
    check_n(n)?;
    let p = q.reflect();
    let ni = n as i64;
    let nf = n as f64;
    let qq = d_parts(q, q, n)?;
    let pq = d_parts(&p, q, n)?;
    let q_odd = q.exp_coeff(2 * ni - 1);
    let i1 = qq.d1 + qq.d2 - I * PI * q.exp_coeff(-2 * ni) * q_odd / (8.0 * nf);
    let two_i2 = pq.d1 - pq.d2 + I * PI * p.exp_coeff(-2 * ni) * q_odd / (8.0 * nf);
    let c2n = q.cosine_coeff(2 * ni);
    Ok(i1.re + two_i2.re - c2n * c2n / (4.0 * nf * nf))
}

/// Sharp estimate `n² - C_{2n} + (1/π)∫Q² cos 2nx + D(n,q) + 2 Re D(n,p)`, real part.
///
/// `(1/π)∫Q² cos 2nx = -B_{1,n}`, so the integral enters as `-B`, matching
/// `a_1 = A_{1,n} - B_{1,n}` in the series.
pub fn sharp_estimate(q: &StepPotential, n: u32) -> Result<f64> {
    let nf = n as f64;
    let c2n = q.cosine_coeff(2 * n as i64);
    let b = b_integral(q, n)?;
    let dq = d_functional(q, q, n)?;
    let dp = d_functional(q, &q.reflect(), n)?;
    Ok(nf * nf - c2n - b + dq.re + 2.0 * dp.re)
}

/// `n² - C_{2n} + A_{1,n} - B_{1,n}` with `A_{1,n}` from [`a1_identity_corrected`].
pub fn sharp_estimate_corrected(q: &StepPotential, n: u32) -> Result<f64> {
    let nf = n as f64;
    let c2n = q.cosine_coeff(2 * n as i64);
    Ok(nf * nf - c2n + a1_identity_corrected(q, n)? - b_integral(q, n)?)
}

/// `n² + (b-a) sin(2nc)/(2πn) + ab(1 - 2cos 2nc)/(4n²)`, as stated.
pub fn second_order_kp(q: &StepPotential, n: u32) -> Result<f64> {
    check_n(n)?;
    let (a, b, c) = q
        .two_piece()
        .ok_or(Error::NotTwoPiece { pieces: q.num_pieces() })?;
    let ni = n as i64;
    let nf = n as f64;
    Ok(nf * nf + (b - a) * c.sin_mul(2 * ni) / (2.0 * PI * nf)
        + a * b * (1.0 - 2.0 * c.cos_mul(2 * ni)) / (4.0 * nf * nf))
}

/// Two-term formula with the second-order term `-ab(1 + 2cos 2nc)/(4n²)`.
pub fn second_order_kp_corrected(q: &StepPotential, n: u32) -> Result<f64> {
    check_n(n)?;
    let (a, b, c) = q
        .two_piece()
        .ok_or(Error::NotTwoPiece { pieces: q.num_pieces() })?;
    let ni = n as i64;
    let nf = n as f64;
    Ok(nf * nf + (b - a) * c.sin_mul(2 * ni) / (2.0 * PI * nf)
        - a * b * (1.0 + 2.0 * c.cos_mul(2 * ni)) / (4.0 * nf * nf))
}

/// `n² - C_{2n} + Σ_{k ∉ {0,-2n}} C_k (C_k - C_{k+2n}) / (n² - (n+k)²)`, truncated at `|k| ≤ cutoff`.
pub fn eq8_estimate(q: &StepPotential, n: u32, cutoff: u64) -> Result<f64> {
    let (a, b) = direct_series_a1b1(q, n, cutoff)?;
    let nf = n as f64;
    Ok(nf * nf - q.cosine_coeff(2 * n as i64) + a - b)
}
