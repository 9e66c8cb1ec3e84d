//! Composite Gauss–Legendre quadrature for piecewise-smooth complex integrands.

use std::sync::OnceLock;

use num_complex::Complex64;

/// Nodes per panel.
pub const NODES: usize = 64;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 64-point rule.
    pub fn standard() -> &'static Self {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(NODES))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }

    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, lo: f64, hi: f64, f: F) -> Complex64 {
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<Complex64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Splits `[0, π]` at every `cut` and further so no panel is wider than `max_width`.
pub fn panels(cuts: &[f64], max_width: f64) -> Vec<(f64, f64)> {
    let mut pts: Vec<f64> = cuts.to_vec();
    pts.push(0.0);
    pts.push(std::f64::consts::PI);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let k = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let h = (hi - lo) / k as f64;
        for j in 0..k {
            let a = lo + j as f64 * h;
            let b = if j + 1 == k { hi } else { a + h };
            out.push((a, b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_symmetric() {
        let r = GaussLegendre::standard();
        let s: f64 = r.weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        for i in 0..NODES {
            assert!((r.nodes()[i] + r.nodes()[NODES - 1 - i]).abs() < 1e-15);
        }
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        let r = GaussLegendre::standard();
        for deg in [0, 1, 10, 63, 126] {
            let got = r.integrate(0.0, 1.0, |x| x.powi(deg));
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "deg {deg}: {got} vs {want}");
        }
    }

    #[test]
    fn oscillatory_integral() {
        let r = GaussLegendre::standard();
        let n = 40.0;
        let got: Complex64 = panels(&[], std::f64::consts::PI / (2.0 * n))
            .into_iter()
            .map(|(a, b)| r.integrate_complex(a, b, |x| x * Complex64::from_polar(1.0, -2.0 * n * x)))
            .sum();
        // ∫_0^π x e^{-2inx} dx = iπ/(2n)
        assert!(got.re.abs() < 1e-13);
        assert!((got.im - std::f64::consts::PI / (2.0 * n)).abs() < 1e-13);
    }

    #[test]
    fn panels_respect_cuts_and_width() {
        let p = panels(&[1.0, 2.0], 0.3);
        assert_eq!(p.first().unwrap().0, 0.0);
        assert_eq!(p.last().unwrap().1, std::f64::consts::PI);
        assert!(p.iter().any(|&(a, _)| a == 1.0));
        assert!(p.iter().any(|&(a, _)| a == 2.0));
        assert!(p.iter().all(|&(a, b)| b - a <= 0.3 + 1e-15));
        assert!(p.windows(2).all(|w| w[0].1 == w[1].0));
    }
}
