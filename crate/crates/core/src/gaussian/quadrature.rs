//! Gauss–Hermite rules for expectations under the standard normal.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Nodes and weights with `Σ w_i f(x_i) ≈ E[f(U)]`, `U ~ N(0,1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    order: usize,
}

const MAX_NEWTON: usize = 200;
/// Beyond this the asymptotic root guesses start landing on the wrong roots.
pub const MAX_ORDER: usize = 150;

impl QuadratureRule {
    /// The `order`-point rule. Roots of the orthonormal Hermite polynomial are
    /// found by Newton's method from asymptotic starting guesses, largest first.
    pub fn gauss_hermite(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::Domain(format!("quadrature order {order} must lie in 1..={MAX_ORDER}")));
        }
        let n = order;
        let mut t = vec![0.0; n];
        let mut w = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * t[0],
                3 => 1.91 * z - 0.91 * t[1],
                _ => 2.0 * z - t[i - 2],
            };
            let mut converged = false;
            let mut pp = 0.0;
            for _ in 0..MAX_NEWTON {
                let (p1, deriv) = hermite_orthonormal(n, z);
                pp = deriv;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Numerical(format!("Hermite root {i} of order {n} did not converge")));
            }
            let (_, deriv) = hermite_orthonormal(n, z);
            pp = if deriv.is_finite() { deriv } else { pp };
            t[i] = z;
            t[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        if n % 2 == 1 {
            t[n / 2] = 0.0;
        }
        // physicists' rule (weight e^{-t²}) to the standard normal
        let nodes = t.iter().rev().map(|x| x * std::f64::consts::SQRT_2).collect();
        let weights: Vec<f64> = w.iter().rev().map(|x| x / PI.sqrt()).collect();
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!("order-{n} rule integrates 1 to {mass}")));
        }
        Ok(QuadratureRule { nodes, weights, order })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `E[f(U)]` for `U ~ N(0,1)`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `E[f(U,V)]` for independent standard normals, tensor rule.
    pub fn expect2(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (&x, &wx) in self.nodes.iter().zip(&self.weights) {
            let mut inner = 0.0;
            for (&y, &wy) in self.nodes.iter().zip(&self.weights) {
                inner += wy * f(x, y);
            }
            acc += wx * inner;
        }
        acc
    }
}

/// Value of the orthonormal Hermite function `h_n(z)` (with `e^{-z²/2}` folded
/// in at `n = 0` via `π^{-1/4}`) and the derivative factor `√(2n)·h_{n-1}(z)`.
fn hermite_orthonormal(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25);
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial_odd(k: u32) -> f64 {
        (1..=k).filter(|i| i % 2 == 1).map(f64::from).product()
    }

    #[test]
    fn reproduces_normal_moments() {
        for order in [1, 2, 5, 8, 20, 64, 128, 150] {
            let r = QuadratureRule::gauss_hermite(order).unwrap();
            assert_eq!(r.nodes().len(), order);
            assert!(r.weights().iter().all(|&w| w > 0.0));
            assert!((r.expect(|_| 1.0) - 1.0).abs() < 1e-12, "order {order}");
            assert!(r.expect(|x| x).abs() < 1e-12);
            // exact for degree < 2n
            for k in (2..2 * order.min(10) as u32).step_by(2) {
                let m = r.expect(|x| x.powi(k as i32));
                let exact = double_factorial_odd(k - 1);
                assert!((m - exact).abs() < 1e-10 * exact, "order {order} moment {k}: {m} vs {exact}");
            }
        }
    }

    #[test]
    fn nodes_sorted_and_symmetric() {
        let r = QuadratureRule::gauss_hermite(9).unwrap();
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        for i in 0..9 {
            assert!((r.nodes()[i] + r.nodes()[8 - i]).abs() < 1e-13);
        }
        assert_eq!(r.nodes()[4], 0.0);
    }

    #[test]
    fn smooth_expectation() {
        // E[cos U] = e^{-1/2}
        let r = QuadratureRule::gauss_hermite(32).unwrap();
        assert!((r.expect(f64::cos) - (-0.5f64).exp()).abs() < 1e-14);
        let r2 = r.expect2(|x, y| (x * y).cos());
        // E[cos(UV)] = E[e^{-V²/2}] = 1/√2
        assert!((r2 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(QuadratureRule::gauss_hermite(0).is_err());
        assert!(QuadratureRule::gauss_hermite(MAX_ORDER + 1).is_err());
    }
}
