//! Log-substituted trapezoid rules for integrals over `(0, ∞)`.
//!
//! With `t = e^v` the measure `dt/t` becomes `dv`, so an integrand with
//! power-law behavior at `0` or `∞` turns into an exponential in `v` and the
//! trapezoid rule converges fast. The truncated ends are closed off with the
//! local power law: a head behaving like `C t^a` contributes `F(t_min)/a`, a
//! tail like `C t^{-b}` contributes `F(t_max)/b`, and the first
//! Euler-Maclaurin term uses the same exponents for `F'`.

use crate::error::{Error, Result};

/// Local power-law exponents of `F` (the integrand against `dt/t`) at the two
/// truncation points. `None` means `F` is already negligible there.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EndBehavior {
    /// `a > 0` with `F(t) ~ C t^a` as `t → 0`.
    pub head: Option<f64>,
    /// `b > 0` with `F(t) ~ C t^{-b}` as `t → ∞`.
    pub tail: Option<f64>,
}

impl EndBehavior {
    pub fn head(a: f64) -> Self {
        EndBehavior {
            head: Some(a),
            tail: None,
        }
    }

    pub fn both(a: f64, b: f64) -> Self {
        EndBehavior {
            head: Some(a),
            tail: Some(b),
        }
    }
}

/// Trapezoid rule in `v = log t` on `[v_min, v_max]` with `n_points` nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeQuadrature {
    v_min: f64,
    v_max: f64,
    n_points: usize,
}

impl Default for TimeQuadrature {
    /// `t ∈ [e^{-16}, e^7]`, 1024 nodes.
    fn default() -> Self {
        TimeQuadrature {
            v_min: -16.0,
            v_max: 7.0,
            n_points: 1024,
        }
    }
}

impl TimeQuadrature {
    pub fn new(v_min: f64, v_max: f64, n_points: usize) -> Result<Self> {
        if !(v_min < v_max) || !v_min.is_finite() || !v_max.is_finite() {
            return Err(Error::param("v_min", v_min, "need finite v_min < v_max"));
        }
        if n_points < 16 {
            return Err(Error::param("n_points", n_points as f64, "need at least 16 nodes"));
        }
        Ok(TimeQuadrature {
            v_min,
            v_max,
            n_points,
        })
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn t_min(&self) -> f64 {
        self.v_min.exp()
    }

    pub fn t_max(&self) -> f64 {
        self.v_max.exp()
    }

    pub fn step(&self) -> f64 {
        (self.v_max - self.v_min) / (self.n_points - 1) as f64
    }

    /// Same interval with the step divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        TimeQuadrature {
            n_points: (self.n_points - 1) * factor.max(1) + 1,
            ..*self
        }
    }

    /// Nodes `t_j = e^{v_j}`, ascending.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n_points)
            .map(|j| {
                if j + 1 == self.n_points {
                    self.v_max.exp()
                } else {
                    (self.v_min + h * j as f64).exp()
                }
            })
            .collect()
    }

    /// `∫_0^∞ F(t) dt/t`.
    pub fn integrate(&self, mut integrand: impl FnMut(f64) -> f64, ends: EndBehavior) -> f64 {
        let values: Vec<f64> = self.nodes().into_iter().map(&mut integrand).collect();
        self.integrate_values(&values, ends)
    }

    /// Like [`integrate`](Self::integrate) with `F(t_j)` already tabulated on [`nodes`](Self::nodes).
    pub fn integrate_values(&self, values: &[f64], ends: EndBehavior) -> f64 {
        assert_eq!(values.len(), self.n_points, "one value per node");
        let h = self.step();
        let first = values[0];
        let last = values[self.n_points - 1];
        let interior: f64 = values.iter().sum::<f64>() - 0.5 * (first + last);
        let mut total = h * interior;
        let mut slope_head = 0.0;
        let mut slope_tail = 0.0;
        if let Some(a) = ends.head {
            total += first / a;
            slope_head = a * first;
        }
        if let Some(b) = ends.tail {
            total += last / b;
            slope_tail = -b * last;
        }
        total - h * h / 12.0 * (slope_tail - slope_head)
    }

    /// Magnitude of the neglected part of the head closure, `|F(t_min)| · t_min / a`.
    pub fn head_error_estimate(&self, first_value: f64, head_exponent: f64) -> f64 {
        (first_value / head_exponent).abs() * self.t_min()
    }

    /// Tail beyond `t_max` for an integrand decaying like `e^{-rate·t}`.
    pub fn tail_error_estimate(&self, last_value: f64, rate: f64) -> f64 {
        last_value.abs() / (rate * self.t_max())
    }
}

/// `n` log-spaced points covering `[t_min, t_max]`.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    assert!(t_min > 0.0 && t_max > t_min && n >= 2);
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..n)
        .map(|j| {
            if j + 1 == n {
                t_max
            } else {
                (a + (b - a) * j as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    #[test]
    fn validates_parameters() {
        assert!(TimeQuadrature::new(1.0, 0.0, 64).is_err());
        assert!(TimeQuadrature::new(0.0, 1.0, 8).is_err());
        assert!(TimeQuadrature::new(f64::NEG_INFINITY, 1.0, 64).is_err());
        assert!(TimeQuadrature::new(-3.0, 2.0, 16).is_ok());
    }

    #[test]
    fn gamma_integrals() {
        let tq = TimeQuadrature::default();
        for beta in [0.3, 0.5, 1.0, 2.5] {
            for lambda in [1.0, 2.0, 3.0] {
                let got = tq.integrate(|t| t.powf(beta) * (-lambda * t).exp(), EndBehavior::head(beta));
                let want = gamma(beta) * lambda.powf(-beta);
                assert!((got - want).abs() <= 1e-8 * want, "β={beta} λ={lambda}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn algebraic_tail_closure() {
        // ∫ t^{-1/2}(1 - e^{-t}) dt/t = 2√π.
        let tq = TimeQuadrature::default();
        let got = tq.integrate(
            |t| t.powf(-0.5) * -(-t).exp_m1(),
            EndBehavior::both(0.5, 0.5),
        );
        let want = 2.0 * std::f64::consts::PI.sqrt();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn refinement_keeps_interval() {
        let tq = TimeQuadrature::new(-4.0, 4.0, 17).unwrap();
        let r = tq.refined(2);
        assert_eq!(r.n_points(), 33);
        assert!((r.step() * 2.0 - tq.step()).abs() < 1e-15);
        assert_eq!(r.nodes()[32], tq.nodes()[16]);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 20.0, 60);
        assert_eq!(g.len(), 60);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert_eq!(g[59], 20.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
