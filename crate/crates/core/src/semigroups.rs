//! Ornstein-Uhlenbeck semigroup `T_t` and Poisson-Hermite semigroup `P_t`.
//!
//! The spectral forms act on expansions and are the canonical
//! implementations. The Mehler, subordination and kernel forms evaluate at a
//! single point and exist as independent checks of the spectral path.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hermite::{GaussHermiteGrid, HermiteExpansion, SpectralMultiplier};
use crate::quadrature::{EndBehavior, TimeQuadrature};

fn check_time_nonneg(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::param("t", t, "time must be finite and >= 0"));
    }
    Ok(())
}

fn check_time_pos(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::param("t", t, "kernel forms need t > 0"));
    }
    Ok(())
}

/// `T_t f`: multiplies `f̂(ν)` by `e^{-t|ν|}`.
pub fn ou_spectral(f: &HermiteExpansion, t: f64) -> Result<HermiteExpansion> {
    check_time_nonneg(t)?;
    Ok(SpectralMultiplier::Ou { t }.apply(f))
}

/// `T_t f(x) = ∫ f(√(1-e^{-2t}) u + e^{-t} x) γ_d(du)` on a Gauss-Hermite grid.
///
/// Exact when the grid integrates polynomials of degree `deg f` per axis.
pub fn ou_mehler(f: &HermiteExpansion, t: f64, x: &[f64], grid: &GaussHermiteGrid) -> Result<f64> {
    check_time_pos(t)?;
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    if grid.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: grid.dim(),
        });
    }
    let spread = (-(-2.0 * t).exp_m1()).sqrt();
    let shrink = (-t).exp();
    let mut shifted = vec![0.0; x.len()];
    let mut acc = 0.0;
    for (u, w) in grid.points().zip(grid.weights()) {
        for ((s, ui), xi) in shifted.iter_mut().zip(u).zip(x) {
            *s = spread * ui + shrink * xi;
        }
        acc += w * f.eval(&shifted)?;
    }
    Ok(acc)
}

/// `P_t f`: multiplies `f̂(ν)` by `e^{-t√|ν|}`.
pub fn ph_spectral(f: &HermiteExpansion, t: f64) -> Result<HermiteExpansion> {
    check_time_nonneg(t)?;
    Ok(SpectralMultiplier::PoissonHermite { t }.apply(f))
}

/// `u^{(k)}(·, t) = ∂_t^k P_t f`: multiplies `f̂(ν)` by `(-√|ν|)^k e^{-t√|ν|}`.
pub fn time_derivative(f: &HermiteExpansion, t: f64, k: u32) -> Result<HermiteExpansion> {
    check_time_nonneg(t)?;
    Ok(SpectralMultiplier::PoissonDeriv { t, k }.apply(f))
}

/// Discretization of the one-sided 1/2-stable measure `μ_t^{(1/2)}(ds)`.
///
/// Uses the subordination integral in the variable `u = t²/(4s)`,
/// `P_t f = π^{-1/2} ∫ e^{-u} u^{-1/2} T_{t²/4u} f du`, with `u = e^v` and a
/// trapezoid rule in `v`. The head `u → 0` behaves like `u^{1/2}` and is
/// closed analytically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubordinationRule {
    rule: TimeQuadrature,
}

impl Default for SubordinationRule {
    /// `v ∈ [-44, 5]`, 2048 nodes.
    fn default() -> Self {
        SubordinationRule {
            rule: TimeQuadrature::new(-44.0, 5.0, 2048).expect("valid default"),
        }
    }
}

impl SubordinationRule {
    pub fn new(v_min: f64, v_max: f64, n_points: usize) -> Result<Self> {
        Ok(SubordinationRule {
            rule: TimeQuadrature::new(v_min, v_max, n_points)?,
        })
    }

    pub fn quadrature(&self) -> &TimeQuadrature {
        &self.rule
    }

    /// Atoms `(s_j, w_j)` with `Σ w_j g(s_j) ≈ ∫ g(s) μ_t(ds)` for bounded `g`.
    pub fn measure(&self, t: f64) -> Result<Vec<(f64, f64)>> {
        check_time_pos(t)?;
        let h = self.rule.step();
        let us = self.rule.nodes();
        let last = us.len() - 1;
        let inv_sqrt_pi = 1.0 / PI.sqrt();
        Ok(us
            .iter()
            .enumerate()
            .map(|(j, &u)| {
                let density = inv_sqrt_pi * (-u).exp() * u.sqrt();
                let mut w = h * density;
                if j == 0 {
                    // trapezoid end weight, head closure ∫ ~ F/(1/2), Euler-Maclaurin slope term
                    w = density * (0.5 * h + 2.0 + h * h / 12.0 * 0.5);
                } else if j == last {
                    w *= 0.5;
                }
                (t * t / (4.0 * u), w)
            })
            .collect())
    }

    /// `μ_t((0, ∞))` under this discretization.
    pub fn mass(&self, t: f64) -> Result<f64> {
        Ok(self.measure(t)?.iter().map(|(_, w)| w).sum())
    }
}

/// `P_t f(x)` by Bochner subordination, with `T_s` applied spectrally.
pub fn ph_subordination(
    f: &HermiteExpansion,
    t: f64,
    x: &[f64],
    rule: &SubordinationRule,
) -> Result<f64> {
    check_time_pos(t)?;
    // per-chaos point values: a_n = Σ_{|ν|=n} f̂(ν) h_ν(x)
    let orders = f.orders();
    let chaos_values: Vec<(f64, f64)> = orders
        .iter()
        .map(|&n| {
            let part = crate::hermite::chaos_project(f, n);
            part.eval(x).map(|v| (n as f64, v))
        })
        .collect::<Result<_>>()?;
    let mut acc = 0.0;
    for (s, w) in rule.measure(t)? {
        let ts: f64 = chaos_values.iter().map(|(n, a)| a * (-s * n).exp()).sum();
        acc += w * ts;
    }
    Ok(acc)
}

/// Quadrature settings for [`ph_kernel`].
///
/// The kernel's `r ∈ (0, 1)` integral is taken in the variable `r = e^{-s}`,
/// `s = e^w`, so both endpoint singularities become exponential ends in `w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelRule {
    /// How far below `log(t²/4)` the `w` range starts.
    pub head_margin: f64,
    pub w_max: f64,
    pub n_points: usize,
}

impl Default for KernelRule {
    fn default() -> Self {
        KernelRule {
            head_margin: 8.0,
            w_max: 40.0,
            n_points: 1600,
        }
    }
}

/// Poisson-Hermite kernel `p(t, x, y)` against Lebesgue measure `dy`.
///
/// `p = t / (2π^{(d+1)/2}) ∫_0^1 exp(t²/(4 log r)) (-log r)^{-3/2}
/// exp(-|y - r x|²/(1 - r²)) (1 - r²)^{-d/2} dr/r`.
pub fn ph_kernel(t: f64, x: &[f64], y: &[f64], rule: &KernelRule) -> Result<f64> {
    check_time_pos(t)?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let d = x.len() as f64;
    let w_min = (t * t / 4.0).ln() - rule.head_margin;
    if !(w_min < rule.w_max) {
        return Err(Error::param("t", t, "kernel rule range is empty for this t"));
    }
    let tq = TimeQuadrature::new(w_min, rule.w_max, rule.n_points)?;
    let prefactor = t / (2.0 * PI.powf((d + 1.0) / 2.0));
    // integrand in w (s = e^w, dr/r = ds): e^{-t²/4s} s^{-3/2} K_s · s
    let integral = tq.integrate(
        |s| {
            let r = (-s).exp();
            let one_minus_r2 = -(-2.0 * s).exp_m1();
            let dist2: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - r * xi).powi(2)).sum();
            let mehler = (-dist2 / one_minus_r2).exp() / one_minus_r2.powf(d / 2.0);
            (-t * t / (4.0 * s)).exp() / s.sqrt() * mehler
        },
        EndBehavior {
            head: None,
            tail: Some(0.5),
        },
    );
    Ok(prefactor * integral)
}
