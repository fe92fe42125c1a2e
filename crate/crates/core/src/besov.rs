//! Gaussian Besov-Lipschitz norms.
//!
//! For `α >= 0`, `k` an integer above `α` and `u^{(k)} = ∂_t^k P_t f`:
//!
//! - `q < ∞`: seminorm `(∫_0^∞ (t^{k-α} ‖u^{(k)}(·,t)‖_{p,γ})^q dt/t)^{1/q}`,
//! - `q = ∞`: `A_k(f) = sup_t t^{k-α} ‖u^{(k)}(·,t)‖_{p,γ}`,
//!
//! and the full norm adds `‖f‖_{p,γ}`. Also hosts the Hardy-inequality
//! checker and the derivative-decay report used by the harness.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{chaos_project, check_p, lp_norm_of_samples, GaussHermiteGrid, HermiteExpansion};
use crate::quadrature::{log_grid, EndBehavior, TimeQuadrature};

/// Largest `p` accepted by the Besov routines; the spatial grid is sized for it.
pub const MAX_P: f64 = 8.0;

/// Smallest integer strictly greater than `alpha` (so `smallest_k(1.0) == 2`).
pub fn smallest_k(alpha: f64) -> u32 {
    alpha.max(0.0).floor() as u32 + 1
}

/// Second Besov exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QExponent {
    Finite(f64),
    #[serde(with = "inf_marker")]
    Infinite,
}

mod inf_marker {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("inf")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            Ok(())
        } else {
            Err(serde::de::Error::custom("expected \"inf\""))
        }
    }
}

impl fmt::Display for QExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QExponent::Finite(q) => write!(f, "{q}"),
            QExponent::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub alpha: f64,
    pub p: f64,
    pub q: QExponent,
    pub k: u32,
}

impl BesovParams {
    /// Parameters with `k = smallest_k(alpha)`.
    pub fn new(alpha: f64, p: f64, q: QExponent) -> Result<Self> {
        Self::with_k(alpha, p, q, smallest_k(alpha))
    }

    pub fn with_k(alpha: f64, p: f64, q: QExponent, k: u32) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::param("alpha", alpha, "need finite alpha >= 0"));
        }
        check_p(p)?;
        if p > MAX_P {
            return Err(Error::param("p", p, "p above 8 is not supported by the spatial grid"));
        }
        if let QExponent::Finite(q) = q {
            if !(q >= 1.0) || !q.is_finite() {
                return Err(Error::param("q", q, "need 1 <= q < ∞ or the ∞ marker"));
            }
        }
        if !((k as f64) > alpha) {
            return Err(Error::param("k", k as f64, "need k > alpha"));
        }
        Ok(BesovParams { alpha, p, q, k })
    }
}

/// Settings for the `t` direction: the log rule for `q < ∞` and the sup
/// search for `q = ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovQuadrature {
    pub time: TimeQuadrature,
    pub sup: SupGrid,
}

impl Default for BesovQuadrature {
    fn default() -> Self {
        BesovQuadrature {
            time: TimeQuadrature::new(-16.0, 7.0, 512).expect("valid default"),
            sup: SupGrid::default(),
        }
    }
}

impl BesovQuadrature {
    /// Both `t` grids with their step divided by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        BesovQuadrature {
            time: self.time.refined(factor),
            sup: SupGrid {
                n_points: (self.sup.n_points - 1) * factor.max(1) + 1,
                ..self.sup
            },
        }
    }
}

/// Log grid for `A_k`: a coarse scan followed by zoom rounds around the best node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
    /// Each round rescans the bracket around the current best node with 21 points.
    pub zoom_rounds: u32,
}

impl Default for SupGrid {
    fn default() -> Self {
        SupGrid {
            t_min: 1e-6,
            t_max: 50.0,
            n_points: 200,
            zoom_rounds: 3,
        }
    }
}

impl SupGrid {
    /// Maximizes `g` over the grid. Returns `(argmax, max)`.
    pub fn maximize(&self, mut g: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
        let coarse = log_grid(self.t_min, self.t_max, self.n_points.max(3));
        let values = coarse.iter().map(|&t| g(t)).collect::<Result<Vec<_>>>()?;
        zoom_max(&coarse, &values, self.zoom_rounds, g)
    }
}

/// Starting from tabulated `values` on an ascending grid, rescans the bracket
/// around the best node `rounds` times with 21 log-spaced points.
fn zoom_max(
    grid: &[f64],
    values: &[f64],
    rounds: u32,
    mut g: impl FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let mut best = argmax(values);
    let (mut best_t, mut best_v) = (grid[best], values[best]);
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(grid.len() - 1)]);
    for _ in 0..rounds {
        if !(hi > lo) {
            break;
        }
        let fine = log_grid(lo, hi, 21);
        let vals = fine.iter().map(|&t| g(t)).collect::<Result<Vec<_>>>()?;
        best = argmax(&vals);
        if vals[best] > best_v {
            best_v = vals[best];
            best_t = fine[best];
        }
        lo = fine[best.saturating_sub(1)];
        hi = fine[(best + 1).min(fine.len() - 1)];
    }
    Ok((best_t, best_v))
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Spatial grid used for `‖·‖_{p,γ}` of degree-`degree` data: exact for
/// `p = 2`, `4·degree + 8` nodes per axis otherwise.
pub fn spatial_grid_for(dim: usize, degree: u32, p: f64) -> Result<GaussHermiteGrid> {
    if p == 2.0 {
        GaussHermiteGrid::exact_for_degree(dim, degree)
    } else {
        GaussHermiteGrid::new(dim, 4 * degree as usize + 8)
    }
}

/// Chaos components of `f` sampled once on a grid, so that
/// `u^{(k)}(·,t) = Σ_n (-√n)^k e^{-t√n} J_n f` costs one pass per `t`.
pub struct ChaosSamples<'g> {
    grid: &'g GaussHermiteGrid,
    roots: Vec<f64>,
    samples: Vec<Vec<f64>>,
    buffer: std::cell::RefCell<Vec<f64>>,
}

impl<'g> ChaosSamples<'g> {
    pub fn new(f: &HermiteExpansion, grid: &'g GaussHermiteGrid) -> Result<Self> {
        let mut roots = Vec::new();
        let mut samples = Vec::new();
        for n in f.orders() {
            roots.push((n as f64).sqrt());
            samples.push(grid.sample(&chaos_project(f, n))?);
        }
        Ok(ChaosSamples {
            grid,
            roots,
            samples,
            buffer: std::cell::RefCell::new(vec![0.0; grid.len()]),
        })
    }

    /// True when `f` has no nonconstant chaos component.
    pub fn is_constant(&self) -> bool {
        self.roots.iter().all(|&r| r == 0.0)
    }

    /// `‖u^{(k)}(·, t)‖_{p,γ}`.
    pub fn derivative_norm(&self, t: f64, k: u32, p: f64) -> Result<f64> {
        let mut buf = self.buffer.borrow_mut();
        buf.iter_mut().for_each(|v| *v = 0.0);
        for (root, s) in self.roots.iter().zip(&self.samples) {
            let factor = if k == 0 {
                (-t * root).exp()
            } else if *root == 0.0 {
                continue;
            } else {
                (-root).powi(k as i32) * (-t * root).exp()
            };
            for (b, v) in buf.iter_mut().zip(s) {
                *b += factor * v;
            }
        }
        lp_norm_of_samples(&buf, p, self.grid)
    }
}

/// `‖u^{(k)}(·, t)‖_{p,γ}` for a single `t`.
pub fn derivative_norm(f: &HermiteExpansion, t: f64, k: u32, p: f64, grid: &GaussHermiteGrid) -> Result<f64> {
    ChaosSamples::new(f, grid)?.derivative_norm(t, k, p)
}

/// The `q < ∞` seminorm.
pub fn besov_seminorm(
    f: &HermiteExpansion,
    params: &BesovParams,
    tq: &TimeQuadrature,
    grid: &GaussHermiteGrid,
) -> Result<f64> {
    let q = match params.q {
        QExponent::Finite(q) => q,
        QExponent::Infinite => {
            return Err(Error::param("q", f64::INFINITY, "seminorm needs q < ∞; use ak_constant"))
        }
    };
    let chaos = ChaosSamples::new(f, grid)?;
    seminorm_from_samples(&chaos, params.alpha, params.p, q, params.k, tq)
}

fn seminorm_from_samples(
    chaos: &ChaosSamples<'_>,
    alpha: f64,
    p: f64,
    q: f64,
    k: u32,
    tq: &TimeQuadrature,
) -> Result<f64> {
    if chaos.is_constant() {
        return Ok(0.0);
    }
    let weight = k as f64 - alpha;
    let mut values = Vec::with_capacity(tq.n_points());
    for t in tq.nodes() {
        let n = chaos.derivative_norm(t, k, p)?;
        values.push((t.powf(weight) * n).powf(q));
    }
    let integral = tq.integrate_values(&values, EndBehavior::head(weight * q));
    Ok(integral.max(0.0).powf(1.0 / q))
}

/// `A_k(f)`: the smallest `A` with `‖u^{(k)}(·,t)‖_{p,γ} <= A t^{α-k}` over the sup grid.
pub fn ak_constant(
    f: &HermiteExpansion,
    alpha: f64,
    p: f64,
    k: u32,
    sup: &SupGrid,
    grid: &GaussHermiteGrid,
) -> Result<f64> {
    BesovParams::with_k(alpha, p, QExponent::Infinite, k)?;
    let chaos = ChaosSamples::new(f, grid)?;
    ak_from_samples(&chaos, alpha, p, k, sup)
}

fn ak_from_samples(chaos: &ChaosSamples<'_>, alpha: f64, p: f64, k: u32, sup: &SupGrid) -> Result<f64> {
    if chaos.is_constant() {
        return Ok(0.0);
    }
    let weight = k as f64 - alpha;
    let (_, best) = sup.maximize(|t| Ok(t.powf(weight) * chaos.derivative_norm(t, k, p)?))?;
    Ok(best)
}

/// Pieces of a Besov norm.
#[derive(Clone, Debug, PartialEq)]
pub struct BesovResult {
    /// `‖f‖_{p,γ}`.
    pub lp_part: f64,
    /// Seminorm (`q < ∞`) or `A_k` (`q = ∞`); the part added to `lp_part`.
    pub seminorm: f64,
    /// `Some(A_k)` when `q = ∞`.
    pub ak: Option<f64>,
    pub total: f64,
    pub params: BesovParams,
    pub t_grid: TGridMeta,
}

/// Which `t` grid produced a [`BesovResult`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TGridMeta {
    LogUniform { v_min: f64, v_max: f64, n_points: usize },
    Sup { t_min: f64, t_max: f64, n_points: usize, zoom_rounds: u32 },
}

impl Serialize for BesovResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BesovResult", 6)?;
        st.serialize_field("lp", &self.lp_part)?;
        st.serialize_field("semi", &self.seminorm)?;
        st.serialize_field("ak", &self.ak)?;
        st.serialize_field("total", &self.total)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("t_grid", &self.t_grid)?;
        st.end()
    }
}

impl BesovResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Full norm `‖f‖_{p,γ} + seminorm` (or `+ A_k` for `q = ∞`).
pub fn besov_norm(
    f: &HermiteExpansion,
    params: &BesovParams,
    quad: &BesovQuadrature,
    grid: &GaussHermiteGrid,
) -> Result<BesovResult> {
    let chaos = ChaosSamples::new(f, grid)?;
    besov_norm_from_samples(&chaos, params, quad)
}

/// Same as [`besov_norm`] on pre-sampled chaos components.
pub fn besov_norm_from_samples(
    chaos: &ChaosSamples<'_>,
    params: &BesovParams,
    quad: &BesovQuadrature,
) -> Result<BesovResult> {
    let lp_part = chaos.derivative_norm(0.0, 0, params.p)?;
    let (seminorm, ak, t_grid) = match params.q {
        QExponent::Finite(q) => {
            let s = seminorm_from_samples(chaos, params.alpha, params.p, q, params.k, &quad.time)?;
            let tq = &quad.time;
            (
                s,
                None,
                TGridMeta::LogUniform {
                    v_min: tq.v_min(),
                    v_max: tq.v_max(),
                    n_points: tq.n_points(),
                },
            )
        }
        QExponent::Infinite => {
            let a = ak_from_samples(chaos, params.alpha, params.p, params.k, &quad.sup)?;
            let sg = quad.sup;
            (
                a,
                Some(a),
                TGridMeta::Sup {
                    t_min: sg.t_min,
                    t_max: sg.t_max,
                    n_points: sg.n_points,
                    zoom_rounds: sg.zoom_rounds,
                },
            )
        }
    };
    Ok(BesovResult {
        lp_part,
        seminorm,
        ak,
        total: lp_part + seminorm,
        params: *params,
        t_grid,
    })
}

/// Box sampling for the Lipschitz-space alias.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxSampling {
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl Default for BoxSampling {
    fn default() -> Self {
        BoxSampling {
            half_width: 6.0,
            points_per_axis: 121,
        }
    }
}

/// `B^α_{∞,∞}` (the Gaussian Lipschitz space) with every sup norm taken over
/// the box `[-R, R]^d` instead of all of `ℝ^d`.
///
/// Polynomials are unbounded, so on them this is a box-restricted quantity,
/// not the true Lipschitz norm. Meant for bounded test functions.
pub fn lipschitz_norm_on_box(
    f: &HermiteExpansion,
    alpha: f64,
    sup: &SupGrid,
    sampling: &BoxSampling,
) -> Result<f64> {
    let k = smallest_k(alpha);
    let d = f.dim();
    let n = sampling.points_per_axis.max(2);
    let axis: Vec<f64> = (0..n)
        .map(|i| -sampling.half_width + 2.0 * sampling.half_width * i as f64 / (n - 1) as f64)
        .collect();
    let total = n.pow(d as u32);
    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            let mut x = vec![0.0; d];
            for a in (0..d).rev() {
                x[a] = axis[idx % n];
                idx /= n;
            }
            x
        })
        .collect();
    let sup_abs = |g: &HermiteExpansion| -> Result<f64> {
        let mut m: f64 = 0.0;
        for x in &points {
            m = m.max(g.eval(x)?.abs());
        }
        Ok(m)
    };
    let base = sup_abs(f)?;
    let weight = k as f64 - alpha;
    let (_, ak) = sup.maximize(|t| {
        let u = crate::semigroups::time_derivative(f, t, k)?;
        Ok(t.powf(weight) * sup_abs(&u)?)
    })?;
    Ok(base + ak)
}

/// Which Hardy inequality to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyKind {
    /// `∫_0^∞ (∫_0^x f)^p x^{-r-1} dx <= (p/r)^p ∫_0^∞ (y f(y))^p y^{-r-1} dy`.
    Head,
    /// `∫_0^∞ (∫_x^∞ f)^p x^{r-1} dx <= (p/r)^p ∫_0^∞ (y f(y))^p y^{r-1} dy`.
    Tail,
}

/// Both sides of a Hardy inequality; `f64::INFINITY` marks a divergent side.
///
/// `rhs = (p/r)^p · weighted_integral`. The variant with the constant `p/r`
/// coincides for `p = 1` and is false for `p > 1`
/// (`f = y e^{-y}`, `p = 2`, `r = 1/2` gives `lhs ≈ 1.3516 > 1.1750`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyOutcome {
    pub lhs: f64,
    pub rhs: f64,
    /// `∫_0^∞ (y f(y))^p y^{∓r-1} dy`.
    pub weighted_integral: f64,
}

impl HardyOutcome {
    /// Right side with the constant `p/r` in place of `(p/r)^p`.
    pub fn rhs_linear_constant(&self, p: f64, r: f64) -> f64 {
        p / r * self.weighted_integral
    }

    /// `lhs <= rhs·(1 + rel_tol)`, with `∞ <= ∞` counted as holding.
    pub fn holds(&self, rel_tol: f64) -> bool {
        if self.rhs.is_infinite() {
            return true;
        }
        self.lhs.is_finite() && self.lhs <= self.rhs * (1.0 + rel_tol)
    }
}

/// Log grid `y = e^v` used by [`hardy_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyGrid {
    pub v_min: f64,
    pub v_max: f64,
    pub n_points: usize,
}

impl Default for HardyGrid {
    fn default() -> Self {
        HardyGrid {
            v_min: -30.0,
            v_max: 30.0,
            n_points: 12001,
        }
    }
}

/// Evaluates both sides of a Hardy inequality for a nonnegative `f`.
///
/// The inner integral is a cumulative trapezoid in `v = log y` with an
/// Euler-Maclaurin end correction; every truncated end is closed with the
/// power law read off the last two samples, and an end that does not decay
/// marks the side as divergent.
pub fn hardy_check(
    f: impl Fn(f64) -> f64,
    p: f64,
    r: f64,
    kind: HardyKind,
    grid: &HardyGrid,
) -> Result<HardyOutcome> {
    check_p(p)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::param("r", r, "need r > 0"));
    }
    let n = grid.n_points.max(16);
    let h = (grid.v_max - grid.v_min) / (n - 1) as f64;
    let ys: Vec<f64> = (0..n).map(|j| (grid.v_min + h * j as f64).exp()).collect();
    let fy: Vec<f64> = ys.iter().map(|&y| f(y)).collect();
    if let Some(bad) = fy.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::param("f", *bad, "Hardy inequalities need f >= 0"));
    }
    // ∫ f dy = ∫ y f(y) dv
    let g: Vec<f64> = ys.iter().zip(&fy).map(|(y, v)| y * v).collect();

    let inner: Vec<f64> = match kind {
        HardyKind::Head => cumulative(&g, h),
        HardyKind::Tail => {
            let rev: Vec<f64> = g.iter().rev().copied().collect();
            let mut c = cumulative(&rev, h);
            c.reverse();
            c
        }
    };
    let sign = match kind {
        HardyKind::Head => -1.0,
        HardyKind::Tail => 1.0,
    };
    let lhs = if inner.iter().any(|v| v.is_infinite()) {
        f64::INFINITY
    } else {
        let vals: Vec<f64> = inner
            .iter()
            .zip(&ys)
            .map(|(fi, x)| fi.powf(p) * x.powf(sign * r))
            .collect();
        integrate_with_estimated_ends(&vals, h)
    };
    let rhs_vals: Vec<f64> = g
        .iter()
        .zip(&ys)
        .map(|(gy, y)| gy.powf(p) * y.powf(sign * r))
        .collect();
    let weighted_integral = integrate_with_estimated_ends(&rhs_vals, h);
    Ok(HardyOutcome {
        lhs,
        rhs: (p / r).powf(p) * weighted_integral,
        weighted_integral,
    })
}

/// Local exponent `a` with `v_j ≈ C e^{a·v}` from two neighbouring samples.
fn local_exponent(near: f64, far: f64, h: f64) -> f64 {
    (far / near).ln() / h
}

/// `∫_{-∞}^{∞} F dv` from samples on a uniform `v` grid; `∞` if an end does not decay.
fn integrate_with_estimated_ends(vals: &[f64], h: f64) -> f64 {
    let n = vals.len();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    if !scale.is_finite() {
        return f64::INFINITY;
    }
    let mut total = h * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[n - 1]));
    let (mut slope_head, mut slope_tail) = (0.0, 0.0);
    if vals[0] != 0.0 {
        let a = local_exponent(vals[0], vals[1], h);
        if !(a > 1e-3) {
            return f64::INFINITY;
        }
        total += vals[0] / a;
        slope_head = a * vals[0];
    }
    if vals[n - 1] != 0.0 {
        let b = local_exponent(vals[n - 1], vals[n - 2], h);
        if !(b > 1e-3) {
            return f64::INFINITY;
        }
        total += vals[n - 1] / b;
        slope_tail = -b * vals[n - 1];
    }
    total - h * h / 12.0 * (slope_tail - slope_head)
}

/// `C_i = ∫_{-∞}^{v_i} g dv` on a uniform grid, `∞` entries if the head diverges.
fn cumulative(g: &[f64], h: f64) -> Vec<f64> {
    let n = g.len();
    let mut start = 0.0;
    let mut slope0 = 0.0;
    if g[0] != 0.0 {
        let a = local_exponent(g[0], g[1], h);
        if !(a > 1e-3) {
            return vec![f64::INFINITY; n];
        }
        start = g[0] / a;
        slope0 = a * g[0];
    }
    let slope = |i: usize| -> f64 {
        if i == 0 {
            slope0
        } else if i + 1 == n {
            (3.0 * g[i] - 4.0 * g[i - 1] + g[i - 2]) / (2.0 * h)
        } else {
            (g[i + 1] - g[i - 1]) / (2.0 * h)
        }
    };
    let mut out = Vec::with_capacity(n);
    let mut trap = 0.0;
    out.push(start);
    for i in 1..n {
        trap += 0.5 * h * (g[i - 1] + g[i]);
        let corrected = start + trap - h * h / 12.0 * (slope(i) - slope0);
        out.push(corrected.max(0.0));
    }
    out
}

/// Smooth nonnegative functions on `(0, ∞)` for exercising [`hardy_check`].
///
/// They vanish at least linearly at `0` and decay exponentially or
/// algebraically at `∞`; some make one side of a Hardy inequality diverge
/// for large `r`, which the checker reports as `∞`.
pub fn hardy_battery() -> Vec<(&'static str, fn(f64) -> f64)> {
    vec![
        ("y e^-y", |y| y * (-y).exp()),
        ("y^2 e^-y", |y| y * y * (-y).exp()),
        ("y^3 e^-2y", |y| y.powi(3) * (-2.0 * y).exp()),
        ("y^1.5 e^-y", |y| y.powf(1.5) * (-y).exp()),
        ("y^2 e^-y^2", |y| y * y * (-y * y).exp()),
        ("y^2.5 e^-y/2", |y| y.powf(2.5) * (-0.5 * y).exp()),
        ("y^2/(1+y)^6", |y| y * y / (1.0 + y).powi(6)),
        ("y^3/(1+y^2)^4", |y| y.powi(3) / (1.0 + y * y).powi(4)),
        ("y^2 e^-y (1+sin y)", |y| y * y * (-y).exp() * (1.0 + y.sin())),
        ("y^2 e^-(y-3)^2", |y| y * y * (-(y - 3.0) * (y - 3.0)).exp()),
        ("y^4 e^-y", |y| y.powi(4) * (-y).exp()),
        ("y^2 e^-3y", |y| y * y * (-3.0 * y).exp()),
        ("y^1.2 e^-y^1.5", |y| y.powf(1.2) * (-y.powf(1.5)).exp()),
        ("y^2 e^-y (2+cos 3y)", |y| y * y * (-y).exp() * (2.0 + (3.0 * y).cos())),
        ("y^3 e^-y/(1+y)", |y| y.powi(3) * (-y).exp() / (1.0 + y)),
        ("e^-1/y e^-y", |y| (-1.0 / y - y).exp()),
        ("y^2 e^-sqrt y", |y| y * y * (-y.sqrt()).exp()),
        ("y^2/(1+y^4)", |y| y * y / (1.0 + y.powi(4))),
        ("y^2/(1+y^2)^3", |y| y * y / (1.0 + y * y).powi(3)),
        ("y^3 e^-y (1+sin(5y)/2)", |y| y.powi(3) * (-y).exp() * (1.0 + 0.5 * (5.0 * y).sin())),
    ]
}

/// `t ↦ ‖u^{(k)}(·,t)‖_{p,γ}` on a grid, with the monotonicity verdict and the
/// fitted constant `C = sup_t t^k ‖u^{(k)}(·,t)‖_{p,γ} / ‖f‖_{p,γ}`.
///
/// The sup is the grid maximum refined by zooming in around the best node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KdecayReport {
    pub k: u32,
    pub p: f64,
    pub t: Vec<f64>,
    pub norms: Vec<f64>,
    pub non_increasing: bool,
    /// Largest relative increase `norms[i+1]/norms[i] - 1` (0 when none).
    pub worst_increase: f64,
    pub fitted_c: f64,
}

/// Relative slack allowed between adjacent norms before counting an increase.
pub const MONOTONE_SLACK: f64 = 1e-12;

pub fn kdecay_report(
    f: &HermiteExpansion,
    p: f64,
    k: u32,
    tgrid: &[f64],
    grid: &GaussHermiteGrid,
) -> Result<KdecayReport> {
    if k == 0 {
        return Err(Error::param("k", 0.0, "decay report needs k >= 1"));
    }
    check_p(p)?;
    let chaos = ChaosSamples::new(f, grid)?;
    let norms: Vec<f64> = tgrid
        .iter()
        .map(|&t| chaos.derivative_norm(t, k, p))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for w in norms.windows(2) {
        if w[0] > 0.0 {
            worst = worst.max(w[1] / w[0] - 1.0);
        } else if w[1] > 0.0 {
            worst = f64::INFINITY;
        }
    }
    let base = chaos.derivative_norm(0.0, 0, p)?;
    let fitted_c = if base > 0.0 && tgrid.len() >= 2 {
        let scaled: Vec<f64> = tgrid.iter().zip(&norms).map(|(t, n)| t.powi(k as i32) * n).collect();
        let (_, sup) = zoom_max(tgrid, &scaled, 3, |t| Ok(t.powi(k as i32) * chaos.derivative_norm(t, k, p)?))?;
        sup / base
    } else {
        0.0
    };
    Ok(KdecayReport {
        k,
        p,
        t: tgrid.to_vec(),
        norms,
        non_increasing: worst <= MONOTONE_SLACK,
        worst_increase: worst,
        fitted_c,
    })
}
