//! Gaussian Riesz and Bessel potentials and fractional derivatives.
//!
//! Each operator has a spectral form (a multiplier in `|ν|`) and an integral
//! form built from the Poisson-Hermite semigroup. The integral forms are
//! evaluated per chaos on the scalar multiplier integrals, so they check the
//! operator representation without any spatial quadrature error.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::hermite::{HermiteExpansion, SpectralMultiplier};
use crate::quadrature::{EndBehavior, TimeQuadrature};

/// Warning threshold for the truncation estimates of an integral path.
pub const TRUNCATION_WARN: f64 = 1e-8;

/// Order `β > 0` together with the smallest integer `k > β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FractionalOrder {
    beta: f64,
    k_rep: u32,
}

impl FractionalOrder {
    pub fn new(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(FractionalOrder {
            beta,
            k_rep: beta.floor() as u32 + 1,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Smallest integer strictly greater than `β`; integer `β` gets `β + 1`.
    pub fn k_rep(&self) -> u32 {
        self.k_rep
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::param("beta", beta, "order must be finite and > 0"));
    }
    Ok(())
}

/// `I_β f`: multiplier `|ν|^{-β/2}`, zero on constants.
pub fn riesz_potential(f: &HermiteExpansion, beta: f64) -> Result<HermiteExpansion> {
    check_beta(beta)?;
    Ok(SpectralMultiplier::RieszPot { beta }.apply(f))
}

/// `𝒥_β f`: multiplier `(1 + √|ν|)^{-β}`.
pub fn bessel_potential(f: &HermiteExpansion, beta: f64) -> Result<HermiteExpansion> {
    check_beta(beta)?;
    Ok(SpectralMultiplier::BesselPot { beta }.apply(f))
}

/// `D^β f`: multiplier `|ν|^{β/2}`.
pub fn riesz_derivative(f: &HermiteExpansion, beta: f64) -> Result<HermiteExpansion> {
    check_beta(beta)?;
    Ok(SpectralMultiplier::RieszDer { beta }.apply(f))
}

/// `𝒟^β f`: multiplier `(1 + √|ν|)^β`.
pub fn bessel_derivative(f: &HermiteExpansion, beta: f64) -> Result<HermiteExpansion> {
    check_beta(beta)?;
    Ok(SpectralMultiplier::BesselDer { beta }.apply(f))
}

/// Result of an integral-representation path, with its truncation estimates.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralEvaluation {
    pub value: HermiteExpansion,
    /// Largest per-chaos estimate of the error left by the `t → 0` closure.
    pub head_error: f64,
    /// Largest per-chaos estimate of the mass beyond `t_max`.
    pub tail_error: f64,
}

impl IntegralEvaluation {
    pub fn warned(&self) -> bool {
        self.head_error > TRUNCATION_WARN || self.tail_error > TRUNCATION_WARN
    }
}

/// Per-chaos scalar integral with error bookkeeping.
struct ScalarIntegral {
    value: f64,
    head_error: f64,
    tail_error: f64,
}

fn integrate_scalar(
    tq: &TimeQuadrature,
    integrand: impl Fn(f64) -> f64,
    ends: EndBehavior,
    decay_rate: f64,
) -> ScalarIntegral {
    let nodes = tq.nodes();
    let values: Vec<f64> = nodes.iter().map(|&t| integrand(t)).collect();
    let value = tq.integrate_values(&values, ends);
    let first = values[0];
    let last = values[values.len() - 1];
    let head_error = ends
        .head
        .map(|a| tq.head_error_estimate(first, a))
        .unwrap_or(first.abs());
    let tail_error = match ends.tail {
        // closure is exact up to the exponentially small deviation from the power law
        Some(b) => (last / b).abs() * (-decay_rate * tq.t_max()).exp(),
        None => tq.tail_error_estimate(last, decay_rate),
    };
    ScalarIntegral {
        value,
        head_error,
        tail_error,
    }
}

fn apply_per_order(
    f: &HermiteExpansion,
    mut multiplier: impl FnMut(u32) -> Option<ScalarIntegral>,
) -> IntegralEvaluation {
    let mut head_error: f64 = 0.0;
    let mut tail_error: f64 = 0.0;
    let mut table = HashMap::new();
    for n in f.orders() {
        let m = match multiplier(n) {
            Some(s) => {
                head_error = head_error.max(s.head_error);
                tail_error = tail_error.max(s.tail_error);
                s.value
            }
            None => 0.0,
        };
        table.insert(n, m);
    }
    IntegralEvaluation {
        value: f.map_by_order(|n| table[&n]),
        head_error,
        tail_error,
    }
}

/// `I_β f = Γ(β)^{-1} ∫_0^∞ t^{β-1} (P_t f − P_∞ f) dt` with `P_∞ f` the mean.
pub fn riesz_potential_integral(
    f: &HermiteExpansion,
    beta: f64,
    tq: &TimeQuadrature,
) -> Result<IntegralEvaluation> {
    check_beta(beta)?;
    let norm = gamma(beta);
    Ok(apply_per_order(f, |n| {
        if n == 0 {
            return None;
        }
        let root = (n as f64).sqrt();
        let s = integrate_scalar(
            tq,
            |t| t.powf(beta) * (-t * root).exp() / norm,
            EndBehavior::head(beta),
            root,
        );
        Some(s)
    }))
}

/// `𝒥_β f = Γ(β)^{-1} ∫_0^∞ t^β e^{-t} P_t f dt/t`.
pub fn bessel_potential_integral(
    f: &HermiteExpansion,
    beta: f64,
    tq: &TimeQuadrature,
) -> Result<IntegralEvaluation> {
    check_beta(beta)?;
    let norm = gamma(beta);
    Ok(apply_per_order(f, |n| {
        let rate = 1.0 + (n as f64).sqrt();
        Some(integrate_scalar(
            tq,
            |t| t.powf(beta) * (-t * rate).exp() / norm,
            EndBehavior::head(beta),
            rate,
        ))
    }))
}

/// Per-chaos factor of `(P_t − I)^k`, i.e. `Δ_t^k(e^{-λ·}, 0) = (e^{-λt} − 1)^k`.
///
/// Evaluated in product form with `expm1`; the binomial sum cancels
/// catastrophically for `λt ≪ 1`.
fn difference_factor(lambda: f64, t: f64, k: u32) -> f64 {
    (-lambda * t).exp_m1().powi(k as i32)
}

/// `c_β^k`-normalized `∫_0^∞ t^{-β} (e^{-λt} − 1)^k dt/t`; equals `λ^β`.
fn derivative_multiplier(lambda: f64, order: &FractionalOrder, c: f64, tq: &TimeQuadrature) -> ScalarIntegral {
    let (beta, k) = (order.beta(), order.k_rep());
    integrate_scalar(
        tq,
        |t| t.powf(-beta) * difference_factor(lambda, t, k) / c,
        EndBehavior::both(k as f64 - beta, beta),
        lambda,
    )
}

/// `D^β f = (c_β^k)^{-1} ∫_0^∞ t^{-β-1} (P_t − I)^k f dt`, `k` the smallest integer above `β`.
///
/// For `0 < β < 1` this is the single-difference form with `c_β`.
pub fn riesz_derivative_integral(
    f: &HermiteExpansion,
    beta: f64,
    tq: &TimeQuadrature,
) -> Result<IntegralEvaluation> {
    let order = FractionalOrder::new(beta)?;
    let c = c_beta_k(beta, order.k_rep())?;
    Ok(apply_per_order(f, |n| {
        if n == 0 {
            return None;
        }
        Some(derivative_multiplier((n as f64).sqrt(), &order, c, tq))
    }))
}

/// `D^β f = (β c_β)^{-1} ∫_0^∞ t^{-β} ∂_t P_t f dt` for `0 < β < 1`.
///
/// The usual hypothesis asks for `f` with two bounded derivatives; on
/// polynomials the identity still holds chaos by chaos, which is all that is
/// evaluated here.
pub fn riesz_derivative_integral_by_parts(
    f: &HermiteExpansion,
    beta: f64,
    tq: &TimeQuadrature,
) -> Result<IntegralEvaluation> {
    check_beta(beta)?;
    if beta >= 1.0 {
        return Err(Error::param("beta", beta, "integration-by-parts form needs 0 < β < 1"));
    }
    let norm = beta * c_beta(beta)?;
    Ok(apply_per_order(f, |n| {
        if n == 0 {
            return None;
        }
        let root = (n as f64).sqrt();
        Some(integrate_scalar(
            tq,
            |t| t.powf(1.0 - beta) * (-root * (-t * root).exp()) / norm,
            EndBehavior::head(1.0 - beta),
            root,
        ))
    }))
}

/// `𝒟^β f = (c_β^k)^{-1} ∫_0^∞ t^{-β-1} (e^{-t} P_t − I)^k f dt`.
pub fn bessel_derivative_integral(
    f: &HermiteExpansion,
    beta: f64,
    tq: &TimeQuadrature,
) -> Result<IntegralEvaluation> {
    let order = FractionalOrder::new(beta)?;
    let c = c_beta_k(beta, order.k_rep())?;
    Ok(apply_per_order(f, |n| {
        Some(derivative_multiplier(1.0 + (n as f64).sqrt(), &order, c, tq))
    }))
}

/// `Δ_s^k(g, t) = Σ_{j=0}^k C(k,j) (−1)^j g(t + (k−j)s)`.
pub fn forward_difference(g: impl Fn(f64) -> f64, s: f64, k: u32, t: f64) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * g(t + (k - j) as f64 * s);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// The constants `c_β` (for `0 < β < 1`) and `c_β^k` for a given order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeConstants {
    pub c_beta: Option<f64>,
    pub c_beta_k: f64,
    pub k: u32,
}

impl DerivativeConstants {
    pub fn for_order(order: &FractionalOrder) -> Result<Self> {
        let beta = order.beta();
        Ok(DerivativeConstants {
            c_beta: if beta < 1.0 { Some(c_beta(beta)?) } else { None },
            c_beta_k: c_beta_k(beta, order.k_rep())?,
            k: order.k_rep(),
        })
    }
}

/// `c_β = ∫_0^∞ u^{-β-1} (e^{-u} − 1) du` for `0 < β < 1`.
pub fn c_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::param("beta", beta, "c_β needs 0 < β < 1"));
    }
    c_beta_k(beta, 1)
}

/// `c_β^k = ∫_0^∞ u^{-β-1} (e^{-u} − 1)^k du` for `β > 0`, integer `k > β`.
///
/// Computed by quadrature (not through `Γ`) and cached per `(β, k)`.
pub fn c_beta_k(beta: f64, k: u32) -> Result<f64> {
    check_beta(beta)?;
    if !((k as f64) > beta) {
        return Err(Error::param("k", k as f64, "c_β^k diverges unless k > β"));
    }
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (beta.to_bits(), k);
    if let Some(v) = cache.lock().expect("constant cache poisoned").get(&key) {
        return Ok(*v);
    }
    let rule = TimeQuadrature::new(-40.0, 10.0, 8192).expect("valid rule");
    let value = rule.integrate(
        |u| u.powf(-beta) * difference_factor(1.0, u, k),
        EndBehavior::both(k as f64 - beta, beta),
    );
    cache.lock().expect("constant cache poisoned").insert(key, value);
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{pi0, MultiIndex};

    fn h(nu: Vec<u32>) -> HermiteExpansion {
        HermiteExpansion::basis(nu)
    }

    fn mixed() -> HermiteExpansion {
        HermiteExpansion::from_terms(
            2,
            [
                (vec![0, 0], 0.4),
                (vec![1, 0], -1.0),
                (vec![1, 1], 0.6),
                (vec![0, 4], 0.25),
                (vec![3, 3], -0.8),
            ],
        )
        .unwrap()
    }

    fn coeff(f: &HermiteExpansion, nu: Vec<u32>) -> f64 {
        f.coeff(&MultiIndex::new(nu))
    }

    #[test]
    fn k_rep_is_strictly_greater() {
        assert_eq!(FractionalOrder::new(0.5).unwrap().k_rep(), 1);
        assert_eq!(FractionalOrder::new(1.0).unwrap().k_rep(), 2);
        assert_eq!(FractionalOrder::new(2.5).unwrap().k_rep(), 3);
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(-1.0).is_err());
    }

    #[test]
    fn spectral_examples() {
        assert_eq!(coeff(&riesz_potential(&h(vec![4]), 2.0).unwrap(), vec![4]), 0.25);
        assert!(riesz_potential(&h(vec![0]), 1.0).unwrap().is_empty());
        assert_eq!(riesz_potential(&h(vec![1]), 1.0).unwrap(), h(vec![1]));
        assert!((coeff(&bessel_potential(&h(vec![4]), 3.0).unwrap(), vec![4]) - 1.0 / 27.0).abs() < 1e-16);
        assert_eq!(bessel_potential(&h(vec![0]), 0.7).unwrap(), h(vec![0]));
        assert_eq!(coeff(&riesz_derivative(&h(vec![9]), 1.0).unwrap(), vec![9]), 3.0);
        assert!(riesz_derivative(&h(vec![0]), 1.0).unwrap().is_empty());
        assert_eq!(coeff(&bessel_derivative(&h(vec![4]), 2.0).unwrap(), vec![4]), 9.0);
        assert_eq!(bessel_derivative(&h(vec![0]), 2.0).unwrap(), h(vec![0]));
        for op in [riesz_potential, bessel_potential, riesz_derivative, bessel_derivative] {
            assert!(op(&h(vec![1]), 0.0).is_err());
        }
    }

    #[test]
    fn bessel_potential_small_order_limit() {
        let f = mixed();
        let near = bessel_potential(&f, 1e-12).unwrap();
        assert!(near.sub(&f).unwrap().l2_norm() < 1e-10);
    }

    #[test]
    fn inversions() {
        let f = mixed();
        for beta in [0.3, 0.5, 1.0, 2.5] {
            let a = riesz_derivative(&riesz_potential(&f, beta).unwrap(), beta).unwrap();
            let b = riesz_potential(&riesz_derivative(&f, beta).unwrap(), beta).unwrap();
            assert!(a.sub(&pi0(&f)).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
            assert!(b.sub(&pi0(&f)).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
            let c = bessel_derivative(&bessel_potential(&f, beta).unwrap(), beta).unwrap();
            assert!(c.sub(&f).unwrap().l2_norm() <= 1e-12 * f.l2_norm());
        }
    }

    #[test]
    fn potential_integral_examples() {
        let tq = TimeQuadrature::default();
        let r = riesz_potential_integral(&h(vec![4]), 2.0, &tq).unwrap();
        assert!((coeff(&r.value, vec![4]) - 0.25).abs() < 1e-8);
        assert!(!r.warned());
        assert!(riesz_potential_integral(&h(vec![0]), 2.0, &tq).unwrap().value.is_empty());
        let f = HermiteExpansion::from_terms(2, [(vec![1, 0], 1.0), (vec![2, 2], -0.5), (vec![0, 4], 2.0)]).unwrap();
        let spec = riesz_potential(&f, 1.0).unwrap();
        let int = riesz_potential_integral(&f, 1.0, &tq).unwrap().value;
        assert!(spec.sub(&int).unwrap().max_abs_coeff() < 1e-8);

        let b = bessel_potential_integral(&h(vec![4]), 3.0, &tq).unwrap();
        assert!((coeff(&b.value, vec![4]) - 1.0 / 27.0).abs() < 1e-9);
        let b0 = bessel_potential_integral(&h(vec![0]), 3.0, &tq).unwrap();
        assert!((coeff(&b0.value, vec![0]) - 1.0).abs() < 1e-9);
        let f = mixed();
        let spec = bessel_potential(&f, 0.5).unwrap();
        let int = bessel_potential_integral(&f, 0.5, &tq).unwrap().value;
        assert!(spec.sub(&int).unwrap().max_abs_coeff() < 1e-8);
    }

    #[test]
    fn potential_integral_warns_on_short_tail() {
        let short = TimeQuadrature::new(-16.0, 1.0, 256).unwrap();
        assert!(riesz_potential_integral(&h(vec![1]), 0.5, &short).unwrap().warned());
    }

    #[test]
    fn derivative_integral_examples() {
        let tq = TimeQuadrature::default();
        for n in [1u32, 4, 9] {
            let r = riesz_derivative_integral(&h(vec![n]), 0.5, &tq).unwrap();
            let want = (n as f64).powf(0.25);
            assert!((coeff(&r.value, vec![n]) - want).abs() < 1e-7 * want);
        }
        let r = riesz_derivative_integral(&h(vec![4]), 1.5, &tq).unwrap();
        assert!((coeff(&r.value, vec![4]) - 2f64.powf(1.5)).abs() < 1e-6);
        let p = riesz_derivative_integral_by_parts(&h(vec![1]), 0.5, &tq).unwrap();
        assert!((coeff(&p.value, vec![1]) - 1.0).abs() < 1e-7);
        assert!(riesz_derivative_integral_by_parts(&h(vec![1]), 1.5, &tq).is_err());

        let b = bessel_derivative_integral(&h(vec![4]), 0.5, &tq).unwrap();
        assert!((coeff(&b.value, vec![4]) - 3f64.sqrt()).abs() < 1e-7);
        let b0 = bessel_derivative_integral(&h(vec![0]), 0.5, &tq).unwrap();
        assert!((coeff(&b0.value, vec![0]) - 1.0).abs() < 1e-7);
        let f = mixed();
        let spec = bessel_derivative(&f, 1.25).unwrap();
        let int = bessel_derivative_integral(&f, 1.25, &tq).unwrap().value;
        for (nu, c) in spec.terms() {
            assert!((int.coeff(nu) - c).abs() <= 1e-6 * c.abs(), "{nu}");
        }
    }

    #[test]
    fn forward_difference_examples() {
        let g = |t: f64| t.sin() + t * t;
        assert_eq!(forward_difference(g, 0.3, 1, 1.2), g(1.5) - g(1.2));
        for (s, t) in [(0.5, 0.0), (1.25, -3.0), (2.0, 7.5)] {
            assert!((forward_difference(|x| x * x, s, 2, t) - 2.0 * s * s).abs() < 1e-12);
        }
        // (P_s − I)^k acts on chaos n as Δ_s^k(e^{-(·)√n}, 0)
        for k in 1..=3 {
            for n in [1.0f64, 4.0, 7.0] {
                let s = 0.4;
                let delta = forward_difference(|t| (-t * n.sqrt()).exp(), s, k, 0.0);
                assert!((delta - difference_factor(n.sqrt(), s, k)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constants() {
        let c = c_beta(0.5).unwrap();
        assert!((c + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-7, "{c}");
        assert_eq!(c_beta_k(0.5, 1).unwrap(), c);
        assert!(c_beta(1.0).is_err());
        assert!(c_beta_k(2.0, 2).is_err());
        for (beta, k) in [(0.3, 1), (0.3, 2), (1.5, 2), (1.5, 3), (2.5, 3), (2.5, 4)] {
            let v = c_beta_k(beta, k).unwrap();
            assert_eq!(v.signum(), if k % 2 == 0 { 1.0 } else { -1.0 }, "β={beta} k={k}");
        }
        let d = DerivativeConstants::for_order(&FractionalOrder::new(1.5).unwrap()).unwrap();
        assert!(d.c_beta.is_none());
        assert_eq!(d.k, 2);
    }
}
