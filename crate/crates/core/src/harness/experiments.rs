use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::family::{gen_family, stream_rng};
use super::report::{max_of, CaseResult, Check, Provenance, Report, TheoremReport};
use crate::besov::{
    besov_norm, hardy_battery, hardy_check, kdecay_report, smallest_k, spatial_grid_for, BesovParams,
    BesovQuadrature, HardyGrid, HardyKind, QExponent,
};
use crate::error::{Error, Result};
use crate::fractional::{
    self, c_beta, c_beta_k, forward_difference, riesz_derivative_integral_by_parts, IntegralEvaluation,
};
use crate::hermite::{pi0, GaussHermiteGrid, HermiteExpansion, MultiIndex};
use crate::quadrature::{log_grid, TimeQuadrature};
use crate::semigroups::{ou_mehler, ou_spectral, ph_kernel, ph_spectral, ph_subordination, time_derivative};
use crate::semigroups::{KernelRule, SubordinationRule};

/// Registry entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExperimentInfo {
    pub id: &'static str,
    pub summary: &'static str,
}

pub const EXPERIMENTS: &[ExperimentInfo] = &[
    ExperimentInfo {
        id: "riesz-potential-bounded",
        summary: "I_β maps B^α_{p,q} into B^{α+β}_{p,q} for α ≥ 0, β > 0, 1 < p < ∞, 1 ≤ q ≤ ∞",
    },
    ExperimentInfo {
        id: "bessel-potential-bounded",
        summary: "𝒥_β maps B^α_{p,q} into B^{α+β}_{p,q} for α ≥ 0, β > 0, 1 ≤ p < ∞, 1 ≤ q ≤ ∞",
    },
    ExperimentInfo {
        id: "riesz-derivative-bounded-lt1",
        summary: "D^β maps B^α_{p,q} into B^{α-β}_{p,q} for 0 < β < α < 1",
    },
    ExperimentInfo {
        id: "bessel-derivative-bounded-lt1",
        summary: "𝒟^β maps B^α_{p,q} into B^{α-β}_{p,q} for 0 < β < α < 1",
    },
    ExperimentInfo {
        id: "riesz-derivative-bounded",
        summary: "D^β maps B^α_{p,q} into B^{α-β}_{p,q} for 0 < β < α, via k-th order differences",
    },
    ExperimentInfo {
        id: "bessel-derivative-bounded",
        summary: "𝒟^β maps B^α_{p,q} into B^{α-β}_{p,q} for 0 < β < α, via k-th order differences",
    },
    ExperimentInfo {
        id: "inversion",
        summary: "D^β I_β f = I_β D^β f = Π₀f and 𝒟^β 𝒥_β f = 𝒥_β 𝒟^β f = f",
    },
    ExperimentInfo {
        id: "oracles",
        summary: "orthonormality, Mehler/subordination/kernel forms of the semigroups, integral forms of the fractional operators",
    },
    ExperimentInfo {
        id: "lemmas",
        summary: "derivative decay, difference bounds and identities, Hardy inequalities, Besov inclusions, independence of k",
    },
];

/// Namespaces kept for Laguerre and Jacobi analogues; nothing is implemented under them.
pub const RESERVED_NAMESPACES: &[&str] = &["laguerre/", "jacobi/"];

pub fn experiment_list() -> &'static [ExperimentInfo] {
    EXPERIMENTS
}

/// Runs one registered experiment.
pub fn run_experiment(name: &str, config: &ExperimentConfig) -> Result<TheoremReport> {
    if RESERVED_NAMESPACES.iter().any(|ns| name.starts_with(ns)) {
        return Err(Error::ReservedExperiment(name.to_string()));
    }
    let info = EXPERIMENTS
        .iter()
        .find(|e| e.id == name)
        .ok_or_else(|| Error::UnknownExperiment(name.to_string()))?;
    config.validate()?;
    let start = Instant::now();
    let ctx = Ctx::new(config)?;
    let (cases, checks) = match info.id {
        "inversion" => inversion(&ctx)?,
        "oracles" => oracles(&ctx)?,
        "lemmas" => lemmas(&ctx)?,
        id => {
            let b = BOUNDED
                .iter()
                .find(|b| b.id == id)
                .expect("every boundedness id has a spec");
            bounded(&ctx, b)?
        }
    };
    let mut report = TheoremReport::new(info.id, info.summary, ctx.provenance.clone(), cases, checks);
    report.runtime_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs every registered experiment in registry order.
pub fn verify_all(config: &ExperimentConfig) -> Result<Report> {
    run_many(EXPERIMENTS.iter().map(|e| e.id), config)
}

pub fn run_many<'a>(names: impl IntoIterator<Item = &'a str>, config: &ExperimentConfig) -> Result<Report> {
    let reports = names
        .into_iter()
        .map(|n| run_experiment(n, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new(reports))
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    family: Vec<HermiteExpansion>,
    provenance: Provenance,
    quad: BesovQuadrature,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let family = gen_family(cfg.seed, cfg.dimension, cfg.family_size, cfg.max_degree)?;
        let provenance = Provenance::new(&cfg.canonical(), &family)?;
        Ok(Ctx {
            cfg,
            family,
            provenance,
            quad: cfg.besov_quadrature()?,
        })
    }

    fn grid(&self, p: f64) -> Result<GaussHermiteGrid> {
        match self.cfg.grid_nodes {
            Some(m) => GaussHermiteGrid::new(self.cfg.dimension, m),
            None => spatial_grid_for(self.cfg.dimension, self.cfg.max_degree, p),
        }
    }

    fn betas(&self) -> Vec<f64> {
        self.cfg.beta.clone().unwrap_or_else(|| vec![0.3, 0.5, 0.9, 1.5, 2.5])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    RieszPotential,
    BesselPotential,
    RieszDerivative,
    BesselDerivative,
}

impl Op {
    fn spectral(self, f: &HermiteExpansion, beta: f64) -> Result<HermiteExpansion> {
        match self {
            Op::RieszPotential => fractional::riesz_potential(f, beta),
            Op::BesselPotential => fractional::bessel_potential(f, beta),
            Op::RieszDerivative => fractional::riesz_derivative(f, beta),
            Op::BesselDerivative => fractional::bessel_derivative(f, beta),
        }
    }

    fn integral(self, f: &HermiteExpansion, beta: f64, tq: &TimeQuadrature) -> Result<IntegralEvaluation> {
        match self {
            Op::RieszPotential => fractional::riesz_potential_integral(f, beta, tq),
            Op::BesselPotential => fractional::bessel_potential_integral(f, beta, tq),
            Op::RieszDerivative => fractional::riesz_derivative_integral(f, beta, tq),
            Op::BesselDerivative => fractional::bessel_derivative_integral(f, beta, tq),
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Op::RieszPotential => "I_β",
            Op::BesselPotential => "𝒥_β",
            Op::RieszDerivative => "D^β",
            Op::BesselDerivative => "𝒟^β",
        }
    }

    fn target_alpha(self, alpha: f64, beta: f64) -> f64 {
        match self {
            Op::RieszPotential | Op::BesselPotential => alpha + beta,
            Op::RieszDerivative | Op::BesselDerivative => alpha - beta,
        }
    }

    fn is_derivative(self) -> bool {
        matches!(self, Op::RieszDerivative | Op::BesselDerivative)
    }
}

const ALL_OPS: [Op; 4] = [Op::RieszPotential, Op::BesselPotential, Op::RieszDerivative, Op::BesselDerivative];

struct Bounded {
    id: &'static str,
    op: Op,
    hypothesis: &'static str,
    holds: fn(f64, f64, f64) -> bool,
    alpha: &'static [f64],
    beta: &'static [f64],
    p: &'static [f64],
    q: &'static [QExponent],
}

const Q2_INF: &[QExponent] = &[QExponent::Finite(2.0), QExponent::Infinite];
const Q1_INF: &[QExponent] = &[QExponent::Finite(1.0), QExponent::Infinite];

const BOUNDED: &[Bounded] = &[
    Bounded {
        id: "riesz-potential-bounded",
        op: Op::RieszPotential,
        hypothesis: "α ≥ 0, β > 0, 1 < p < ∞",
        holds: |a, b, p| a >= 0.0 && b > 0.0 && p > 1.0,
        alpha: &[0.5],
        beta: &[0.5, 1.5],
        p: &[2.0, 4.0],
        q: Q2_INF,
    },
    Bounded {
        id: "bessel-potential-bounded",
        op: Op::BesselPotential,
        hypothesis: "α ≥ 0, β > 0, 1 ≤ p < ∞",
        holds: |a, b, p| a >= 0.0 && b > 0.0 && p >= 1.0,
        alpha: &[0.5],
        beta: &[0.5, 1.5],
        p: &[1.0, 2.0],
        q: Q1_INF,
    },
    Bounded {
        id: "riesz-derivative-bounded-lt1",
        op: Op::RieszDerivative,
        hypothesis: "0 < β < α < 1, 1 ≤ p < ∞",
        holds: |a, b, p| 0.0 < b && b < a && a < 1.0 && p >= 1.0,
        alpha: &[0.8],
        beta: &[0.3, 0.5],
        p: &[1.0, 2.0],
        q: Q2_INF,
    },
    Bounded {
        id: "bessel-derivative-bounded-lt1",
        op: Op::BesselDerivative,
        hypothesis: "0 < β < α < 1, 1 ≤ p < ∞",
        holds: |a, b, p| 0.0 < b && b < a && a < 1.0 && p >= 1.0,
        alpha: &[0.8],
        beta: &[0.3, 0.5],
        p: &[1.0, 2.0],
        q: Q2_INF,
    },
    Bounded {
        id: "riesz-derivative-bounded",
        op: Op::RieszDerivative,
        hypothesis: "0 < β < α, 1 ≤ p < ∞",
        holds: |a, b, p| 0.0 < b && b < a && p >= 1.0,
        alpha: &[2.7],
        beta: &[0.5, 1.5, 2.5],
        p: &[2.0, 4.0],
        q: Q2_INF,
    },
    Bounded {
        id: "bessel-derivative-bounded",
        op: Op::BesselDerivative,
        hypothesis: "0 < β < α, 1 ≤ p < ∞",
        holds: |a, b, p| 0.0 < b && b < a && p >= 1.0,
        alpha: &[2.7],
        beta: &[0.5, 1.5, 2.5],
        p: &[2.0, 4.0],
        q: Q2_INF,
    },
];

fn fmt_q(q: QExponent) -> String {
    q.to_string()
}

/// Largest relative coefficient deviation of `got` from `want`.
fn coeff_rel_error(want: &HermiteExpansion, got: &HermiteExpansion) -> f64 {
    let mut worst: f64 = 0.0;
    for (nu, a) in want.terms() {
        let b = got.coeff(nu);
        worst = worst.max(if a == 0.0 { b.abs() } else { ((a - b) / a).abs() });
    }
    for (nu, b) in got.terms() {
        if want.coeff(nu) == 0.0 {
            worst = worst.max(b.abs());
        }
    }
    worst
}

fn rel_change(new: f64, old: f64) -> f64 {
    if old == 0.0 {
        (new - old).abs()
    } else {
        ((new - old) / old).abs()
    }
}

fn besov_ratio(
    op: Op,
    f: &HermiteExpansion,
    beta: f64,
    from: &BesovParams,
    to: &BesovParams,
    quad: &BesovQuadrature,
    grid: &GaussHermiteGrid,
) -> Result<f64> {
    let g = op.spectral(f, beta)?;
    let num = besov_norm(&g, to, quad, grid)?.total;
    let den = besov_norm(f, from, quad, grid)?.total;
    Ok(num / den)
}

fn bounded(ctx: &Ctx<'_>, spec: &Bounded) -> Result<(Vec<CaseResult>, Vec<Check>)> {
    let cfg = ctx.cfg;
    let alphas = cfg.alpha.clone().unwrap_or_else(|| spec.alpha.to_vec());
    let betas = cfg.beta.clone().unwrap_or_else(|| spec.beta.to_vec());
    let ps = cfg.p.clone().unwrap_or_else(|| spec.p.to_vec());
    let qs = cfg.q.clone().unwrap_or_else(|| spec.q.to_vec());
    for &a in &alphas {
        for &b in &betas {
            for &p in &ps {
                if !(spec.holds)(a, b, p) {
                    return Err(Error::HypothesisViolated {
                        experiment: spec.id.to_string(),
                        hypothesis: spec.hypothesis.to_string(),
                        got: format!("α = {a}, β = {b}, p = {p}"),
                    });
                }
            }
        }
    }

    let refined = ctx.quad.refined(2);
    let mut grids: HashMap<u64, GaussHermiteGrid> = HashMap::new();
    let mut cases = Vec::new();
    let mut non_finite = 0usize;
    let mut worst_refine: f64 = 0.0;
    let mut worst_scale: f64 = 0.0;
    for &a in &alphas {
        for &b in &betas {
            for &p in &ps {
                if !grids.contains_key(&p.to_bits()) {
                    grids.insert(p.to_bits(), ctx.grid(p)?);
                }
                let grid = &grids[&p.to_bits()];
                for &q in &qs {
                    let from = BesovParams::new(a, p, q)?;
                    let to = BesovParams::new(spec.op.target_alpha(a, b), p, q)?;
                    let rows: Vec<(f64, f64, f64)> = ctx
                        .family
                        .par_iter()
                        .map(|f| {
                            let base = besov_ratio(spec.op, f, b, &from, &to, &ctx.quad, grid)?;
                            let fine = besov_ratio(spec.op, f, b, &from, &to, &refined, grid)?;
                            let scaled = besov_ratio(spec.op, &f.scale(10.0), b, &from, &to, &ctx.quad, grid)?;
                            Ok((base, fine, scaled))
                        })
                        .collect::<Result<_>>()?;
                    let ratios: Vec<f64> = rows.iter().map(|r| r.0).collect();
                    let fine: Vec<f64> = rows.iter().map(|r| r.1).collect();
                    non_finite += ratios.iter().chain(&fine).filter(|r| !r.is_finite()).count();
                    for r in &rows {
                        worst_scale = worst_scale.max(rel_change(r.2, r.0));
                    }
                    let mut case = CaseResult::new(
                        format!("alpha={a} beta={b} p={p} q={}", fmt_q(q)),
                        "ratio",
                        ratios,
                    );
                    let fine_max = max_of(&fine);
                    worst_refine = worst_refine.max(rel_change(fine_max, case.max));
                    case.max_refined = Some(fine_max);
                    cases.push(case);
                }
            }
        }
    }
    let tol = &cfg.tolerances;
    let sym = spec.op.symbol();
    let mut checks = vec![
        Check::holds(
            format!("{}: every ratio ‖{sym} f‖ / ‖f‖ is finite", spec.id),
            non_finite == 0,
            non_finite as f64,
            "count of non-finite ratios",
        ),
        Check::at_most(
            format!("{}: max ratio stable under ×2 t-grid refinement", spec.id),
            worst_refine,
            tol.refinement,
            "largest relative change of a case maximum",
        ),
        Check::at_most(
            format!("{}: ratios unchanged by f ↦ 10f", spec.id),
            worst_scale,
            tol.scaling,
            "largest relative change",
        ),
    ];
    if spec.op.is_derivative() {
        let tq = TimeQuadrature::default();
        let mut worst: f64 = 0.0;
        for &b in &betas {
            let errs: Vec<f64> = ctx
                .family
                .par_iter()
                .map(|f| {
                    let exact = spec.op.spectral(f, b)?;
                    let int = spec.op.integral(f, b, &tq)?;
                    Ok(coeff_rel_error(&exact, &int.value))
                })
                .collect::<Result<_>>()?;
            worst = worst.max(max_of(&errs));
        }
        checks.push(Check::at_most(
            format!("{}: (P_t - I)^k integral form of {sym} matches the multiplier", spec.id),
            worst,
            tol.operator,
            "max relative coefficient error, k = ⌊β⌋ + 1",
        ));
    }
    Ok((cases, checks))
}

fn inversion(ctx: &Ctx<'_>) -> Result<(Vec<CaseResult>, Vec<Check>)> {
    let betas = ctx.betas();
    if let Some(&b) = betas.iter().find(|b| !(**b > 0.0)) {
        return Err(Error::HypothesisViolated {
            experiment: "inversion".into(),
            hypothesis: "β > 0".into(),
            got: format!("β = {b}"),
        });
    }
    let mut cases = Vec::new();
    let (mut riesz, mut bessel): (f64, f64) = (0.0, 0.0);
    for &b in &betas {
        let rows: Vec<(f64, f64)> = ctx
            .family
            .par_iter()
            .map(|f| {
                let norm = f.l2_norm();
                let centered = pi0(f);
                let di = fractional::riesz_derivative(&fractional::riesz_potential(f, b)?, b)?;
                let id = fractional::riesz_potential(&fractional::riesz_derivative(f, b)?, b)?;
                let r = di.sub(&centered)?.l2_norm().max(id.sub(&centered)?.l2_norm()) / norm;
                let dj = fractional::bessel_derivative(&fractional::bessel_potential(f, b)?, b)?;
                let jd = fractional::bessel_potential(&fractional::bessel_derivative(f, b)?, b)?;
                let s = dj.sub(f)?.l2_norm().max(jd.sub(f)?.l2_norm()) / norm;
                Ok((r, s))
            })
            .collect::<Result<_>>()?;
        let r: Vec<f64> = rows.iter().map(|x| x.0).collect();
        let s: Vec<f64> = rows.iter().map(|x| x.1).collect();
        riesz = riesz.max(max_of(&r));
        bessel = bessel.max(max_of(&s));
        cases.push(CaseResult::new(format!("riesz beta={b}"), "relative L2 error", r));
        cases.push(CaseResult::new(format!("bessel beta={b}"), "relative L2 error", s));
    }
    let tol = ctx.cfg.tolerances.inversion;
    let checks = vec![
        Check::at_most("inversion: D^β I_β f = I_β D^β f = Π₀f", riesz, tol, "‖·‖₂ / ‖f‖₂, both orders"),
        Check::at_most("inversion: 𝒟^β 𝒥_β f = 𝒥_β 𝒟^β f = f", bessel, tol, "‖·‖₂ / ‖f‖₂, both orders"),
    ];
    Ok((cases, checks))
}

/// Largest `|<h_ν, h_μ> - δ_{νμ}|` over `|ν|, |μ| <= n` in dimension `d`.
pub fn orthonormality_defect(d: usize, n: u32) -> Result<f64> {
    let grid = GaussHermiteGrid::exact_for_degree(d, n)?;
    let basis = MultiIndex::all_up_to(d, n);
    let samples: Vec<Vec<f64>> = basis
        .iter()
        .map(|nu| grid.sample(&HermiteExpansion::basis(nu.clone())))
        .collect::<Result<_>>()?;
    let w = grid.weights();
    let mut worst: f64 = 0.0;
    for i in 0..basis.len() {
        for j in i..basis.len() {
            let ip: f64 = samples[i]
                .iter()
                .zip(&samples[j])
                .zip(w)
                .map(|((a, b), w)| w * a * b)
                .sum();
            let delta = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((ip - delta).abs());
        }
    }
    Ok(worst)
}

/// `(∫ p(t,x,y) dy, ∫ p(t,x,y) h₁(y) dy)` for `d = 1` by the trapezoid rule on `[-14, 14]`.
pub fn kernel_moments(t: f64, x: f64, rule: &KernelRule) -> Result<(f64, f64)> {
    let (lo, hi, n) = (-14.0, 14.0, 2801usize);
    let h = (hi - lo) / (n - 1) as f64;
    let h1 = HermiteExpansion::basis(vec![1]);
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let y = lo + h * i as f64;
            let w = if i == 0 || i + 1 == n { 0.5 * h } else { h };
            let p = ph_kernel(t, &[x], &[y], rule)?;
            Ok((w * p, w * p * h1.eval(&[y])?))
        })
        .collect::<Result<_>>()?;
    Ok(rows.iter().fold((0.0, 0.0), |acc, r| (acc.0 + r.0, acc.1 + r.1)))
}

fn oracles(ctx: &Ctx<'_>) -> Result<(Vec<CaseResult>, Vec<Check>)> {
    let cfg = ctx.cfg;
    let tol = &cfg.tolerances;
    let d = cfg.dimension;
    let mut cases = Vec::new();
    let mut checks = Vec::new();

    let ortho = (1..=2)
        .map(|dim| orthonormality_defect(dim, cfg.max_degree))
        .collect::<Result<Vec<_>>>()?;
    checks.push(Check::at_most(
        "orthonormality: <h_ν, h_μ> = δ_{νμ}",
        max_of(&ortho),
        tol.orthonormality,
        format!("|ν|, |μ| ≤ {}, d = 1, 2", cfg.max_degree),
    ));

    let mehler_grid = GaussHermiteGrid::exact_for_degree(d, cfg.max_degree)?;
    let sub_rule = SubordinationRule::default();
    let triples: Vec<(usize, f64, Vec<f64>)> = (0..100u64)
        .map(|j| {
            let mut rng = stream_rng(cfg.seed, 1_000_000 + j);
            let t = rng.random_range((0.05f64).ln()..5f64.ln()).exp();
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            (j as usize % ctx.family.len(), t, x)
        })
        .collect();
    let errs: Vec<(f64, f64)> = triples
        .par_iter()
        .map(|(i, t, x)| {
            let f = &ctx.family[*i];
            let ou = ou_spectral(f, *t)?.eval(x)?;
            let ph = ph_spectral(f, *t)?.eval(x)?;
            let m = (ou_mehler(f, *t, x, &mehler_grid)? - ou).abs() / ou.abs().max(1.0);
            let s = (ph_subordination(f, *t, x, &sub_rule)? - ph).abs() / ph.abs().max(1.0);
            Ok((m, s))
        })
        .collect::<Result<_>>()?;
    let mehler: Vec<f64> = errs.iter().map(|e| e.0).collect();
    let sub: Vec<f64> = errs.iter().map(|e| e.1).collect();
    checks.push(Check::at_most(
        "semigroups: Mehler form of T_t matches e^{-t|ν|}",
        max_of(&mehler),
        tol.mehler,
        "100 seeded (f, t, x); error / max(1, |T_t f(x)|)",
    ));
    checks.push(Check::at_most(
        "semigroups: subordinated P_t matches e^{-t√|ν|}",
        max_of(&sub),
        tol.subordination,
        "100 seeded (f, t, x); error / max(1, |P_t f(x)|)",
    ));
    cases.push(CaseResult::new("Mehler vs spectral", "scaled error", mehler));
    cases.push(CaseResult::new("subordination vs spectral", "scaled error", sub));

    let rule = KernelRule::default();
    let x = 0.7;
    let mut mass_err = Vec::new();
    let mut h1_err = Vec::new();
    for t in [0.5, 1.0, 2.0] {
        let (mass, moment) = kernel_moments(t, x, &rule)?;
        mass_err.push((mass - 1.0).abs());
        h1_err.push((moment - (-t).exp() * 2f64.sqrt() * x).abs());
    }
    checks.push(Check::at_most(
        "semigroups: ∫ p(t,x,y) dy = 1",
        max_of(&mass_err),
        tol.kernel,
        "d = 1, x = 0.7, t = 0.5, 1, 2",
    ));
    checks.push(Check::at_most(
        "semigroups: ∫ p(t,x,y) h₁(y) dy = e^{-t} h₁(x)",
        max_of(&h1_err),
        tol.kernel,
        "d = 1, x = 0.7, t = 0.5, 1, 2",
    ));
    cases.push(CaseResult::new("kernel mass t=0.5,1,2", "abs error", mass_err));
    cases.push(CaseResult::new("kernel h1 moment t=0.5,1,2", "abs error", h1_err));

    let tq = TimeQuadrature::default();
    let betas = ctx.betas();
    for op in ALL_OPS {
        let mut per_beta = Vec::new();
        let mut warned = 0usize;
        for &b in &betas {
            let rows: Vec<(f64, bool)> = ctx
                .family
                .par_iter()
                .map(|f| {
                    let int = op.integral(f, b, &tq)?;
                    Ok((coeff_rel_error(&op.spectral(f, b)?, &int.value), int.warned()))
                })
                .collect::<Result<_>>()?;
            warned += rows.iter().filter(|r| r.1).count();
            per_beta.push(max_of(&rows.iter().map(|r| r.0).collect::<Vec<_>>()));
        }
        let sym = op.symbol();
        checks.push(Check::at_most(
            format!("operators: integral form of {sym} matches its multiplier"),
            max_of(&per_beta),
            tol.operator,
            format!("max relative coefficient error over β = {betas:?}; {warned} truncation warnings"),
        ));
        cases.push(CaseResult::new(format!("{sym} integral vs spectral, per beta"), "relative error", per_beta));
    }
    let small: Vec<f64> = betas.iter().copied().filter(|b| *b < 1.0).collect();
    if !small.is_empty() {
        let mut worst: f64 = 0.0;
        for &b in &small {
            let errs: Vec<f64> = ctx
                .family
                .par_iter()
                .map(|f| {
                    let int = riesz_derivative_integral_by_parts(f, b, &tq)?;
                    Ok(coeff_rel_error(&fractional::riesz_derivative(f, b)?, &int.value))
                })
                .collect::<Result<_>>()?;
            worst = worst.max(max_of(&errs));
        }
        checks.push(Check::at_most(
            "operators: integrated-by-parts form of D^β matches its multiplier",
            worst,
            tol.operator,
            format!("β = {small:?}"),
        ));
    }
    let c_half = c_beta(0.5)?;
    let c_half_k = c_beta_k(0.5, 1)?;
    let want = -2.0 * PI.sqrt();
    checks.push(Check::at_most(
        "operators: c_{1/2} = -2√π",
        (c_half - want).abs().max((c_half_k - want).abs()),
        tol.c_half,
        format!("closed form {c_half}, quadrature {c_half_k}"),
    ));
    Ok((cases, checks))
}

fn lemmas(ctx: &Ctx<'_>) -> Result<(Vec<CaseResult>, Vec<Check>)> {
    let mut cases = Vec::new();
    let mut checks = Vec::new();
    kdecay_lemma(ctx, &mut cases, &mut checks)?;
    difference_bound(ctx, &mut cases, &mut checks)?;
    difference_identities(ctx, &mut checks)?;
    hardy(ctx, &mut cases, &mut checks)?;
    inclusions(ctx, &mut cases, &mut checks)?;
    Ok((cases, checks))
}

fn kdecay_lemma(ctx: &Ctx<'_>, cases: &mut Vec<CaseResult>, checks: &mut Vec<Check>) -> Result<()> {
    let tol = &ctx.cfg.tolerances;
    let coarse = log_grid(1e-3, 20.0, 60);
    let fine = log_grid(1e-3, 20.0, 119);
    let mut worst_increase: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    let mut constants = Vec::new();
    for p in [1.0, 2.0, 4.0] {
        let grid = ctx.grid(p)?;
        for k in 1..=3u32 {
            let rows: Vec<(f64, f64, f64)> = ctx
                .family
                .par_iter()
                .map(|f| {
                    let a = kdecay_report(f, p, k, &coarse, &grid)?;
                    let b = kdecay_report(f, p, k, &fine, &grid)?;
                    Ok((a.worst_increase, a.fitted_c, b.fitted_c))
                })
                .collect::<Result<_>>()?;
            let c = max_of(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
            let c_fine = max_of(&rows.iter().map(|r| r.2).collect::<Vec<_>>());
            worst_increase = worst_increase.max(max_of(&rows.iter().map(|r| r.0).collect::<Vec<_>>()));
            worst_shift = worst_shift.max(rel_change(c_fine, c));
            let mut case = CaseResult::new(format!("decay constant k={k} p={p}"), "fitted C", vec![c]);
            case.max_refined = Some(c_fine);
            constants.push(c);
            cases.push(case);
        }
    }
    checks.push(Check::at_most(
        "derivative decay: t ↦ ‖∂_t^k P_t f‖_p is non-increasing",
        worst_increase,
        tol.monotone,
        "largest relative increase between adjacent nodes of a 60-point log grid, k ≤ 3, p = 1, 2, 4",
    ));
    checks.push(Check::holds(
        "derivative decay: t^k ‖∂_t^k P_t f‖_p ≤ C ‖f‖_p with finite C",
        constants.iter().all(|c| c.is_finite()),
        max_of(&constants),
        "largest fitted C",
    ));
    checks.push(Check::at_most(
        "derivative decay: fitted C stable under grid refinement",
        worst_shift,
        tol.kdecay_stability,
        "60 vs 119 log-spaced nodes",
    ));
    Ok(())
}

/// `Δ_s^k(u^{(n)}, t)` as an expansion, in product form per chaos.
fn difference_of_derivative(f: &HermiteExpansion, s: f64, t: f64, k: u32, n: u32) -> HermiteExpansion {
    f.map_by_order(|m| {
        let lambda = (m as f64).sqrt();
        (-lambda).powi(n as i32) * (-lambda * t).exp() * (-lambda * s).exp_m1().powi(k as i32)
    })
}

fn difference_bound(ctx: &Ctx<'_>, cases: &mut Vec<CaseResult>, checks: &mut Vec<Check>) -> Result<()> {
    let cfg = ctx.cfg;
    let mut grids = Vec::new();
    for p in [1.0, 2.0, 4.0] {
        grids.push((p, ctx.grid(p)?));
    }
    let samples: Vec<(usize, f64, f64, u32, u32, usize)> = (0..200u64)
        .map(|j| {
            let mut rng = stream_rng(cfg.seed, 2_000_000 + j);
            let s = rng.random_range((1e-2f64).ln()..2f64.ln()).exp();
            let t = rng.random_range((1e-2f64).ln()..3f64.ln()).exp();
            let k = rng.random_range(1..=3u32);
            let n = rng.random_range(0..=2u32);
            let pi = rng.random_range(0..3u32) as usize;
            (j as usize % ctx.family.len(), s, t, k, n, pi)
        })
        .collect();
    let excess: Vec<f64> = samples
        .par_iter()
        .map(|&(i, s, t, k, n, pi)| {
            let f = &ctx.family[i];
            let (p, grid) = (&grids[pi].0, &grids[pi].1);
            let lhs = crate::hermite::lp_norm_gamma(&difference_of_derivative(f, s, t, k, n), *p, grid)?;
            let rhs = s.powi(k as i32) * crate::hermite::lp_norm_gamma(&time_derivative(f, t, k + n)?, *p, grid)?;
            Ok(if rhs == 0.0 { if lhs == 0.0 { -1.0 } else { f64::INFINITY } } else { lhs / rhs - 1.0 })
        })
        .collect::<Result<_>>()?;
    checks.push(Check::at_most(
        "difference bound: ‖Δ_s^k(u^{(n)}, t)‖_p ≤ s^k ‖u^{(k+n)}(·, t)‖_p",
        max_of(&excess),
        cfg.tolerances.forward_difference,
        "largest lhs/rhs - 1 over 200 seeded (f, s, t, k, n, p)",
    ));
    cases.push(CaseResult::new("difference bound", "lhs/rhs - 1", excess));
    Ok(())
}

fn smooth(t: f64) -> f64 {
    (-t).exp() * (2.0 * t).sin() + 1.0 / (1.0 + t * t)
}

fn smooth_d1(t: f64) -> f64 {
    (-t).exp() * (2.0 * (2.0 * t).cos() - (2.0 * t).sin()) - 2.0 * t / (1.0 + t * t).powi(2)
}

fn smooth_d2(t: f64) -> f64 {
    (-t).exp() * (-3.0 * (2.0 * t).sin() - 4.0 * (2.0 * t).cos()) + (6.0 * t * t - 2.0) / (1.0 + t * t).powi(3)
}

fn difference_identities(ctx: &Ctx<'_>, checks: &mut Vec<Check>) -> Result<()> {
    let cfg = ctx.cfg;
    let h = 1e-4;
    let (mut recursion, mut ds, mut dt): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for j in 0..40u64 {
        let mut rng = stream_rng(cfg.seed, 3_000_000 + j);
        let k = rng.random_range(1..=4u32);
        let s = rng.random_range(0.05..1.0);
        let t = rng.random_range(0.0..2.0);
        let scale = (1u32 << k) as f64;
        let nested = forward_difference(|x| forward_difference(smooth, s, 1, x), s, k - 1, t);
        recursion = recursion.max((forward_difference(smooth, s, k, t) - nested).abs() / scale);
        let d_s = (forward_difference(smooth, s + h, k, t) - forward_difference(smooth, s - h, k, t)) / (2.0 * h);
        let rhs = k as f64 * forward_difference(smooth_d1, s, k - 1, t + s);
        ds = ds.max((d_s - rhs).abs());
        let d_t = (forward_difference(smooth, s, k, t + h) - forward_difference(smooth, s, k, t - h)) / (2.0 * h);
        let d_tt = (forward_difference(smooth, s, k, t + h) - 2.0 * forward_difference(smooth, s, k, t)
            + forward_difference(smooth, s, k, t - h))
            / (h * h);
        dt = dt
            .max((d_t - forward_difference(smooth_d1, s, k, t)).abs())
            .max((d_tt - forward_difference(smooth_d2, s, k, t)).abs() * h);
    }
    let tol = &cfg.tolerances;
    checks.push(Check::at_most(
        "difference identities: Δ_s^k = Δ_s^{k-1} Δ_s",
        recursion,
        1e-14,
        "40 seeded (k, s, t), error / 2^k",
    ));
    checks.push(Check::at_most(
        "difference identities: ∂_s Δ_s^k(g, t) = k Δ_s^{k-1}(g', t + s)",
        ds,
        tol.difference_identity,
        "central difference with step 1e-4",
    ));
    checks.push(Check::at_most(
        "difference identities: ∂_t^j Δ_s^k(g, t) = Δ_s^k(g^{(j)}, t)",
        dt,
        tol.difference_identity,
        "j = 1, 2; central differences with step 1e-4 (j = 2 error scaled by the step)",
    ));

    // (P_t - I)^k f = Δ_t^k(u, 0) on each coefficient
    let mut power: f64 = 0.0;
    for (j, f) in ctx.family.iter().enumerate().take(10) {
        let t = 0.1 + 0.2 * j as f64;
        for k in 1..=3u32 {
            let product = f.map_by_order(|m| (-(m as f64).sqrt() * t).exp_m1().powi(k as i32));
            for (nu, c) in f.terms() {
                let lambda = nu.sqrt_eigenvalue();
                let binomial = forward_difference(|x| c * (-lambda * x).exp(), t, k, 0.0);
                power = power.max((binomial - product.coeff(nu)).abs() / ((1u32 << k) as f64 * c.abs()));
            }
        }
    }
    checks.push(Check::at_most(
        "difference identities: (P_t - I)^k f = Δ_t^k(u, 0)",
        power,
        1e-14,
        "10 family members, t ∈ [0.1, 1.9], k ≤ 3; error / (2^k |f̂(ν)|)",
    ));
    Ok(())
}

fn hardy(ctx: &Ctx<'_>, cases: &mut Vec<CaseResult>, checks: &mut Vec<Check>) -> Result<()> {
    let grid = HardyGrid::default();
    let battery = hardy_battery();
    let mut settings = Vec::new();
    for i in 0..battery.len() {
        for p in [1.0, 2.0] {
            for r in [0.5, 1.0, 2.0] {
                for kind in [HardyKind::Head, HardyKind::Tail] {
                    settings.push((i, p, r, kind));
                }
            }
        }
    }
    let outcomes: Vec<_> = settings
        .par_iter()
        .map(|&(i, p, r, kind)| Ok((p, r, hardy_check(battery[i].1, p, r, kind, &grid)?)))
        .collect::<Result<_>>()?;
    let tol = ctx.cfg.tolerances.hardy;
    let failures = outcomes.iter().filter(|o| !o.2.holds(tol)).count();
    let excess: Vec<f64> = outcomes
        .iter()
        .map(|(_, _, o)| if o.rhs.is_infinite() { 0.0 } else if o.rhs == 0.0 { o.lhs } else { o.lhs / o.rhs - 1.0 })
        .collect();
    let equality = outcomes
        .iter()
        .filter(|(p, _, o)| *p == 1.0 && o.rhs.is_finite())
        .map(|(_, _, o)| (o.lhs - o.rhs).abs() / o.rhs.max(1.0))
        .fold(0.0, f64::max);
    let linear: Vec<f64> = outcomes
        .iter()
        .filter(|(p, _, o)| *p > 1.0 && o.weighted_integral.is_finite() && o.weighted_integral > 0.0)
        .map(|(p, r, o)| o.lhs / o.rhs_linear_constant(*p, *r))
        .collect();
    checks.push(Check::holds(
        "Hardy: lhs ≤ (p/r)^p rhs for the 20-function battery",
        failures == 0,
        max_of(&excess),
        format!("{} settings, p = 1, 2, r = 0.5, 1, 2, head and tail; observed = max lhs/rhs - 1", outcomes.len()),
    ));
    checks.push(Check::at_most(
        "Hardy: p = 1 is an equality",
        equality,
        tol,
        "|lhs - rhs| / max(1, rhs)",
    ));
    cases.push(CaseResult::new("Hardy battery", "lhs/rhs - 1", excess));
    cases.push(CaseResult::new(
        "Hardy with constant p/r in place of (p/r)^p, p = 2",
        "lhs / ((p/r) integral)",
        linear,
    ));
    Ok(())
}

fn inclusions(ctx: &Ctx<'_>, cases: &mut Vec<CaseResult>, checks: &mut Vec<Check>) -> Result<()> {
    use QExponent::{Finite, Infinite};
    let tol = &ctx.cfg.tolerances;
    let p = 2.0;
    let grid = ctx.grid(p)?;
    let refined = ctx.quad.refined(2);
    // (α₁, q₁) ⊂ (α₂, q₂)
    let pairs = [
        ((0.9, Finite(2.0)), (0.4, Finite(1.0))),
        ((0.9, Infinite), (0.4, Finite(2.0))),
        ((0.9, Finite(1.0)), (0.4, Infinite)),
        ((0.6, Finite(1.0)), (0.6, Finite(2.0))),
        ((0.6, Finite(1.0)), (0.6, Infinite)),
        ((0.6, Finite(2.0)), (0.6, Infinite)),
    ];
    let mut worst_refine: f64 = 0.0;
    let mut all_finite = true;
    let mut bounds = Vec::new();
    for ((a1, q1), (a2, q2)) in pairs {
        let big = BesovParams::new(a1, p, q1)?;
        let small = BesovParams::new(a2, p, q2)?;
        let rows: Vec<(f64, f64)> = ctx
            .family
            .par_iter()
            .map(|f| {
                let r = |quad: &BesovQuadrature| -> Result<f64> {
                    Ok(besov_norm(f, &small, quad, &grid)?.total / besov_norm(f, &big, quad, &grid)?.total)
                };
                Ok((r(&ctx.quad)?, r(&refined)?))
            })
            .collect::<Result<_>>()?;
        let base: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let fine = max_of(&rows.iter().map(|r| r.1).collect::<Vec<_>>());
        all_finite &= base.iter().all(|r| r.is_finite());
        let mut case = CaseResult::new(
            format!("inclusion alpha={a1} q={} into alpha={a2} q={}", fmt_q(q1), fmt_q(q2)),
            "norm ratio",
            base,
        );
        worst_refine = worst_refine.max(rel_change(fine, case.max));
        case.max_refined = Some(fine);
        bounds.push(case.max);
        cases.push(case);
    }

    for q in [Finite(2.0), Infinite] {
        let alpha = 0.5;
        let k = smallest_k(alpha);
        let low = BesovParams::with_k(alpha, p, q, k)?;
        let high = BesovParams::with_k(alpha, p, q, k + 1)?;
        let rows: Vec<(f64, f64)> = ctx
            .family
            .par_iter()
            .map(|f| {
                let r = |quad: &BesovQuadrature| -> Result<f64> {
                    Ok(besov_norm(f, &low, quad, &grid)?.total / besov_norm(f, &high, quad, &grid)?.total)
                };
                Ok((r(&ctx.quad)?, r(&refined)?))
            })
            .collect::<Result<_>>()?;
        let spread = |v: &[f64]| {
            v.iter()
                .filter(|r| **r > 0.0)
                .map(|r| r.max(1.0 / r))
                .fold(1.0, f64::max)
        };
        let base: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let fine: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let (big_r, big_r_fine) = (spread(&base), spread(&fine));
        all_finite &= base.iter().all(|r| r.is_finite());
        worst_refine = worst_refine.max(rel_change(big_r_fine, big_r));
        bounds.push(big_r);
        let mut case = CaseResult::new(
            format!("k-independence alpha={alpha} p={p} q={} k={k} vs k={}", fmt_q(q), k + 1),
            "norm ratio",
            base,
        );
        case.max_refined = Some(max_of(&fine));
        cases.push(case);
        cases.push(CaseResult::new(
            format!("k-independence alpha={alpha} p={p} q={} comparability R", fmt_q(q)),
            "R",
            vec![big_r],
        ));
    }
    checks.push(Check::holds(
        "Besov inclusions and k-independence: norm ratios finite",
        all_finite,
        max_of(&bounds),
        "largest recorded constant",
    ));
    checks.push(Check::at_most(
        "Besov inclusions and k-independence: recorded constants stable under ×2 t-grid refinement",
        worst_refine,
        tol.refinement,
        "largest relative change",
    ));
    Ok(())
}
