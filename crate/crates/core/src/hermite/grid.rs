use nalgebra::DMatrix;

use super::expansion::{hermite_table, HermiteExpansion};
use crate::error::{Error, Result};

/// Default cap on Gauss-Hermite nodes per axis.
pub const DEFAULT_MAX_NODES_PER_AXIS: usize = 200;

/// Tensor-product Gauss-Hermite rule for the Gaussian probability measure
/// `γ_d(dx) = π^{-d/2} e^{-|x|²} dx`.
///
/// Weights sum to one. Points are stored flat, row-major with the last axis
/// varying fastest; the 1-D rule is kept so separable work can use it.
#[derive(Clone, Debug)]
pub struct GaussHermiteGrid {
    dim: usize,
    nodes_per_axis: usize,
    nodes_1d: Vec<f64>,
    weights_1d: Vec<f64>,
    points: Vec<f64>,
    weights: Vec<f64>,
}

/// Gauss-Hermite grid with `m` nodes per axis in `d` dimensions.
pub fn gauss_hermite_grid(d: usize, m: usize) -> Result<GaussHermiteGrid> {
    GaussHermiteGrid::with_cap(d, m, DEFAULT_MAX_NODES_PER_AXIS)
}

impl GaussHermiteGrid {
    pub fn new(d: usize, m: usize) -> Result<Self> {
        gauss_hermite_grid(d, m)
    }

    pub fn with_cap(d: usize, m: usize, cap: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::param("d", 0.0, "dimension must be at least 1"));
        }
        if m < 2 {
            return Err(Error::param("m", m as f64, "need at least 2 nodes per axis"));
        }
        if m > cap {
            return Err(Error::GridTooLarge { nodes: m, cap });
        }
        let (nodes_1d, weights_1d) = gauss_hermite_1d(m);
        let total = m.pow(d as u32);
        let mut points = Vec::with_capacity(total * d);
        let mut weights = Vec::with_capacity(total);
        let mut digits = vec![0usize; d];
        for _ in 0..total {
            let mut w = 1.0;
            for &j in &digits {
                points.push(nodes_1d[j]);
                w *= weights_1d[j];
            }
            weights.push(w);
            for a in (0..d).rev() {
                digits[a] += 1;
                if digits[a] < m {
                    break;
                }
                digits[a] = 0;
            }
        }
        Ok(GaussHermiteGrid {
            dim: d,
            nodes_per_axis: m,
            nodes_1d,
            weights_1d,
            points,
            weights,
        })
    }

    /// Smallest grid integrating every product of two degree-`degree` polynomials exactly.
    pub fn exact_for_degree(d: usize, degree: u32) -> Result<Self> {
        Self::new(d, (degree as usize + 1).max(2))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn nodes_1d(&self) -> &[f64] {
        &self.nodes_1d
    }

    pub fn weights_1d(&self) -> &[f64] {
        &self.weights_1d
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.dim)
    }

    /// Highest per-axis polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.nodes_per_axis - 1
    }

    /// `f` sampled at every node, sharing 1-D recurrence tables across terms.
    pub fn sample(&self, f: &HermiteExpansion) -> Result<Vec<f64>> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: f.dim(),
            });
        }
        let max_deg = f.max_axis_degree() as usize;
        let tables: Vec<Vec<f64>> = self
            .nodes_1d
            .iter()
            .map(|&x| hermite_table(x, max_deg))
            .collect();
        let m = self.nodes_per_axis;
        let mut digits = vec![0usize; self.dim];
        let mut row: Vec<&[f64]> = vec![&tables[0]; self.dim];
        let mut out = Vec::with_capacity(self.len());
        for _ in 0..self.len() {
            for (slot, &j) in row.iter_mut().zip(&digits) {
                *slot = &tables[j];
            }
            out.push(f.eval_with_tables(&row));
            for a in (0..self.dim).rev() {
                digits[a] += 1;
                if digits[a] < m {
                    break;
                }
                digits[a] = 0;
            }
        }
        Ok(out)
    }

    /// `∫ g dγ_d` for a pointwise function.
    pub fn integrate(&self, mut g: impl FnMut(&[f64]) -> f64) -> f64 {
        self.points()
            .zip(&self.weights)
            .map(|(x, w)| w * g(x))
            .sum()
    }
}

/// 1-D Gauss-Hermite nodes (ascending) and probability-normalized weights.
///
/// Golub-Welsch on the Jacobi matrix of the orthonormal recurrence gives the
/// starting nodes; each is polished by Newton on `h_m` and the weights come
/// from the Christoffel function `1 / Σ_{k<m} h_k(x)²`. The rule is then
/// symmetrized so runs are bit-reproducible.
fn gauss_hermite_1d(m: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(m, m, |i, j| {
        if i + 1 == j {
            (j as f64 / 2.0).sqrt()
        } else if j + 1 == i {
            (i as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));

    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let tab = hermite_table(*x, m);
            let (hm, hm1) = (tab[m], tab[m - 1]);
            let step = hm / ((2.0 * m as f64).sqrt() * hm1);
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                break;
            }
        }
    }

    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let tab = hermite_table(x, m - 1);
            1.0 / tab.iter().map(|h| h * h).sum::<f64>()
        })
        .collect();

    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// `<f, g>_{γ_d}` by quadrature, with a flag for whether the grid is exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerProduct {
    pub value: f64,
    /// False when the grid cannot integrate `f·g` exactly.
    pub exact: bool,
}

pub fn inner_product_gamma(
    f: &HermiteExpansion,
    g: &HermiteExpansion,
    grid: &GaussHermiteGrid,
) -> Result<InnerProduct> {
    let fs = grid.sample(f)?;
    let gs = grid.sample(g)?;
    let value = fs
        .iter()
        .zip(&gs)
        .zip(grid.weights())
        .map(|((a, b), w)| w * a * b)
        .sum();
    let need = (f.degree() + g.degree()) as usize / 2 + 1;
    Ok(InnerProduct {
        value,
        exact: grid.nodes_per_axis() >= need,
    })
}

/// `‖f‖_{p,γ_d} = (Σ w_i |f(x_i)|^p)^{1/p}` for `1 <= p < ∞`.
pub fn lp_norm_gamma(f: &HermiteExpansion, p: f64, grid: &GaussHermiteGrid) -> Result<f64> {
    let samples = grid.sample(f)?;
    lp_norm_of_samples(&samples, p, grid)
}

pub(crate) fn lp_norm_of_samples(samples: &[f64], p: f64, grid: &GaussHermiteGrid) -> Result<f64> {
    check_p(p)?;
    let w = grid.weights();
    let s: f64 = if p == 2.0 {
        samples.iter().zip(w).map(|(v, w)| w * v * v).sum()
    } else if p == 1.0 {
        samples.iter().zip(w).map(|(v, w)| w * v.abs()).sum()
    } else if p.fract() == 0.0 && p <= 16.0 {
        let n = p as i32;
        samples.iter().zip(w).map(|(v, w)| w * v.abs().powi(n)).sum()
    } else {
        samples.iter().zip(w).map(|(v, w)| w * v.abs().powf(p)).sum()
    };
    Ok(if p == 1.0 { s } else { s.powf(1.0 / p) })
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param("p", p, "need 1 <= p < ∞"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::MultiIndex;

    #[test]
    fn two_point_rule() {
        let g = gauss_hermite_grid(1, 2).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((g.nodes_1d()[0] + r).abs() < 1e-15);
        assert!((g.nodes_1d()[1] - r).abs() < 1e-15);
        assert!((g.weights_1d()[0] - 0.5).abs() < 1e-15);
        assert!((g.weights_1d()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_one() {
        for m in [2, 3, 5, 10, 17, 40, 64, 100, 150, 200] {
            let g = gauss_hermite_grid(1, m).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert!((s - 1.0).abs() <= 1e-12, "m={m}: {s}");
            assert!(g.nodes_1d().windows(2).all(|w| w[0] < w[1]));
            assert!(g.weights().iter().all(|&w| w >= 0.0));
        }
    }

    #[test]
    fn tensor_rule_center_weight() {
        let g = gauss_hermite_grid(2, 3).unwrap();
        assert_eq!(g.len(), 9);
        let center = (0..g.len()).find(|&i| g.point(i) == [0.0, 0.0]).unwrap();
        assert!((g.weights()[center] - 4.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(
            gauss_hermite_grid(1, 201),
            Err(Error::GridTooLarge { nodes: 201, cap: 200 })
        ));
        assert!(gauss_hermite_grid(1, 1).is_err());
        assert!(gauss_hermite_grid(0, 4).is_err());
        assert!(GaussHermiteGrid::with_cap(1, 300, 400).is_ok());
    }

    #[test]
    fn integrates_moments_exactly() {
        // E[x^{2j}] under e^{-x²}/√π is (2j-1)!!/2^j.
        let g = gauss_hermite_grid(1, 10).unwrap();
        let mut expect = 1.0;
        for j in 0..10u32 {
            if j > 0 {
                expect *= (2 * j - 1) as f64 / 2.0;
            }
            let got = g.integrate(|x| x[0].powi(2 * j as i32));
            assert!((got - expect).abs() <= 1e-12 * expect, "j={j}");
        }
    }

    #[test]
    fn orthonormal_pairs() {
        let g = GaussHermiteGrid::exact_for_degree(2, 8).unwrap();
        let basis = MultiIndex::all_up_to(2, 8);
        for a in &basis {
            for b in &basis {
                let ip = inner_product_gamma(
                    &HermiteExpansion::basis(a.clone()),
                    &HermiteExpansion::basis(b.clone()),
                    &g,
                )
                .unwrap();
                assert!(ip.exact);
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip.value - expect).abs() < 1e-12, "{a} {b}: {}", ip.value);
            }
        }
    }

    #[test]
    fn inner_product_flags_inexact_grid() {
        let f = HermiteExpansion::basis(vec![6]);
        let g = gauss_hermite_grid(1, 4).unwrap();
        assert!(!inner_product_gamma(&f, &f, &g).unwrap().exact);
    }

    #[test]
    fn inner_product_with_constant_is_mean() {
        let f = HermiteExpansion::from_terms(1, [(vec![0], 0.75), (vec![3], 2.0)]).unwrap();
        let g = gauss_hermite_grid(1, 6).unwrap();
        let ip = inner_product_gamma(&HermiteExpansion::basis(vec![0]), &f, &g).unwrap();
        assert!((ip.value - 0.75).abs() < 1e-14);
    }

    #[test]
    fn lp_norm_examples() {
        let g = gauss_hermite_grid(1, 40).unwrap();
        let c = HermiteExpansion::constant(1, -2.5);
        for p in [1.0, 1.5, 2.0, 4.0, 7.0] {
            assert!((lp_norm_gamma(&c, p, &g).unwrap() - 2.5).abs() < 1e-13);
        }
        let h1 = HermiteExpansion::basis(vec![1]);
        assert!((lp_norm_gamma(&h1, 2.0, &g).unwrap() - 1.0).abs() < 1e-12);
        // h₁ = √2·x and E[x⁴] = 3/4, so ‖h₁‖₄ = 3^{1/4}.
        assert!((lp_norm_gamma(&h1, 4.0, &g).unwrap() - 3f64.powf(0.25)).abs() < 1e-12);
        assert!(lp_norm_gamma(&h1, 0.5, &g).is_err());
        assert!(lp_norm_gamma(&h1, f64::NAN, &g).is_err());
    }
}
