use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent tuple `ν = (ν₁, …, ν_d)` with cached total order `|ν|`.
///
/// `|ν|` is also the spectral data everything else needs: `h_ν` is an
/// eigenfunction of the Ornstein-Uhlenbeck operator with eigenvalue `-|ν|`.
/// Ordering is graded: first by `|ν|`, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Vec<u32>,
    order: u32,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        let order = exponents.iter().sum();
        MultiIndex { exponents, order }
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex::new(vec![0; dim])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// Total order `|ν|`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Eigenvalue of the Ornstein-Uhlenbeck operator `L` on `h_ν`.
    pub fn ou_eigenvalue(&self) -> f64 {
        -(self.order as f64)
    }

    /// Eigenvalue of `√(-L)` on `h_ν`.
    pub fn sqrt_eigenvalue(&self) -> f64 {
        (self.order as f64).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.order == 0
    }

    /// All multi-indices in `dim` variables with `|ν| <= max_order`, in graded order.
    pub fn all_up_to(dim: usize, max_order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for n in 0..=max_order {
            out.extend(Self::of_order(dim, n));
        }
        out
    }

    /// All multi-indices in `dim` variables with `|ν| = order`, lexicographically descending
    /// in the first exponent.
    pub fn of_order(dim: usize, order: u32) -> Vec<MultiIndex> {
        fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == dim {
                prefix.push(left);
                out.push(MultiIndex::new(prefix.clone()));
                prefix.pop();
                return;
            }
            for first in (0..=left).rev() {
                prefix.push(first);
                rec(dim, left - first, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if dim == 0 {
            return out;
        }
        rec(dim, order, &mut Vec::with_capacity(dim), &mut out);
        out.sort();
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order
            .cmp(&other.order)
            .then_with(|| self.exponents.cmp(&other.exponents))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex::new(v)
    }
}

/// Finite Hermite expansion `f = Σ f̂(ν) h_ν` in `d` variables.
///
/// Every operator in this crate is diagonal on the `h_ν` basis, so the
/// coefficient map is the single source of truth; point values exist only
/// inside quadrature loops.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteExpansion {
    dim: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl HermiteExpansion {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        HermiteExpansion {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(MultiIndex::zero(dim), c).expect("matching dimension");
        f
    }

    /// The single basis function `h_ν`.
    pub fn basis(nu: impl Into<MultiIndex>) -> Self {
        let nu = nu.into();
        let mut f = Self::zero(nu.dim());
        f.coeffs.insert(nu, 1.0);
        f
    }

    pub fn from_terms<I, M>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (M, f64)>,
        M: Into<MultiIndex>,
    {
        let mut f = Self::zero(dim);
        for (nu, c) in terms {
            f.add_term(nu.into(), c)?;
        }
        Ok(f)
    }

    /// Adds `c·h_ν`, merging with an existing coefficient. Exact zeros are dropped.
    pub fn add_term(&mut self, nu: MultiIndex, c: f64) -> Result<()> {
        if nu.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: nu.dim(),
            });
        }
        let slot = self.coeffs.entry(nu).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.coeffs.retain(|_, v| *v != 0.0);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, nu: &MultiIndex) -> f64 {
        self.coeffs.get(nu).copied().unwrap_or(0.0)
    }

    /// Mean `∫ f dγ_d`, i.e. the coefficient of `h_0`.
    pub fn mean(&self) -> f64 {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|ν|` carrying a nonzero coefficient (0 for the zero expansion).
    pub fn degree(&self) -> u32 {
        self.coeffs
            .iter()
            .filter(|(_, c)| **c != 0.0)
            .map(|(nu, _)| nu.order())
            .max()
            .unwrap_or(0)
    }

    /// Largest exponent along any single axis.
    pub fn max_axis_degree(&self) -> u32 {
        self.coeffs
            .keys()
            .flat_map(|nu| nu.exponents().iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Distinct chaos orders present, ascending.
    pub fn orders(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.coeffs.keys().map(|nu| nu.order()).collect();
        v.dedup();
        v
    }

    /// Coefficient ℓ² norm, which equals `‖f‖_{2,γ_d}` by orthonormality.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (nu, c) in &self.coeffs {
            let v = c * s;
            if v != 0.0 {
                out.coeffs.insert(nu.clone(), v);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        for (nu, c) in &other.coeffs {
            out.add_term(nu.clone(), *c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Multiplies every coefficient by `m(|ν|)`. This is how every spectral
    /// multiplier of `L` acts on the expansion.
    pub fn map_by_order(&self, mut m: impl FnMut(u32) -> f64) -> Self {
        let mut out = Self::zero(self.dim);
        let mut cache: Option<(u32, f64)> = None;
        for (nu, c) in &self.coeffs {
            let factor = match cache {
                Some((n, v)) if n == nu.order() => v,
                _ => {
                    let v = m(nu.order());
                    cache = Some((nu.order(), v));
                    v
                }
            };
            let v = c * factor;
            if v != 0.0 {
                out.coeffs.insert(nu.clone(), v);
            }
        }
        out
    }

    /// Keeps only the terms for which `keep` holds.
    pub fn filter(&self, mut keep: impl FnMut(&MultiIndex) -> bool) -> Self {
        HermiteExpansion {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(nu, _)| keep(nu))
                .map(|(nu, c)| (nu.clone(), *c))
                .collect(),
        }
    }

    /// Point evaluation `Σ f̂(ν) h_ν(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        let max_deg = self.max_axis_degree() as usize;
        let tables: Vec<Vec<f64>> = x.iter().map(|&xi| hermite_table(xi, max_deg)).collect();
        Ok(self.eval_with_tables(&tables))
    }

    /// Evaluates against precomputed per-axis tables `tables[a][n] = h_n(x_a)`.
    pub(crate) fn eval_with_tables<T: AsRef<[f64]>>(&self, tables: &[T]) -> f64 {
        self.coeffs
            .iter()
            .map(|(nu, c)| {
                nu.exponents()
                    .iter()
                    .zip(tables)
                    .fold(*c, |acc, (&e, tab)| acc * tab.as_ref()[e as usize])
            })
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ExpansionJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: ExpansionJson = serde_json::from_str(s)?;
        raw.try_into()
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }
}

/// Values of the normalized 1-D Hermite polynomials `h_0(x), …, h_n(x)`.
///
/// Uses the orthonormal three-term recurrence
/// `h_{k+1} = (√2·x·h_k − √k·h_{k−1}) / √(k+1)`, which never overflows for the
/// node ranges used here.
pub fn hermite_table(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x);
    for k in 1..n {
        let kf = k as f64;
        let next = (std::f64::consts::SQRT_2 * x * out[k] - kf.sqrt() * out[k - 1]) / (kf + 1.0).sqrt();
        out.push(next);
    }
    out
}

/// `h_ν(x) = Π_i H_{ν_i}(x_i) / (2^{|ν|} ν!)^{1/2}` with physicists' `H_n`.
///
/// Computed from the unnormalized recurrence `H_{n+1} = 2x H_n − 2n H_{n−1}`
/// with the normalization applied once per axis. This is deliberately a
/// different code path from [`HermiteExpansion::eval`]; the two are
/// cross-checked in tests. Accurate for moderate orders (`ν_i ≲ 100`).
pub fn hermite_eval(nu: &MultiIndex, x: &[f64]) -> f64 {
    assert_eq!(nu.dim(), x.len(), "point dimension must match multi-index");
    nu.exponents()
        .iter()
        .zip(x)
        .map(|(&n, &xi)| {
            let n = n as usize;
            let (mut prev, mut cur) = (1.0_f64, 2.0 * xi);
            let raw = if n == 0 {
                1.0
            } else {
                for k in 1..n {
                    let next = 2.0 * xi * cur - 2.0 * k as f64 * prev;
                    prev = cur;
                    cur = next;
                }
                cur
            };
            let norm: f64 = (1..=n).map(|j| (2.0 * j as f64).sqrt()).product();
            raw / norm
        })
        .product()
}

/// `f(x)` for an expansion. Errors on dimension mismatch.
pub fn expansion_eval(f: &HermiteExpansion, x: &[f64]) -> Result<f64> {
    f.eval(x)
}

/// Orthogonal projection `J_n` onto the `n`-th Wiener chaos.
pub fn chaos_project(f: &HermiteExpansion, n: u32) -> HermiteExpansion {
    f.filter(|nu| nu.order() == n)
}

/// `Π₀ f = f − ∫ f dγ_d`: drops the `ν = 0` coefficient.
pub fn pi0(f: &HermiteExpansion) -> HermiteExpansion {
    f.filter(|nu| !nu.is_zero())
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    nu: Vec<u32>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct ExpansionJson {
    d: usize,
    coeffs: Vec<TermJson>,
}

impl From<&HermiteExpansion> for ExpansionJson {
    fn from(f: &HermiteExpansion) -> Self {
        ExpansionJson {
            d: f.dim,
            coeffs: f
                .coeffs
                .iter()
                .map(|(nu, c)| TermJson {
                    nu: nu.exponents().to_vec(),
                    c: *c,
                })
                .collect(),
        }
    }
}

impl TryFrom<ExpansionJson> for HermiteExpansion {
    type Error = Error;

    fn try_from(raw: ExpansionJson) -> Result<Self> {
        if raw.d == 0 {
            return Err(Error::param("d", 0.0, "dimension must be positive"));
        }
        HermiteExpansion::from_terms(raw.d, raw.coeffs.into_iter().map(|t| (t.nu, t.c)))
    }
}

impl Serialize for HermiteExpansion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExpansionJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermiteExpansion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ExpansionJson::deserialize(d)?;
        raw.try_into().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn multi_index_order_is_cached_sum() {
        let nu = MultiIndex::new(vec![2, 0, 3]);
        assert_eq!(nu.order(), 5);
        assert_eq!(nu.ou_eigenvalue(), -5.0);
        assert!(close(nu.sqrt_eigenvalue(), 5f64.sqrt(), 0.0));
    }

    #[test]
    fn enumerates_indices_by_order() {
        assert_eq!(MultiIndex::of_order(2, 2).len(), 3);
        assert_eq!(MultiIndex::all_up_to(2, 8).len(), 45);
        assert_eq!(MultiIndex::all_up_to(1, 8).len(), 9);
        let all = MultiIndex::all_up_to(3, 4);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn hermite_eval_examples() {
        assert_eq!(hermite_eval(&MultiIndex::new(vec![0]), &[3.7]), 1.0);
        assert!(close(hermite_eval(&MultiIndex::new(vec![1]), &[1.0]), 2f64.sqrt(), 1e-15));
        assert!(close(
            hermite_eval(&MultiIndex::new(vec![2]), &[0.0]),
            -1.0 / 2f64.sqrt(),
            1e-15
        ));
    }

    #[test]
    fn expansion_eval_examples() {
        let f = HermiteExpansion::constant(1, 3.0);
        assert_eq!(f.eval(&[0.4]).unwrap(), 3.0);
        let h1 = HermiteExpansion::basis(vec![1]);
        assert!(close(h1.eval(&[1.0]).unwrap(), 2f64.sqrt(), 1e-15));
        let f = HermiteExpansion::from_terms(1, [(vec![1], 1.0), (vec![2], 1.0)]).unwrap();
        assert!(close(f.eval(&[0.0]).unwrap(), -1.0 / 2f64.sqrt(), 1e-15));
    }

    #[test]
    fn eval_rejects_wrong_dimension() {
        let f = HermiteExpansion::basis(vec![1, 0]);
        assert!(matches!(
            f.eval(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn two_evaluation_paths_agree() {
        let f = HermiteExpansion::from_terms(
            2,
            MultiIndex::all_up_to(2, 8)
                .into_iter()
                .enumerate()
                .map(|(i, nu)| (nu, ((i * 37 % 11) as f64 - 5.0) / 7.0)),
        )
        .unwrap();
        for x in [[0.3, -1.2], [2.5, 0.1], [-3.0, 3.0]] {
            let direct: f64 = f.terms().map(|(nu, c)| c * hermite_eval(nu, &x)).sum();
            let shared = f.eval(&x).unwrap();
            assert!(close(direct, shared, 1e-12 * (1.0 + direct.abs())), "{direct} vs {shared}");
        }
    }

    #[test]
    fn chaos_projection_examples() {
        let f = HermiteExpansion::from_terms(
            2,
            [(vec![0, 0], 1.0), (vec![1, 0], 2.0), (vec![1, 1], 1.0)],
        )
        .unwrap();
        let j1 = chaos_project(&f, 1);
        assert_eq!(j1, HermiteExpansion::basis(vec![1, 0]).scale(2.0));
        assert!(chaos_project(&f, 5).is_empty());
        let mut sum = HermiteExpansion::zero(2);
        for n in 0..=f.degree() {
            sum = sum.add(&chaos_project(&f, n)).unwrap();
        }
        assert_eq!(sum, f);
    }

    #[test]
    fn pi0_examples() {
        assert!(pi0(&HermiteExpansion::constant(1, 5.0)).is_empty());
        let f = HermiteExpansion::from_terms(1, [(vec![0], 1.0), (vec![1], 1.0)]).unwrap();
        assert_eq!(pi0(&f), HermiteExpansion::basis(vec![1]));
        assert_eq!(pi0(&pi0(&f)), pi0(&f));
        assert_eq!(pi0(&f).mean(), 0.0);
    }

    #[test]
    fn json_shape() {
        let f = HermiteExpansion::from_terms(2, [(vec![1, 0], 0.5), (vec![0, 2], -1.25)]).unwrap();
        let s = f.to_json().unwrap();
        assert_eq!(s, r#"{"d":2,"coeffs":[{"nu":[1,0],"c":0.5},{"nu":[0,2],"c":-1.25}]}"#);
        assert_eq!(HermiteExpansion::from_json(&s).unwrap(), f);
        assert!(HermiteExpansion::from_json(r#"{"d":1,"coeffs":[{"nu":[1,0],"c":1.0}]}"#).is_err());
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut f = HermiteExpansion::basis(vec![2]);
        f.add_term(MultiIndex::new(vec![2]), -1.0).unwrap();
        assert!(f.is_empty());
        assert_eq!(f.degree(), 0);
    }
}
