use gausscalc::besov::{besov_norm, spatial_grid_for, BesovParams, BesovQuadrature, QExponent};
use gausscalc::fractional::{bessel_derivative, bessel_potential, riesz_derivative, riesz_potential};
use gausscalc::harness::gen_family;
use gausscalc::hermite::{hermite_table, lp_norm_gamma};
use gausscalc::semigroups::{ou_mehler, ou_spectral, ph_spectral};
use gausscalc::{GaussHermiteGrid, HermiteExpansion, MultiIndex};
use proptest::prelude::*;

fn member(seed: u64, d: usize, n: u32) -> HermiteExpansion {
    gen_family(seed, d, 1, n).unwrap().remove(0)
}

fn max_coeff_gap(a: &HermiteExpansion, b: &HermiteExpansion) -> f64 {
    a.sub(b).unwrap().max_abs_coeff()
}

type Op = fn(&HermiteExpansion, f64) -> gausscalc::Result<HermiteExpansion>;
const OPS: [Op; 4] = [riesz_potential, bessel_potential, riesz_derivative, bessel_derivative];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn semigroup_law(seed in 0u64..10_000, d in 1usize..=2, s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let f = member(seed, d, 8);
        let ou = ou_spectral(&ou_spectral(&f, s).unwrap(), t).unwrap();
        prop_assert!(max_coeff_gap(&ou, &ou_spectral(&f, s + t).unwrap()) < 1e-14);
        let ph = ph_spectral(&ph_spectral(&f, s).unwrap(), t).unwrap();
        prop_assert!(max_coeff_gap(&ph, &ph_spectral(&f, s + t).unwrap()) < 1e-14);
    }

    #[test]
    fn operators_are_linear(seed in 0u64..10_000, a in -5.0f64..5.0, beta in 0.1f64..3.0) {
        let f = member(seed, 2, 8);
        let g = member(seed + 1, 2, 8);
        let combo = f.scale(a).add(&g).unwrap();
        for op in OPS {
            let lhs = op(&combo, beta).unwrap();
            let rhs = op(&f, beta).unwrap().scale(a).add(&op(&g, beta).unwrap()).unwrap();
            prop_assert!(max_coeff_gap(&lhs, &rhs) <= 1e-12 * (1.0 + lhs.max_abs_coeff()));
        }
    }

    #[test]
    fn l2_norm_two_ways(seed in 0u64..10_000, d in 1usize..=2) {
        let f = member(seed, d, 8);
        let grid = GaussHermiteGrid::exact_for_degree(d, 8).unwrap();
        let sampled = lp_norm_gamma(&f, 2.0, &grid).unwrap();
        prop_assert!((sampled - f.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn eval_is_linear_in_coefficients(seed in 0u64..10_000, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let f = member(seed, 2, 8);
        let direct: f64 = f
            .terms()
            .map(|(nu, c)| {
                let e = nu.exponents();
                c * hermite_table(x, 9)[e[0] as usize] * hermite_table(y, 9)[e[1] as usize]
            })
            .sum();
        let got = f.eval(&[x, y]).unwrap();
        prop_assert!((got - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
    }

    #[test]
    fn mehler_matches_spectral(seed in 0u64..10_000, t in 0.01f64..5.0, x in -2.5f64..2.5) {
        let f = member(seed, 1, 8);
        let grid = GaussHermiteGrid::exact_for_degree(1, 8).unwrap();
        let want = ou_spectral(&f, t).unwrap().eval(&[x]).unwrap();
        let got = ou_mehler(&f, t, &[x], &grid).unwrap();
        prop_assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()));
    }

    #[test]
    fn besov_norm_is_homogeneous(seed in 0u64..10_000, c in 0.1f64..20.0, neg in any::<bool>()) {
        let f = member(seed, 1, 6);
        let c = if neg { -c } else { c };
        let params = BesovParams::new(0.7, 2.0, QExponent::Finite(2.0)).unwrap();
        let grid = spatial_grid_for(1, 6, 2.0).unwrap();
        let quad = BesovQuadrature::default();
        let a = besov_norm(&f, &params, &quad, &grid).unwrap().total;
        let b = besov_norm(&f.scale(c), &params, &quad, &grid).unwrap().total;
        prop_assert!((b - c.abs() * a).abs() <= 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn json_round_trip(seed in 0u64..10_000, d in 1usize..=2) {
        let f = member(seed, d, 8);
        let back = HermiteExpansion::from_json(&f.to_json().unwrap()).unwrap();
        prop_assert_eq!(f, back);
    }
}

#[test]
fn low_order_basis_closed_forms() {
    for x in [-1.7, -0.3, 0.0, 0.4, 2.2] {
        let h = hermite_table(x, 3);
        let r2 = 2f64.sqrt();
        assert!((h[0] - 1.0).abs() < 1e-15);
        assert!((h[1] - r2 * x).abs() < 1e-14);
        assert!((h[2] - (2.0 * x * x - 1.0) / r2).abs() < 1e-14);
        assert!((h[3] - (2.0 * x.powi(3) - 3.0 * x) / 3f64.sqrt()).abs() < 1e-13);
    }
    let f = HermiteExpansion::basis(MultiIndex::new(vec![1, 2]));
    let x = [0.3, -0.8];
    let want = 2f64.sqrt() * 0.3 * (2.0 * 0.64 - 1.0) / 2f64.sqrt();
    assert!((f.eval(&x).unwrap() - want).abs() < 1e-14);
}
