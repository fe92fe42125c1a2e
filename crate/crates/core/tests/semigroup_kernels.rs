use gausscalc::harness::kernel_moments;
use gausscalc::semigroups::{ph_kernel, ph_spectral, ph_subordination, KernelRule, SubordinationRule};
use gausscalc::{HermiteExpansion, MultiIndex};

#[test]
fn kernel_has_unit_mass() {
    let rule = KernelRule::default();
    for t in [0.2, 0.5, 1.0, 2.0, 4.0] {
        for x in [-1.5, 0.0, 0.7] {
            let (mass, _) = kernel_moments(t, x, &rule).unwrap();
            assert!((mass - 1.0).abs() < 1e-6, "t={t} x={x} mass={mass}");
        }
    }
}

#[test]
fn kernel_reproduces_first_chaos() {
    let rule = KernelRule::default();
    for t in [0.5, 1.0, 2.0] {
        let x = -0.4;
        let (_, moment) = kernel_moments(t, x, &rule).unwrap();
        let want = (-t as f64).exp() * 2f64.sqrt() * x;
        assert!((moment - want).abs() < 1e-6, "t={t}: {moment} vs {want}");
    }
}

#[test]
fn kernel_is_positive_and_rejects_bad_input() {
    let rule = KernelRule::default();
    assert!(ph_kernel(1.0, &[0.2, -0.1], &[1.0, 0.5], &rule).unwrap() > 0.0);
    assert!(ph_kernel(0.0, &[0.0], &[0.0], &rule).is_err());
    assert!(ph_kernel(1.0, &[0.0], &[0.0, 1.0], &rule).is_err());
}

#[test]
fn subordination_on_single_chaos() {
    let rule = SubordinationRule::default();
    for n in [1u32, 3, 6] {
        let f = HermiteExpansion::basis(MultiIndex::new(vec![n, 1]));
        let x = [0.6, -1.1];
        for t in [0.05, 0.8, 3.0] {
            let want = ph_spectral(&f, t).unwrap().eval(&x).unwrap();
            let got = ph_subordination(&f, t, &x, &rule).unwrap();
            assert!((got - want).abs() <= 1e-6 * want.abs().max(1.0), "n={n} t={t}");
            let ratio = got / f.eval(&x).unwrap();
            let lam = ((n + 1) as f64).sqrt();
            assert!((ratio - (-t * lam).exp()).abs() < 1e-6);
        }
    }
}

#[test]
fn stable_measure_mass() {
    let rule = SubordinationRule::default();
    for t in [1e-2, 0.1, 1.0, 10.0] {
        assert!((rule.mass(t).unwrap() - 1.0).abs() < 1e-8, "t={t}");
    }
}
