"""Smoke test for the pygausscalc extension module.

Build and run from the repository root:

    cargo build -p gausscalc-py --features extension-module --release
    cp target/release/libpygausscalc.so crates/py/python/pygausscalc.so
    python3 crates/py/python/smoke_test.py
"""

import math

import pygausscalc as g


def close(a, b, tol):
    assert abs(a - b) <= tol * max(1.0, abs(b)), (a, b)


def main():
    h1 = g.HermiteExpansion.basis([1])
    close(h1.eval([0.5]), math.sqrt(2) * 0.5, 1e-15)
    close(h1([0.5]), h1.eval([0.5]), 0.0)

    f = g.HermiteExpansion(2, [([1, 0], 0.6), ([2, 3], -0.8), ([0, 0], 0.25)])
    assert f.dim == 2 and f.degree == 5 and len(f) == 3
    assert g.HermiteExpansion.from_json(f.to_json()) == f
    assert f.coeffs()[0] == ([0, 0], 0.25)

    grid = g.GaussHermiteGrid.exact_for_degree(2, 5)
    close(g.lp_norm(f, 2.0, grid), f.l2_norm(), 1e-12)
    close(g.lp_norm(f.scale(3.0), 4.0, g.GaussHermiteGrid(2, 30)), 3.0 * g.lp_norm(f, 4.0, g.GaussHermiteGrid(2, 30)), 1e-12)

    x = [0.3, -0.7]
    for t in (0.1, 1.0, 2.5):
        close(g.ou_mehler(f, t, x, grid), g.ou(f, t).eval(x), 1e-10)
        close(g.ph_subordination(f, t, x), g.poisson_hermite(f, t).eval(x), 1e-6)

    assert g.ph_kernel(1.0, [0.2], [0.5]) > 0.0

    for beta in (0.3, 0.5, 1.5, 2.5):
        for name in ("riesz_potential", "bessel_potential", "riesz_derivative", "bessel_derivative"):
            value, head, tail = g.operator_integral(name, f, beta)
            want = getattr(g, name)(f, beta)
            for (nu, c), (_, w) in zip(value.coeffs(), want.coeffs()):
                close(c, w, 1e-6)
        back = g.riesz_derivative(g.riesz_potential(f, beta), beta)
        close((back - (f - g.HermiteExpansion(2, [([0, 0], 0.25)]))).l2_norm(), 0.0, 1e-12)

    close(g.c_beta(0.5), -2.0 * math.sqrt(math.pi), 1e-7)
    assert g.smallest_k(1.0) == 2

    res = g.besov_norm(h1, 0.5, 2.0, 2.0)
    close(res["semi"], 1.0 / math.sqrt(2.0), 1e-6)
    close(res["total"], 1.0 + 1.0 / math.sqrt(2.0), 1e-6)
    res_inf = g.besov_norm(h1, 0.5, 2.0, "inf")
    close(res_inf["ak"], math.sqrt(0.5) * math.exp(-0.5), 1e-5)

    lhs, rhs = g.hardy_check(lambda y: y * math.exp(-y), 1.0, 1.0, "head")
    close(lhs, 1.0, 1e-6)
    close(rhs, 1.0, 1e-6)

    fam = g.gen_family(7, 2, 5, 8)
    assert len(fam) == 5 and all(abs(m.l2_norm() - 1.0) < 1e-12 for m in fam)

    names = [n for n, _ in g.list_experiments()]
    assert "inversion" in names and len(names) == 9
    report = g.run_experiment("inversion", {"family_size": 5, "seed": 3})
    assert report["passed"], report
    try:
        g.run_experiment("laguerre/anything")
    except g.GaussCalcError:
        pass
    else:
        raise AssertionError("reserved namespace accepted")
    try:
        g.HermiteExpansion.basis([1]) + g.HermiteExpansion.basis([1, 1])
    except g.GaussCalcError:
        pass
    else:
        raise AssertionError("dimension mismatch accepted")

    print("pygausscalc smoke test: ok")


if __name__ == "__main__":
    main()
