"""Smoke test for the `siet` extension module.

Build and install first, e.g. `pip install maturin && maturin develop -m crates/py/Cargo.toml`.
"""

import math

import siet


def close(a, b, tol):
    assert abs(a - b) <= tol, (a, b)


def main():
    p = siet.SystemParams()
    assert p.lam == 1e-2 and p.alpha == 4.0

    close(siet.coverage_probability_closed_alpha4(1.0), 1.0 / (1.0 + math.pi / 4.0), 1e-15)
    close(siet.coverage_probability(p, 1.0), 0.5600991535, 1e-6)
    close(siet.laplace_interference(p.replace(lam=1e-3), 1.0, 1.0), 0.99754, 1e-5)

    closed = siet.eeh_probability(p, 1e-3, method="closed")
    close(siet.eeh_probability(p, 1e-3), closed, 1e-6)
    assert siet.eeh_probability(p.replace(noise=2e-3), 1e-3) == 1.0

    est = siet.estimate_coverage(p, 1.0, trials=20000, seed=5)
    assert est.source == "monte_carlo" and est.trials == 20000
    assert est.agrees_with(0.5600991535, 1.5), est
    again = siet.estimate_coverage(p, 1.0, trials=20000, seed=5)
    assert again.value == est.value

    ccdf = siet.estimate_interference_ccdf(p, [1e-4, 1e-3, 1e-2], trials=5000, seed=2)
    assert ccdf[0].value >= ccdf[1].value >= ccdf[2].value

    assert len(siet.sample_ppp(p, seed=1, trial_index=0, window_radius=100.0)) > 0

    close(siet.harvest_threshold(1.0, 0.3), 0.02 / 0.3, 1e-15)
    d = siet.required_density(0.8, zeta=1.0, eta=0.3)
    assert 0.090 <= d <= 0.100, d
    lam, best = siet.solve_p3(1.0, 0.6, 1e-2)
    assert lam == 1e-2 and 0.14 < best < 0.16
    levels = siet.assess_levels(0.6, 1e-2)
    assert [lv["feasible"] for lv in levels] == [True, False, False]

    fig = siet.sweep_fig3([0.01, 0.1, 1.0], [1e-4, 1e-2], [0.3, 0.6])
    assert fig["axis_name"] == "zeta" and len(fig["series"]) == 4
    assert fig["csv"].startswith("zeta,")

    try:
        siet.SystemParams(alpha=2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("alpha = 2 accepted")
    assert issubclass(siet.NumericalError, ArithmeticError)

    print("siet smoke test passed")


if __name__ == "__main__":
    main()
