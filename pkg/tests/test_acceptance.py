"""Acceptance gate: twelve criteria, each checked at its stated tolerance
and runtime budget.  One PASS/FAIL line per criterion is printed in the
terminal summary (and when run as a script)."""

import time
import warnings

import numpy as np
import pytest

from cdlab.bubbles import make_exponential, make_forward_quadratic, make_quadratic, make_scaled_quadratic, t0
from cdlab.discretize import ProblemSpec1D, exponential_upg_matrix, solve, solve_reduced_sl
from cdlab.mesh import Mesh1D, ScalarFn, interpolate, teeth_saw
from cdlab.norms import (
    FULL,
    NormVariant,
    Window,
    discrete_inf_error,
    interpolation_errors,
    oscillation_report,
    star_norm,
    star_seminorm,
)
from cdlab.oracles import (
    const_f_layer,
    const_f_layer_derivative,
    exact_const_f,
    exact_solution,
    interp_energy_error,
    inverse_via_greens,
    l2_project,
    transport,
)
from cdlab.upg2d import assemble_2d, section, solve_2d_dense, solve_2d_fast, solve_reduced_2d

RESULTS = {}


def _reduced(mesh, f):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return solve_reduced_sl(mesh, f)


def crit1():
    worst = 0.0
    f = ScalarFn.const(1.0)
    for eps in (1e-1, 1e-3, 1e-6):
        for n in (10, 100):
            m = Mesh1D(n)
            u = solve(ProblemSpec1D(eps, f, m, make_exponential(eps, m.h)))
            worst = max(worst, discrete_inf_error(u, lambda x: exact_const_f(eps, x)))
    return worst <= 1e-8, f"max nodal error {worst:.3g} (tol 1e-8)"


def crit2():
    n = 20
    m = Mesh1D(n)
    worst = 0.0
    for r in (10, 1, 0.1, 1e-4):
        eps = r * m.h
        mat = exponential_upg_matrix(t0(eps, m.h), n - 1).to_dense()
        worst = max(worst, np.abs(mat @ inverse_via_greens(eps, m) - np.eye(n - 1)).max())
    return worst <= 1e-8, f"max |M G - I| {worst:.3g} (tol 1e-8)"


def crit3():
    eps, f = 1e-6, ScalarFn.sin(np.pi)
    ex = exact_solution(eps, f)
    errs, ok = [], True
    for n in (16, 32, 64):
        m = Mesh1D(n)
        e = discrete_inf_error(solve(ProblemSpec1D(eps, f, m, make_scaled_quadratic(eps, m.h))), ex)
        ok &= e <= 2 * eps + m.h**2 / 4 * np.pi
        errs.append(e)
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    ok &= all(3.2 <= r <= 4.8 for r in ratios)
    return ok, "errors " + ", ".join(f"{e:.3g}" for e in errs) + "; ratios " + ", ".join(f"{r:.3f}" for r in ratios)


def crit4():
    eps, n = 1e-4, 32
    m = Mesh1D(n)
    bubble = make_forward_quadratic(eps, m.h)
    ok, parts = True, []
    for f, sup in ((ScalarFn.sin(np.pi), 1.0), (ScalarFn.poly([0.0, 1.0, -1.0]), 0.25)):
        u = solve(ProblemSpec1D(eps, f, m, bubble))
        d = float(np.max(np.abs(u.values - transport("LR", f, m.interior))))
        bound = 2 * sup * (1 - eps / m.h) * m.h
        ok &= d <= bound
        parts.append(f"{d:.3g}<= {bound:.3g}")
    u = solve(ProblemSpec1D(eps, ScalarFn.const(1.0), m, bubble))
    d1 = float(np.max(np.abs(u.values - m.interior)))
    ok &= d1 <= 1e-12
    return ok, "; ".join(parts) + f"; f=1 |u-x| {d1:.3g}"


def crit5():
    eps, n = 1e-6, 99
    m = Mesh1D(n)
    f = ScalarFn.const(1.0)
    u = solve(ProblemSpec1D(eps, f, m, "SL")).values
    U = _reduced(m, f).solution.values
    diff = float(np.max(np.abs(u - U)))
    tol = 1e-2 * float(np.max(np.abs(U)))
    x = m.interior
    idx = np.arange(1, n)
    odd, even = idx % 2 == 1, idx % 2 == 0
    a = max(np.max(np.abs(u[odd] - (x[odd] - 1))), np.max(np.abs(u[even] - x[even])))
    b = max(np.max(np.abs(u[even] - (x[even] - 1))), np.max(np.abs(u[odd] - x[odd])))
    parity = min(a, b)
    ok = diff <= tol and parity <= 0.02
    return ok, f"|u_SL - U_h| {diff:.5g} (tol {tol:.5g}); parity deviation {parity:.5g} (tol 0.02)"


def crit6():
    eps, n = 1e-6, 100
    m = Mesh1D(n)
    u = solve(ProblemSpec1D(eps, ScalarFn.const(1.0), m, "SL")).values
    amp = m.h**2 / (2 * eps)
    ref = exact_const_f(eps, m.interior) + amp * teeth_saw(m).values
    dev = float(np.max(np.abs(u - ref)))
    return dev <= 1e-2 * amp, f"max deviation {dev:.5g} (tol {1e-2 * amp:.5g})"


def crit7():
    worst = 0.0
    for f in (ScalarFn.const(1.0), ScalarFn.poly([1.0, 1.0])):
        w = ScalarFn(lambda s, f=f: transport("LR", f, s))
        target = w.shifted(-w.mean())
        for n in (20, 84):
            m = Mesh1D(n)
            u = solve(ProblemSpec1D(0.0, f, m, "SPLS"))
            p = l2_project(target, "M_tilde", m)
            worst = max(worst, float(np.max(np.abs(u.full - u.integral() - p.nodal))))
    return worst <= 1e-9, f"max nodal deviation {worst:.3g} (tol 1e-9)"


def crit8():
    odd = _reduced(Mesh1D(99), ScalarFn.const(1.0))
    even = _reduced(Mesh1D(100), ScalarFn.const(1.0))
    cos = _reduced(Mesh1D(100), ScalarFn.cos(2 * np.pi))
    ok = (not odd.singular) and even.singular and abs(even.defect) > 0 and abs(cos.defect) <= 1e-10
    return ok, (
        f"n=99 singular={odd.singular}; n=100 singular={even.singular} defect {even.defect:.3g}; "
        f"cos defect {cos.defect:.3g}"
    )


def crit9():
    eps = 1e-3
    worst = 0.0
    for h in (0.1, 0.05):
        m = Mesh1D(round(1 / h))
        # u = x - E and I_h reproduces x, so u - I_h u = -(E - I_h E)
        for window, key in ((FULL, "full"), (Window(0.0, 1 - h), "left"), (Window(1 - h, 1.0), "last")):
            _, h1 = interpolation_errors(
                m, lambda x: const_f_layer(eps, x), lambda x: const_f_layer_derivative(eps, x), window
            )
            ref = interp_energy_error(eps, h, key)
            worst = max(worst, abs(h1**2 - ref) / ref)
    return worst <= 1e-6, f"max relative mismatch {worst:.3g} (tol 1e-6)"


def crit10():
    rng = np.random.default_rng(10)
    c = rng.standard_normal(3)
    f = lambda x, y: c[0] + c[1] * np.sin(np.pi * x) * y + c[2] * np.exp(x * y)
    sys = assemble_2d(1e-3, 16, f)
    d = float(np.max(np.abs(solve_2d_fast(sys).values - solve_2d_dense(sys).values)))
    n = 32
    W = solve_reduced_2d(n, 1.0)
    proj = l2_project(lambda y: np.ones_like(y), "M_h", Mesh1D(n)).nodal[1:-1]
    s = max(float(np.max(np.abs(section(W, i).values - i / n * proj))) for i in range(1, n))
    return d <= 1e-10 and s <= 1e-10, f"fast vs dense {d:.3g}; section identity {s:.3g} (tol 1e-10)"


def crit11():
    n = 64
    h = 1 / n
    teeth = {}
    for eps in (1e-7, h * h):
        u = solve_2d_fast(assemble_2d(eps, n, 1.0))
        teeth[eps] = oscillation_report(section(u, n - 2)).teeth_amplitude
    a, b = teeth[1e-7], teeth[h * h]
    return a >= 0.05 and b <= 5e-3, f"teeth eps=1e-7: {a:.4g} (>= 0.05); eps=h^2: {b:.4g} (<= 5e-3)"


def crit12():
    ok, parts = True, []
    for n in (8, 64):
        m = Mesh1D(n)
        w = teeth_saw(m)
        q = make_quadratic(m.h)
        semi = star_seminorm(w)
        lo = q.b**2 / (1 + q.b_e)
        vals = [star_norm(w, NormVariant.upg(eps, q)) ** 2 for eps in (0.0, 1e-6, 1e-2)]
        ok &= semi <= 1e-12 and min(vals) >= lo - 1e-12
        parts.append(f"n={n}: |w|*={semi:.2g}, min norm^2 {min(vals):.4g} >= {lo:.4g}")
    return ok, "; ".join(parts)


CRITERIA = [
    (1, "exponential-bubble nodal exactness", crit1, 1.0),
    (2, "Green's-function inverse", crit2, 1.0),
    (3, "scaled-quadratic discrete-infinity bound", crit3, 1.0),
    (4, "forward-solve transport closeness", crit4, 1.0),
    (5, "SL odd-n oscillation matches reduced solution", crit5, 1.0),
    (6, "SL even-n teeth-saw closeness", crit6, 1.0),
    (7, "reduced SPLS equals projection", crit7, 2.0),
    (8, "reduced SL solvability dichotomy", crit8, 1.0),
    (9, "interpolant energy-error closed forms", crit9, 1.0),
    (10, "2D fast/dense equivalence and section identity", crit10, 5.0),
    (11, "2D spike dichotomy", crit11, 10.0),
    (12, "teeth-saw norm properties", crit12, 1.0),
]


def evaluate(num, fn, budget):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed < budget
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.2f}s / {budget:g}s]"
    RESULTS[num] = line
    return ok, line


@pytest.mark.parametrize("num,name,fn,budget", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, name, fn, budget):
    ok, line = evaluate(num, fn, budget)
    print(line)
    assert ok, f"{name}: {line}"


if __name__ == "__main__":
    for num, name, fn, budget in CRITERIA:
        print(evaluate(num, fn, budget)[1])
