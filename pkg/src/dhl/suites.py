"""Check suites shared by the CLI and the acceptance tests.

Every suite returns a list of :class:`Record`; the anchor string names the
identity or property being checked.
"""

from __future__ import annotations

import numpy as np

from . import constructions as C
from . import jets, operators as op, spectral
from .fields import TwistedSpinorField, pointwise_inner
from .flow import energy_directional_check, flow_run, sine_perturbation
from .geometry import Surface
from .quadrature import disk_rule, global_rule
from .report import Record
from .spinc import (LineTwist, SpinorFiber, clifford_mul, spinor_bundle, twist as twist_bundle,
                    volume_action)
from .variation import bump, variation_check

FOUR_PI = 4 * np.pi


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------


def corpus_maps(sphere_degrees=(0, 1, 2, 3), include_line=True, include_torus=True):
    maps = [C.power_map(d) for d in sphere_degrees]
    if include_line:
        maps.append(C.projective_line())
    if include_torus:
        maps += [C.torus_linear(), C.torus_constant(2)]
    return maps


def corpus_twists(surface):
    return [LineTwist.trivial(surface), LineTwist.spin_half(surface),
            LineTwist.canonical_power(surface, -1), LineTwist.canonical_power(surface, -2)]


def twist_label(L):
    return {"trivial": "O", "spin_half": "K^1/2", "canonical_power": f"K^{L.m}"}[L.kind]


def sample_points(surface, count, rng):
    """Seeded chart points: north-chart disk |z| < 2 on the sphere, the unit square on the torus."""
    if surface.kind == "sphere":
        r = 2.0 * np.sqrt(rng.uniform(0, 1, count))
        return r * np.exp(2j * np.pi * rng.uniform(0, 1, count))
    return rng.uniform(0, 1, count) + 1j * rng.uniform(0, 1, count)


# ---------------------------------------------------------------------------
# 1. index formulas
# ---------------------------------------------------------------------------


def index_suite(maps, N=32, spectra=None, twists=None, sweep=(16, 24, 32)):
    recs = []
    for f in maps:
        for L in (twists(f.source) if twists else corpus_twists(f.source)):
            rep = spectral.index_report(f.source, f.n, f.c1A, L.degree, f.degrees, N)
            name = f"index/{f.name}/{twist_label(L)}"
            recs.append(Record(
                name, "index: n(1-g+c1(L)) + c1(A) and n(1-g+c1(L)) - c1(A)",
                [rep.predicted_prime, rep.predicted_dprime],
                {"ker1": rep.ker_prime, "coker1": rep.coker_prime, "ker2": rep.ker_dprime,
                 "coker2": rep.coker_dprime, "gap": rep.gap},
                {"exact": True, "min_gap": spectral.MIN_GAP}, rep.consistent))
            if spectra is not None:
                for deg in rep.summands_prime + rep.summands_dprime:
                    sp, kd = spectral.solve_line(f.source, deg, N)
                    spectra[f"{f.source.kind}_deg{deg}_N{N}"] = (sp, kd)
            if sweep:
                reps = [spectral.index_report(f.source, f.n, f.c1A, L.degree, f.degrees, k) for k in sweep]
                dims = [[r.ker_prime, r.coker_prime, r.ker_dprime, r.coker_dprime] for r in reps]
                ok = all(d == dims[-1] for d in dims) and all(r.consistent for r in reps)
                recs.append(Record(f"index-stability/{f.name}/{twist_label(L)}",
                                   "kernel dimensions constant under resolution refinement",
                                   {f"N={k}": dims[-1] for k in sweep},
                                   {f"N={k}": d for k, d in zip(sweep, dims)}, "exact", ok))
        lhs, rhs, ok = spectral.serre_check(f.source, 0, f.degrees, N)
        recs.append(Record(f"serre/{f.name}", "Serre duality: ker dbar''* vs h0(K x f*T)", rhs, lhs, "exact", ok))
        a, b, ok = spectral.conjugation_check(f.source, 0, f.degrees, N)
        recs.append(Record(f"conjugation/{f.name}", "antilinear conjugation isomorphism of zero modes",
                           list(a), list(b), "exact", ok))
    return recs


# ---------------------------------------------------------------------------
# 2. Dirac-harmonic spaces
# ---------------------------------------------------------------------------


def dirac_harmonic_suite(maps, N=32, points=100, seed=0, tol=1e-8, selectors=C.SELECTORS, twists=None):
    recs = []
    for f in maps:
        rng = np.random.default_rng(seed)
        z = sample_points(f.source, points, rng)
        tw = twists(f.source) if twists else corpus_twists(f.source)
        for L in tw:
            rep = spectral.index_report(f.source, f.n, f.c1A, L.degree, f.degrees, N)
            for sel in selectors:
                space = C.dirac_harmonic_space(f, L, sel, N)
                worst_t = worst_d = 0.0
                for psi in space.basis:
                    rt, rd = op.max_residual(op.el_residual(f, psi, z))
                    worst_t, worst_d = max(worst_t, rt), max(worst_d, rd)
                expect = {"prime": rep.ker_prime, "dprime": rep.ker_dprime,
                          "prime*": rep.coker_prime, "dprime*": rep.coker_dprime}
                pred_dims = [expect[p] for p in C.parse_selector(sel)]
                ok = worst_t <= tol and worst_d <= tol and list(space.dims) == pred_dims
                recs.append(Record(
                    f"dirac-harmonic/{f.name}/{twist_label(L)}/{sel}",
                    "holomorphic map with spinor in one of the four kernel sums is Dirac-harmonic",
                    {"residual": 0.0, "dims": pred_dims},
                    {"tension_minus_curv": worst_t, "dirac": worst_d, "dims": list(space.dims)},
                    tol, ok))
    return recs


# ---------------------------------------------------------------------------
# 3. vanishing of the curvature term
# ---------------------------------------------------------------------------

SUBBUNDLES = {
    "S+ x TC": ("pp", "pm"),
    "S- x TC": ("mp", "mm"),
    "S+ x T10 + S- x T01": ("pp", "mm"),
    "S+ x T01 + S- x T10": ("pm", "mp"),
}


def random_poly_field(f, L, blocks, rng, degree=2, envelope=None):
    """Random polynomial block coefficients in (x, y), optionally times an envelope jet."""
    n = f.n
    coef = {b: rng.normal(size=(n, degree + 1, degree + 1)) + 1j * rng.normal(size=(n, degree + 1, degree + 1))
            for b in blocks}

    def make(c):
        def fn(X, Y, Z):
            comps = []
            for k in range(n):
                acc = X * 0.0
                for i in range(degree + 1):
                    for j in range(degree + 1 - i):
                        acc = acc + complex(c[k, i, j]) * (X**i * Y**j if i + j else X * 0.0 + 1.0)
                comps.append(acc if envelope is None else acc * envelope(Z))
            return jets.stack(comps)

        return fn

    return TwistedSpinorField(f, L, {b: make(coef[b]) for b in blocks})


def vanishing_suite(seed=0, points=100, tol=1e-12):
    recs = []
    rng = np.random.default_rng(seed)
    S = Surface.round_sphere()
    cases = [C.power_map(1), C.power_map(2), C.projective_line()]
    for f in cases:
        z = sample_points(S, points, rng)
        for label, blocks in SUBBUNDLES.items():
            L = LineTwist.spin_half(S)
            psi = random_poly_field(f, L, blocks, rng)
            R = op.curvature_term(f, psi, z)
            val = float(np.sqrt(np.max(f.target.inner(f(z), R, R))))
            recs.append(Record(f"vanishing/{f.name}/{label}", "curvature term vanishes on the four subbundles",
                               0.0, val, tol, val <= tol))
    # designated counterexample: mixed chirality, same type, on CP^1 with f = id
    f = C.power_map(1)
    L = LineTwist.trivial(S)
    psi = TwistedSpinorField(f, L, {"pp": lambda X, Y, Z: jets.stack([1.0 + Z]),
                                    "mp": lambda X, Y, Z: jets.stack([0.5 - 0.3j * Z + X * Y])})
    z0 = 0.4 + 0.3j
    main = op.curvature_term(f, psi, np.array([z0]))[:, 0]
    orc, _ = op.curvature_term_oracle(f, psi, z0)
    w = f(np.array([z0]))
    size = float(np.sqrt(f.target.inner(w, main[:, None], main[:, None])[0]))
    diff = float(np.max(np.abs(main - orc)))
    recs.append(Record("vanishing/counterexample/norm", "mixed-chirality spinor has nonzero curvature term",
                       "> 1e-3", size, 1e-3, size > 1e-3))
    recs.append(Record("vanishing/counterexample/oracle", "index-loop component formula of the curvature term",
                       0.0, diff, 1e-10, diff <= 1e-10))
    return recs


# ---------------------------------------------------------------------------
# 4. energy identity
# ---------------------------------------------------------------------------


def energy_suite(degrees=(1, 2, 3), tol=1e-6):
    recs = []
    for d in degrees:
        f = C.power_map(d)
        E = op.bosonic_action(f, global_rule(f.source, 96))
        pred = f.omega_A
        recs.append(Record(f"energy/z^{d}", "holomorphic maps minimize energy: L[f] = <omega, A>",
                           pred, E, tol, abs(E - pred) <= tol))
    f = C.torus_linear()
    E = op.bosonic_action(f)
    recs.append(Record("energy/torus identity", "holomorphic maps minimize energy: L[f] = <omega, A>",
                       1.0, E, 1e-9, abs(E - 1.0) <= 1e-9))
    g = C.torus_fourier_map(sine_perturbation(0.1))
    E = op.bosonic_action(g)
    pred = 1 + 0.01 * np.pi**2
    recs.append(Record("energy/torus perturbation eps=0.1", "energy of x + eps sin(2 pi y)",
                       pred, E, 1e-12, abs(E - pred) <= 1e-12))
    return recs


# ---------------------------------------------------------------------------
# 5. flow
# ---------------------------------------------------------------------------


def flow_suite(eps_list=(0.05, 0.1), steps=200, tol=1e-4, trajectories=None):
    recs = []
    rate0 = 4 * np.pi**2
    for eps in eps_list:
        res = flow_run(sine_perturbation(eps), steps=steps)
        fin = res.final
        amp = max(abs(c) for c in fin.coeffs.values())
        recs.append(Record(f"flow/eps={eps}/energy", "flow reaches the minimum <omega, A> = 1",
                           1.0, fin.energy, tol, abs(fin.energy - 1.0) <= tol))
        recs.append(Record(f"flow/eps={eps}/monotone", "energy non-increasing along accepted steps",
                           True, res.monotone, "exact", res.monotone))
        lower = min(s.energy for s in res.states)
        recs.append(Record(f"flow/eps={eps}/lower-bound", "energy >= <omega, A> along the trajectory",
                           1.0, lower, 1e-6, lower >= 1.0 - 1e-6))
        rate = res.decay_rate or 0.0
        recs.append(Record(f"flow/eps={eps}/decay-rate", "linear heat flow decay exp(-4 pi^2 t)",
                           rate0, rate, 0.2, abs(rate - rate0) <= 0.2 * rate0))
        recs.append(Record(f"flow/eps={eps}/terminal-map", "terminal map is the identity",
                           0.0, amp, 1e-3, amp <= 1e-3))
        if trajectories is not None:
            trajectories[f"eps={eps}"] = res
    res = flow_run({(0, 1): 0.0, (1, 0): 0.0}, steps=steps)
    recs.append(Record("flow/harmonic-start", "critical points are fixed by the flow", 0,
                       res.accepted, "exact", res.accepted == 0))
    fd, pred = energy_directional_check(sine_perturbation(0.1), {(1, 0): 0.3 + 0.1j, (0, 1): 0.2j, (1, 1): -0.1})
    recs.append(Record("flow/gradient", "first variation of energy is -int g(tau, X)", pred, fd, 1e-5,
                       abs(fd - pred) <= 1e-5))
    return recs


# ---------------------------------------------------------------------------
# 6. moduli
# ---------------------------------------------------------------------------


def moduli_suite(maps, N=32):
    recs = []
    for f in maps:
        mt = C.moduli_tangent(f, N)
        name = f"moduli/{f.name}"
        if f.source.kind == "sphere":
            ok = mt.dim_real == mt.predicted_real and mt.regular and 2 * mt.dim_complex == mt.dim_real
            recs.append(Record(name, "dim_R Def = 2n(1-g) + 2c1(A) for regular curves",
                               {"dim_R": mt.predicted_real, "obs": 0},
                               {"dim_R": mt.dim_real, "dim_C": mt.dim_complex, "obs": mt.obs}, "exact", ok))
        else:
            ok = (not mt.regular) if f.c1A == 0 else mt.regular
            recs.append(Record(name, "genus one, c1(A) = 0: obstruction space may be nonzero",
                               {"regular": False, "obs": f.n}, {"regular": mt.regular, "obs": mt.obs},
                               "exact", ok and mt.obs == f.n))
    return recs


# ---------------------------------------------------------------------------
# 7. integer identities
# ---------------------------------------------------------------------------


def integer_suite(maps, N=32, qs=(1, 2)):
    recs = []
    for A2, c1 in ((1, 3), (4, 6), (-1, 1)):
        recs.append(Record(f"adjunction/({A2},{c1})", "adjunction for embedded spheres: -2 = A.A - c1(A)",
                           True, C.adjunction_check(A2, c1), "exact", C.adjunction_check(A2, c1)))
    line = C.projective_line()
    for q in qs:
        pred = C.twisted_rank(1, q)
        L = LineTwist.canonical_power(line.source, -q)
        rep = spectral.index_report(line.source, line.n, line.c1A, L.degree, line.degrees, N)
        recs.append(Record(f"twisted-rank/line/q={q}", "rank 4 + A.A + 4q of the twisted zero-mode bundle",
                           pred, rep.ker_prime, "exact", pred == rep.ker_prime and rep.coker_prime == 0))
    for f in maps:
        if f.source.kind != "sphere":
            continue
        w, a, b = spectral.ghost_number(f.n, 0, f.c1A, f.source, f.degrees, N)
        recs.append(Record(f"ghost-number/{f.name}", "ghost number w = a - b = 2n(1-g) + 2c1(A)",
                           w, {"a": a, "b": b, "a-b": a - b}, "exact", a - b == w))
    return recs


# ---------------------------------------------------------------------------
# 8. algebraic properties
# ---------------------------------------------------------------------------


def _rand_fiber(rng):
    v = rng.normal(size=4)
    return SpinorFiber(complex(v[0], v[1]), complex(v[2], v[3]))


def algebra_suite(seed=0, tol=1e-12):
    rng = np.random.default_rng(seed)
    recs = []
    # Clifford relation v.w.s + w.v.s = -2 h(v, w) s
    worst = 0.0
    for _ in range(100):
        v, w = rng.normal(size=2), rng.normal(size=2)
        s = _rand_fiber(rng)
        lhs = clifford_mul(v, clifford_mul(w, s)).as_array() + clifford_mul(w, clifford_mul(v, s)).as_array()
        worst = max(worst, float(np.max(np.abs(lhs + 2 * np.dot(v, w) * s.as_array()))))
    recs.append(Record("algebra/clifford-relation", "v.w + w.v = -2h(v,w)", 0.0, worst, 1e-13, worst <= 1e-13))
    a = volume_action(SpinorFiber(1, 0)).as_array()
    b = volume_action(SpinorFiber(0, 1)).as_array()
    ok = np.allclose(a, [-1j, 0], atol=1e-15) and np.allclose(b, [0, 1j], atol=1e-15)
    recs.append(Record("algebra/volume-action", "dvol acts as -i on S+ and +i on S-", [[0, -1], [0, 1]],
                       [[a[0].real, a[0].imag], [b[1].real, b[1].imag]], 1e-15, bool(ok)))
    worst = 0.0
    for _ in range(100):
        s = _rand_fiber(rng)
        comp = clifford_mul((1, 0), clifford_mul((0, 1), s)).as_array()
        worst = max(worst, float(np.max(np.abs(comp - volume_action(s).as_array()))))
    recs.append(Record("algebra/volume-composition", "dvol = e1 . e2", 0.0, worst, 1e-14, worst <= 1e-14))
    S = Surface.round_sphere()
    d = [twist_bundle(spinor_bundle(S), L).degrees for L in (LineTwist.trivial(S), LineTwist.spin_half(S))]
    recs.append(Record("algebra/twist-degrees", "summand degrees of S+ x L and S- x L on the sphere",
                       [[0, 2], [-1, 1]], [list(x) for x in d], "exact", d == [(0, 2), (-1, 1)]))
    recs += self_adjoint_checks(rng)
    recs += frame_and_reality_checks(rng, tol)
    recs += variation_checks(rng)
    return recs


def self_adjoint_checks(rng, pairs=20, tol=1e-6):
    S = Surface.round_sphere()
    f = C.power_map(1)
    L = LineTwist.spin_half(S)
    center, radius = 0.2 - 0.1j, 0.8
    rule = disk_rule(S, center, radius, 64)
    z = rule.points
    env = lambda Z: bump(Z, center, radius)
    worst = worst_im = 0.0
    for _ in range(pairs):
        phi = random_poly_field(f, L, ("pp", "pm", "mp", "mm"), rng, envelope=env)
        psi = random_poly_field(f, L, ("pp", "pm", "mp", "mm"), rng, envelope=env)
        lhs = rule.integrate(pointwise_inner(f, L, z, phi.values(z), op.dirac_along_map(f, psi, z)))
        rhs = rule.integrate(pointwise_inner(f, L, z, op.dirac_along_map(f, phi, z), psi.values(z)))
        worst = max(worst, abs(lhs - rhs))
        ferm = rule.integrate(op.fermionic_density(f, psi, z))
        worst_im = max(worst_im, abs(ferm.imag))
    recs = [Record("algebra/self-adjoint", "D^f is formally self-adjoint", 0.0, worst, tol, worst <= tol),
            Record("algebra/action-imaginary-part", "int <psi, D^f psi> is real", 0.0, worst_im, tol, worst_im <= tol)]
    return recs


def frame_and_reality_checks(rng, tol=1e-12):
    S = Surface.round_sphere()
    recs = []
    worst = {"tension": 0.0, "curvature": 0.0, "dirac": 0.0}
    worst_im = 0.0
    for f in (C.power_map(2), C.projective_line()):
        L = LineTwist.canonical_power(S, -1)
        psi = random_poly_field(f, L, ("pp", "pm", "mp", "mm"), rng)
        z = sample_points(S, 20, rng)
        t0 = op.tension(f, z)
        R0, im = op.curvature_term(f, psi, z, return_imag=True)
        D0 = op.dirac_along_map(f, psi, z)
        scale_R = max(1.0, float(np.max(np.abs(R0))))
        scale_D = max(1.0, max(float(np.max(np.abs(v))) for v in D0.values()))
        worst_im = max(worst_im, im / scale_R)
        for th in rng.uniform(0, 2 * np.pi, 5):
            worst["tension"] = max(worst["tension"], float(np.max(np.abs(op.tension(f, z, th) - t0))))
            worst["curvature"] = max(worst["curvature"],
                                     float(np.max(np.abs(op.curvature_term(f, psi, z, th) - R0))) / scale_R)
            D = op.dirac_along_map(f, psi, z, th)
            worst["dirac"] = max(worst["dirac"], max(float(np.max(np.abs(D[b] - D0[b]))) for b in D) / scale_D)
    g = C.torus_fourier_map(sine_perturbation(0.1))
    zt = sample_points(g.source, 20, rng)
    t0 = op.tension(g, zt)
    for th in rng.uniform(0, 2 * np.pi, 5):
        worst["tension"] = max(worst["tension"], float(np.max(np.abs(op.tension(g, zt, th) - t0))))
    for k, v in sorted(worst.items()):
        recs.append(Record(f"algebra/frame-independence/{k}", "independent of the orthonormal frame",
                           0.0, v, tol, v <= tol))
    recs.append(Record("algebra/curvature-reality", "curvature term is a real vector", 0.0, worst_im, tol,
                       worst_im <= tol))
    return recs


def variation_checks(rng, tol=1e-5):
    S = Surface.round_sphere()
    recs = []
    f = C.power_map(1)
    L = LineTwist.trivial(S)

    def mp(X, Y, Z):
        s = 1 + jets.abs2(Z)
        # dzbar-coefficient conj(eta)/|d/dw|^2 with eta constant, as a kappabar coefficient
        return jets.stack([(0.7 - 0.2j) * (s * s / 2.0) * np.sqrt(2.0) * s / 2.0])

    psi = TwistedSpinorField(f, L, {"pp": lambda X, Y, Z: jets.stack([1.0 + Z]), "mp": mp})
    res = variation_check(f, psi, [0.4 + 0.3j])
    recs.append(Record("algebra/variation/kernel-spinor",
                       "d/dt int <psi_t, D psi_t> = 2 int g(R(f, psi), X) for D psi = 0",
                       res.predicted.real, res.fd_derivative.real, tol, res.error <= tol))
    psi2 = random_poly_field(f, LineTwist.canonical_power(S, -1), ("pp", "pm", "mp", "mm"), rng)
    res = variation_check(f, psi2, [rng.normal() + 1j * rng.normal()], center=-0.2 + 0.3j, radius=0.6)
    recs.append(Record("algebra/variation/generic-spinor",
                       "first variation of the spinor action with time-independent components",
                       res.predicted.real, res.fd_derivative.real, tol, res.error <= tol))
    line = C.projective_line()
    psi3 = random_poly_field(line, LineTwist.spin_half(S), ("pp", "mp", "pm", "mm"), rng)
    res = variation_check(line, psi3, [0.3 + 0.1j, -0.2 + 0.4j])
    recs.append(Record("algebra/variation/line-CP2",
                       "first variation of the spinor action with time-independent components",
                       res.predicted.real, res.fd_derivative.real, tol, res.error <= tol))
    return recs
