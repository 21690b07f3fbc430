"""Command line: ``dhl <command> --config <path> [--seed S] [--resolution N] [--out DIR]``."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from . import constructions as C
from . import spectral, suites
from .config import COMMANDS, load
from .errors import ConfigError, InconclusiveRankError
from .geometry import Surface
from .report import Record, Report, energy_plot, spectrum_plot
from .spinc import LineTwist

EXIT_OK, EXIT_FAIL, EXIT_RANK, EXIT_CONFIG = 0, 1, 2, 3

TORUS_FAMILIES = ("torus_identity", "torus_constant")


def build_surface(cfg):
    if cfg["surface.kind"] == "sphere":
        return Surface.round_sphere(cfg["surface.radius"])
    return Surface.flat_torus()


def build_map(cfg):
    fam = cfg["map.family"]
    S = build_surface(cfg)
    if (fam in TORUS_FAMILIES) != (S.kind == "torus"):
        raise ConfigError(f"map.family: {fam!r} does not live on surface.kind = {S.kind!r}")
    try:
        if fam == "power":
            return C.power_map(cfg["map.degree"], S)
        if fam == "rational":
            return C.rational_map(cfg["map.numerator"], cfg["map.denominator"], S)
        if fam == "line":
            return C.projective_line(S)
        if fam == "torus_identity":
            return C.torus_linear(S)
        return C.torus_constant(cfg["map.n"], surface=S)
    except ValueError as exc:
        raise ConfigError(f"map: {exc}") from None


def build_twist(cfg, surface):
    kind = cfg["twist.kind"]
    if kind == "canonical_power":
        return LineTwist.canonical_power(surface, cfg["twist.m"])
    if cfg["twist.m"] != 0:
        raise ConfigError("twist.m: only used with twist.kind = canonical_power")
    return getattr(LineTwist, kind)(surface)


def environment(cfg):
    return {
        "seed": cfg.seed,
        "resolution": cfg.N,
        "points": cfg["points"],
        "version": __version__,
        "normalization": {
            "sphere_radius": cfg["surface.radius"],
            "torus_lattice": "Z + iZ",
            "fubini_study_line_area": float(np.pi),
            "rank_threshold_rel": spectral.EPS_RANK,
            "rank_min_gap": spectral.MIN_GAP,
        },
    }


def _spectra_artifacts(report, spectra):
    rows = []
    plot = []
    for key in sorted(spectra):
        sp, kd = spectra[key]
        for i, s in enumerate(kd.singular_values):
            rows.append([key, i, repr(float(s))])
        plot.append((key, kd.singular_values, spectral.EPS_RANK * kd.sigma_max))
    if rows:
        report.tables["spectra"] = (["problem", "index", "singular_value"], rows)
        report.plots["spectra"] = spectrum_plot(plot)


def _flow_artifacts(report, trajectories):
    rows = []
    curves = []
    for key in sorted(trajectories):
        res = trajectories[key]
        for s in res.states:
            rows.append([key, s.step, repr(s.time), repr(s.energy), repr(s.grad_norm)])
        curves.append((key, [s.time for s in res.states], [s.energy for s in res.states]))
    if rows:
        report.tables["flow"] = (["run", "step", "time", "energy", "grad_norm"], rows)
        report.plots["flow_energy"] = energy_plot(curves, 1.0)


def run(cfg) -> Report:
    rep = Report(cfg.command, environment(cfg))
    N, seed = cfg.N, cfg.seed
    tol_res = cfg["tolerance.residual"]
    tol_alg = cfg["tolerance.algebraic"]
    spectra, trajectories = {}, {}
    if cfg.command in ("verify", "index"):
        f = build_map(cfg)
        L = build_twist(cfg, f.source)
        only = lambda S: [L]
        if cfg.command == "verify":
            rep.extend(suites.dirac_harmonic_suite([f], N, cfg["points"], seed, tol_res, cfg["selectors"], only))
        else:
            rep.extend(suites.index_suite([f], N, spectra, only, sweep=()))
    elif cfg.command == "amodel":
        rep.extend(amodel_records(cfg))
    elif cfg.command == "flow":
        rep.extend(suites.flow_suite(cfg["flow.eps"], cfg["flow.steps"], cfg["tolerance.energy_flow"], trajectories))
    else:
        maps = suites.corpus_maps(cfg["corpus.sphere_degrees"], cfg["corpus.include_line"] == "yes",
                                  cfg["corpus.include_torus"] == "yes")
        rep.extend(suites.index_suite(maps, N, spectra))
        rep.extend(suites.dirac_harmonic_suite(maps, N, cfg["points"], seed, tol_res, cfg["selectors"]))
        rep.extend(suites.vanishing_suite(seed, cfg["points"], tol_alg))
        rep.extend(suites.energy_suite(tol=cfg["tolerance.quadrature"]))
        rep.extend(suites.flow_suite(cfg["flow.eps"], cfg["flow.steps"], cfg["tolerance.energy_flow"], trajectories))
        rep.extend(suites.moduli_suite(maps, N))
        rep.extend(suites.integer_suite(maps, N, cfg["corpus.twisted_q"]))
        rep.extend(suites.algebra_suite(seed, tol_alg))
    _spectra_artifacts(rep, spectra)
    _flow_artifacts(rep, trajectories)
    return rep


def amodel_records(cfg):
    """Ghost number for a target splitting O(c1A) + O^(n-1) of f*T^{1,0}."""
    n, g, c1A = cfg["amodel.n"], cfg["amodel.g"], cfg["amodel.c1A"]
    if n < 1:
        raise ConfigError("amodel.n: must be positive")
    if g not in (0, 1):
        raise ConfigError("amodel.g: zero modes are computed for g = 0 (sphere) or g = 1 (torus) only")
    if g == 1 and c1A != 0:
        raise ConfigError("amodel.c1A: the torus computation needs c1A = 0")
    S = Surface.round_sphere() if g == 0 else Surface.flat_torus()
    degrees = (c1A,) + (0,) * (n - 1)
    w, a, b = spectral.ghost_number(n, g, c1A, S, degrees, cfg.N)
    print(f"a={a} b={b} w={w}")
    return [Record(f"amodel/n={n},g={g},c1A={c1A}", "ghost number w = a - b = 2n(1-g) + 2c1(A)",
                   {"w": w}, {"a": a, "b": b, "a-b": a - b}, "exact", a - b == w)]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="dhl", description="Numerical checks for Dirac-harmonic maps.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", default=None, help="key = value configuration file")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--resolution", type=int, default=None, help="spectral truncation N")
    ap.add_argument("--out", default=None, help="output directory (default: out)")
    args = ap.parse_args(argv)
    try:
        cfg = load(args.command, args.config, args.seed, args.resolution, args.out)
        rep = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InconclusiveRankError as exc:
        print(f"inconclusive rank: {exc}", file=sys.stderr)
        return EXIT_RANK
    rep.emit(cfg.out)
    failed = [r for r in rep.records if not r.passed]
    print(f"{cfg.command}: {len(rep.records)} records, {len(failed)} failed -> {cfg.out}/report.json")
    for r in failed:
        print(f"  FAIL {r.name}")
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
