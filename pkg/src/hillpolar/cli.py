"""Command-line interface: family scans, orbit dumps, bridges, bifurcation
localization, and Moon-Earth physical tables.

All numeric CSV fields use 17-significant-digit scientific notation so the
files round-trip exactly; every output file references a JSON manifest
written alongside it.  Exit codes: 0 success, 2 truncated scan (partial
output still written), 3 solver failure, 4 bad arguments.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import __version__
from .continuation import (StepConfig, continue_in_h, continue_in_mu,
                           detect_events, EventKind)
from .frames import (moon_energy_from_barycentric, hill_energy_from_moon,
                     moon_energy_from_hill, barycentric_energy_from_moon)
from .integrator import IntegratorConfig, IntegrationError
from .orbit import ConvergenceError, RootFailure, dense_orbit
from .stability import spectrum_of_record

EXIT_OK = 0
EXIT_TRUNCATED = 2
EXIT_SOLVER = 3
EXIT_USAGE = 4

MOON_EARTH_MU = 0.01215
MOON_EARTH_DISTANCE_KM = 386000.0
MOON_RADIUS_KM = 1716.0

_FAMILY_COLUMNS = ("h Q2 P1 Q3 half_period_s period_t amplitude s1 s2 "
                   "re_lambda_1 re_lambda_2 re_lambda_3 re_lambda_4 "
                   "im_lambda_1 im_lambda_2 im_lambda_3 im_lambda_4 "
                   "class delta_det residual").split()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _fmt(x):
    return f"{x:.16e}"


def _write_manifest(out_path, command, parameters, config, wall_time, outputs):
    manifest = {
        "command": command,
        "parameters": {k: v for k, v in parameters.items()
                       if not callable(v) and k != "command"},
        "tool_version": __version__,
        "integrator": {
            "abs_tol": config.abs_tol, "rel_tol": config.rel_tol,
            "order_min": config.order_min, "order_max": config.order_max,
        },
        "wall_time_s": wall_time,
        "outputs": {},
    }
    for path in outputs:
        digest = hashlib.sha256(open(path, "rb").read()).hexdigest()
        manifest["outputs"][path] = digest
    mpath = out_path + ".manifest.json"
    with open(mpath, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return mpath


def _family_row(rec, spec):
    lam = spec.eigenvalues
    sp = rec.section_point
    vals = [rec.h, sp.Q2, sp.P1, sp.Q3, rec.half_period_s, rec.period_t,
            rec.amplitude, spec.s1, spec.s2,
            lam[0].real, lam[1].real, lam[2].real, lam[3].real,
            lam[0].imag, lam[1].imag, lam[2].imag, lam[3].imag]
    return [_fmt(v) for v in vals] + [spec.stability_class.value,
                                      _fmt(rec.delta), _fmt(rec.residual)]


def _write_family_csv(path, run, manifest_name, mu_column=False):
    with open(path, "w") as f:
        f.write(f"# manifest: {manifest_name}\n")
        cols = (["mu"] if mu_column else []) + _FAMILY_COLUMNS
        f.write(",".join(cols) + "\n")
        for rec in run.path:
            spec = spectrum_of_record(rec)
            row = _family_row(rec, spec)
            if mu_column:
                row = [_fmt(rec.mu)] + row
            f.write(",".join(row) + "\n")


def cmd_family(args):
    t0 = time.perf_counter()
    cfg = IntegratorConfig(abs_tol=args.tol, rel_tol=args.tol)
    sc = StepConfig(initial=args.h_step, max=args.h_step)
    run = continue_in_h(args.mu, args.h_min, args.h_max, sc, config=cfg)
    manifest_name = args.out + ".manifest.json"
    _write_family_csv(args.out, run, manifest_name)
    _write_manifest(args.out, "family", vars(args), cfg,
                    time.perf_counter() - t0, [args.out])
    if run.truncated:
        sys.stderr.write(f"family: truncated: {run.message}\n")
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_orbit(args):
    t0 = time.perf_counter()
    cfg = IntegratorConfig(abs_tol=args.tol, rel_tol=args.tol)
    from .continuation import hill_orbit
    rec = hill_orbit(args.h, args.mu, cfg)
    samples = dense_orbit(rec, args.samples, frame=args.frame)
    manifest_name = args.out + ".manifest.json"
    with open(args.out, "w") as f:
        f.write(f"# manifest: {manifest_name}\n")
        f.write(f"# periapsis: {_fmt(rec.periapsis)}\n")
        f.write(f"# apoapsis: {_fmt(rec.apoapsis)}\n")
        f.write("s,t,q1,q2,q3,p1,p2,p3\n")
        for smp in samples:
            vals = [smp.s, smp.t, *smp.q, *smp.p]
            f.write(",".join(_fmt(v) for v in vals) + "\n")
    _write_manifest(args.out, "orbit", vars(args), cfg,
                    time.perf_counter() - t0, [args.out])
    return EXIT_OK


def cmd_bridge(args):
    t0 = time.perf_counter()
    cfg = IntegratorConfig(abs_tol=args.tol, rel_tol=args.tol)
    sc = StepConfig(initial=args.mu_step, max=args.mu_step)
    run = continue_in_mu(args.h_unrescaled, args.mu_start, args.mu_end, sc,
                         config=cfg)
    manifest_name = args.out + ".manifest.json"
    _write_family_csv(args.out, run, manifest_name, mu_column=True)
    _write_manifest(args.out, "bridge", vars(args), cfg,
                    time.perf_counter() - t0, [args.out])
    if run.truncated:
        sys.stderr.write(f"bridge: truncated: {run.message}\n")
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_bifurcations(args):
    t0 = time.perf_counter()
    cfg = IntegratorConfig(abs_tol=args.tol_integ, rel_tol=args.tol_integ)
    sc = StepConfig(initial=args.h_step, max=args.h_step)
    run = continue_in_h(args.mu, args.h_min, args.h_max, sc, config=cfg)
    events = detect_events(run, tol=args.tol)
    payload = {
        "manifest": args.out + ".manifest.json",
        "parameter": "h",
        "mu": args.mu,
        "events": [
            {"kind": e.kind.value, "bracket": list(e.bracket),
             "test_values": [float(v) for v in e.test_values],
             "resolved": e.resolved}
            for e in events
        ],
    }
    with open(args.out, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    _write_manifest(args.out, "bifurcations", vars(args), cfg,
                    time.perf_counter() - t0, [args.out])
    if run.truncated:
        sys.stderr.write(f"bifurcations: truncated: {run.message}\n")
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_moon_earth(args):
    t0 = time.perf_counter()
    cfg = IntegratorConfig(abs_tol=args.tol, rel_tol=args.tol)
    mu = args.mu
    scale = mu ** (1.0 / 3.0)

    def hat(h_bary):
        return hill_energy_from_moon(moon_energy_from_barycentric(h_bary, mu), mu)

    sc = StepConfig(initial=args.h_step, max=args.h_step)
    run = continue_in_h(mu, hat(args.h_min), hat(args.h_max), sc, config=cfg)
    events = detect_events(run, tol=1e-5)
    pd_events = [e for e in events if e.kind == EventKind.PERIOD_DOUBLING]
    manifest_name = args.out + ".manifest.json"
    with open(args.out, "w") as f:
        f.write(f"# manifest: {manifest_name}\n")
        f.write(f"# mu: {_fmt(mu)}\n")
        f.write(f"# distance_km: {_fmt(args.distance_km)}\n")
        for e in pd_events:
            h_pd = barycentric_energy_from_moon(
                moon_energy_from_hill(e.location, mu), mu)
            f.write(f"# period_doubling_h: {_fmt(h_pd)}\n")
        f.write("h,periapsis_km,apoapsis_km,class,flag\n")
        above_surface = above_margin = False
        for rec in run.path:
            spec = spectrum_of_record(rec)
            h_bary = barycentric_energy_from_moon(
                moon_energy_from_hill(rec.h, mu), mu)
            peri = rec.periapsis * scale * args.distance_km
            apo = rec.apoapsis * scale * args.distance_km
            flags = []
            if not above_surface and peri > args.moon_radius_km:
                above_surface = True
                flags.append(f"crosses_{args.moon_radius_km:g}")
            if not above_margin and peri > args.moon_radius_km + 50.0:
                above_margin = True
                flags.append(f"crosses_{args.moon_radius_km + 50.0:g}")
            f.write(",".join([_fmt(h_bary), _fmt(peri), _fmt(apo),
                              spec.stability_class.value, ";".join(flags)]) + "\n")
    _write_manifest(args.out, "moon_earth", vars(args), cfg,
                    time.perf_counter() - t0, [args.out])
    if run.truncated:
        sys.stderr.write(f"moon-earth: truncated: {run.message}\n")
        return EXIT_TRUNCATED
    return EXIT_OK


def build_parser():
    p = _Parser(prog="hillpolar",
                description="Polar periodic orbits of the spatial lunar problem")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    fam = sub.add_parser("family", help="trace the family in energy at fixed mu")
    fam.add_argument("--mu", type=float, required=True)
    fam.add_argument("--h-min", type=float, required=True)
    fam.add_argument("--h-max", type=float, required=True)
    fam.add_argument("--h-step", type=float, default=0.02)
    fam.add_argument("--tol", type=float, default=1e-14)
    fam.add_argument("--out", required=True)
    fam.set_defaults(func=cmd_family)

    orb = sub.add_parser("orbit", help="dense samples of a single orbit")
    orb.add_argument("--mu", type=float, required=True)
    orb.add_argument("--h", type=float, required=True)
    orb.add_argument("--samples", type=int, default=512)
    orb.add_argument("--frame", default="chart",
                     choices=["chart", "regularized", "moon_centered",
                              "barycentric"])
    orb.add_argument("--tol", type=float, default=1e-14)
    orb.add_argument("--out", required=True)
    orb.set_defaults(func=cmd_orbit)

    br = sub.add_parser("bridge", help="fixed-energy bridge in mu (H_m level)")
    br.add_argument("--h-unrescaled", type=float, required=True)
    br.add_argument("--mu-start", type=float, required=True)
    br.add_argument("--mu-end", type=float, required=True)
    br.add_argument("--mu-step", type=float, default=0.01)
    br.add_argument("--tol", type=float, default=1e-14)
    br.add_argument("--out", required=True)
    br.set_defaults(func=cmd_bridge)

    bif = sub.add_parser("bifurcations", help="bracketed bifurcation events")
    bif.add_argument("--mu", type=float, required=True)
    bif.add_argument("--h-min", type=float, required=True)
    bif.add_argument("--h-max", type=float, required=True)
    bif.add_argument("--h-step", type=float, default=0.015)
    bif.add_argument("--tol", type=float, default=1e-5,
                     help="bracket width in the parameter")
    bif.add_argument("--tol-integ", type=float, default=1e-14)
    bif.add_argument("--out", required=True)
    bif.set_defaults(func=cmd_bifurcations)

    me = sub.add_parser("moon-earth",
                        help="periapsis/apoapsis table for the Moon-Earth system")
    me.add_argument("--h-min", type=float, required=True,
                    help="barycentric Jacobi energy")
    me.add_argument("--h-max", type=float, required=True)
    me.add_argument("--h-step", type=float, default=0.05,
                    help="step in the rescaled solver energy")
    me.add_argument("--mu", type=float, default=MOON_EARTH_MU)
    me.add_argument("--distance-km", type=float, default=MOON_EARTH_DISTANCE_KM)
    me.add_argument("--moon-radius-km", type=float, default=MOON_RADIUS_KM)
    me.add_argument("--tol", type=float, default=1e-14)
    me.add_argument("--out", required=True)
    me.set_defaults(func=cmd_moon_earth)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConvergenceError, RootFailure, IntegrationError) as exc:
        sys.stderr.write(f"hillpolar {args.command}: solver failure: {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
