"""Command-line interface: parameter reports, dispersion scans, scenario
runs and side-by-side model comparisons.

All quantities are in normalized units except `params`, which speaks SI.
Outputs are deterministic: the same config produces byte-identical files,
and every emitted file embeds the config hash.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import simulate
from .config import ConfigError, parse_config
from .dispersion import (MULTISTREAM, QUANTUM_FLUID, VLASOV_KINETIC,
                         WIGNER_KINETIC, DielectricModel, k_scan)
from .equilibria import make_equilibrium
from .params import (PhysicalConditions, classify_regime,
                     compute_dimensionless, compute_scales,
                     pauli_collision_time)

MATERIALS = {
    # electron density (1/m^3), temperature (K)
    "gold": (5.9e28, 300.0),
}

DISPERSION_KINDS = {
    "vlasov": VLASOV_KINETIC,
    "wigner": WIGNER_KINETIC,
    "multistream": MULTISTREAM,
    "fluid": QUANTUM_FLUID,
}


def _worker_count() -> int:
    raw = os.environ.get("QPLASMA_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_params(args) -> int:
    if args.material is not None:
        try:
            density, temperature = MATERIALS[args.material]
        except KeyError:
            print(f"error: unknown material {args.material!r}; "
                  f"known: {sorted(MATERIALS)}", file=sys.stderr)
            return 2
    elif args.density is not None and args.temperature is not None:
        density, temperature = args.density, args.temperature
    else:
        print("error: give --material or both --density and --temperature",
              file=sys.stderr)
        return 2
    cond = PhysicalConditions(number_density=density,
                              temperature=temperature)
    scales = compute_scales(cond)
    group = compute_dimensionless(cond)
    regime = classify_regime(group)
    tau_ee, tau_p, outside = pauli_collision_time(cond)

    rows = [
        ("density [1/m^3]", density),
        ("temperature [K]", temperature),
        ("plasma_frequency [1/s]", scales.plasma_frequency),
        ("thermal_velocity [m/s]", scales.thermal_velocity),
        ("debye_length [m]", scales.debye_length),
        ("de_broglie_length [m]", scales.de_broglie),
        ("fermi_energy [eV]", scales.fermi_energy / 1.602176634e-19),
        ("fermi_temperature [K]", scales.fermi_temperature),
        ("fermi_velocity [m/s]", scales.fermi_velocity),
        ("fermi_screening_length [m]", scales.fermi_screening_length),
        ("chi", group.chi),
        ("g_classical", group.g_classical),
        ("g_quantum", group.g_quantum),
        ("H", group.H),
        ("nu_ee_over_wp", group.nu_ee_over_wp),
        ("tau_ee [s]", tau_ee),
        ("tau_p [s]", tau_p),
        ("regime", regime.value),
        ("pauli_estimate_valid", not outside),
    ]
    if args.csv:
        print("quantity,value")
        for name, val in rows:
            print(f"{name},{val}")
    else:
        width = max(len(name) for name, _ in rows)
        for name, val in rows:
            if isinstance(val, float):
                print(f"{name:<{width}}  {val:.6g}")
            else:
                print(f"{name:<{width}}  {val}")
    return 0


def cmd_dispersion(args) -> int:
    kind = DISPERSION_KINDS[args.model]
    eq = None
    streams = None
    if kind in (VLASOV_KINETIC, WIGNER_KINETIC):
        eq = make_equilibrium(args.equilibrium, args.t_over_tf)
    if kind == MULTISTREAM:
        print("error: multistream scans need a stream table; use the "
              "library API", file=sys.stderr)
        return 2
    model = DielectricModel(kind, equilibrium=eq, streams=streams, H=args.h)
    ks = np.linspace(args.kmin, args.kmax, args.nk)
    roots = k_scan(model, ks)
    lines = ["k,re_omega,im_omega,residual"]
    for r in roots:
        lines.append(f"{float(r.k)!r},{float(r.omega.real)!r},"
                     f"{float(r.omega.imag)!r},{float(r.residual)!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _load_config(path: str, overrides):
    text = Path(path).read_text()
    return parse_config(text, overrides)


def cmd_run(args) -> int:
    try:
        cfg = _load_config(args.config, args.override)
    except ConfigError as err:
        for p in err.problems:
            print(f"config error: {p}", file=sys.stderr)
        return 2
    result = simulate.run(cfg)
    paths = simulate.write_outputs(cfg, result, args.out)
    for p in paths:
        print(p)
    return 0


def cmd_compare(args) -> int:
    try:
        cfg_a = _load_config(args.config_a, args.override)
        cfg_b = _load_config(args.config_b, args.override)
    except ConfigError as err:
        for p in err.problems:
            print(f"config error: {p}", file=sys.stderr)
        return 2
    grid_keys = ("k", "periods", "n_x", "n_v", "v_max", "dt", "t_end",
                 "output_every")
    mismatched = [k for k in grid_keys
                  if getattr(cfg_a, k) != getattr(cfg_b, k)]
    if mismatched:
        print(f"error: configs differ in grid/time keys {mismatched}; "
              "compare requires matching discretization", file=sys.stderr)
        return 2
    if _worker_count() >= 2:
        with ThreadPoolExecutor(max_workers=2) as pool:
            fa = pool.submit(simulate.run, cfg_a)
            fb = pool.submit(simulate.run, cfg_b)
            ra, rb = fa.result(), fb.result()
    else:
        ra, rb = simulate.run(cfg_a), simulate.run(cfg_b)
    sa, sb = ra.series, rb.series
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / (f"compare_{cfg_a.model}_{cfg_a.config_hash()}_"
                  f"{cfg_b.model}_{cfg_b.config_hash()}.csv")
    lines = [f"# config_hash_a={cfg_a.config_hash()} "
             f"config_hash_b={cfg_b.config_hash()}",
             "t,field_energy_a,field_energy_b,total_energy_a,total_energy_b"]
    for i in range(sa.times.size):
        row = (sa.times[i], sa.field_energy[i], sb.field_energy[i],
               sa.total_energy[i], sb.total_energy[i])
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")
    print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qplasma",
        description="1D electrostatic quantum-plasma toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="SI parameter report for an electron gas")
    p.add_argument("--material", choices=sorted(MATERIALS), default=None)
    p.add_argument("--density", type=float, default=None,
                   help="electron density in 1/m^3")
    p.add_argument("--temperature", type=float, default=None,
                   help="temperature in K")
    p.add_argument("--csv", action="store_true", help="emit CSV instead of text")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("dispersion", help="root scan of a dielectric model")
    p.add_argument("--model", choices=sorted(DISPERSION_KINDS), required=True)
    p.add_argument("--equilibrium", default="fd3d_projected_T0")
    p.add_argument("--t-over-tf", type=float, default=0.0, dest="t_over_tf")
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--kmin", type=float, default=0.1)
    p.add_argument("--kmax", type=float, default=2.0)
    p.add_argument("--nk", type=int, default=20)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("run", help="run one scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--override", action="append", default=[],
                   metavar="KEY=VALUE")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare",
                       help="run two scenarios and join their series")
    p.add_argument("config_a")
    p.add_argument("config_b")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--override", action="append", default=[],
                   metavar="KEY=VALUE")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
