"""Command-line front end.

Every subcommand writes machine-readable output (CSV or JSON) and is fully
deterministic for fixed flags and seed.  Exit status: 0 on success, 2 on flag
errors, 3 when a computation fails.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .atom import AtomConfig, absorb
from .errors import NoAzimuthalStructure, NullField, RotomodeError
from .fields import Grid, default_grid, estimate_pattern_rotation, estimate_polarization_rotation, snapshot
from .fock import Observable, closed_form_expectations, expect, single_photon_state
from .interference import dominant_frequency, hom_analytic, hom_bruteforce, make_gaussian_spectrum
from .modes import ModeBasis, TransverseIndex, theta_weights
from .protocols import (
    Bb84Config,
    SingletSpec,
    bb84_simulate,
    build_singlet,
    conditional_correlations,
    measurement_complementarity,
    mub_overlap_matrix,
)
from .fock import inner
from .transforms import FAMILIES, build_pair

EXIT_FLAGS = 2
EXIT_COMPUTE = 3
CONVENTIONS = ("Ep",)


class FlagError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    flags: dict
    out: Optional[str] = None
    format: str = "json"
    seed: Optional[int] = None
    threads: int = 1
    extra: dict = field(default_factory=dict)


# -- output helpers ------------------------------------------------------------

def fmt(x) -> str:
    """Lossless decimal rendering (17 significant digits)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if not math.isfinite(v) else v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_atomic(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


# -- argument parsing ----------------------------------------------------------

def _positive(name):
    def parse(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}")
        if not (math.isfinite(v) and v > 0):
            raise argparse.ArgumentTypeError(f"{name} must be positive, got {text!r}")
        return v
    return parse


def _finite(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return v


def _sign(text):
    table = {"+": 1, "plus": 1, "+1": 1, "-": -1, "minus": -1, "-1": -1}
    if text not in table:
        raise argparse.ArgumentTypeError(f"sign must be + or -, got {text!r}")
    return table[text]


def _helicity(text):
    if text not in ("1", "+1", "-1"):
        raise argparse.ArgumentTypeError(f"helicity must be +1 or -1, got {text!r}")
    return int(text)


def _times(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"times must be comma-separated numbers, got {text!r}")
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("need at least one finite time")
    return vals


def _add_mode_flags(p, family_required=True):
    p.add_argument("--family", choices=[f for f in FAMILIES if f != "a"], required=family_required)
    p.add_argument("--sign", type=_sign, default=1)
    p.add_argument("--omega", type=_positive("omega"), default=1.0)
    p.add_argument("--Omega", type=_finite, default=0.01)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--s", type=_helicity, default=1)
    p.add_argument("--Omega2", type=_finite, default=None)
    p.add_argument("--transverse", choices=["lg", "bessel"], default="lg")
    p.add_argument("--waist", type=_positive("waist"), default=1.0)
    p.add_argument("--nT", type=int, default=0)
    p.add_argument("--kT", type=_positive("kT"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotomode",
        description="Simulate photons in polychromatic rotating modes.",
    )
    parser.add_argument("--convention", choices=CONVENTIONS, default="Ep",
                        help="field normalization convention (only sqrt(omega) weighting is implemented)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("snapshot", help="render reference-plane field snapshots to CSV")
    _add_mode_flags(p)
    p.add_argument("--times", type=_times, default=None,
                   help="comma-separated times (default: Omega t = n pi/5, n = 0..5)")
    p.add_argument("--grid", type=int, default=129)
    p.add_argument("--extent", type=_positive("extent"), default=None)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("expect", help="single-photon expectation values vs closed forms")
    _add_mode_flags(p)
    p.add_argument("--out", default=None)

    p = sub.add_parser("hom", help="Hong-Ou-Mandel delay sweep, analytic vs brute force")
    p.add_argument("--family", choices=["b", "g"], default="b")
    p.add_argument("--omega", type=_positive("omega"), default=1.0)
    p.add_argument("--Omega", type=_positive("Omega"), default=0.01)
    p.add_argument("--n-tau", type=int, default=64)
    p.add_argument("--tau-max", type=_positive("tau-max"), default=None)
    p.add_argument("--envelope-overlap", type=float, default=1.0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("singlet", help="rotating singlet in three bases")
    p.add_argument("--flavor", choices=["polarization", "orbital"], default="polarization")
    p.add_argument("--omega", type=_positive("omega"), default=100.0)
    p.add_argument("--Omega", type=_positive("Omega"), default=1.0)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--s", type=_helicity, default=1)
    p.add_argument("--out", default=None)

    p = sub.add_parser("qkd", help="rotating-basis BB84 Monte Carlo")
    p.add_argument("--omega", type=_positive("omega"), default=1.0)
    p.add_argument("--Omega", type=_positive("Omega"), default=0.01)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eavesdrop", choices=["none", "intercept_resend"], default="none")
    p.add_argument("--eve-basis", choices=["1", "2", "random"], default="1")
    p.add_argument("--out", default=None)

    p = sub.add_parser("atom", help="single-atom storage of a rotating photon")
    p.add_argument("--omega0", type=_positive("omega0"), default=100.0)
    p.add_argument("--sigma", type=_positive("sigma"), default=1.0)
    p.add_argument("--Omega", type=_finite, default=1.0)
    p.add_argument("--omega-A", type=_finite, default=100.0)
    p.add_argument("--gamma", type=_positive("gamma"), default=0.5)
    p.add_argument("--z-prime", type=_finite, default=0.0)
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--motional-sigma", type=_positive("motional-sigma"), default=1.0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("modes-list", help="list the monochromatic content of a mode pair")
    _add_mode_flags(p)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    return parser


def _threads_from_env() -> int:
    raw = os.environ.get("ROTOMODE_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise FlagError(f"ROTOMODE_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise FlagError(f"ROTOMODE_THREADS must be a positive integer, got {raw!r}")
    return n


def validate(args: argparse.Namespace) -> RunConfig:
    """Turn parsed flags into a RunConfig; every check happens before computing."""
    flags = vars(args).copy()
    cmd = flags.pop("command")
    cfg = RunConfig(command=cmd, flags=flags, out=flags.get("out"), threads=_threads_from_env())
    if cmd in ("snapshot", "expect", "modes-list"):
        fam = flags["family"]
        if fam == "e" and flags["Omega2"] is None:
            raise FlagError("family e needs --Omega2")
        if fam != "e" and flags["Omega2"] is not None:
            raise FlagError("--Omega2 only applies to family e")
        if flags["transverse"] == "bessel" and flags["kT"] is None:
            raise FlagError("--transverse bessel needs --kT")
        if flags["nT"] < 0:
            raise FlagError("--nT must be >= 0")
    if cmd == "snapshot":
        if flags["grid"] < 2:
            raise FlagError(f"--grid must be at least 2, got {flags['grid']}")
        if flags["times"] is None and flags["Omega"] == 0:
            raise FlagError("default times need a nonzero --Omega; pass --times")
        cfg.out = flags["out_dir"]
    if cmd == "hom":
        if flags["n_tau"] < 2:
            raise FlagError("--n-tau must be at least 2")
        if not 0.0 <= flags["envelope_overlap"] <= 1.0:
            raise FlagError("--envelope-overlap must lie in [0, 1]")
    if cmd == "qkd":
        if flags["trials"] < 1:
            raise FlagError("--trials must be positive")
        cfg.seed = flags["seed"]
    if cmd == "atom" and not 0.0 <= flags["p0"] < 1.0:
        raise FlagError("--p0 must lie in [0, 1)")
    if cmd == "modes-list":
        cfg.format = flags["format"]
    return cfg


# -- commands ------------------------------------------------------------------

def _transverse(f) -> TransverseIndex:
    if f["transverse"] == "bessel":
        return TransverseIndex.bessel(f["kT"])
    return TransverseIndex.laguerre_gauss(f["nT"], f["waist"])


def _build(f):
    basis = ModeBasis()
    pair = build_pair(basis, f["family"], f["omega"], f["Omega"], m=f["m"], s=f["s"],
                      Omega2=f["Omega2"], transverse=_transverse(f))
    mode = pair.plus if f["sign"] > 0 else pair.minus
    return basis, pair, mode


def _mode_params(f, mode) -> dict:
    lab = mode.labels[0]
    return {
        "family": f["family"],
        "sign": "+" if f["sign"] > 0 else "-",
        "omega": f["omega"],
        "Omega": f["Omega"],
        "Omega2": f["Omega2"],
        "m": lab.m,
        "s": lab.s,
    }


def cmd_snapshot(cfg: RunConfig) -> None:
    f = cfg.flags
    basis, pair, mode = _build(f)
    times = f["times"]
    if times is None:
        times = [n * math.pi / (5.0 * f["Omega"]) for n in range(6)]
    grid = Grid(f["grid"], f["extent"]) if f["extent"] else default_grid(mode, f["grid"])
    snaps = [snapshot(mode, grid, t) for t in times]
    out_dir = Path(cfg.out)
    header = ["x", "y", "re_Ex", "im_Ex", "re_Ey", "im_Ey", "intensity", "psi", "chi"]
    files = []
    for i, snap in enumerate(snaps):
        X, Y = np.meshgrid(snap.x, snap.y)
        psi, chi = snap.ellipse
        cols = [X, Y, snap.ex.real, snap.ex.imag, snap.ey.real, snap.ey.imag,
                snap.intensity, psi, chi]
        rows = zip(*(c.ravel() for c in cols))
        name = f"snapshot_{i:03d}.csv"
        write_atomic(str(out_dir / name), csv_text(header, rows))
        files.append(name)

    rates = {}
    for comp in ("x", "y", "intensity"):
        try:
            rates[comp] = estimate_pattern_rotation(snaps, comp) if len(snaps) > 1 else None
        except NoAzimuthalStructure:
            rates[comp] = None
    # polarization is tracked at the brightest point of the first snapshot
    iy, ix = np.unravel_index(np.argmax(snaps[0].intensity), snaps[0].intensity.shape)
    point = (float(snaps[0].x[ix]), float(snaps[0].y[iy]))
    try:
        pol_rate = estimate_polarization_rotation(mode, point, times) if len(times) > 1 else None
    except NullField:
        pol_rate = None
    meta = _mode_params(f, mode)
    meta.update({
        "times": list(times),
        "grid": grid.n,
        "extent": grid.extent,
        "files": files,
        "pattern_rotation_rate": rates,
        "polarization_point": list(point),
        "polarization_rotation_rate": pol_rate,
    })
    write_atomic(str(out_dir / "snapshot.json"), dump_json(meta))


def cmd_expect(cfg: RunConfig) -> None:
    f = cfg.flags
    basis, pair, mode = _build(f)
    state = single_photon_state(basis, mode)
    values = {
        "Sz": expect(state, Observable.SZ),
        "Lz": expect(state, Observable.LZ),
        "Jz": expect(state, Observable.JZ),
        "E": expect(state, Observable.ENERGY),
    }
    lab = mode.labels[0]
    closed = closed_form_expectations(f["family"], f["sign"], f["omega"], f["Omega"],
                                      m=lab.m, s=lab.s, Omega2=f["Omega2"])
    record = _mode_params(f, mode)
    record.update(values)
    record["closed_form"] = closed
    record["closed_form_residuals"] = {k: abs(values[k] - closed[k]) for k in values}
    write_atomic(cfg.out, dump_json(record))


def cmd_hom(cfg: RunConfig) -> None:
    f = cfg.flags
    O = f["Omega"]
    tau_max = f["tau_max"] or 2.0 * math.pi / O
    taus = np.linspace(0.0, tau_max, f["n_tau"], endpoint=False)
    brute = hom_bruteforce(taus, O, omega=f["omega"], family=f["family"])
    if f["family"] == "b":
        analytic = hom_analytic(O, math.pi / 4, taus, f["envelope_overlap"]).coincidence
    else:
        # g+ photons overlap like the polarization vectors of b+
        th = theta_weights(f["omega"], O).theta
        analytic = 0.5 * (1.0 - hom_analytic(O, th, taus).polarization_overlap
                          * f["envelope_overlap"])
    if f["envelope_overlap"] != 1.0:
        brute = 0.5 - (0.5 - brute) * f["envelope_overlap"]
    rows = zip(taus, analytic, brute, np.abs(analytic - brute))
    write_atomic(cfg.out, csv_text(["tau", "analytic", "bruteforce", "abs_diff"], rows))


def cmd_singlet(cfg: RunConfig) -> None:
    f = cfg.flags
    spec = SingletSpec(f["flavor"], f["omega"], f["Omega"], m=f["m"], s=f["s"])
    basis = ModeBasis()
    states = {c: build_singlet(basis, spec, c) for c in spec.choices}
    c0, c1, c2 = spec.choices
    overlaps = {
        f"{c0}_{c1}": abs(inner(states[c0], states[c1])),
        f"{c0}_{c2}": abs(inner(states[c0], states[c2])),
        f"{c1}_{c2}": abs(inner(states[c1], states[c2])),
    }
    expectations = {}
    for c, st in states.items():
        expectations[c] = {
            "Sz": expect(st, Observable.SZ),
            "Lz": expect(st, Observable.LZ),
            "Jz": expect(st, Observable.JZ),
            "E": expect(st, Observable.ENERGY),
        }
    conditional = []
    for c in spec.choices:
        pair = spec.pair(basis, c, "A")
        for sign, mode in (("+", pair.plus), ("-", pair.minus)):
            rep = conditional_correlations(states[spec.choices[0]], spec, "A", mode)
            conditional.append({
                "site": "A",
                "basis": c,
                "sign": sign,
                "probability": rep.probability,
                "remote_sz": rep.remote_sz,
                "remote_lz": rep.remote_lz,
                "remote_jz": rep.remote_jz,
                "remote_energy": rep.remote_energy,
                "local_rotation_rate": rep.local_rotation,
                "remote_rotation_rate": rep.remote_rotation,
            })
    record = {
        "flavor": spec.flavor,
        "omega": spec.omega,
        "Omega": spec.Omega,
        "m": spec.m,
        "s": spec.s,
        "overlaps": overlaps,
        "expectations": expectations,
        "conditional": conditional,
    }
    write_atomic(cfg.out, dump_json(record))


def cmd_qkd(cfg: RunConfig) -> None:
    f = cfg.flags
    eve = f["eve_basis"] if f["eve_basis"] == "random" else int(f["eve_basis"])
    config = Bb84Config(omega=f["omega"], Omega=f["Omega"], trials=f["trials"],
                        eavesdrop=f["eavesdrop"], eve_basis=eve, seed=f["seed"])
    stats = bb84_simulate(config)
    comp = measurement_complementarity(config)
    record = {
        "trials": stats.trials,
        "seed": config.seed,
        "eavesdrop": config.eavesdrop,
        "eve_basis": str(f["eve_basis"]) if config.eavesdrop != "none" else None,
        "sifted": stats.sifted,
        "errors": stats.errors,
        "sifted_fraction": stats.sifted_fraction,
        "qber": stats.qber,
        "mub_overlap": mub_overlap_matrix(config),
        "frequency_resolution": comp.frequency_resolution,
        "timing_resolution": comp.timing_resolution,
    }
    write_atomic(cfg.out, dump_json(record))


def cmd_atom(cfg: RunConfig) -> None:
    f = cfg.flags
    spectrum = make_gaussian_spectrum(f["omega0"], f["sigma"])
    config = AtomConfig(omega_A=f["omega_A"], gamma=f["gamma"], z_prime=f["z_prime"],
                        p0=f["p0"], motional_sigma=f["motional_sigma"])
    res = absorb(spectrum, f["Omega"], config)
    record = {
        "omega0": f["omega0"],
        "sigma": f["sigma"],
        "Omega": f["Omega"],
        "omega_A": config.omega_A,
        "gamma": config.gamma,
        "z_prime": config.z_prime,
        "c_plus": res.c_plus,
        "c_minus": res.c_minus,
        "abs_c_plus": abs(res.c_plus),
        "abs_c_minus": abs(res.c_minus),
        "motional_overlap": res.motional_overlap,
        "entanglement_entropy": res.entanglement_entropy,
        "absorbed_weight": res.absorbed_weight,
        "p0": res.p0,
    }
    write_atomic(cfg.out, dump_json(record))


def cmd_modes_list(cfg: RunConfig) -> None:
    f = cfg.flags
    basis, pair, _ = _build(f)
    rows = []
    for sign, mode in (("+", pair.plus), ("-", pair.minus)):
        for idx, c in mode.terms:
            lab = basis[idx]
            rows.append({"sign": sign, "index": idx, "omega": lab.omega, "m": lab.m,
                         "s": lab.s, "re": c.real, "im": c.imag})
    if cfg.format == "csv":
        lines = ["sign,index,omega,m,s,re,im"]
        for r in rows:
            lines.append(",".join([r["sign"], str(r["index"]), fmt(r["omega"]), str(r["m"]),
                                   str(r["s"]), fmt(r["re"]), fmt(r["im"])]))
        write_atomic(cfg.out, "\n".join(lines) + "\n")
    else:
        write_atomic(cfg.out, dump_json({"family": f["family"], "modes": rows}))


COMMANDS = {
    "snapshot": cmd_snapshot,
    "expect": cmd_expect,
    "hom": cmd_hom,
    "singlet": cmd_singlet,
    "qkd": cmd_qkd,
    "atom": cmd_atom,
    "modes-list": cmd_modes_list,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        cfg = validate(args)
    except FlagError as exc:
        parser.print_usage(sys.stderr)
        print(f"rotomode: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    try:
        COMMANDS[cfg.command](cfg)
    except (RotomodeError, ValueError, ArithmeticError) as exc:
        print(f"rotomode: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return 0


if __name__ == "__main__":
    sys.exit(main())
