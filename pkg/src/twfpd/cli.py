"""Command-line front end.

    twfpd build       --bank CFG [--output DIR]
    twfpd table       --bank CFG --output DIR
    twfpd verify      --bank CFG [--tol T] [--output FILE] [--drop-complementary MU]
    twfpd analyze     --bank CFG --input SIGNAL --output DIR [--levels J]
    twfpd synthesize  --input DIR --output FILE [--mode standard|lp]
    twfpd roundtrip   --bank CFG --input SIGNAL [--levels J] [--mode M] [--output FILE]
    twfpd complexity  --bank CFG [--size S ...] [--output FILE]

``CFG`` is a JSON file or the name of a shipped fixture (``example1`` ..
``example4``).  Exit status: 0 ok, 2 validation failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from .construct import (
    BankConfig,
    ConfigError,
    DirectionSpec,
    FilterBank,
    build_bank,
    verify_bank,
)
from .io import FormatError, read_signal, read_tws, write_signal, write_tws
from .trigpoly import vanishing_moments
from .transform import (
    Decomposition,
    LevelDetails,
    OpCounter,
    ShapeError,
    analyze,
    complexity_report,
    synthesize,
)

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 2, 3
EXAMPLES = ("example1", "example2", "example3", "example4")
ORIENTATION_FLAGS = {"min": "min_phase", "max": "max_phase",
                     "min_phase": "min_phase", "max_phase": "max_phase"}


class ValidationFailure(Exception):
    """A check ran but did not pass (e.g. the bank is not tight)."""


def _int_vector(value, field: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{field}: expected a non-empty list of integers")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
            raise ConfigError(f"{field}: {v!r} is not an integer")
        out.append(int(v))
    return tuple(out)


def parse_bank_config(document: dict | str, orientation: str | None = None) -> BankConfig:
    """Validate a bank document (dict or JSON text) into a ``BankConfig``."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ConfigError("bank document must be a JSON object")
    for key in ("n", "lambda", "directions"):
        if key not in document:
            raise ConfigError(f"missing required field '{key}'")
    n, lam = document["n"], document["lambda"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ConfigError(f"n: expected a positive integer, got {n!r}")
    if isinstance(lam, bool) or not isinstance(lam, int) or lam < 2:
        raise ConfigError(f"lambda: expected an integer >= 2, got {lam!r}")
    dirs_doc = document["directions"]
    if not isinstance(dirs_doc, list) or not dirs_doc:
        raise ConfigError("directions: expected a non-empty list")
    directions = []
    for i, d in enumerate(dirs_doc):
        where = f"directions[{i}]"
        if not isinstance(d, dict) or "xi" not in d:
            raise ConfigError(f"{where}: expected an object with field 'xi'")
        xi = _int_vector(d["xi"], f"{where}.xi")
        if len(xi) != n:
            raise ConfigError(f"{where}.xi: expected length {n}, got {len(xi)}")
        zeta = _int_vector(d["zeta"], f"{where}.zeta") if "zeta" in d else None
        if zeta is not None and len(zeta) != n:
            raise ConfigError(f"{where}.zeta: expected length {n}, got {len(zeta)}")
        m = d.get("m", 1)
        if isinstance(m, bool) or not isinstance(m, int) or m < 1:
            raise ConfigError(f"{where}.m: expected a positive integer, got {m!r}")
        try:
            directions.append(DirectionSpec(xi, zeta, m))
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    reps = None
    if document.get("coset_reps") is not None:
        if not isinstance(document["coset_reps"], list):
            raise ConfigError("coset_reps: expected a list")
        reps = tuple(_int_vector(v, f"coset_reps[{i}]") for i, v in enumerate(document["coset_reps"]))
    orient = orientation or document.get("orientation", "max_phase")
    orient = ORIENTATION_FLAGS.get(orient, orient)
    try:
        return BankConfig(n, lam, tuple(directions), reps, orient)
    except ConfigError as exc:
        field = "coset_reps" if "coset" in str(exc) else "config"
        raise ConfigError(f"{field}: {exc}") from None


def config_to_dict(cfg: BankConfig) -> dict:
    return {
        "n": cfg.n,
        "lambda": cfg.lam,
        "directions": [{"xi": list(d.xi), "zeta": list(d.zeta), "m": d.m} for d in cfg.directions],
        "coset_reps": [list(nu) for nu in cfg.coset_reps],
        "orientation": cfg.orientation,
    }


def load_example(name: str, orientation: str | None = None) -> BankConfig:
    text = resources.files("twfpd.configs").joinpath(f"{name}.json").read_text()
    return parse_bank_config(text, orientation)


def load_bank_config(path: str, orientation: str | None = None) -> BankConfig:
    p = Path(path)
    if not p.exists() and path in EXAMPLES:
        return load_example(path, orientation)
    return parse_bank_config(p.read_text(), orientation)


# filter tables


def filter_entries(bank: FilterBank) -> list[dict]:
    """Every filter of the bank with its role metadata."""
    cfg = bank.config
    out = [{"name": "h", "role": "lowpass", "poly": bank.tau}]
    for l, g in enumerate(bank.g):
        out.append({"name": f"h_{l + 1}", "role": "highpass", "poly": g, "direction": l + 1})
    for l, q in enumerate(bank.q_D):
        out.append({"name": f"q_D{l + 1}", "role": "directional", "poly": q, "direction": l + 1})
    for mu, q in enumerate(bank.q_C):
        out.append({"name": f"q_C{mu + 1}", "role": "complementary", "poly": q,
                    "coset_rep": list(bank.coset_reps[mu])})
    for e in out:
        if cfg is not None and "direction" in e:
            d = cfg.directions[e["direction"] - 1]
            e["xi"], e["zeta"], e["m"] = list(d.xi), list(d.zeta), d.m
    return out


def table_csv(poly) -> str:
    header = ",".join(f"k{i + 1}" for i in range(poly.dim)) + ",coeff"
    rows = [",".join(str(v) for v in k) + f",{c!r}" for k, c in poly.items()]
    return "\n".join([header] + rows) + "\n"


def write_tables(bank: FilterBank, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {"config": config_to_dict(bank.config) if bank.config else None, "filters": []}
    for e in filter_entries(bank):
        poly = e.pop("poly")
        fname = f"{e['name']}.csv"
        (out_dir / fname).write_text(table_csv(poly))
        e.update({
            "file": fname,
            "nnz": poly.nnz,
            "coeff_sum": poly.coeff_sum(),
            "origin_coeff": poly[(0,) * poly.dim],
            "vanishing_moments": vanishing_moments(poly),
        })
        meta["filters"].append(e)
    (out_dir / "filters.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return meta


# decomposition persistence


def save_decomposition(dec: Decomposition, cfg: BankConfig, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"format": "twfpd-decomposition-1", "bank": config_to_dict(cfg),
                "shape": list(dec.shape), "levels": dec.J, "coarse": "x_0.tws", "details": []}
    write_tws(out_dir / "x_0.tws", dec.coarse)
    for j, lvl in enumerate(dec.details):
        entry = {"j": j, "d_D": [], "d_C": []}
        for l, d in enumerate(lvl.d_D):
            name = f"d_{j}_D{l + 1}.tws"
            write_tws(out_dir / name, d)
            entry["d_D"].append(name)
        for mu, d in enumerate(lvl.d_C):
            name = f"d_{j}_C{mu + 1}.tws"
            write_tws(out_dir / name, d)
            entry["d_C"].append(name)
        manifest["details"].append(entry)
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def load_decomposition(path: Path) -> tuple[Decomposition, BankConfig]:
    mdir = path if path.is_dir() else path.parent
    mfile = path / "manifest.json" if path.is_dir() else path
    manifest = json.loads(mfile.read_text())
    cfg = parse_bank_config(manifest["bank"])
    details = [LevelDetails([read_tws(mdir / f) for f in e["d_D"]],
                            [read_tws(mdir / f) for f in e["d_C"]])
               for e in sorted(manifest["details"], key=lambda e: e["j"])]
    dec = Decomposition(read_tws(mdir / manifest["coarse"]), details, tuple(manifest["shape"]))
    return dec, cfg


# commands


def _dump(obj, output: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _bank(args) -> tuple[BankConfig, FilterBank]:
    cfg = load_bank_config(args.bank, args.orientation)
    return cfg, build_bank(cfg)


def cmd_build(args) -> int:
    cfg, bank = _bank(args)
    doc = {"config": config_to_dict(cfg),
           "filters": {e["name"]: [list(k) + [c] for k, c in e["poly"].items()]
                       for e in filter_entries(bank)}}
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        _dump(doc, str(out / "bank.json"))
    else:
        _dump(doc, None)
    return EXIT_OK


def cmd_table(args) -> int:
    if not args.output:
        raise ConfigError("table: --output directory is required")
    _, bank = _bank(args)
    write_tables(bank, Path(args.output))
    return EXIT_OK


def cmd_verify(args) -> int:
    _, bank = _bank(args)
    if args.drop_complementary is not None:
        mu = args.drop_complementary
        if not 1 <= mu <= len(bank.q_C):
            raise ConfigError(f"--drop-complementary must be in 1..{len(bank.q_C)}")
        bank = bank.drop_complementary(mu - 1)
    report = verify_bank(bank, args.tol)
    _dump(report.to_dict(), args.output)
    return EXIT_OK if report.tight else EXIT_INVALID


def cmd_analyze(args) -> int:
    if not args.input or not args.output:
        raise ConfigError("analyze: --input and --output are required")
    cfg, bank = _bank(args)
    x = read_signal(args.input)
    dec = analyze(bank, x, args.levels)
    save_decomposition(dec, cfg, Path(args.output))
    return EXIT_OK


def cmd_synthesize(args) -> int:
    if not args.input or not args.output:
        raise ConfigError("synthesize: --input (decomposition dir) and --output are required")
    dec, cfg = load_decomposition(Path(args.input))
    if args.bank:
        cfg = load_bank_config(args.bank, args.orientation)
    bank = build_bank(cfg)
    write_signal(args.output, synthesize(bank, dec, args.mode))
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    if not args.input:
        raise ConfigError("roundtrip: --input is required")
    cfg, bank = _bank(args)
    x = read_signal(args.input)
    c_an, c_syn = OpCounter(), OpCounter()
    t0 = time.perf_counter()
    dec = analyze(bank, x, args.levels, c_an)
    t1 = time.perf_counter()
    y = synthesize(bank, dec, args.mode, c_syn)
    t2 = time.perf_counter()
    err = y - x
    rep = complexity_report(bank, tuple(s for s in x.shape))
    metrics = {
        "shape": list(x.shape),
        "levels": args.levels,
        "mode": args.mode,
        "max_abs_error": float(np.max(np.abs(err))),
        "rms_error": float(np.sqrt(np.mean(err ** 2))),
        "multiplications": {"analysis": c_an.counts, "synthesis": c_syn.counts},
        "cycle_per_point_measured": sum((rep.measured_lp if args.mode == "lp"
                                         else rep.measured_standard).values()),
        "cycle_constant_predicted": rep.lp_constant if args.mode == "lp" else rep.standard_constant,
        "complexity": rep.to_dict(),
    }
    _dump(metrics, args.output)
    timing = {"analysis_seconds": t1 - t0, "synthesis_seconds": t2 - t1}
    if args.output:
        Path(args.output).with_suffix(".timing.json").write_text(json.dumps(timing, indent=2) + "\n")
    else:
        sys.stderr.write(json.dumps(timing) + "\n")
    return EXIT_OK if metrics["max_abs_error"] < args.tol else EXIT_INVALID


def cmd_complexity(args) -> int:
    _, bank = _bank(args)
    if args.input:
        shape = read_signal(args.input).shape
    elif args.size:
        shape = tuple(args.size) if len(args.size) > 1 else (args.size[0],) * bank.n
    else:
        side = 256 if bank.lam == 2 else bank.lam ** 5
        shape = (side,) * bank.n if bank.n <= 2 else (bank.lam ** 3,) * bank.n
    _dump(complexity_report(bank, shape).to_dict(), args.output)
    return EXIT_OK


COMMANDS = {
    "build": cmd_build,
    "table": cmd_table,
    "verify": cmd_verify,
    "analyze": cmd_analyze,
    "synthesize": cmd_synthesize,
    "roundtrip": cmd_roundtrip,
    "complexity": cmd_complexity,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twfpd", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--bank", help="bank config JSON (or example1..example4)")
    parser.add_argument("--input", help="input signal (PGM or TWS1) or decomposition directory")
    parser.add_argument("--output", help="output file or directory")
    parser.add_argument("--levels", type=int, default=0, help="J: analysis runs J+1 levels")
    parser.add_argument("--mode", choices=("standard", "lp"), default="standard")
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--orientation", choices=("min", "max"), default=None)
    parser.add_argument("--size", type=int, nargs="+", help="signal shape for complexity runs")
    parser.add_argument("--drop-complementary", type=int, default=None, metavar="MU",
                        help="debug: remove q_C,MU (1-based) before verifying")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command != "synthesize" and not args.bank:
        print(f"twfpd {args.command}: --bank is required", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ShapeError, FormatError, ValueError, KeyError) as exc:
        print(f"twfpd {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"twfpd {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
