"""Command-line front end.

Subcommands: ``verify``, ``zeros``, ``tabulate``, ``asymptote`` and
``contour``.  Settings come from flags, then from an optional JSON config
file (``--config``), then from built-in defaults.  Exit status is 0 when a
check passes, 2 when it fails and 1 on any error.

Character labels have the form ``N.j``: the j-th character mod N in the
enumeration order of :func:`siegel_lambert.characters.enumerate_characters`
(``N.0`` is principal; ``1.0`` is the trivial character).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import traceback
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ._cache import CACHE_ENV
from .characters import character_from_label
from .errors import SiegelLambertError, TruncationError
from .identity import (IdentityReport, IdentityTask, asymptotic_probe, contour_check,
                       verify_identity)
from .providers import SK_WEIGHTS, file_pair_model, sk_pair_model
from .zeros import bracket_zeros, cached_zeros, find_zeros, read_zero_file, write_zero_file

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2
COMMANDS = ("verify", "zeros", "tabulate", "asymptote", "contour")
CSV_COLUMNS = ("component", "value_re", "value_im", "bound")
REPORT_COMPONENTS = ("lhs", "whittaker_sum", "residual_Rk", "zero_sum", "rhs_total")
SK_BASE_TERMS = 2000
SK_MAX_TERMS = 200_000


class ConfigError(SiegelLambertError, ValueError):
    """Invalid or incomplete run configuration."""


@dataclass
class RunConfig:
    command: str
    model: str = "sk:10"
    character: str = "1.0"
    alpha: float = 1.0
    alphas: tuple[float, ...] = (0.05, 0.02, 0.01)
    zero_height: float = 50.0
    height: float = 50.0
    M_lhs: int | None = None
    M_whittaker: int | None = None
    C0: float = 1.0
    tolerance: float | None = None
    zeros_file: str | None = None
    c: float | None = None
    c1: float | None = None
    T: float = 30.0
    out: str | None = None
    format: str = "json"
    threads: int = 1
    cache_dir: str | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"command: must be one of {', '.join(COMMANDS)}")
        positive = ["alpha", "zero_height", "height", "C0", "T", "threads"]
        for name in positive:
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise ConfigError(f"{name}: must be a positive number, got {val!r}")
        for name in ("M_lhs", "M_whittaker", "tolerance"):
            val = getattr(self, name)
            if val is not None and not (math.isfinite(val) and val > 0):
                raise ConfigError(f"{name}: must be positive, got {val!r}")
        if not self.alphas or any(not (math.isfinite(a) and a > 0) for a in self.alphas):
            raise ConfigError(f"alphas: must be a non-empty list of positive numbers")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format: must be 'json' or 'csv', got {self.format!r}")
        if self.command == "zeros" and self.out is None:
            raise ConfigError("out: the zeros command needs an output path")
        if not (self.model.startswith("sk:") or Path(self.model).exists()):
            raise ConfigError(f"model: expected 'sk:<k>' or an existing file, got {self.model!r}")


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_alphas(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(a) for a in text)
    return tuple(float(a) for a in str(text).split(",") if a.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siegel-lambert",
        description="Numerical checks of a Lambert-series identity for Siegel cusp form "
                    "coefficient models.",
        epilog="Character labels are 'N.j': the j-th character mod N (N.0 is principal). "
               f"Set ${CACHE_ENV} to choose the cache directory.")
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def common(p, *, model=True, character=True):
        p.add_argument("--config", help="JSON file with settings (flags take precedence)")
        if model:
            p.add_argument("--model", default=S, help="'sk:10', 'sk:12' or a coefficient file")
        if character:
            p.add_argument("--character", default=S, help="character label N.j (default 1.0)")
        p.add_argument("--out", default=S, help="output path (default: stdout)")
        p.add_argument("--format", default=S, choices=("json", "csv"))
        p.add_argument("--threads", type=int, default=S)
        p.add_argument("--cache-dir", dest="cache_dir", default=S)
        p.add_argument("--tolerance", type=float, default=S)

    p = sub.add_parser("verify", help="evaluate both sides of the identity")
    common(p)
    p.add_argument("--alpha", type=float, default=S)
    p.add_argument("--zero-height", dest="zero_height", type=float, default=S)
    p.add_argument("--M-lhs", dest="M_lhs", type=int, default=S)
    p.add_argument("--M-whittaker", dest="M_whittaker", type=int, default=S)
    p.add_argument("--C0", type=float, default=S)
    p.add_argument("--zeros-file", dest="zeros_file", default=S,
                   help="ingest zero ordinates instead of computing them")

    p = sub.add_parser("zeros", help="locate zeros of L(s, chi) on the critical line")
    common(p, model=False)
    p.add_argument("--height", type=float, default=S)
    p.add_argument("--C0", type=float, default=S)

    p = sub.add_parser("tabulate", help="identity components for several alphas")
    common(p)
    p.add_argument("--alphas", type=_parse_alphas, default=S)
    p.add_argument("--zero-height", dest="zero_height", type=float, default=S)
    p.add_argument("--C0", type=float, default=S)

    p = sub.add_parser("asymptote", help="alpha^k times the Lambert series as alpha -> 0")
    common(p, character=False)
    p.add_argument("--alphas", type=_parse_alphas, default=S)

    p = sub.add_parser("contour", help="residue-theorem balance on a rectangle")
    common(p)
    p.add_argument("--alpha", type=float, default=S)
    p.add_argument("--c", type=float, default=S)
    p.add_argument("--c1", type=float, default=S)
    p.add_argument("--T", type=float, default=S, help="height in zero-ordinate units")
    p.add_argument("--zero-height", dest="zero_height", type=float, default=S)
    return parser


def load_config(argv: list[str] | None = None) -> RunConfig:
    """Build the run configuration; flags override the config file, which overrides defaults."""
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    merged: dict = {}
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: cannot read {config_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be a JSON object")
        for key, val in data.items():
            key = key.replace("-", "_")
            if key == "command":
                continue
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{key}: unknown configuration field")
            merged[key] = _parse_alphas(val) if key == "alphas" else val
    merged.update(args)
    cfg = RunConfig(command=command, **merged)
    cfg.validate()
    return cfg


# -- model and report helpers ---------------------------------------------------

def load_model(source: str, alphas=(1.0,)):
    """Build the model; SK models grow their coefficient count until truncation fits."""
    if not source.startswith("sk:"):
        return file_pair_model(source)
    try:
        k = int(source[3:])
    except ValueError as exc:
        raise ConfigError(f"model: bad weight in {source!r}") from exc
    if k not in SK_WEIGHTS:
        raise ConfigError(f"model: supported weights are {SK_WEIGHTS}")
    smallest = min(alphas)
    largest = max(alphas)
    # Lambert terms decay like m^(k-1) e^{-4 pi m alpha}, Whittaker terms like e^{-4 pi m / alpha}
    need = max(60.0 + k * math.log(k / (4 * math.pi * smallest) + 2.0), 60.0) \
        / (4 * math.pi * smallest)
    need = max(need, 60.0 * largest / (4 * math.pi))
    M = SK_BASE_TERMS
    while M < 1.5 * need:
        M *= 2
    if M > SK_MAX_TERMS:
        raise TruncationError(f"alpha range needs more than {SK_MAX_TERMS} coefficients")
    return sk_pair_model(k, M)


def _num(x: float):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


def _cplx(z) -> dict:
    z = complex(z)
    return {"re": _num(z.real), "im": _num(z.imag)}


def report_to_dict(report: IdentityReport) -> dict:
    return {
        "components": {name: _cplx(getattr(report, name)) for name in REPORT_COMPONENTS},
        "abs_residual": _num(report.abs_residual),
        "rel_residual": _num(report.rel_residual),
        "truncation_bounds": {k: _num(v) for k, v in report.truncation_bounds.items()},
        "tolerance": _num(report.tolerance),
        "passed": report.passed,
        "zero_brackets": [
            {"ordinates": [_num(g) for g in b.ordinates], "value": _cplx(b.value),
             "bound": _num(b.bound)} for b in report.zero_terms],
        "metadata": {k: (_num(v) if isinstance(v, float) else v)
                     for k, v in report.metadata.items()},
    }


REPORT_SCHEMA = {
    "components": dict, "abs_residual": (int, float), "rel_residual": (int, float),
    "truncation_bounds": dict, "tolerance": (int, float), "passed": bool,
    "zero_brackets": list, "metadata": dict,
}


def validate_report_json(obj: dict) -> None:
    """Raise ValueError unless obj follows the identity-report layout."""
    for key, typ in REPORT_SCHEMA.items():
        if key not in obj:
            raise ValueError(f"missing key {key!r}")
        if not isinstance(obj[key], typ):
            raise ValueError(f"key {key!r} has type {type(obj[key]).__name__}")
    for name in REPORT_COMPONENTS:
        comp = obj["components"].get(name)
        if not (isinstance(comp, dict) and set(comp) == {"re", "im"}):
            raise ValueError(f"component {name!r} must be an object with 're' and 'im'")


def report_rows(report: IdentityReport) -> list[tuple]:
    bounds = report.truncation_bounds
    bound_of = {"lhs": bounds["lhs"], "whittaker_sum": bounds["whittaker_sum"],
                "residual_Rk": bounds["residual_Rk"],
                "zero_sum": bounds["zero_sum"] + bounds["zero_envelope"],
                "rhs_total": bounds["whittaker_sum"] + bounds["residual_Rk"]
                + bounds["zero_sum"] + bounds["zero_envelope"]}
    rows = []
    for name in REPORT_COMPONENTS:
        z = complex(getattr(report, name))
        rows.append((name, repr(z.real), repr(z.imag), repr(float(bound_of[name]))))
    return rows


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def emit_report(report: IdentityReport, fmt: str, path: str | None) -> str:
    """Write the report as JSON or CSV; returns the text written."""
    if fmt == "json":
        text = _dump_json(report_to_dict(report))
    elif fmt == "csv":
        text = _dump_csv(CSV_COLUMNS, report_rows(report))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    _write(text, path)
    return text


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- commands ------------------------------------------------------------------

def _task(cfg: RunConfig, model, alpha: float, tolerance: float) -> IdentityTask:
    chi = character_from_label(cfg.character)
    zeros = None
    if cfg.zeros_file:
        zeros = read_zero_file(cfg.zeros_file)
    return IdentityTask(model, chi, alpha, cfg.zero_height, cfg.M_lhs, cfg.M_whittaker,
                        cfg.C0, tolerance, zeros)


def cmd_verify(cfg: RunConfig) -> int:
    model = load_model(cfg.model, (cfg.alpha, 1 / cfg.alpha))
    tol = cfg.tolerance if cfg.tolerance is not None else (1e-6 if cfg.character.startswith("1.")
                                                           else 1e-4)
    report = verify_identity(_task(cfg, model, cfg.alpha, tol), workers=cfg.threads)
    emit_report(report, cfg.format, cfg.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_zeros(cfg: RunConfig) -> int:
    chi = character_from_label(cfg.character)
    zl = bracket_zeros(cached_zeros(chi, cfg.height), cfg.C0)
    write_zero_file(cfg.out, zl)
    return EXIT_PASS


def cmd_tabulate(cfg: RunConfig) -> int:
    model = load_model(cfg.model, cfg.alphas + tuple(1 / a for a in cfg.alphas))
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-6
    reports = [verify_identity(_task(cfg, model, a, tol), workers=cfg.threads)
               for a in cfg.alphas]
    if cfg.format == "json":
        text = _dump_json([report_to_dict(r) for r in reports])
    else:
        header = ("alpha",) + REPORT_COMPONENTS + ("rel_residual", "passed")
        rows = [(repr(a),) + tuple(repr(complex(getattr(r, c)).real) for c in REPORT_COMPONENTS)
                + (repr(r.rel_residual), str(r.passed)) for a, r in zip(cfg.alphas, reports)]
        text = _dump_csv(header, rows)
    _write(text, cfg.out)
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def cmd_asymptote(cfg: RunConfig) -> int:
    model = load_model(cfg.model, cfg.alphas)
    rows = asymptotic_probe(model, sorted(cfg.alphas, reverse=True))
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-3
    if cfg.format == "json":
        text = _dump_json([{k: _num(v) if isinstance(v, float) else v
                            for k, v in asdict(r).items()} for r in rows])
    else:
        text = _dump_csv(("alpha", "scaled_lhs", "constant", "ratio", "terms"),
                         [(repr(r.alpha), repr(r.scaled_lhs), repr(r.constant), repr(r.ratio),
                           r.terms) for r in rows])
    _write(text, cfg.out)
    return EXIT_PASS if abs(rows[-1].ratio - 1) <= tol else EXIT_FAIL


def cmd_contour(cfg: RunConfig) -> int:
    model = load_model(cfg.model, (cfg.alpha, 1 / cfg.alpha))
    tol = cfg.tolerance if cfg.tolerance is not None else 1e-7
    task = _task(cfg, model, cfg.alpha, tol)
    rep = contour_check(task, cfg.c, cfg.c1, cfg.T, tol)
    obj = {k: (_cplx(v) if isinstance(v, complex) else _num(v) if isinstance(v, float) else v)
           for k, v in asdict(rep).items()}
    if cfg.format == "json":
        text = _dump_json(obj)
    else:
        rows = [(k, repr(complex(v).real), repr(complex(v).imag), "")
                for k, v in asdict(rep).items() if isinstance(v, complex)]
        rows.append(("balance", repr(rep.balance), "0.0", repr(rep.horizontal + rep.quadrature_error)))
        text = _dump_csv(CSV_COLUMNS, rows)
    _write(text, cfg.out)
    return EXIT_PASS if rep.passed else EXIT_FAIL


HANDLERS = {"verify": cmd_verify, "zeros": cmd_zeros, "tabulate": cmd_tabulate,
            "asymptote": cmd_asymptote, "contour": cmd_contour}


def run(cfg: RunConfig) -> int:
    if cfg.cache_dir:
        os.environ[CACHE_ENV] = cfg.cache_dir
    return HANDLERS[cfg.command](cfg)


def _origin(exc: BaseException) -> str:
    """Package module (relative name) of the innermost frame that raised exc."""
    origin = "cli"
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        name = frame.f_globals.get("__name__", "")
        if name.startswith(__package__ + "."):
            origin = name[len(__package__) + 1:]
    return origin


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = load_config(argv)
        return run(cfg)
    except SiegelLambertError as exc:
        print(f"error [{_origin(exc)}:{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
