"""Command-line front end.

Every command writes one JSON document (or a CSV table) with complex numbers
as {re, im} pairs and all floats rounded to 12 significant digits, so equal
configurations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from . import __version__
from .errors import ModelViolation, NumericalFailure, SpectrumError
from .operator_model import PotentialSpec, antiperiodic_eigenvalues, periodic_eigenvalues

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MODEL = 3
EXIT_NUMERICAL = 4
THREADS_ENV = "PTHILL_NUM_THREADS"
COMMANDS = ("spectrum", "bands", "critical", "discriminant", "verify")


@dataclass(frozen=True)
class RunConfig:
    command: str
    V: Optional[float] = None
    a_imag: Optional[float] = None
    n_max: int = 4
    t_steps: int = 256
    trunc_N: int = 32
    tol: float = 1e-9
    output_format: str = "json"
    output_path: Optional[str] = None
    k: int = 2
    V_max: float = 30.0
    lambda_max: float = 100.0
    lam: tuple = ()

    @property
    def spec(self) -> PotentialSpec:
        if self.V is not None:
            return PotentialSpec.from_V(self.V)
        return PotentialSpec.from_a_imag(self.a_imag)

    def as_dict(self) -> dict:
        d = {"command": self.command}
        if self.command == "critical":
            d.update(k=self.k, tol=self.tol, V_max=self.V_max, trunc_N=self.trunc_N)
            return d
        d.update(V=self.V, a_imag=self.a_imag, trunc_N=self.trunc_N, tol=self.tol)
        if self.command in ("bands", "verify"):
            d.update(n_max=self.n_max, t_steps=self.t_steps)
        if self.command == "spectrum":
            d.update(lambda_max=self.lambda_max)
        return d


# ---------------------------------------------------------------------------
# serialization


def _num(x: float):
    x = float(x)
    if not math.isfinite(x):
        return None
    r = float(f"{x:.12g}")
    return 0.0 if r == 0.0 else r


def _cx(z) -> dict:
    z = complex(z)
    return {"re": _num(z.real), "im": _num(z.imag)}


def _eig_record(e) -> dict:
    return {
        "label": e.index, "n": e.n, "sign": e.sign, "class": e.cls.value, "value": _cx(e.value),
        "disc_center": _num(e.disc_center), "disc_radius": _num(e.disc_radius),
    }


def _clean(obj):
    """Round every float inside a nested structure."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands; each returns (json document, csv header, csv rows)


def _coupling_block(cfg: RunConfig) -> dict:
    spec = cfg.spec
    return {"V": spec.V, "a": _cx(spec.a)}


def cmd_spectrum(cfg: RunConfig):
    a = cfg.spec.a
    per = periodic_eigenvalues(a, N=cfg.trunc_N, region_bound=cfg.lambda_max, tol=cfg.tol)
    anti = antiperiodic_eigenvalues(a, N=cfg.trunc_N, region_bound=cfg.lambda_max, tol=cfg.tol)
    doc = {"coupling": _coupling_block(cfg),
           "periodic": [_eig_record(e) for e in per],
           "antiperiodic": [_eig_record(e) for e in anti]}
    header = ["kind", "label", "class", "re", "im", "disc_center", "disc_radius"]
    rows = [[kind, e.index, e.cls.value, e.value.real, e.value.imag, e.disc_center, e.disc_radius]
            for kind, lst in (("periodic", per), ("antiperiodic", anti)) for e in lst]
    return doc, header, rows


def _is_imag(a: complex) -> bool:
    return a.imag > 0 and abs(a.real) <= 1e-14 * abs(a)


def cmd_bands(cfg: RunConfig):
    from .band_structure import real_components, trace_bands

    a = cfg.spec.a
    bands = trace_bands(a, n_max=cfg.n_max, t_steps=cfg.t_steps)
    comps = real_components(a, n_max=(cfg.n_max + 1) // 2) if _is_imag(a) else []
    sings = {}
    for b in bands:
        if b.singularity is not None:
            sings[b.singularity.n] = b.singularity
    doc = {
        "coupling": _coupling_block(cfg),
        "bands": [{
            "index": b.index, "start": b.endpoint_0.index, "end": b.endpoint_pi.index,
            "real_until": _num(b.real_until) if b.real_until is not None else None,
            "t": [_num(t) for t in b.t], "mu": [_cx(m) for m in b.mu],
        } for b in bands],
        "components": [{"index": c.index, "lo": _num(c.lo), "hi": _num(c.hi), "degenerate": c.degenerate}
                       for c in comps],
        "singularities": [{"n": s.n, "Lambda": _num(s.Lambda), "t_n": _num(s.t_n)}
                          for _, s in sorted(sings.items())],
    }
    header = ["kind", "index", "t", "re", "im", "lo", "hi"]
    rows = [["band", b.index, t, m.real, m.imag, "", ""] for b in bands for t, m in zip(b.t, b.mu)]
    rows += [["component", c.index, "", "", "", c.lo, c.hi] for c in comps]
    rows += [["singularity", s.n, s.t_n, s.Lambda, 0.0, "", ""] for _, s in sorted(sings.items())]
    return doc, header, rows


def cmd_critical(cfg: RunConfig):
    from .criticality import find_V2, find_Vk
    from .discriminant import hill_discriminant

    if cfg.k == 2:
        cp = find_V2(tol_V=cfg.tol)
        Fp = abs(hill_discriminant(1j * cp.r, cp.collision_lambda).F_prime)
    else:
        cp = find_Vk(cfg.k, tol_V=cfg.tol, V_max=cfg.V_max, trunc_N=max(cfg.trunc_N, 48))
        Fp = cp.F_prime
    doc = {
        "k": cp.k, "r": _num(cp.r), "V_k": _num(cp.V_k),
        "bracket": {"lo": _num(cp.bracket_lo), "hi": _num(cp.bracket_hi)},
        "a_squared": {"lo": _num(1.0 - 4.0 * cp.bracket_hi ** 2), "hi": _num(1.0 - 4.0 * cp.bracket_lo ** 2)},
        "collided_pair": list(cp.collided_pair),
        "collision_lambda": _num(cp.collision_lambda) if cp.collision_lambda is not None else None,
        "verification": {"F_prime_abs": _num(Fp) if Fp is not None else None},
        "method": cp.method,
    }
    header = ["k", "r", "V_k", "bracket_lo", "bracket_hi", "pair_lo", "pair_hi", "collision_lambda", "method"]
    rows = [[cp.k, cp.r, cp.V_k, cp.bracket_lo, cp.bracket_hi, *cp.collided_pair,
             cp.collision_lambda if cp.collision_lambda is not None else "", cp.method]]
    return doc, header, rows


def cmd_discriminant(cfg: RunConfig):
    from .discriminant import hill_discriminant

    a = cfg.spec.a
    tol = min(cfg.tol, 1e-6)
    vals = [hill_discriminant(a, lam, tol=tol) for lam in cfg.lam]
    doc = {"coupling": _coupling_block(cfg),
           "values": [{"lambda": _cx(v.lam), "F": _cx(v.F), "F_prime": _cx(v.F_prime)} for v in vals]}
    header = ["lambda_re", "lambda_im", "F_re", "F_im", "F_prime_re", "F_prime_im"]
    rows = [[v.lam.real, v.lam.imag, v.F.real, v.F.imag, v.F_prime.real, v.F_prime.imag] for v in vals]
    return doc, header, rows


def _spectrum_checks(a: complex, cfg: RunConfig) -> list[dict]:
    """Reality and ordering of the periodic/antiperiodic lists."""
    per = periodic_eigenvalues(a, N=cfg.trunc_N, region_bound=60.0, tol=cfg.tol)
    anti = antiperiodic_eigenvalues(a, N=cfg.trunc_N, region_bound=60.0, tol=cfg.tol)
    checks = []
    l1 = [e for e in anti if e.n == 1]
    im1 = max(abs(e.value.imag) for e in l1)
    if a.imag == 0.0:
        vals = sorted(per + anti, key=lambda e: (e.n, e.sign != "", e.sign == "+"))
        re = np.array([e.value.real for e in vals])
        imag = max(abs(e.value.imag) for e in vals)
        checks.append({"name": "all eigenvalues real", "passed": imag < 1e-9, "value": imag,
                       "detail": f"{len(vals)} eigenvalues in |lambda| < 60"})
        # pairs split by less than the eigenvalue tolerance count as ordered
        ordered = bool(np.all(np.diff(re) > -cfg.tol))
        checks.append({"name": "ordering lambda_0 < lambda_1^- < lambda_1^+ < lambda_2^- < ...",
                       "passed": ordered, "value": float(np.min(np.diff(re))), "detail": ""})
    else:
        conj = abs(l1[0].value - np.conj(l1[1].value))
        checks.append({"name": "lambda_1^+- nonreal conjugate pair", "passed": im1 > 1e-9 and conj < 1e-8,
                       "value": im1, "detail": f"lambda_1^- = {l1[0].value:.12g}, lambda_1^+ = {l1[1].value:.12g}"})
    return checks


def cmd_verify(cfg: RunConfig):
    from .band_structure import real_components, verify_properties
    from .criticality import Phase, classify_phase

    spec = cfg.spec
    a = spec.a
    checks = _spectrum_checks(a, cfg)
    skipped = []
    phase = None
    if _is_imag(a):
        phase = classify_phase(spec.V)
        if phase is Phase.CASE1:
            try:
                rep = verify_properties(a, n_max=cfg.n_max, t_steps=cfg.t_steps, raise_on_failure=False)
                checks += [{"name": c.name, "passed": c.passed, "value": c.value, "detail": c.detail}
                           for c in rep.checks]
            except NumericalFailure as exc:
                # near the first threshold the periodic gaps fall below double precision
                skipped.append({"name": "band properties", "reason": str(exc)})
        else:
            comps = real_components(a, n_max=(cfg.n_max + 1) // 2)
            first = next((c for c in comps if c.index == 1), None)
            if phase is Phase.CASE3:
                ok = first is None and any(c.index == 2 for c in comps)
                detail = "first real component absent, later components present"
            else:
                ok = first is not None and first.degenerate
                detail = "first real component is a single point"
            checks.append({"name": f"real components ({phase.value})", "passed": ok,
                           "value": float(len(comps)), "detail": detail})
    passed = all(c["passed"] for c in checks)
    doc = {"coupling": _coupling_block(cfg), "phase": phase.value if phase else None,
           "passed": passed, "checks": checks, "skipped": skipped}
    header = ["name", "passed", "value", "detail"]
    rows = [[c["name"], c["passed"], float(c["value"]), c["detail"]] for c in checks]
    return doc, header, rows


HANDLERS = {
    "spectrum": cmd_spectrum, "bands": cmd_bands, "critical": cmd_critical,
    "discriminant": cmd_discriminant, "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# argument handling


def output_schema() -> dict:
    """The JSON schema every command's JSON output validates against."""
    text = resources.files("pthill").joinpath("schema/output.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def _complex(s: str) -> complex:
    try:
        return complex(s.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {s}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pthill", description="Spectra of the optical Hill operator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--format", choices=("json", "csv"), default="json", dest="output_format")
    out.add_argument("--output", default=None, dest="output_path", help="write here instead of stdout")
    out.add_argument("--tol", type=_positive_float, default=1e-9)
    out.add_argument("--trunc-N", type=_positive_int, default=32, dest="trunc_N")
    coup = argparse.ArgumentParser(add_help=False)
    g = coup.add_mutually_exclusive_group(required=True)
    g.add_argument("--V", type=float, help="optical strength V >= 0")
    g.add_argument("--a-imag", type=float, dest="a_imag", help="c for the imaginary coupling a = ic")
    band = argparse.ArgumentParser(add_help=False)
    band.add_argument("--n-max", type=_positive_int, default=None, dest="n_max")
    band.add_argument("--t-steps", type=_positive_int, default=256, dest="t_steps")

    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("spectrum", parents=[coup, out], help="periodic and antiperiodic eigenvalues")
    s.add_argument("--lambda-max", type=_positive_float, default=100.0, dest="lambda_max")
    sub.add_parser("bands", parents=[coup, band, out], help="Bloch band polylines")
    c = sub.add_parser("critical", parents=[out], help="critical optical strength V_k")
    c.add_argument("--k", type=_positive_int, default=2)
    c.add_argument("--V-max", type=_positive_float, default=30.0, dest="V_max")
    d = sub.add_parser("discriminant", parents=[coup, out], help="Hill discriminant F and F'")
    d.add_argument("--lambda", type=_complex, action="append", dest="lam", required=True,
                   help="spectral parameter (repeatable), e.g. 4 or 2+1j")
    sub.add_parser("verify", parents=[coup, band, out], help="property checks with pass/fail exit code")
    return p


def parse_config(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    kw = {k: v for k, v in vars(ns).items() if v is not None}
    if "n_max" not in kw:
        kw["n_max"] = 3 if ns.command == "verify" else 4
    if "lam" in kw:
        kw["lam"] = tuple(kw["lam"])
    return RunConfig(**kw)


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, exc: Exception, code: int) -> int:
    doc = {"error": {"type": kind, "class": type(exc).__name__, "message": str(exc)}}
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return code


def run(cfg: RunConfig) -> int:
    doc, header, rows = HANDLERS[cfg.command](cfg)
    if cfg.output_format == "csv":
        text = _to_csv(header, rows)
    else:
        full = {"pthill_version": __version__, "config": cfg.as_dict(), "result": doc}
        text = json.dumps(_clean(full), indent=2) + "\n"
    _emit(text, cfg.output_path)
    if cfg.command == "verify" and not doc["passed"]:
        return EXIT_MODEL
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    threads = os.environ.get(THREADS_ENV)
    try:
        if threads:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=int(threads)):
                return run(cfg)
        return run(cfg)
    except ModelViolation as exc:
        return _error("model_violation", exc, EXIT_MODEL)
    except NumericalFailure as exc:
        return _error("numerical_failure", exc, EXIT_NUMERICAL)
    except (SpectrumError, ValueError) as exc:
        # domain and configuration errors are usage errors
        return _error("usage", exc, EXIT_USAGE)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
