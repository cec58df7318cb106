"""Command-line interface.

Exit codes: 0 on success, 2 for bad input, 3 for numerical or reproduction failures.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bounds import certificate, gram_trace_bound, upper_bound_energy
from .channel import ChannelSpectrum, realify_matrix, spectrum_of
from .codebook import (FORMAT_VERSION, Codebook, build_codebook,
                       optimal_precoder, repro_4d, select_precoder)
from .errors import ConditioningError, LatticeError, NumericalError, ReproFailure
from .lattice import QuadraticForm, min_distance
from .perfect import enumerate_perfect_forms, perfect_classes, root_lattice_form
from .precoder import PrecoderResult, gmd_baseline, gmd_precoder
from .reduction import is_minkowski_reduced, minkowski_reduce

log = logging.getLogger("latprec")

MAX_ENUM_DIM = 5


class InputError(Exception):
    pass


def _form_json(G: QuadraticForm) -> dict:
    return {"gram_num": [x.numerator for x in G.entries],
            "gram_den": [x.denominator for x in G.entries]}


def _write(obj: dict, out) -> None:
    obj = {"spec_version": FORMAT_VERSION, **obj}
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")
        log.info("wrote %s", out)


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from None


def load_channel(path) -> ChannelSpectrum:
    """Spectrum from {"spectrum": [...]}, {"complex": {"re": .., "im": ..}} or {"real": [[..]]}."""
    d = _read_json(path)
    if "spectrum" in d:
        return ChannelSpectrum.from_values(d["spectrum"])
    if "complex" in d:
        c = d["complex"]
        A = np.asarray(c["re"], dtype=float) + 1j * np.asarray(c["im"], dtype=float)
        return spectrum_of(realify_matrix(A))[0]
    if "real" in d:
        return spectrum_of(np.asarray(d["real"], dtype=float))[0]
    raise InputError("channel file needs one of 'spectrum', 'complex' or 'real'")


def _result_json(res: PrecoderResult, S: ChannelSpectrum) -> dict:
    out = {
        "spectrum": list(S.s),
        "F": res.F.tolist(),
        "power": res.power,
        "dmin2": res.dmin2,
        "normalized_dmin2": res.normalized_dmin2,
        "bounds": {"lower": res.bounds[0], "upper": res.bounds[1]},
    }
    if res.source_form is not None:
        out["source_form"] = _form_json(res.source_form)
    out.update({k: v for k, v in res.extra.items() if isinstance(v, (str, int, float, bool))})
    return out


def _check_dim(n: int) -> None:
    if not 2 <= n <= MAX_ENUM_DIM:
        raise InputError(f"enumeration supports 2 <= N <= {MAX_ENUM_DIM}, got {n}")


def cmd_enumerate(a) -> None:
    _check_dim(a.dim)
    bound = a.trace_bound if a.trace_bound is not None else a.dim + 1
    recs = enumerate_perfect_forms(root_lattice_form(a.dim), Fraction(str(bound)))
    classes = perfect_classes(recs)
    label = {}
    for k, cls in enumerate(classes):
        for G in cls:
            label[G.entries] = k
    forms = [{**_form_json(r.form), "trace": str(r.trace), "min_pairs": len(r.min_vectors),
              "class": label[r.form.entries]} for r in recs]
    _write({"dim": a.dim, "trace_bound": bound, "classes": len(classes), "forms": forms}, a.out)


def cmd_codebook(a) -> None:
    _check_dim(a.dim)
    cb = build_codebook(a.dim, a.max_ratio)
    Path(a.out).write_text(cb.dumps(), encoding="utf-8")
    log.info("codebook with %d entries written to %s", len(cb.entries), a.out)


def cmd_optimize(a) -> None:
    S = load_channel(a.channel)
    if a.codebook:
        res = select_precoder(S, Codebook.load(a.codebook))
    else:
        _check_dim(S.dim)
        res = optimal_precoder(S)
    _write(_result_json(res, S), a.out)


def cmd_gmd(a) -> None:
    S = load_channel(a.channel)
    W, F, R = gmd_precoder(S)
    res = gmd_baseline(S)
    out = _result_json(res, S)
    out.update(W=W.tolist(), F_unit=F.tolist(), R=R.tolist())
    _write(out, a.out)


def cmd_bounds(a) -> None:
    S = load_channel(a.channel)
    out = {"spectrum": list(S.s), "upper_energy": upper_bound_energy(S),
           "gram_trace_ub": gram_trace_bound(S)}
    c = certificate(root_lattice_form(S.dim), S) if S.dim >= 2 else None
    if c is not None:
        out["root_lattice"] = {"lower_energy": c.lower_energy, "z_trace_ub": c.z_trace_ub,
                               "ratio": c.ratio}
    _write(out, None)


def _parse_gram(d) -> QuadraticForm:
    M = d.get("gram") if isinstance(d, dict) else d
    if M is None:
        raise InputError("gram file needs a 'gram' matrix")
    try:
        return QuadraticForm.from_matrix([[Fraction(str(x)) for x in row] for row in M])
    except (TypeError, ZeroDivisionError) as e:
        raise InputError(f"bad gram entries: {e}") from None


def cmd_reduce(a) -> None:
    G = _parse_gram(_read_json(a.gram))
    G_L, Z = minkowski_reduce(G)
    mv = min_distance(G_L)
    _write({"dim": G.dim, "reduced": _form_json(G_L),
            "reduced_matrix": [[str(x) for x in row] for row in G_L.matrix],
            "Z": [list(r) for r in Z.entries], "min": str(mv.form_min),
            "is_minkowski_reduced": is_minkowski_reduced(G_L)}, a.out)


def cmd_repro(a) -> None:
    _write(repro_4d(), a.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latprec", description="Lattice precoders from perfect forms.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("enumerate", help="perfect forms under a trace bound")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--trace-bound", type=float)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("codebook", help="offline codebook of generators")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--max-ratio", type=float, required=True, help="largest s1/det(S)^(1/N)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_codebook)

    s = sub.add_parser("optimize", help="optimal precoder for a channel")
    s.add_argument("--channel", required=True)
    s.add_argument("--codebook")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("gmd", help="geometric mean decomposition precoder")
    s.add_argument("--channel", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_gmd)

    s = sub.add_parser("bounds", help="energy and trace bounds for a channel")
    s.add_argument("--channel", required=True)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("reduce", help="Minkowski reduction of a Gram matrix")
    s.add_argument("--gram", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("repro-4d", help="the D4/A4 channel switch")
    s.add_argument("--out")
    s.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    try:
        a.func(a)
    except (NumericalError, ReproFailure, ConditioningError) as e:
        log.error("%s: %s", type(e).__name__, e)
        return 3
    except (InputError, LatticeError, ValueError, KeyError, TypeError, OSError) as e:
        log.error("%s: %s", type(e).__name__, e)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
