"""``shifttree`` command line.

Exit codes: 0 on success, 1 when an invariant fails (including weights that
are not left-invertible), 2 for unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .checks import Config, verify_rootless, verify_shift
from .errors import NotLeftInvertible, ShiftTreeError, SpecParseError, UnknownBuiltin
from .loader import LoadedSpec, load_spec, load_spec_dict
from .model import band_name, basis_polynomial, kernel_model, radius_of_convergence
from .rootless import decompose, essential_spectrum, generalized_root, index_relation
from .shift import WeightedShift
from .spectra import spectral_report
from .tree import builtin

SCHEMA_VERSION = 1
TABLE1_TREES = ("T1", "T2", "T3", "T4")


def _vertex(v) -> str:
    return str(v)


def _num(x: float, digits: int = 12) -> float:
    """Round for stable, readable output."""
    return float(f"{x:.{digits}g}")


def _complex(z) -> list:
    return [_num(z.real), _num(z.imag)]


def tree_report(spec: LoadedSpec, cfg: Config) -> dict:
    t = spec.shift.tree
    kT = t.branching_index
    out = {
        "k_T": kT,
        "branching_vertices": [_vertex(v) for v in t.branching_vertices],
        "card_branching": len(t.branching_vertices),
        "generation_cards": {str(n): len(t.generation(n)) for n in range(kT + 11)},
        "windows": {str(n): [_vertex(v) for v in t.window(n)] for n in range(11)},
        "tree": t.to_dict(),
    }
    if spec.rootless is not None:
        root = generalized_root(spec.rootless)
        dec = decompose(spec.rootless)
        out["rootless"] = {"generalized_root": _vertex(root.vertex), "unique": root.unique, "m_T": dec.m_T}
    return out


def model_report(spec: LoadedSpec, cfg: Config) -> dict:
    S = spec.shift
    if spec.rootless is not None:
        S = decompose(spec.rootless).T
    t = S.tree
    model = kernel_model(S)
    bands = []
    for (j, k), B in sorted(model.blocks(cfg.n_band).items()):
        if j and k and not B.is_zero():
            bands.append({"j": j, "k": k, "matrix": [[_complex(x) for x in row] for row in B.matrix]})
    offs = model.band_offsets(cfg.n_band)
    rad = radius_of_convergence(S, cfg.n_radius)
    polys = {}
    for v in t.vertices_upto(cfg.depth):
        polys[_vertex(v)] = len(basis_polynomial(S, v).nonzero_degrees())
    return {
        "dim_E": model.dim,
        "k_T": t.branching_index,
        "cokernel_basis": [
            {"tag": [str(x) for x in tag], "entries": {_vertex(v): _complex(c) for v, c in g}}
            for tag, g in zip(model.basis.tags, model.basis.vectors)
        ],
        "band_offsets": offs,
        "classification": band_name(max(offs, default=0)),
        "blocks": bands,
        "radius": {
            "a_n": [_num(x) for x in rad.a],
            "liminf_estimate": _num(rad.liminf_estimate),
            "exact_limit": None if rad.exact_limit is None else _num(rad.exact_limit),
            "lower_bound": _num(rad.lower_bound),
        },
        "basis_polynomial_terms": polys,
    }


def spectra_report(spec: LoadedSpec, cfg: Config) -> dict:
    out = _round_tree(spectral_report(spec.shift, cfg.n_radius).to_dict())
    if spec.rootless is not None:
        R = spec.rootless
        ind_S, ind_Mz = index_relation(R)
        ess = essential_spectrum(R, cfg.n_radius)
        out["rootless"] = {
            "index_S": ind_S,
            "index_Mz": ind_Mz,
            "essential_spectrum": {
                "model": _round_tree(ess["model"].to_dict()),
                "backward": _round_tree(ess["backward"].to_dict()),
            },
        }
    return out


def _round_tree(x):
    if isinstance(x, float):
        return _num(x)
    if isinstance(x, dict):
        return {k: _round_tree(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round_tree(v) for v in x]
    return x


def table1(cfg: Config, fan: int = 5) -> list[dict]:
    rows = []
    names = list(TABLE1_TREES) + [f"Tfan({fan})"]
    for name in names:
        t = builtin(name)
        model = kernel_model(WeightedShift.default(t))
        offs = model.band_offsets(cfg.n_band)
        rows.append({
            "tree": name,
            "dim_E": model.dim,
            "k_T": t.branching_index,
            "form": band_name(max(offs, default=0)),
        })
    return rows


def verify_report(spec: LoadedSpec, cfg: Config) -> dict:
    checks = verify_shift(spec.shift, cfg)
    if spec.rootless is not None:
        checks += verify_rootless(spec.rootless, cfg)
    return {
        "passed": all(c.passed for c in checks),
        "checks": [c.to_dict() for c in checks],
    }


def _flatten(prefix: str, x, rows: list):
    if isinstance(x, dict):
        for k in sorted(x):
            _flatten(f"{prefix}.{k}" if prefix else str(k), x[k], rows)
    elif isinstance(x, list) and x and isinstance(x[0], (dict, list)):
        for i, v in enumerate(x):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, json.dumps(x, sort_keys=True)))


def render(report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if isinstance(report, list):
            w.writerow(list(report[0]))
            for row in report:
                w.writerow(list(row.values()))
        else:
            rows: list = []
            _flatten("", report, rows)
            w.writerow(["key", "value"])
            w.writerows(rows)
        return buf.getvalue()
    if isinstance(report, list):
        cols = list(report[0])
        widths = [max(len(c), *(len(str(r[c])) for r in report)) for c in cols]
        lines = ["  ".join(c.ljust(n) for c, n in zip(cols, widths)).rstrip()]
        lines += ["  ".join(str(r[c]).ljust(n) for c, n in zip(cols, widths)).rstrip() for r in report]
        return "\n".join(lines) + "\n"
    if "checks" in report:
        lines = [f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['identity']} ({c['detail']})" for c in report["checks"]]
        lines.append("all checks passed" if report["passed"] else "some checks FAILED")
        return "\n".join(lines) + "\n"
    rows: list = []
    _flatten("", report, rows)
    return "\n".join(f"{k}: {v}" for k, v in rows) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shifttree", description="Weighted shifts on directed trees and their analytic models.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=["tree", "model", "spectra", "table1", "verify"])
    src = p.add_mutually_exclusive_group()
    src.add_argument("--spec", metavar="FILE", help="JSON tree + weights description")
    src.add_argument("--builtin", metavar="NAME", help="built-in tree with default weights, e.g. T2 or 'Tfan(5)'")
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--n-band", type=int, default=12, metavar="K", help="largest block index scanned (default 12)")
    p.add_argument("--n-radius", type=int, default=256, metavar="N", help="terms of the radius sequences (default 256)")
    p.add_argument("--n-repro", type=int, default=60, metavar="N", help="order of reproducing-kernel partial sums (default 60)")
    p.add_argument("--depth", type=int, default=6, metavar="G", help="generation depth for finite checks (default 6)")
    p.add_argument("--tol", type=float, default=1e-9, metavar="T", help="tolerance for inequality checks (default 1e-9)")
    p.add_argument("--fan", type=int, default=5, metavar="D", help="fan size for the table1 Tfan row (default 5)")
    p.add_argument("--rootless", action="store_true", help="require a rootless description (with back_ray)")
    return p


def _config(args) -> Config:
    for name in ("n_band", "n_radius", "n_repro", "depth"):
        if getattr(args, name) < 1:
            raise SpecParseError(f"--{name.replace('_', '-')} must be >= 1")
    if not 0 < args.tol <= 1e-3:
        raise SpecParseError("--tol must lie in (0, 1e-3]")
    return Config(n_band=args.n_band, n_radius=args.n_radius, n_repro=args.n_repro, depth=args.depth, tol=args.tol)


def _load(args) -> LoadedSpec:
    if args.spec:
        spec = load_spec(args.spec)
    elif args.builtin:
        spec = load_spec_dict({"builtin": args.builtin})
    else:
        raise SpecParseError("need --spec FILE or --builtin NAME")
    if args.rootless and spec.rootless is None:
        raise SpecParseError("--rootless given but the description has no 'back_ray'")
    return spec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "table1":
            report = table1(cfg, args.fan)
        else:
            spec = _load(args)
            handler = {"tree": tree_report, "model": model_report, "spectra": spectra_report, "verify": verify_report}
            report = handler[args.command](spec, cfg)
            report["schema_version"] = SCHEMA_VERSION
    except (SpecParseError, UnknownBuiltin) as err:
        print(f"shifttree: error: {err}", file=sys.stderr)
        return 2
    except NotLeftInvertible as err:
        if args.command == "verify":
            report = {"passed": False, "checks": [{"name": "left_invertible", "identity": "inf_u |S e_u| > 0", "passed": False, "detail": str(err)}]}
            sys.stdout.write(render(report, args.format))
        print(f"shifttree: NotLeftInvertible: {err}", file=sys.stderr)
        return 1
    except ShiftTreeError as err:
        print(f"shifttree: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(render(report, args.format))
    if args.command == "verify" and not report["passed"]:
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
