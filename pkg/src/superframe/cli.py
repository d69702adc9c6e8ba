"""Command-line front end: admissibility checks, coset/duality dumps,
verification suites, frame sums and Gram matrices as reproducible batch
runs.

Every report is JSON (schema ``superframe-report/1``), embeds the full
run configuration and a content fingerprint of the matrices and function
literals, and is byte-identical across repeated runs with the same
configuration.  `pretty` output is rendered from the JSON, and CSV is
available for Gram matrix dumps.

Exit codes: 0 pass, 1 input error, 2 unsupported dimension or size limit,
3 not admissible, 4 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys

from . import frames
from .errors import (
    EmptyTestSet,
    InvalidGeometry,
    NotAdmissible,
    NotExpansive,
    ShapeMismatch,
    SingularMatrix,
    SuperframeError,
    SystemTooLarge,
    UnsupportedDimension,
)
from .frames import (
    BASE,
    OVERSAMPLED,
    SUPER,
    SystemKind,
    TruncationSpec,
    WaveletFamily,
)
from .funcspace import parse_function
from .intlin import IntMatrix
from .quotient import CosetSystem
from .superspace import embed_s

SCHEMA = "superframe-report/1"

EXIT_PASS = 0
EXIT_INPUT = 1
EXIT_UNSUPPORTED = 2
EXIT_NOT_ADMISSIBLE = 3
EXIT_VERIFICATION = 4

SUITES = (
    "operators",
    "lemma2",
    "lemma3",
    "eqeg",
    "projection",
    "theorem1-onb",
    "corollary",
)


def worker_count() -> int:
    """Worker count from SUPERFRAME_THREADS (default: available parallelism).

    Output never depends on this value; it only bounds internal fan-out.
    """
    raw = os.environ.get("SUPERFRAME_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"SUPERFRAME_THREADS must be an integer, got {raw!r}")
    return os.cpu_count() or 1


def _fingerprint(*parts: str) -> str:
    return hashlib.sha256("\x1f".join(parts).encode()).hexdigest()[:16]


def _config_dict(args: argparse.Namespace) -> dict:
    keys = (
        "M",
        "P",
        "wavelet",
        "f",
        "g",
        "suite",
        "system",
        "jmin",
        "jmax",
        "kmax",
        "tol",
        "seed",
        "format",
        "out",
        "r",
        "limit",
    )
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def _render_pretty(obj, indent: int = 0, out_lines=None) -> list[str]:
    """Human-readable rendering derived from the JSON structure."""
    if out_lines is None:
        out_lines = []
    pad = "  " * indent
    if isinstance(obj, dict):
        for key, value in obj.items():
            if isinstance(value, (dict, list)) and value:
                out_lines.append(f"{pad}{key}:")
                _render_pretty(value, indent + 1, out_lines)
            else:
                out_lines.append(f"{pad}{key}: {json.dumps(value)}")
    elif isinstance(obj, list):
        for value in obj:
            if isinstance(value, (dict, list)):
                _render_pretty(value, indent + 1, out_lines)
            else:
                out_lines.append(f"{pad}- {json.dumps(value)}")
    else:
        out_lines.append(f"{pad}{json.dumps(obj)}")
    return out_lines


def _emit(report: dict, args: argparse.Namespace, csv_text: str | None = None) -> None:
    fmt = getattr(args, "format", "json")
    if fmt == "pretty":
        text = "\n".join(_render_pretty(report)) + "\n"
    elif fmt == "csv":
        if csv_text is None:
            raise ValueError("CSV output is only available for Gram matrix dumps")
        text = csv_text
    else:
        text = json.dumps(report, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_matrix(text: str, name: str) -> IntMatrix:
    try:
        return IntMatrix.parse(text)
    except (ValueError, TypeError) as exc:
        raise InvalidGeometry(f"cannot parse matrix {name}={text!r}: {exc}")


def _build_system(args: argparse.Namespace) -> CosetSystem:
    m = _parse_matrix(args.M, "M")
    default_p = IntMatrix.identity(m.dim).text()
    p = _parse_matrix(args.P if args.P is not None else default_p, "P")
    return CosetSystem.build(m, p)


def _family(args: argparse.Namespace) -> WaveletFamily:
    literals = args.wavelet or ["haar"]
    return WaveletFamily([parse_function(t) for t in literals])


def _report_skeleton(command: str, args: argparse.Namespace) -> dict:
    cfg = _config_dict(args)
    fp = _fingerprint(
        str(cfg.get("M")),
        str(cfg.get("P")),
        json.dumps(cfg.get("wavelet")),
        json.dumps(cfg.get("f")),
        json.dumps(cfg.get("g")),
    )
    return {"schema": SCHEMA, "command": command, "config": cfg, "fingerprint": fp}


def cmd_admissible(args: argparse.Namespace) -> int:
    report = _report_skeleton("admissible", args)
    m = _parse_matrix(args.M, "M")
    default_p = IntMatrix.identity(m.dim).text()
    p = _parse_matrix(args.P if args.P is not None else default_p, "P")
    from .quotient import check_admissible

    verdict = check_admissible(m, p)
    report["result"] = verdict.to_json_dict()
    _emit(report, args)
    return EXIT_PASS if verdict.admissible else EXIT_NOT_ADMISSIBLE


def cmd_cosets(args: argparse.Namespace) -> int:
    report = _report_skeleton("cosets", args)
    cs = _build_system(args)
    report["result"] = cs.to_json_dict()
    _emit(report, args)
    return EXIT_PASS


def _suite_truncation(args: argparse.Namespace, dim: int, wide: bool) -> TruncationSpec:
    """Default grids per suite and dimension (flags always win).

    Exact polygon arithmetic makes d = 2 grids much more expensive per
    cell, so the fallbacks shrink there; pass --jmax/--kmax to override.
    """
    if wide:
        j_default, k_default = (4, 8) if dim == 1 else (2, 2)
    else:
        j_default, k_default = (3, 8) if dim == 1 else (1, 1)
    jmax = args.jmax if args.jmax is not None else j_default
    kmax = args.kmax if args.kmax is not None else k_default
    return TruncationSpec(-jmax, jmax, kmax)


def cmd_verify(args: argparse.Namespace) -> int:
    report = _report_skeleton("verify", args)
    cs = _build_system(args)
    family = _family(args)
    f = parse_function(args.f)
    g = parse_function(args.g)
    seed = args.seed

    if args.suite == "operators":
        res = frames.verify_operator_identities(
            cs, seed=seed, count=50 if cs.dim == 1 else 8, tol=args.tol or 1e-10
        )
    elif args.suite == "lemma2":
        res = frames.verify_decomposition(cs, seed=seed, tol=args.tol or 1e-10)
    elif args.suite == "lemma3":
        j_default, k_default = (4, 12) if cs.dim == 1 else (2, 2)
        res = frames.verify_factorization(
            cs, f, g,
            j_bound=args.jmax if args.jmax is not None else j_default,
            k_bound=args.kmax if args.kmax is not None else k_default,
            tol=args.tol or 1e-10,
        )
    elif args.suite == "eqeg":
        trunc = _suite_truncation(args, cs.dim, wide=True)
        worst = None
        for r in range(cs.p):
            res_r = frames.verify_split_frame_sum(
                cs, family, r, f, trunc, tol=args.tol or 1e-10
            )
            if worst is None or res_r.max_residual > worst.max_residual or not res_r.passed:
                worst = res_r
        res = worst
    elif args.suite == "projection":
        res = frames.verify_projection(
            cs, family, _suite_truncation(args, cs.dim, wide=False),
            tol=args.tol or 1e-12,
        )
    elif args.suite == "theorem1-onb":
        res = frames.verify_onb_transfer(
            cs, family, _suite_truncation(args, cs.dim, wide=False), seed=seed
        )
    elif args.suite == "corollary":
        res = frames.verify_corollary(
            cs, family, _suite_truncation(args, cs.dim, wide=False),
            tol=args.tol or 1e-10,
        )
    else:
        raise ValueError(f"unknown suite {args.suite!r}")

    report["result"] = res.to_json_dict()
    _emit(report, args)
    return EXIT_PASS if res.passed else EXIT_VERIFICATION


def cmd_framesum(args: argparse.Namespace) -> int:
    report = _report_skeleton("framesum", args)
    cs = _build_system(args)
    family = _family(args)
    kind = _system_kind(args.system)
    trunc = TruncationSpec(
        args.jmin if args.jmin is not None else -4,
        args.jmax if args.jmax is not None else 4,
        args.kmax,
    )
    f = parse_function(args.f)
    x = embed_s(f, cs) if kind.is_super else f
    fr = frames.frame_report([x], kind, trunc, cs, family)
    report["result"] = fr.to_json_dict()
    report["result"]["value"] = fr.sums[0]
    _emit(report, args)
    return EXIT_PASS


def cmd_gram(args: argparse.Namespace) -> int:
    report = _report_skeleton("gram", args)
    cs = _build_system(args)
    family = _family(args)
    kind = _system_kind(args.system)
    trunc = TruncationSpec(
        args.jmin if args.jmin is not None else -3,
        args.jmax if args.jmax is not None else 3,
        args.kmax if args.kmax is not None else 8,
    )
    matrix, stats = frames.gram_matrix(
        kind, trunc, cs, family, limit=args.limit, workers=worker_count()
    )
    report["result"] = {
        "kind": kind.label(),
        "truncation": trunc.to_json_dict(),
        "stats": stats.to_json_dict(),
    }
    csv_text = None
    if args.format == "csv":
        buf = io.StringIO()
        for row in matrix:
            buf.write(",".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
            buf.write("\n")
        csv_text = buf.getvalue()
    _emit(report, args, csv_text=csv_text)
    return EXIT_PASS


def _system_kind(name: str) -> SystemKind:
    table = {"base": BASE, "oversampled": OVERSAMPLED, "super": SUPER}
    if name not in table:
        raise ValueError(f"unknown system {name!r} (choose base, oversampled, super)")
    return table[name]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--M", default="2", help="dilation matrix, rows ';', entries ','")
    parser.add_argument("--P", default=None, help="oversampling matrix (default: identity)")
    parser.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    parser.add_argument("--out", default=None, help="write the report to this path")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", type=float, default=None, help="tolerance override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superframe",
        description="Construct and numerically verify oversampled affine frames "
        "and their direct-sum liftings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_adm = sub.add_parser("admissible", help="decide admissibility of (M, P)")
    _add_common(p_adm)
    p_adm.set_defaults(func=cmd_admissible)

    p_cos = sub.add_parser("cosets", help="dump representatives, permutations and the Fourier matrix")
    _add_common(p_cos)
    p_cos.set_defaults(func=cmd_cosets)

    p_ver = sub.add_parser("verify", help="run a named verification suite")
    _add_common(p_ver)
    p_ver.add_argument("--suite", choices=SUITES, required=True)
    p_ver.add_argument("--wavelet", action="append", help="wavelet literal (repeatable)")
    p_ver.add_argument("--f", default="haar", help="test function literal")
    p_ver.add_argument("--g", default="chi:0,1", help="second test function literal")
    p_ver.add_argument("--jmax", type=int, default=None)
    p_ver.add_argument("--kmax", type=int, default=None)
    p_ver.set_defaults(func=cmd_verify)

    p_sum = sub.add_parser("framesum", help="truncated frame sum for a test function")
    _add_common(p_sum)
    p_sum.add_argument("--system", default="base", help="base | oversampled | super")
    p_sum.add_argument("--wavelet", action="append")
    p_sum.add_argument("--f", default="chi:0,1")
    p_sum.add_argument("--jmin", type=int, default=None)
    p_sum.add_argument("--jmax", type=int, default=None)
    p_sum.add_argument(
        "--kmax", type=int, default=None,
        help="translation bound; omit for the exact per-scale window",
    )
    p_sum.set_defaults(func=cmd_framesum)

    p_gram = sub.add_parser("gram", help="truncated Gram matrix and identity stats")
    _add_common(p_gram)
    p_gram.add_argument("--system", default="base")
    p_gram.add_argument("--wavelet", action="append")
    p_gram.add_argument("--jmin", type=int, default=None)
    p_gram.add_argument("--jmax", type=int, default=None)
    p_gram.add_argument("--kmax", type=int, default=None)
    p_gram.add_argument("--limit", type=int, default=frames.DEFAULT_SYSTEM_LIMIT)
    p_gram.set_defaults(func=cmd_gram)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; the contract reserves 2 for limits.
        return EXIT_INPUT if exc.code else EXIT_PASS
    if getattr(args, "tol", None) is not None and args.tol <= 0:
        print("error: tolerance must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (UnsupportedDimension, SystemTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except NotAdmissible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    except (
        SingularMatrix,
        NotExpansive,
        InvalidGeometry,
        ShapeMismatch,
        EmptyTestSet,
        SuperframeError,
        ValueError,
    ) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
