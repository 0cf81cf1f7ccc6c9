"""Command-line interface.

Every subcommand reads and/or writes TilingDocument JSON. Exit status is
0 on success, 1 when a verification or extraction falls short, and 2 on
usage errors or malformed documents.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from . import __version__
from .amalgamation import amalgamate, color_red
from .analysis import complexity_experiment, convergence_experiment, render_svg
from .codec import AnchoredTiling, extract_adaptive, extract_code, reconstruct
from .distortion import PRESETS, InvalidFieldError, apply, make_field
from .generator import build_supertile, random_code, to_combinatorial
from .io import DocumentError, dump, load
from .pipeline import roundtrip_experiment, permute_ids

log = logging.getLogger("ammann")

DEFAULT_CONFIG = {
    "fields": PRESETS,
    "convergence": {"field": "sine-042", "kmax": 3, "radius": 30.0, "delta": 0.05},
    "complexity": {"field": "sine-042", "radii": [10, 20, 40, 80], "delta": 0.05},
    "roundtrip": {"code": "11121111", "k": 8, "field": "mixed", "delta": 0.05},
}


class UsageError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))
    if path:
        try:
            user = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as err:
            raise UsageError(f"cannot read config {path}: {err}") from None
        for key, val in user.items():
            if isinstance(val, dict) and isinstance(cfg.get(key), dict):
                cfg[key].update(val)
            else:
                cfg[key] = val
    return cfg


def _field_spec(text: str, cfg: dict):
    if text in cfg["fields"]:
        return cfg["fields"][text]
    if text.startswith("@"):
        text = Path(text[1:]).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"field {text!r} is neither a preset ({', '.join(sorted(cfg['fields']))}) "
                         "nor a JSON spec") from None


def _write(T, path, ann):
    if path in (None, "-"):
        from .io import to_document
        json.dump(to_document(T, ann), sys.stdout, separators=(",", ":"), sort_keys=True)
        sys.stdout.write("\n")
    else:
        dump(T, path, ann)


def _rng(args) -> random.Random:
    return random.Random(args.seed)


def cmd_generate(args, cfg) -> int:
    code = args.code
    if args.plain:
        from .generator import build_theta_patch
        p = build_theta_patch(code[: args.k])
        T = to_combinatorial(p)
        anchor = next(i for i, t in enumerate(p.tiles) if t.address == p.anchor)
        _write(T, args.output, {"anchor": anchor, "generated_from": code[: args.k]})
        return 0
    if len(code) < args.k:
        raise UsageError(f"--k {args.k} exceeds the code length {len(code)}")
    theta = code + random_code(args.pad, _rng(args))
    ext, patch, T = extract_adaptive(theta, args.k, growth=1.4)
    if not ext.complete:
        log.error("could not grow a patch supporting %d symbols (got %s)", args.k, ext)
        return 1
    anchor = next(i for i, t in enumerate(patch.tiles) if t.address == patch.anchor)
    _write(T, args.output, {"anchor": anchor, "generated_from": theta,
                            "radius": patch.meta["radius"], "center": list(patch.meta["center"])})
    return 0


def cmd_supertile(args, cfg) -> int:
    T = to_combinatorial(build_supertile(args.n))
    ann = {"level": args.n}
    if args.red:
        ann["red"] = [list(e) for e in sorted(color_red(T, "leaf", boundary_convention=True).edges)]
    _write(T, args.output, ann)
    return 0


def cmd_distort(args, cfg) -> int:
    T, ann = load(args.input)
    try:
        f = make_field(_field_spec(args.field, cfg))
    except (InvalidFieldError, KeyError, TypeError) as err:
        raise UsageError(f"bad field: {err}") from None
    D = apply(f, T, args.delta).tiling
    if args.permute:
        D, _, fmap = permute_ids(D, _rng(args))
        if "anchor" in ann:
            ann["anchor"] = fmap[ann["anchor"]]
    ann.update({"field": f.spec(), "C": f.C, "delta": args.delta})
    _write(D, args.output, ann)
    return 0


def cmd_amalgamate(args, cfg) -> int:
    T, ann = load(args.input)
    center = tuple(float(c) for c in args.center.split(",")) if args.center else (0.0, 0.0)
    results = amalgamate(T, iterations=args.iterations, C=args.C, R=args.R, center=center)
    out = results[-1].tiling if results else T
    ann["merges"] = [[list(p) for p in r.merges] for r in results]
    ann["certified"] = [len(r.certified) for r in results]
    if ann.get("anchor") is not None and ann["anchor"] not in out.faces:
        ann.pop("anchor")
    for r in results:
        print(f"processed={r.processed} certified={len(r.certified)} merges={len(r.merges)}")
    _write(out, args.output, ann)
    return 0


def cmd_extract(args, cfg) -> int:
    T, ann = load(args.input)
    anchor = args.anchor if args.anchor is not None else ann.get("anchor")
    if anchor is None:
        raise UsageError("document has no anchor annotation; pass --anchor")
    if anchor not in T.faces:
        raise DocumentError(f"annotations.anchor: face {anchor} not in document")
    ext = extract_code(AnchoredTiling(T, anchor), args.k)
    print(str(ext))
    return 0 if ext.complete else 1


def cmd_reconstruct(args, cfg) -> int:
    p = reconstruct(args.code)
    T = to_combinatorial(p)
    anchor = next(i for i, t in enumerate(p.tiles) if t.address == p.anchor)
    _write(T, args.output, {"anchor": anchor, "generated_from": args.code})
    return 0


def cmd_verify(args, cfg) -> int:
    if args.what == "convergence":
        c = cfg["convergence"]
        rep = convergence_experiment(field_spec=_field_spec(c["field"], cfg), kmax=c["kmax"],
                                     radius=c["radius"], delta=c["delta"], seed=args.seed)
        for line in rep.lines():
            print(line)
        ok = rep.passed and rep.decreasing
        print(("PASS" if rep.decreasing else "FAIL") + " d_k strictly decreasing")
        return 0 if ok else 1
    if args.what == "complexity":
        c = cfg["complexity"]
        rep = complexity_experiment(c["radii"], _field_spec(c["field"], cfg), delta=c["delta"],
                                    seed=args.seed)
        for R, n, t in zip(rep.radii, rep.counts, rep.seconds):
            print(f"R={R} tiles={n} seconds={t:.3f}")
        print(f"{'PASS' if rep.passed else 'FAIL'} exponent vs R_hat+C = {rep.exponent_hat:.3f} "
              f"(raw R {rep.exponent_raw:.3f}, runtime {rep.exponent_time:.3f})")
        return 0 if rep.passed else 1
    c = cfg["roundtrip"]
    rep = roundtrip_experiment(c["code"], c["k"], _field_spec(c["field"], cfg), c["delta"],
                               seed=args.seed)
    print(f"{'PASS' if rep['passed'] else 'FAIL'} extracted={rep['extracted']} "
          f"checked={rep['checked']} mismatched={len(rep['mismatched'])}")
    return 0 if rep["passed"] else 1


def cmd_render(args, cfg) -> int:
    T, ann = load(args.input)
    red = None
    if args.red:
        red = [tuple(e) for e in ann["red"]] if "red" in ann else color_red(T).edges
    arrows = None
    if args.arrows and ann.get("merges"):
        arrows = [tuple(p) for p in ann["merges"][-1]]
    svg = render_svg(T, red=red, arrows=arrows)
    if args.output in (None, "-"):
        sys.stdout.write(svg)
    else:
        Path(args.output).write_text(svg, encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ammann", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    ap.add_argument("--config", help="JSON file overriding field presets and experiment settings")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="patch of a theta tiling")
    g.add_argument("--code", required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--plain", action="store_true",
                   help="write exactly T(code, k) instead of a patch that supports reading k symbols")
    g.add_argument("--pad", type=int, default=40, help="random symbols appended past the code")
    g.add_argument("-o", "--output")

    s = sub.add_parser("supertile", help="level-n supertile")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--red", action="store_true", help="annotate the red edges")
    s.add_argument("-o", "--output")

    d = sub.add_parser("distort", help="apply a bounded distortion")
    d.add_argument("-i", "--input", required=True)
    d.add_argument("--field", required=True, help="preset name, JSON spec, or @file")
    d.add_argument("--delta", type=float, default=0.05)
    d.add_argument("--permute", action="store_true", help="shuffle vertex and face ids")
    d.add_argument("-o", "--output")

    a = sub.add_parser("amalgamate", help="merge certified sibling pairs into supertiles")
    a.add_argument("-i", "--input", required=True)
    a.add_argument("--C", type=float, default=0.0)
    a.add_argument("--R", type=float, default=None)
    a.add_argument("--center", help="x,y of the disc centre")
    a.add_argument("--iterations", type=int, default=1)
    a.add_argument("-o", "--output")

    e = sub.add_parser("extract-code", help="read the anchor code")
    e.add_argument("-i", "--input", required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--anchor", type=int)

    r = sub.add_parser("reconstruct", help="build T(code, len(code))")
    r.add_argument("--code", required=True)
    r.add_argument("-o", "--output")

    v = sub.add_parser("verify", help="run a packaged experiment")
    v.add_argument("what", choices=["convergence", "complexity", "roundtrip"])

    rd = sub.add_parser("render", help="SVG drawing of a document")
    rd.add_argument("-i", "--input", required=True)
    rd.add_argument("--red", action="store_true")
    rd.add_argument("--arrows", action="store_true")
    rd.add_argument("-o", "--output")
    return ap


_COMMANDS = {
    "generate": cmd_generate, "supertile": cmd_supertile, "distort": cmd_distort,
    "amalgamate": cmd_amalgamate, "extract-code": cmd_extract, "reconstruct": cmd_reconstruct,
    "verify": cmd_verify, "render": cmd_render,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)  # exits 2 on usage errors
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _load_config(args.config)
        return _COMMANDS[args.command](args, cfg)
    except DocumentError as err:
        print(f"error: malformed document: {err}", file=sys.stderr)
        return 2
    except (UsageError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
