"""Headless driver: validate, apply move scripts, compute barcodes, simplify,
export fields and SVG renderings, replay histories, serve HTTP."""

from __future__ import annotations

import argparse
import json
import sys

from . import fieldsynth, history, model, persistence, validator
from .errors import MorseflowError, ParseError


def _read_document(path: str) -> history.Document:
    with open(path, "rb") as fh:
        return history.load(fh.read())


def _write_document(doc: history.Document, path: str, include_history=False):
    data = history.save(doc, include_history=include_history)
    with open(path, "wb") as fh:
        fh.write(data)


def _json_out(payload):
    sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def cmd_init(args):
    skel = model.new_minimal() if args.minimal else model.new_default()
    _write_document(history.Document(skel), args.output)
    return 0


def cmd_validate(args):
    doc = _read_document(args.file)
    report = validator.validate(doc.skeleton)
    if args.json:
        _json_out(report.to_json())
    else:
        if report.animatable:
            print("valid: animation allowed")
        for d in report.diagnostics:
            print(f"{d.code}: {d.message} [{', '.join(d.entities)}]")
    return 0 if report.animatable else 2


def cmd_apply(args):
    doc = _read_document(args.file)
    with open(args.script, "r", encoding="utf-8") as fh:
        script = json.load(fh)
    if not isinstance(script, list):
        raise ParseError("a move script is a JSON array of commands")
    for command in script:
        doc.execute(command)
    _write_document(doc, args.output, include_history=args.with_history)
    return 0


def cmd_barcode(args):
    doc = _read_document(args.file)
    barcode = persistence.compute_barcode(doc.skeleton)
    if args.json:
        _json_out(barcode.to_json())
    else:
        for b in barcode.bars:
            print(f"dim={b.dim} [{b.birth:g}, {b.death:g}] "
                  f"{b.birth_sing} -> {b.death_sing} (persistence {b.persistence:g})")
    return 0


def cmd_candidates(args):
    doc = _read_document(args.file)
    barcode = persistence.compute_barcode(doc.skeleton)
    pairs = persistence.eligible_pairs(doc.skeleton, barcode)
    _json_out({"pairs": [{"extremum": a, "saddle": b} for a, b in pairs]})
    return 0


def cmd_simplify(args):
    doc = _read_document(args.file)
    skel = doc.skeleton
    if args.all:
        while True:
            barcode = persistence.compute_barcode(skel)
            pairs = persistence.eligible_pairs(skel, barcode)
            if not pairs:
                break
            skel, _ = persistence.simplify(skel, pairs[0])
    else:
        if not args.pair:
            raise ParseError("simplify needs --pair A,B or --all")
        a, b = args.pair.split(",")
        skel, _ = persistence.simplify(skel, (a.strip(), b.strip()))
    _write_document(history.Document(skel), args.output)
    return 0


def cmd_field(args):
    doc = _read_document(args.file)
    params = fieldsynth.FieldParams(mesh_resolution=args.resolution, d=args.d,
                                    k=args.k)
    mesh = fieldsynth.synthesize(doc.skeleton, params)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("x,y,vx,vy\n")
        for (x, y), (vx, vy) in zip(mesh.vertices, mesh.vectors):
            fh.write(f"{float(x)!r},{float(y)!r},{float(vx)!r},{float(vy)!r}\n")
    if args.mesh_json:
        with open(args.mesh_json, "w", encoding="utf-8") as fh:
            json.dump(mesh.to_json(), fh, sort_keys=True, separators=(",", ":"))
    return 0


def cmd_render(args):
    doc = _read_document(args.file)
    with open(args.svg, "w", encoding="utf-8") as fh:
        fh.write(render_svg(doc.skeleton))
    return 0


def cmd_replay(args):
    with open(args.history, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if isinstance(payload, dict) and "history" in payload:
        payload = payload["history"]
    doc = history.replay(payload)
    _write_document(doc, args.output)
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(session_ttl=args.session_ttl), host=args.host,
                port=args.port, log_level="warning")
    return 0


GLYPH_FILL = {"source": "#d62728", "sink": "#1f77b4", "saddle": "#2ca02c"}


def render_svg(skel, size: int = 640, samples: int = 48) -> str:
    """Skeleton rendering: dashed saddle-source curves, solid saddle-sink
    curves, colored glyph circles, the boundary circle in blue."""
    def sx(x):
        return (x + 1.1) / 2.2 * size

    def sy(y):
        return (1.1 - y) / 2.2 * size

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<circle cx="{sx(0)}" cy="{sy(0)}" r="{size / 2.2}" fill="none" '
        f'stroke="#1f77b4" stroke-width="3"/>',
    ]
    for eid in sorted(skel.separatrices, key=model._id_key):
        sep = skel.separatrices[eid]
        pts = skel.sample_separatrix(sep, samples)
        d = "M " + " L ".join(f"{sx(x):.2f} {sy(y):.2f}" for x, y in pts)
        dash = ' stroke-dasharray="7 5"' if sep.cls is model.SepClass.DASHED else ""
        parts.append(f'<path d="{d}" fill="none" stroke="#333" stroke-width="1.6"{dash}/>')
        for p in sep.control_points:
            parts.append(f'<circle cx="{sx(p[0]):.2f}" cy="{sy(p[1]):.2f}" r="3" '
                         f'fill="#ffd700" stroke="#333"/>')
    for sid in sorted(skel.singularities, key=model._id_key):
        s = skel.singularities[sid]
        if s.position is None:
            continue
        r = max(4.0, s.glyph_radius / 2.2 * size)
        fill = GLYPH_FILL[s.kind.value]
        parts.append(f'<circle cx="{sx(s.position[0]):.2f}" cy="{sy(s.position[1]):.2f}" '
                     f'r="{r:.2f}" fill="{fill}" fill-opacity="0.85" stroke="#222"/>')
        parts.append(f'<text x="{sx(s.position[0]):.2f}" y="{sy(s.position[1]) - r - 3:.2f}" '
                     f'font-size="11" text-anchor="middle">{sid}={s.value:g}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="morseflow",
                                description="Morse vector field design toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("init", help="write a fresh document")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--minimal", action="store_true")
    g.add_argument("--default", action="store_true")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_init)

    sp = sub.add_parser("validate", help="run the configuration debugger")
    sp.add_argument("file")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("apply", help="apply a JSON command script")
    sp.add_argument("file")
    sp.add_argument("--script", required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--with-history", action="store_true")
    sp.set_defaults(func=cmd_apply)

    sp = sub.add_parser("barcode", help="print the persistence barcode")
    sp.add_argument("file")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_barcode)

    sp = sub.add_parser("candidates", help="list eligible simplification pairs")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_candidates)

    sp = sub.add_parser("simplify", help="cancel persistence pairs")
    sp.add_argument("file")
    sp.add_argument("--pair", help="extremumId,saddleId")
    sp.add_argument("--all", action="store_true",
                    help="repeat minimum-persistence cancellation to the end")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_simplify)

    sp = sub.add_parser("field", help="synthesize the vector field, export CSV")
    sp.add_argument("file")
    sp.add_argument("--resolution", type=int, default=128)
    sp.add_argument("--d", type=float, default=8.0)
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--mesh-json")
    sp.set_defaults(func=cmd_field)

    sp = sub.add_parser("render", help="export an SVG rendering")
    sp.add_argument("file")
    sp.add_argument("--svg", required=True)
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("replay", help="rebuild a document from a history log")
    sp.add_argument("history")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_replay)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8765)
    sp.add_argument("--session-ttl", type=float, default=3600.0)
    sp.set_defaults(func=cmd_serve)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MorseflowError as exc:
        sys.stderr.write(json.dumps(exc.to_json(), sort_keys=True) + "\n")
        return 1
    except FileNotFoundError as exc:
        sys.stderr.write(json.dumps({"code": "FileNotFound", "message": str(exc)}) + "\n")
        return 1
    except json.JSONDecodeError as exc:
        sys.stderr.write(json.dumps({"code": "ParseError", "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
