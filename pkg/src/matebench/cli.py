"""Command-line interface.

Verbs: render, analyze, portrait, trace, tableau, verify-mating, serve.
All flags long-form; an optional config file supplies key=value defaults
(lenient parsing: unknown keys ignored, '#' comments allowed).

Exit codes: 0 ok, 2 validation error, 3 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys

from .angles import parse_angle
from . import render as rnd
from . import service as svc

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3


def load_config(path):
    cfg = {}
    if not path:
        return cfg
    try:
        with open(path) as f:
            for line in f:
                line = line.split("#", 1)[0].strip()
                if not line or "=" not in line:
                    continue
                k, v = line.split("=", 1)
                cfg[k.strip()] = v.strip()
    except OSError as e:
        print(f"config: {e}", file=sys.stderr)
    return cfg


def _complex(s: str) -> complex:
    return svc.parse_complex(s)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="matebench")
    ap.add_argument("--config", default=None, help="key=value config file")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("render", help="render a plane to PNG/PPM with sidecar")
    p.add_argument("--plane", default="parameter", choices=["parameter", "dynamical"])
    p.add_argument("--a", default="2,0", help="parameter for the dynamical plane")
    p.add_argument("--center", default=None)
    p.add_argument("--half-width", type=float, default=None)
    p.add_argument("--resolution", type=int, default=512)
    p.add_argument("--coloring", default="capture-generation")
    p.add_argument("--max-iter", type=int, default=120)
    p.add_argument("--overlay", action="append", default=[],
                   help="JSON overlay spec, may repeat")
    p.add_argument("--out", default="render.png")
    p.add_argument("--format", default="png", choices=["png", "ppm"])

    p = sub.add_parser("analyze", help="analyze a parameter value")
    p.add_argument("--a", required=True)

    p = sub.add_parser("portrait", help="validate an orbit portrait")
    p.add_argument("--angles", required=True,
                   help="semicolon-separated angle sets, e.g. '1/7,2/7,4/7'")

    p = sub.add_parser("trace", help="trace a bubble or internal ray")
    p.add_argument("--a", required=True)
    p.add_argument("--theta", required=True)
    p.add_argument("--kind", default="bubble", choices=["bubble", "internal"])
    p.add_argument("--depth", type=int, default=60)

    p = sub.add_parser("tableau", help="build and validate a critical tableau")
    p.add_argument("--theta-c", default=None, help="external angle mode")
    p.add_argument("--c", default=None, help="real parameter (orbit mode)")
    p.add_argument("--depth", type=int, default=16)
    p.add_argument("--columns", type=int, default=24)

    p = sub.add_parser("verify-mating", help="locate and verify a mating")
    p.add_argument("--c", required=True, help="quadratic parameter re,im")
    p.add_argument("--theta-c", required=True)
    p.add_argument("--depth", type=int, default=110)
    p.add_argument("--angles", type=int, default=60)
    p.add_argument("--delta-depths", type=int, default=6)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)

    args = ap.parse_args(argv)
    cfg = load_config(args.config)

    try:
        if args.verb == "render":
            center = args.center or cfg.get("center")
            hw = args.half_width or float(cfg.get("half_width", 0) or 0)
            if args.plane == "parameter":
                default_c, default_hw = rnd.PLANE_ANCHOR["parameter"]
            else:
                default_c, default_hw = rnd.PLANE_ANCHOR["dynamical"]
            spec = rnd.RenderSpec(
                plane=args.plane,
                a=_complex(args.a),
                center=_complex(center) if center else default_c,
                half_width=hw if hw else default_hw,
                resolution=args.resolution,
                coloring=args.coloring,
                max_iter=args.max_iter,
                overlays=[json.loads(s) for s in args.overlay],
            )
            path, side = rnd.render_to_files(spec, args.out, args.format)
            print(json.dumps({"image": path, "sidecar": side}))
        elif args.verb == "analyze":
            print(json.dumps(svc.analyze_point(_complex(args.a)), indent=1))
        elif args.verb == "portrait":
            out = svc.portrait_endpoint(args.angles)
            print(json.dumps(out, indent=1))
            if not out["valid"]:
                return EXIT_VALIDATION
        elif args.verb == "trace":
            print(json.dumps(
                svc.trace_endpoint(_complex(args.a), args.theta, args.kind,
                                   args.depth)))
        elif args.verb == "tableau":
            from . import puzzle as puz
            from . import parameter as par

            if args.theta_c:
                th = parse_angle(args.theta_c)
                w = par.wake_for_target(th)
                t = puz.build_tableau_angles(th, w.portrait_angles,
                                             args.depth, args.columns)
            elif args.c:
                t = puz.build_tableau_orbit(float(args.c), args.depth, args.columns)
            else:
                print("need --theta-c or --c", file=sys.stderr)
                return EXIT_VALIDATION
            out = t.to_json()
            out["violations"] = [v.to_json() for v in puz.validate_tableau_rules(t)]
            print(json.dumps(out, indent=1))
        elif args.verb == "verify-mating":
            from . import mating as mat

            rep = mat.verify_mating(
                _complex(args.c),
                parse_angle(args.theta_c),
                depth=args.depth,
                n_angles=args.angles,
                delta_depths=args.delta_depths,
            )
            print(json.dumps(rep.to_json(), indent=1))
            if not rep.passed:
                return EXIT_BUDGET
        elif args.verb == "serve":
            httpd = svc.serve(args.host, args.port)
            print(f"serving on http://{args.host}:{args.port}")
            try:
                httpd.serve_forever()
            except KeyboardInterrupt:
                pass
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except RuntimeError as e:
        print(f"budget/runtime: {e}", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
