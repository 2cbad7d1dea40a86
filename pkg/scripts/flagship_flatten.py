"""Flatten a session's module and print the chart tree.

    python3 scripts/flagship_flatten.py [session.phi] [--out cert.json]
"""
import argparse
import json
import pathlib
import time

from phiflat.dsl import parse_session
from phiflat.errors import Unresolved
from phiflat.flatten import FlatteningProblem, flatten, verify_certificate

HERE = pathlib.Path(__file__).parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("session", nargs="?", default=str(HERE / "flagship.phi"))
    ap.add_argument("--module", default="M")
    ap.add_argument("--supports", default="S")
    ap.add_argument("--max-rounds", type=int, default=8)
    ap.add_argument("--out")
    args = ap.parse_args()

    sess = parse_session(pathlib.Path(args.session).read_text())
    sup = sess.get(args.supports, "supports")
    M = sess.get(args.module, "module")
    prob = FlatteningProblem(sup, M, max_rounds=args.max_rounds)

    t0 = time.perf_counter()
    try:
        cert = flatten(prob)
    except Unresolved as e:
        cert = e.certificate
    dt = time.perf_counter() - t0

    print(f"verdict {cert.verdict} after {cert.rounds} round(s) in {dt:.3f}s")
    for node in cert.nodes:
        depth = "  " * len(node.path)
        center = "" if node.center is None else f" center ({', '.join(map(str, node.center.gens))})"
        print(f"{depth}{list(node.path)} {node.status} on QQ[{', '.join(node.ring.base.names)}]{center}")
    print("verify:", verify_certificate(cert, prob).valid)
    if args.out:
        pathlib.Path(args.out).write_text(json.dumps(cert.to_dict(), sort_keys=True, indent=2) + "\n")


if __name__ == "__main__":
    main()
