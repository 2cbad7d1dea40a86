"""Fitting-ideal flatness tests and flattening by admissible blow-ups.

The driver blows up the support product first, then on every chart either
certifies the strict transform as locally free (Fitt_{r-1} = 0 and
Fitt_r = (1)) or blows up its non-flat locus Fitt_r, which must be
admissible.  The run is recorded as a tree of chart nodes that
``verify_certificate`` replays from the problem data alone.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .blowup import next_stage, rees_chart, strict_transform_module
from .cakernel import FreeSubmodule, Ideal, saturate
from .depth import PresentedModule
from .errors import InputNotFlatOnU, NotADomain, RingMismatch, Unresolved
from .phiring import PhiRing, induced_supports, is_admissible

DEFAULT_MAX_ROUNDS = 5


# ---------------------------------------------------------------------------
# Fitting ideals
# ---------------------------------------------------------------------------

def _det(mat, rows, cols, ring, memo):
    key = (rows, cols)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if len(rows) == 1:
        out = mat[rows[0]][cols[0]]
    else:
        out = ring.base.zero()
        r0, rest = rows[0], rows[1:]
        for k, c in enumerate(cols):
            a = mat[r0][c]
            if a.is_zero():
                continue
            sub = _det(mat, rest, cols[:k] + cols[k + 1:], ring, memo)
            if sub.is_zero():
                continue
            term = a * sub
            out = out - term if k % 2 else out + term
        out = ring.reduce(out)
    memo[key] = out
    return out


def minors(M, k, stop_at_first_nonzero=False):
    """k x k minors of the g x s presentation matrix (rows = generators)."""
    mat = M.matrix()
    g, s = M.ngens, len(M.relations)
    if k <= 0:
        return [M.ring.base.one()]
    if k > min(g, s):
        return []
    memo = {}
    out = []
    for rows in combinations(range(g), k):
        for cols in combinations(range(s), k):
            d = _det(mat, rows, cols, M.ring, memo)
            if not d.is_zero():
                out.append(d)
                if stop_at_first_nonzero:
                    return out
    return out


def fitting_ideal(M, i):
    """Ideal of (g - i)-minors of the presentation matrix."""
    return Ideal(M.ring, minors(M, M.ngens - i))


def generic_rank(M):
    """Smallest i with Fitt_i(M) nonzero; the rank at the generic point."""
    if not M.ring.is_domain:
        raise NotADomain(f"{M.ring} is not declared a domain")
    # over a domain a nonzero k-minor forces nonzero minors of every smaller size
    k = 0
    while k < M.ngens and minors(M, k + 1, stop_at_first_nonzero=True):
        k += 1
    return M.ngens - k


@dataclass(frozen=True)
class FlatVerdict:
    flat: bool
    rank: int
    fitt_prev_zero: bool
    fitt_r_unit: bool
    # Fitt_r: the non-flat locus when not flat
    locus: Ideal = None

    def __bool__(self):
        return self.flat


def is_flat_finite(M):
    """Locally free test: Fitt_{r-1} = 0 and Fitt_r = (1), r the generic rank."""
    r = generic_rank(M)
    prev = fitting_ideal(M, r - 1) if r >= 1 else Ideal(M.ring, [])
    prev_zero = all(M.ring.reduce(g).is_zero() for g in prev.gens)
    fitt = fitting_ideal(M, r)
    unit = fitt.is_unit()
    return FlatVerdict(prev_zero and unit, r, prev_zero, unit, fitt)


# ---------------------------------------------------------------------------
# the flattening driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlatteningProblem:
    base: PhiRing
    module: PresentedModule
    max_rounds: int = DEFAULT_MAX_ROUNDS

    def __post_init__(self):
        if self.module.ring != self.base.base:
            raise RingMismatch("module is not over the base ring of the Phi-ring")

    def canonical(self):
        ring = self.base.base
        return {
            "ring": str(ring),
            "supports": [[str(g) for g in I.gens] for I in self.base.phi0],
            "module": _module_dict(self.module),
        }


def _module_dict(M):
    return {
        "generators": M.ngens,
        "relations": [[str(p) for p in c] for c in M.relations],
    }


@dataclass(eq=False)
class ChartNode:
    path: tuple
    ring: object
    supports: Optional[PhiRing]
    module: PresentedModule
    chart: object = None
    verdict: Optional[FlatVerdict] = None
    status: str = "pending"
    center: Optional[Ideal] = None
    center_exponent: Optional[int] = None
    saturation_exponent: int = 0

    def to_dict(self):
        v = self.verdict
        d = {
            "path": list(self.path),
            "ring": str(self.ring),
            "module": _module_dict(self.module),
            "status": self.status,
            "saturation_exponent": self.saturation_exponent,
            "rank": v.rank if v is not None else None,
            "fitt_prev_zero": v.fitt_prev_zero if v is not None else None,
            "fitt_r_unit": v.fitt_r_unit if v is not None else None,
            "fitting": [str(g) for g in v.locus.groebner().gens] if v is not None else None,
            "center": [str(g) for g in self.center.gens] if self.center is not None else None,
            "center_exponent": self.center_exponent,
        }
        if self.chart is not None:
            c = self.chart
            d["chart_index"] = c.index
            d["images"] = {n: str(p) for n, p in zip(c.parent.base.names, c.structure.images)}
            d["exceptional"] = str(c.exceptional)
        else:
            d["chart_index"] = None
            d["images"] = None
            d["exceptional"] = None
        return d


@dataclass(eq=False)
class FlatteningCertificate:
    problem: FlatteningProblem
    nodes: list = field(default_factory=list)
    verdict: str = "Success"
    rounds: int = 0

    def leaves(self):
        return [n for n in self.nodes if n.status in ("flat", "empty", "pending")]

    def centers(self):
        return [(n.path, n.center, n.center_exponent) for n in self.nodes if n.center is not None]

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "rounds": self.rounds,
            "max_rounds": self.problem.max_rounds,
            "problem": self.problem.canonical(),
            "nodes": [n.to_dict() for n in sorted(self.nodes, key=lambda n: n.path)],
        }


def thread_count():
    raw = os.environ.get("PHIFLAT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(4, os.cpu_count() or 1)
    return n


def _assess(node):
    node.verdict = is_flat_finite(node.module)
    node.status = "flat" if node.verdict.flat else "pending"
    return node


def make_child(parent, i, stage):
    """Chart i of the blow-up of ``parent`` along its center, with the strict transform."""
    chart = rees_chart(parent.ring, parent.center, i, stage)
    path = parent.path + (i,)
    if chart.is_empty():
        zero = PresentedModule(chart.ring, 0, ())
        return ChartNode(path, chart.ring, None, zero, chart, None, "empty")
    supports = induced_supports(chart.structure, parent.supports, degenerate_ok=True)
    st = strict_transform_module(parent.module, chart)
    n = 0
    if not supports.is_degenerate:
        sat, n = saturate(st.submodule, supports.product)
        st = PresentedModule(chart.ring, st.ngens, sat.columns)
    node = ChartNode(path, chart.ring, supports, st.pruned(), chart, saturation_exponent=n)
    return _assess(node)


def _choose_center(node):
    locus = node.verdict.locus
    adm = is_admissible(node.supports, locus)
    if not adm.admissible:
        where = "root" if not node.path else "/".join(map(str, node.path))
        raise InputNotFlatOnU(locus, where, adm.witness)
    node.center = locus.groebner()
    node.center_exponent = adm.exponent


def _expand(node, pool):
    stage = next_stage(node.ring)
    idx = [i for i, g in enumerate(node.center.gens) if not g.is_zero()]
    if pool is None:
        kids = [make_child(node, i, stage) for i in idx]
    else:
        kids = list(pool.map(lambda i: make_child(node, i, stage), idx))
    node.status = "blown-up"
    return kids


def flatten(problem, threads=None):
    """Blow up until every chart's strict transform is locally free."""
    A, M = problem.base, problem.module
    if not A.base.is_domain:
        raise NotADomain(f"{A.base} is not declared a domain")
    root = _assess(ChartNode((), A.base, A, M))
    cert = FlatteningCertificate(problem, [root])
    if root.verdict.flat:
        return cert
    _choose_center(root)
    # the first blow-up is along the support product itself
    root.center = A.product
    root.center_exponent = is_admissible(A, A.product).exponent
    frontier = [root]
    n_threads = thread_count() if threads is None else threads
    pool = ThreadPoolExecutor(n_threads) if n_threads > 1 else None
    try:
        while frontier:
            if cert.rounds >= problem.max_rounds:
                cert.verdict = "Unresolved"
                err = Unresolved(f"charts still not flat after {problem.max_rounds} rounds")
                err.certificate = cert
                raise err
            cert.rounds += 1
            nxt = []
            for node in frontier:
                for kid in _expand(node, pool):
                    cert.nodes.append(kid)
                    if kid.status == "pending":
                        _choose_center(kid)
                        nxt.append(kid)
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    return cert


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerifyResult:
    valid: bool
    divergence: Optional[str] = None

    def __bool__(self):
        return self.valid


def _parse_module(ring, d):
    cols = [tuple(ring.reduce(ring.base.parse(s)) for s in c) for c in d["relations"]]
    return PresentedModule(ring, d["generators"], tuple(cols))


def _same_module(a, b):
    return a.ngens == b.ngens and a.submodule.equals(b.submodule)


def _check_node(rec, node):
    """First mismatch between a recorded node and a recomputed one, or None."""
    where = f"node {rec['path']}"
    if rec["ring"] != str(node.ring):
        return f"{where}: chart ring {rec['ring']} != {node.ring}"
    if node.chart is not None:
        c = node.chart
        imgs = {n: str(p) for n, p in zip(c.parent.base.names, c.structure.images)}
        if rec.get("images") != imgs or rec.get("exceptional") != str(c.exceptional):
            return f"{where}: structure map differs"
    if not _same_module(_parse_module(node.ring, rec["module"]), node.module):
        return f"{where}: strict transform differs"
    if node.status == "empty":
        return None if rec["status"] == "empty" else f"{where}: chart should be empty"
    v = node.verdict
    if (rec["rank"], rec["fitt_prev_zero"], rec["fitt_r_unit"]) != (v.rank, v.fitt_prev_zero, v.fitt_r_unit):
        return f"{where}: Fitting verdict differs"
    fitt = Ideal(node.ring, [node.ring.base.parse(s) for s in rec["fitting"]])
    if not fitt.equals(v.locus):
        return f"{where}: Fitting ideal differs"
    if v.flat != (rec["status"] == "flat"):
        return f"{where}: flatness status differs"
    return None


def verify_certificate(cert, problem):
    """Replay a certificate (object or its dict form) against the problem."""
    d = cert.to_dict() if isinstance(cert, FlatteningCertificate) else cert
    recs = {tuple(r["path"]): r for r in d["nodes"]}
    A = problem.base
    if () not in recs:
        return VerifyResult(False, "no root node")
    root = _assess(ChartNode((), A.base, A, problem.module))
    todo = [(recs[()], root)]
    seen = set()
    any_pending = False
    depth = 0
    while todo:
        rec, node = todo.pop(0)
        seen.add(node.path)
        depth = max(depth, len(node.path))
        msg = _check_node(rec, node)
        if msg:
            return VerifyResult(False, msg)
        status = rec["status"]
        if status in ("flat", "empty"):
            if any(p[:-1] == node.path for p in recs if p):
                return VerifyResult(False, f"node {list(node.path)}: leaf has children")
            continue
        if status not in ("blown-up", "pending"):
            return VerifyResult(False, f"node {list(node.path)}: unknown status {status!r}")
        if rec["center"] is None:
            return VerifyResult(False, f"node {list(node.path)}: missing center")
        center = Ideal(node.ring, [node.ring.base.parse(s) for s in rec["center"]])
        expected = A.product if not node.path else node.verdict.locus
        if not center.equals(expected):
            return VerifyResult(False, f"node {list(node.path)}: center is not the expected ideal")
        N = rec["center_exponent"]
        if N is None:
            return VerifyResult(False, f"node {list(node.path)}: missing admissibility exponent")
        P = node.supports.product
        if not (P ** N).is_subset(center):
            return VerifyResult(False, f"node {list(node.path)}: P^{N} is not inside the center")
        node.center = center
        if status == "pending":
            any_pending = True
            continue
        stage = next_stage(node.ring)
        for i, g in enumerate(center.gens):
            if g.is_zero():
                continue
            path = node.path + (i,)
            if path not in recs:
                return VerifyResult(False, f"node {list(path)}: chart missing")
            todo.append((recs[path], make_child(node, i, stage)))
    if set(recs) != seen:
        return VerifyResult(False, "certificate has unreachable nodes")
    verdict = "Unresolved" if any_pending else "Success"
    if d["verdict"] != verdict:
        return VerifyResult(False, f"verdict should be {verdict}")
    if d["rounds"] != depth:
        return VerifyResult(False, f"round count should be {depth}")
    return VerifyResult(True)
