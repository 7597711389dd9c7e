"""Verification checks run by the command line front end.

A check knows how to enumerate its cases exhaustively, how to draw one case
from a seeded sampler, and how to evaluate a case into a flat result row.
Cases are plain tuples so they can be shipped to worker processes.

Randomness: trial ``i`` of a run with seed ``s`` uses its own
``random.Random(s * 2**32 + i)`` (MT19937) and consumes it only through
``getrandbits``, so reports do not depend on higher level helpers of the
``random`` module or on the number of workers.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, Iterator

from . import designs, distances, geometry, incidences, moments, sidon, sumproduct
from .field import FieldSpec, field_of_order

GENERATOR = "MT19937 via random.Random(seed * 2**32 + trial), getrandbits only"


class UsageError(ValueError):
    pass


class Sampler:
    def __init__(self, seed: int):
        self._rng = random.Random(seed)

    def bits(self, n: int) -> int:
        return self._rng.getrandbits(n) if n > 0 else 0

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("empty range")
        width = (n - 1).bit_length()
        while True:
            x = self.bits(width)
            if x < n:
                return x

    def mask(self, n: int, nonzero: bool = False) -> int:
        """Subset of range(n) as a bitmask: size uniform in 0..n, then a uniform subset of that size."""
        lo = 1 if nonzero else 0
        if n < lo:
            raise ValueError("cannot draw a nonempty subset of an empty universe")
        k = lo + self.below(n + 1 - lo)
        idx = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return sum(1 << i for i in idx[:k])


def trial_sampler(seed: int, trial: int) -> Sampler:
    return Sampler(seed * 2**32 + trial)


def from_mask(universe: list, mask: int) -> list:
    return [u for i, u in enumerate(universe) if mask >> i & 1]


def frac(x: Fraction) -> str:
    return str(x)


@lru_cache(maxsize=None)
def get_field(q: int) -> FieldSpec:
    return field_of_order(q)


@lru_cache(maxsize=None)
def points_of(q: int, d: int) -> list:
    return list(geometry.all_points(get_field(q), d))


@lru_cache(maxsize=None)
def hyperplanes_of(q: int, d: int) -> list:
    return geometry.enumerate_hyperplanes(get_field(q), d)


def point_set(q: int, d: int, pts) -> geometry.PointSet:
    return geometry.PointSet(get_field(q), d, tuple(pts))


@dataclass
class Check:
    name: str
    evaluate: Callable[[dict, Any], dict]
    sample: Callable[[dict, Sampler], Any] | None = None
    exhaustive: Callable[[dict], Iterator] | None = None
    space: Callable[[dict], int] | None = None
    from_points: Callable[[dict, geometry.PointSet], Any] | None = None
    single: bool = False  # one deterministic trial, no sampling
    summary: Callable[[dict, list[dict]], dict] | None = None
    needs: tuple[str, ...] = ()
    defaults: dict = field(default_factory=dict)


REGISTRY: dict[str, Check] = {}


def register(check: Check) -> Check:
    REGISTRY[check.name] = check
    return check


def _masks(n: int, nonzero: bool = False) -> Iterator[int]:
    return iter(range(1 if nonzero else 0, 1 << n))


def _odd(params: dict) -> None:
    if params["q"] % 2 == 0:
        raise UsageError("this check needs odd q")


# -- verify ----------------------------------------------------------------------

def _eval_moment(params, pts):
    q, d = params["q"], params["d"]
    E = point_set(q, d, pts)
    rep = moments.second_moment_hyperplanes(E)
    return {
        "size": len(E), "sum_sq": rep.sum_sq, "expected": rep.expected_identity,
        "variance": frac(rep.variance_sum), "bound": frac(rep.variance_bound),
        "ok": rep.ok, "ratio": rep.ratio,
    }


def _points_space(params):
    return 2 ** (params["q"] ** params["d"])


def _points_exhaustive(params, nonzero=False):
    pts = points_of(params["q"], params["d"])
    return (tuple(from_mask(pts, m)) for m in _masks(len(pts), nonzero))


def _points_sample(params, rng, nonzero=False):
    pts = points_of(params["q"], params["d"])
    return tuple(from_mask(pts, rng.mask(len(pts), nonzero)))


def _pts_from_file(params, E):
    return E.points


register(Check(
    "verify lemma1", _eval_moment, _points_sample, _points_exhaustive, _points_space,
    _pts_from_file, needs=("q",), defaults={"d": 2},
))
register(Check(
    "verify lemma-hd", _eval_moment, _points_sample, _points_exhaustive, _points_space,
    _pts_from_file, needs=("q",), defaults={"d": 3},
))


def _eval_vinh(params, case):
    q, d = params["q"], params["d"]
    pts, lmask = case
    E = point_set(q, d, pts)
    L = from_mask(hyperplanes_of(q, d), lmask)
    rep = incidences.vinh_check(E, L) if d == 2 else incidences.vinh_check_hd(E, L)
    return {
        "points": len(E), "flats": len(L), "count": rep.count, "main_term": frac(rep.main_term),
        "deviation_sq": rep.deviation_sq_scaled, "bound_sq": rep.bound_sq_scaled,
        "forces_incidence": rep.forces_incidence, "ok": rep.ok, "ratio": rep.ratio,
    }


def _vinh_space(params):
    q, d = params["q"], params["d"]
    return 2 ** (q**d + len(hyperplanes_of(q, d)))


def _vinh_exhaustive(params):
    q, d = params["q"], params["d"]
    nl = len(hyperplanes_of(q, d))
    for pts in _points_exhaustive(params):
        for lm in _masks(nl):
            yield pts, lm


def _vinh_sample(params, rng):
    q, d = params["q"], params["d"]
    pts = _points_sample(params, rng)
    return pts, rng.mask(len(hyperplanes_of(q, d)))


def _vinh_file(params, E):
    return E.points, (1 << len(hyperplanes_of(params["q"], params["d"]))) - 1


register(Check("verify vinh", _eval_vinh, _vinh_sample, _vinh_exhaustive, _vinh_space, _vinh_file,
               needs=("q",), defaults={"d": 2}))
register(Check("verify vinh-hd", _eval_vinh, _vinh_sample, _vinh_exhaustive, _vinh_space, _vinh_file,
               needs=("q",), defaults={"d": 3}))


def _theta_universe(params):
    q, d = params["q"], params["d"]
    return list(range(q)) if d == 2 else points_of(q, d - 1)


def _eval_direction(params, case):
    q, d = params["q"], params["d"]
    pts, tmask = case
    E = point_set(q, d, pts)
    Theta = from_mask(_theta_universe(params), tmask)
    if d == 2:
        gd = moments.find_good_direction(E, Theta)
    else:
        gd = moments.find_good_direction_hd(E, Theta, params["z"])
    # independent recount of the projection at the returned direction
    recount = len({get_field(q).dot(u, gd.direction) for u in pts})
    ok = gd.ok and recount == gd.proj_size
    return {
        "points": len(E), "thetas": len(Theta), "theta": str(gd.theta), "proj_size": gd.proj_size,
        "bound": frac(gd.bound), "over_threshold": gd.over_threshold,
        "half_strict": gd.half_strict, "half_weak": gd.half_weak,
        "ok": ok, "ratio": float(gd.bound / gd.proj_size),
    }


def _direction_space(params):
    return (2 ** (params["q"] ** params["d"]) - 1) * (2 ** len(_theta_universe(params)) - 1)


def _direction_exhaustive(params):
    nt = len(_theta_universe(params))
    for pts in _points_exhaustive(params, nonzero=True):
        for tm in _masks(nt, nonzero=True):
            yield pts, tm


def _direction_sample(params, rng):
    pts = _points_sample(params, rng, nonzero=True)
    return pts, rng.mask(len(_theta_universe(params)), nonzero=True)


def _direction_file(params, E):
    return E.points, (1 << len(_theta_universe(params))) - 1


register(Check("verify direction", _eval_direction, _direction_sample, _direction_exhaustive,
               _direction_space, _direction_file, needs=("q",), defaults={"d": 2, "z": 1}))


def _eval_marstrand(params, pts):
    E = point_set(params["q"], 2, pts)
    res = moments.marstrand_direction(E)
    return {"points": len(E), "xi": res.xi, "proj_size": res.proj_size, "target": res.target,
            "ok": res.ok, "ratio": res.target / (2 * res.proj_size)}


register(Check(
    "verify marstrand", _eval_marstrand,
    lambda p, rng: _points_sample(p, rng, nonzero=True),
    lambda p: _points_exhaustive(p, nonzero=True),
    lambda p: _points_space(p) - 1, _pts_from_file, needs=("q",), defaults={"d": 2},
))


# -- sumprod -----------------------------------------------------------------------

def _witness_row(w: sumproduct.Witness, **extra) -> dict:
    row = dict(extra)
    row.update({"pin": str(w.pin), "achieved": w.achieved_size, "threshold": w.threshold_holds,
                "beats_half": w.beats_half, "consistent": w.consistent, "ok": w.ok})
    return row


def _eval_pinned_dot(params, pts):
    E = point_set(params["q"], 2, pts)
    w = sumproduct.pinned_dot_witness(E)
    D = sumproduct.direction_set(E)
    return _witness_row(w, points=len(E), directions=len(D.dirs), excluded=D.excluded)


register(Check("sumprod pinned-dot", _eval_pinned_dot, _points_sample, _points_exhaustive,
               _points_space, _pts_from_file, needs=("q",), defaults={"d": 2}))


def _scalar_universe(params):
    return list(range(params["q"]))


def _scalar_exhaustive(params, universe=None):
    universe = universe or _scalar_universe(params)
    return (tuple(from_mask(universe, m)) for m in _masks(len(universe), nonzero=True))


def _scalar_sample(params, rng, universe=None):
    universe = universe or _scalar_universe(params)
    return tuple(from_mask(universe, rng.mask(len(universe), nonzero=True)))


def _eval_linear(params, A):
    f = get_field(params["q"])
    Theta = sumproduct.ratio_set(f, A) if params["variant"] == "ratio" else frozenset(A)
    if not Theta:
        Theta = frozenset(A)
    w = sumproduct.pinned_linear_witness(f, A, Theta)
    return _witness_row(w, size=len(A), thetas=len(Theta))


register(Check("sumprod linear", _eval_linear, _scalar_sample, _scalar_exhaustive,
               lambda p: 2 ** p["q"] - 1, needs=("q",), defaults={"variant": "ratio"}))


def _nonzero(params):
    return list(range(1, params["q"]))


def _eval_product_shift(params, A):
    f = get_field(params["q"])
    w = sumproduct.product_shift_witness(f, A)
    E = sumproduct.product_shift_points(f, A)
    row = _witness_row(w, size=len(A), bijection=len(E) == len(A) ** 2)
    row["ok"] = row["ok"] and row["bijection"]
    return row


register(Check(
    "sumprod product-shift", _eval_product_shift,
    lambda p, rng: _scalar_sample(p, rng, _nonzero(p)),
    lambda p: _scalar_exhaustive(p, _nonzero(p)),
    lambda p: 2 ** (p["q"] - 1) - 1, needs=("q",),
))


def _eval_hd_dot(params, A):
    f = get_field(params["q"])
    w = sumproduct.hd_dot_witness(f, A, params["d"], params["z"])
    return _witness_row(w, size=len(A))


register(Check("sumprod hd-dot", _eval_hd_dot, _scalar_sample, _scalar_exhaustive,
               lambda p: 2 ** p["q"] - 1, needs=("q",), defaults={"d": 3, "z": 1}))


# -- dist --------------------------------------------------------------------------

def _diagonal_identity(E: geometry.PointSet) -> tuple[bool, bool]:
    """(identity for every diagonal pin, 2|E'| >= |E| with fibres of size <= 2)."""
    f = E.field
    Ep = distances.transform_eprime(E)
    ident = all(
        len(distances.pinned_distances(E, (t, t))) == len(geometry.project(Ep, (1, t)))
        for t in f.elements()
    )
    fibres = {}
    for u in E:
        fibres.setdefault(distances.eprime_map(f, u), []).append(u)
    fibre_ok = 2 * len(Ep) >= len(E) and all(len(v) <= 2 for v in fibres.values())
    return ident, fibre_ok


def _diag_points(params):
    return [(t, t) for t in range(params["q"])]


def _eval_dist_pinned(params, pts):
    E = point_set(params["q"], 2, pts)
    if params["line"] == "rich":
        rep = distances.pinned_distance_anypoint(E)
    else:
        rep = distances.pinned_distance_witness(E)
    ident, fibre_ok = _diagonal_identity(E)
    return {"points": len(E), "line_hits": rep.line_hits, "pin": str(rep.pin),
            "distances": len(rep.dist_set), "threshold": rep.threshold_holds,
            "beats_half": rep.beats_half, "identity": ident and rep.identity_holds,
            "fibres": fibre_ok, "ok": rep.ok and ident and fibre_ok}


def _dist_sample(params, rng):
    _odd(params)
    diag = set(_diag_points(params))
    while True:
        pts = _points_sample(params, rng)
        if params["line"] == "rich" or diag & set(pts):
            return pts


def _dist_exhaustive(params):
    _odd(params)
    diag = set(_diag_points(params))
    for pts in _points_exhaustive(params):
        if params["line"] == "rich" or diag & set(pts):
            yield pts


register(Check("dist pinned", _eval_dist_pinned, _dist_sample, _dist_exhaustive, _points_space,
               _pts_from_file, needs=("q",), defaults={"d": 2, "line": "diag"}))


def _eval_transform(params, pts):
    E = point_set(params["q"], 2, pts)
    ident, fibre_ok = _diagonal_identity(E)
    Ep = distances.transform_eprime(E)
    return {"points": len(E), "image": len(Ep), "identity": ident, "fibres": fibre_ok,
            "ok": ident and fibre_ok, "ratio": len(E) / (2 * len(Ep)) if Ep else 0.0}


def _transform_sample(params, rng):
    _odd(params)
    return _points_sample(params, rng)


register(Check("dist transform", _eval_transform, _transform_sample, _points_exhaustive, _points_space,
               _pts_from_file, needs=("q",), defaults={"d": 2}))


def _eval_diag(params, A):
    f = get_field(params["q"])
    w = distances.diag_distance_witness(f, A)
    D = sumproduct.difference_set(f, A)
    return _witness_row(w, size=len(A), differences=len(D))


def _diag_sample(params, rng):
    _odd(params)
    return _scalar_sample(params, rng)


def _diag_exhaustive(params):
    _odd(params)
    return _scalar_exhaustive(params)


register(Check("dist diag", _eval_diag, _diag_sample, _diag_exhaustive,
               lambda p: 2 ** p["q"] - 1, needs=("q",)))


# -- design ------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _family_design(family: str, q: int, d: int, m: int) -> designs.BlockDesign:
    if family == "points-lines":
        return designs.points_lines_design(get_field(q))
    if family == "hyperplanes":
        return designs.points_hyperplanes_design(get_field(q), d)
    if family == "m-flats":
        return designs.points_mflats_design(get_field(q), d, m)
    raise UsageError(f"unknown design family {family!r}")


def get_design(params) -> designs.BlockDesign:
    if params.get("design_doc") is not None:
        return _file_design(params["design_doc"])
    if params.get("q") is None:
        raise UsageError("give --q with --family, or --design FILE")
    return _family_design(params["family"], params["q"], params["d"], params["m"])


@lru_cache(maxsize=None)
def _file_design(doc: str) -> designs.BlockDesign:
    import json
    return designs.design_from_json(json.loads(doc))


def _eval_design_check(params, _case):
    D = get_design(params)
    return {"v": D.v, "k": D.k, "lambda": D.lam, "r": D.r, "blocks": D.b,
            "eq_replication": D.r * (D.k - 1) == D.lam * (D.v - 1),
            "eq_incidences": D.r * D.v == D.k * D.b, "ok": True}


register(Check("design check", _eval_design_check, single=True,
               defaults={"family": "points-lines", "d": 2, "m": 1}))


def _subset_space(params):
    return 2 ** get_design(params).v


def _subset_exhaustive(params):
    return _masks(get_design(params).v)


def _subset_sample(params, rng):
    return rng.mask(get_design(params).v)


def _eval_design_moment(params, mask):
    D = get_design(params)
    E = from_mask(list(D.points), mask)
    rep = designs.design_second_moment(D, E)
    return {"size": len(E), "sum_sq": rep.sum_sq, "expected": rep.expected_identity,
            "variance": frac(rep.variance_sum), "variance_exact": frac(rep.variance_exact),
            "bound": frac(rep.variance_bound), "ok": rep.ok, "ratio": rep.ratio}


register(Check("design moment", _eval_design_moment, _subset_sample, _subset_exhaustive, _subset_space,
               defaults={"family": "points-lines", "d": 2, "m": 1}))


def _eval_lund_saraf(params, case):
    D = get_design(params)
    pmask, qmask = case
    P = from_mask(list(D.points), pmask)
    Q = from_mask(list(range(D.b)), qmask)
    rep = designs.lund_saraf_check(D, P, Q)
    return {"points": len(P), "blocks": len(Q), "count": rep.count, "main_term": frac(rep.main_term),
            "deviation_sq": rep.deviation_sq_scaled, "bound_sq": rep.bound_sq_scaled,
            "ok": rep.ok, "ratio": rep.ratio}


def _ls_sample(params, rng):
    D = get_design(params)
    return rng.mask(D.v), rng.mask(D.b)


def _ls_exhaustive(params):
    D = get_design(params)
    return itertools.product(_masks(D.v), _masks(D.b))


register(Check("design lund-saraf", _eval_lund_saraf, _ls_sample, _ls_exhaustive,
               lambda p: 2 ** (get_design(p).v + get_design(p).b),
               defaults={"family": "points-lines", "d": 2, "m": 1}))


def _eval_gram(params, mask):
    D = get_design(params)
    E = from_mask(list(D.points), mask)
    ev = designs.gram_check(D, [E])
    return {"size": len(E), "diagonal": ev.diagonal_value, "offdiag": ev.offdiag_value,
            "gram": ev.gram_ok, "eigen": ev.balanced_eigen_ok, "norm": ev.norm_ok,
            "variance": ev.variance_ok, "ok": ev.ok}


register(Check("design gram", _eval_gram, _subset_sample, _subset_exhaustive, _subset_space,
               defaults={"family": "points-lines", "d": 2, "m": 1}))


# -- sidon -------------------------------------------------------------------------

def get_sidon(params) -> sidon.SidonInstance:
    if params.get("sidon_doc") is not None:
        import json
        obj = json.loads(params["sidon_doc"])
        G = sidon.AbelianGroup(tuple(obj["moduli"]))
        return sidon.SidonInstance(G, frozenset(G.encode(c) for c in obj["S"]))
    p = params.get("p") or params.get("q")
    if p is None:
        raise UsageError("give --p (odd prime) or --sidon FILE")
    return _parabola(p)


@lru_cache(maxsize=None)
def _parabola(p: int) -> sidon.SidonInstance:
    return sidon.parabola_sidon(p)


def _eval_sidon_check(params, _case):
    inst = get_sidon(params)
    verdict = sidon.is_sidon(inst.group, inst.S)
    return {"order": inst.group.order, "size": inst.size, "sidon": verdict.is_sidon,
            "counterexample": verdict.difference, "size_bound": inst.size_bound_holds,
            "ok": verdict.is_sidon and inst.size_bound_holds}


register(Check("sidon check", _eval_sidon_check, single=True))


def _eval_sidon_variance(params, mask):
    inst = get_sidon(params)
    A = from_mask(list(inst.group.elements()), mask)
    rep = sidon.cilleruelo_variance_check(inst.group, inst.S, A)
    return {"size": len(A), "lhs": frac(rep.lhs), "rhs": frac(rep.rhs), "ok": rep.ok, "ratio": rep.ratio}


def _group_sample(params, rng):
    return rng.mask(get_sidon(params).group.order)


def _group_exhaustive(params):
    return _masks(get_sidon(params).group.order)


register(Check("sidon variance", _eval_sidon_variance, _group_sample, _group_exhaustive,
               lambda p: 2 ** get_sidon(p).group.order))


def _eval_theorem1(params, case):
    inst = get_sidon(params)
    els = list(inst.group.elements())
    A, B = from_mask(els, case[0]), from_mask(els, case[1])
    rep = sidon.cilleruelo_theorem_check(inst.group, inst.S, A, B)
    return {"a": len(A), "b": len(B), "hits": rep.hits, "scaled_deviation": rep.scaled_deviation,
            "theta_approx": round(rep.theta_approx, 12), "bound_approx": round(rep.bound_approx, 12),
            "ok": rep.ok, "ratio": round(rep.ratio, 12)}


def _theorem_sample(params, rng):
    n = get_sidon(params).group.order
    return rng.mask(n), rng.mask(n)


def _theorem_exhaustive(params):
    n = get_sidon(params).group.order
    return itertools.product(_masks(n), _masks(n))


register(Check("sidon theorem1", _eval_theorem1, _theorem_sample, _theorem_exhaustive,
               lambda p: 4 ** get_sidon(p).group.order))


def _eval_near_design(params, _case):
    inst = get_sidon(params)
    rep = sidon.sidon_near_design(inst.group, inst.S)
    return {"blocks": rep.blocks, "block_size": rep.block_size,
            "replication": sorted(rep.replication)[0] if len(rep.replication) == 1 else None,
            "max_pair": rep.max_pair, "pairs_match": rep.pairs_match, "is_design": rep.is_design,
            "ok": rep.ok}


register(Check("sidon near-design", _eval_near_design, single=True))


def _eval_k22(params, _case):
    rep = sidon.k22_free_remark_check(params["q"])
    return {"pairs": rep.pairs, "max_shared": rep.max_shared, "min_shared": rep.min_shared,
            "replication": rep.replication, "ok": rep.ok}


register(Check("sidon k22", _eval_k22, single=True, needs=("q",)))


# -- running -------------------------------------------------------------------------

@dataclass
class RunConfig:
    check: str
    params: dict
    exhaustive: bool = False
    samples: int = 100
    seed: int = 0
    cap: int = 2**20
    points: geometry.PointSet | None = None
    workers: int = 1


def resolve_params(check: Check, params: dict) -> dict:
    out = dict(check.defaults)
    out.update({k: v for k, v in params.items() if v is not None})
    for name in check.needs:
        if out.get(name) is None:
            raise UsageError(f"{check.name} needs --{name}")
    if out.get("q") is not None:
        get_field(out["q"])  # raises for non prime powers
    return out


def plan_cases(cfg: RunConfig, check: Check, params: dict) -> tuple[str, Iterable]:
    if cfg.points is not None:
        if check.from_points is None:
            raise UsageError(f"{check.name} does not take --points")
        return "file", [check.from_points(params, cfg.points)]
    if check.single:
        return "single", [None]
    if cfg.exhaustive:
        size = check.space(params)
        if size > cfg.cap:
            raise UsageError(f"exhaustive space has {size} cases, over the cap {cfg.cap}")
        return "exhaustive", check.exhaustive(params)
    if cfg.samples < 1:
        raise UsageError("--samples must be positive")
    return "sample", [check.sample(params, trial_sampler(cfg.seed, i)) for i in range(cfg.samples)]


def _evaluate(args):
    name, params, case = args
    return REGISTRY[name].evaluate(params, case)


def run_rows(cfg: RunConfig) -> tuple[str, dict, list[dict]]:
    if cfg.check not in REGISTRY:
        raise UsageError(f"unknown check {cfg.check!r}")
    if not 0 <= cfg.seed < 2**64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    check = REGISTRY[cfg.check]
    params = resolve_params(check, cfg.params)
    mode, cases = plan_cases(cfg, check, params)
    jobs = ((cfg.check, params, c) for c in cases)
    if cfg.workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(cfg.workers) as pool:
            rows = list(pool.map(_evaluate, jobs, chunksize=16))
    else:
        rows = [_evaluate(j) for j in jobs]
    return mode, params, rows
