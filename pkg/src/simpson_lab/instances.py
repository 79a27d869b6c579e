"""Seeded instance generation, JSON instance files and canonical digests."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from typing import Any

from .chart import Chart, ChartParams, SemistableElt
from .errors import InvalidInput
from .higgs import GammaRep, HiggsModule, mat_add, mat_identity, mat_mul, mat_scale
from .ring import CyclotomicParams, CyclotomicRing, RingElt, get_ring


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


# ------------------------------------------------------------------ generation


def random_unit_coeffs(ring: CyclotomicRing, rng: random.Random) -> RingElt:
    return ring.elt([rng.randrange(ring.q) for _ in range(ring.phi)])


def random_higgs(ring: CyclotomicRing, params: ChartParams, rank: int, rng: random.Random,
                 min_vpi: int = 1, degree: int = 2) -> HiggsModule:
    """Commuting theta_i = sum_{k=1..degree} a_ik X^k for one random X with entries in pi^min_vpi W.

    Entries of X divisible by the uniformizer make every theta_i topologically nilpotent.
    """
    if min_vpi < 1:
        raise InvalidInput("theta entries must be divisible by the uniformizer")
    chart = Chart(params, ring)
    pv = ring.pi_power(min_vpi)
    X = [[pv * random_unit_coeffs(ring, rng) for _ in range(rank)] for _ in range(rank)]
    powers = [X]
    for _ in range(degree - 1):
        powers.append(mat_mul(powers[-1], X))
    thetas = []
    for _ in range(params.d):
        t = mat_scale(mat_identity(rank, ring.one), ring.zero)
        for Xk in powers:
            t = mat_add(t, mat_scale(Xk, random_unit_coeffs(ring, rng)))
        thetas.append(t)
    return HiggsModule(chart, rank, thetas).certified()


# ------------------------------------------------------------------ JSON I/O


def entry_to_json(x) -> Any:
    return x.to_json()


def entry_from_json(ring: CyclotomicRing, chart: Chart, obj) -> RingElt | SemistableElt:
    if isinstance(obj, list) and obj and all(isinstance(t, dict) and "exps" in t for t in obj):
        return SemistableElt.from_json(chart, obj)
    try:
        return RingElt.from_json(ring, obj)
    except (TypeError, ValueError, KeyError) as exc:
        raise InvalidInput(f"bad ring element {obj!r}") from exc


def matrix_from_json(ring: CyclotomicRing, chart: Chart, obj, rank: int) -> list:
    if not isinstance(obj, list) or len(obj) != rank or any(not isinstance(r, list) or len(r) != rank for r in obj):
        raise InvalidInput(f"expected a {rank}x{rank} matrix")
    return [[entry_from_json(ring, chart, x) for x in r] for r in obj]


def matrix_to_json(A: list) -> list:
    return [[entry_to_json(x) for x in r] for r in A]


def higgs_to_json(H: HiggsModule) -> dict:
    return {"ring": H.ring.params.to_json(), "chart": H.chart.params.to_json(), "rank": H.rank,
            "theta": [matrix_to_json(t) for t in H.theta]}


def rep_to_json(M: GammaRep) -> dict:
    out = {"ring": M.ring.params.to_json(), "chart": M.chart.params.to_json(), "rank": M.rank,
           "gamma": [matrix_to_json(A) for A in M.A]}
    if M.witness is not None:
        out["witness"] = [matrix_to_json(t) for t in M.witness]
    return out


@dataclass
class Instance:
    kind: str  # "higgs" or "rep"
    value: HiggsModule | GammaRep
    raw: dict

    @property
    def digest(self) -> str:
        return digest(self.raw)


def instance_from_json(obj: Any, ring_override: CyclotomicParams | None = None) -> Instance:
    if not isinstance(obj, dict):
        raise InvalidInput("instance must be a JSON object")
    try:
        rp = CyclotomicParams.from_json(obj["ring"]) if "ring" in obj else (ring_override or CyclotomicParams())
        cp = ChartParams.from_json(obj["chart"]) if "chart" in obj else ChartParams()
        rank = int(obj["rank"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"instance is missing ring/chart/rank data: {exc}") from exc
    if rank < 1:
        raise InvalidInput("rank must be positive")
    ring = get_ring(rp)
    chart = Chart(cp, ring)
    if "theta" in obj:
        thetas = obj["theta"]
        if not isinstance(thetas, list):
            raise InvalidInput("'theta' must be a list of matrices")
        H = HiggsModule(chart, rank, [matrix_from_json(ring, chart, t, rank) for t in thetas])
        return Instance("higgs", H, obj)
    if "gamma" in obj:
        gammas = obj["gamma"]
        if not isinstance(gammas, list):
            raise InvalidInput("'gamma' must be a list of matrices")
        wit = obj.get("witness")
        witness = [matrix_from_json(ring, chart, t, rank) for t in wit] if wit is not None else None
        M = GammaRep(chart, rank, [matrix_from_json(ring, chart, t, rank) for t in gammas], witness)
        return Instance("rep", M, obj)
    raise InvalidInput("instance needs 'theta' (Higgs module) or 'gamma' (representation)")


def load_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read instance {path}: {exc}") from exc
    return instance_from_json(obj)
