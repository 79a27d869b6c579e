"""Property suites over seeded instances, with deterministic reports.

Every suite produces PropertyResult rows (property name, instance digest,
outcome, details); reports sort them by digest and property so that the output
is byte-identical for a given configuration and seed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterable

from .chart import Chart, ChartParams, perf_indices
from .cohomology import (cone_torsion_check, decalage, h0_identification, h1_scaling_check, higgs_de_rham,
                         cohomology_profile, torsion_check, trusted_exponent, twist_eta_check)
from .errors import InvalidInput, NotSmall, PrecisionExhausted, SimpsonLabError
from .extension import derive_period_algebra, ext_ses_check, sz_exactness_check
from .higgs import (GammaRep, HiggsModule, decompletion_component_check, higgs_from_rep, hitchin, in_small_locus,
                    mat_direct_sum, mat_eq_mod, mat_inverse, mat_kron, mat_mul, mat_neg, mat_transpose,
                    rep_from_higgs, twist)
from .instances import canonical_json, digest, higgs_to_json, random_higgs, random_unit_coeffs
from .pd import higgs_complex_on_pd
from .ring import CyclotomicParams, CyclotomicRing, get_ring

SUITES = ("poincare", "sz", "extension", "correspondence", "decompletion", "twist-eta", "h1-comparison",
          "cone-bound", "hitchin-locus")

MAX_D, MAX_RANK, MAX_PD_DEGREE = 2, 2, 24


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    ring: CyclotomicParams = field(default_factory=CyclotomicParams)
    d: int | None = None
    r: int | None = None
    a: int = 1
    rank: int | None = None
    D: int = 12
    seed: int = 0
    fmt: str = "json"
    instances: int | None = None
    samples: int | None = None

    def __post_init__(self):
        if self.suite not in SUITES:
            raise InvalidInput(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.d is not None and not 1 <= self.d <= MAX_D:
            raise InvalidInput(f"d must lie in 1..{MAX_D}")
        if self.rank is not None and not 1 <= self.rank <= MAX_RANK:
            raise InvalidInput(f"rank must lie in 1..{MAX_RANK}")
        if self.r is not None and (self.r < 0 or (self.d is not None and self.r > self.d)):
            raise InvalidInput("need 0 <= r <= d")
        if self.a < 1:
            raise InvalidInput("chart exponent a must be >= 1")
        if not 0 <= self.D <= MAX_PD_DEGREE:
            raise InvalidInput(f"pd-degree D must lie in 0..{MAX_PD_DEGREE}")
        if self.fmt not in ("json", "text"):
            raise InvalidInput("format must be json or text")
        if self.instances is not None and self.instances < 1:
            raise InvalidInput("instance count must be positive")
        if self.samples is not None and self.samples < 1:
            raise InvalidInput("sample count must be positive")

    @property
    def dims(self) -> list[int]:
        return [self.d] if self.d is not None else list(range(1, MAX_D + 1))

    @property
    def ranks(self) -> list[int]:
        return [self.rank] if self.rank is not None else list(range(1, MAX_RANK + 1))

    def r_values(self, d: int, default: Iterable[int] = (1,)) -> list[int]:
        if self.r is not None:
            return [min(self.r, d)]
        return sorted({min(r, d) for r in default})

    def to_json(self) -> dict:
        out = asdict(self)
        out["ring"] = self.ring.to_json()
        out.pop("fmt")
        return out


@dataclass
class PropertyResult:
    property: str
    instance: str
    status: str  # "pass", "fail" or "precision"
    detail: dict

    def to_json(self) -> dict:
        return {"property": self.property, "instance": self.instance, "status": self.status, "detail": self.detail}


@dataclass
class Report:
    config: SuiteConfig
    results: list[PropertyResult]
    audit: dict

    @property
    def exit_code(self) -> int:
        if any(r.status == "fail" for r in self.results):
            return 1
        if any(r.status == "precision" for r in self.results):
            return 3
        return 0

    def summary(self) -> dict:
        out = {"pass": 0, "fail": 0, "precision": 0}
        for r in self.results:
            out[r.status] += 1
        return out

    def to_json(self) -> dict:
        return {"suite": self.config.suite, "config": self.config.to_json(), "audit": self.audit,
                "summary": self.summary(), "exit_code": self.exit_code,
                "results": [r.to_json() for r in self.results]}

    def render(self) -> str:
        if self.config.fmt == "json":
            return canonical_json(self.to_json()) + "\n"
        lines = [f"suite {self.config.suite} seed {self.config.seed}: "
                 + ", ".join(f"{k} {v}" for k, v in self.summary().items()) + f", exit {self.exit_code}"]
        for r in self.results:
            extra = r.detail.get("message", "")
            lines.append(f"{r.status.upper():9s} {r.property:36s} {r.instance[:16]} {extra}".rstrip())
        return "\n".join(lines) + "\n"


Check = Callable[[], tuple[bool, dict]]


def _run(prop: str, inst: str, fn: Check) -> PropertyResult:
    try:
        ok, detail = fn()
        if not ok:
            detail = dict(detail, message=f"property {prop} violated")
        return PropertyResult(prop, inst, "pass" if ok else "fail", detail)
    except (PrecisionExhausted, NotSmall) as exc:
        return PropertyResult(prop, inst, "precision", {"message": f"{prop}: {exc}"})
    except SimpsonLabError as exc:
        return PropertyResult(prop, inst, "fail", {"message": f"{prop}: {type(exc).__name__}: {exc}"})


def _rng(cfg: SuiteConfig, *key) -> random.Random:
    return random.Random(":".join(str(k) for k in (cfg.seed, cfg.suite) + key))


def _cells(cfg: SuiteConfig) -> list[tuple[int, int]]:
    return [(d, n) for d in cfg.dims for n in cfg.ranks]


def _instance(cfg: SuiteConfig, d: int, n: int, k: int, min_vpi: int = 1, tag: str = "") -> tuple[HiggsModule, str]:
    ring = get_ring(cfg.ring)
    r = cfg.r_values(d)[0]
    H = random_higgs(ring, ChartParams(d=d, r=r, a=cfg.a), n, _rng(cfg, tag, d, n, k), min_vpi=min_vpi)
    return H, digest(higgs_to_json(H))


def _theta_eq(A: list, B: list, k: int) -> bool:
    return all(mat_eq_mod(x, y, k) for x, y in zip(A, B))


# ------------------------------------------------------------------ suites


def suite_poincare(cfg: SuiteConfig) -> list[PropertyResult]:
    ring = get_ring(cfg.ring)
    out = []
    for d in cfg.dims:
        inst = digest({"suite": "poincare", "d": d, "D": cfg.D, "ring": cfg.ring.to_json()})
        C = higgs_complex_on_pd(ring, d, cfg.D)
        prof = cohomology_profile(C)
        out.append(_run("higgs-complex-square-zero", inst, lambda: (C.square_zero(), {"d": d, "D": cfg.D})))

        def h0():
            p0 = prof.degree(0)
            ok = p0.free == 1 and not p0.torsion and p0.length == ring.N
            return ok, {"d": d, "profile": p0.to_json()}

        def higher():
            ok = all(p.free == 0 and not p.torsion for p in prof.degrees[1:])
            return ok, {"d": d, "profiles": [p.to_json() for p in prof.degrees[1:]]}

        def euler():
            total = sum((-1) ** q * r for q, r in enumerate(C.ranks)) * ring.N
            return total == prof.euler_length(), {"d": d, "ranks": C.ranks}

        out.append(_run("poincare-h0-constants", inst, h0))
        out.append(_run("poincare-higher-negligible", inst, higher))
        out.append(_run("euler-characteristic", inst, euler))
    return out


def suite_sz(cfg: SuiteConfig) -> list[PropertyResult]:
    ring = get_ring(cfg.ring)
    out = []
    for m, f in itertools.product(range(1, 4), range(1, 4)):
        for g in range(f + 1):
            seed = _rng(cfg, m, f, g).randrange(2**31)
            inst = digest({"suite": "sz", "m": m, "rank_f": f, "rank_g": g, "seed": seed})
            rep = None

            def run(seed=seed, m=m, f=f, g=g):
                return sz_exactness_check(ring, m, f, g, seed)

            try:
                rep = run()
            except SimpsonLabError as exc:
                out.append(_run("sz-exact", inst, lambda exc=exc: (_ for _ in ()).throw(exc)))
                continue
            det = {"m": m, "rank_f": f, "rank_g": g}
            out.append(_run("sz-square-zero", inst, lambda rep=rep, det=det: (rep.square_zero, det)))
            out.append(_run("sz-exact", inst, lambda rep=rep, det=det: (
                rep.exact, dict(det, profile=[p.to_json() for p in rep.profile.degrees]))))
    return out


def suite_extension(cfg: SuiteConfig) -> list[PropertyResult]:
    ring = get_ring(cfg.ring)
    samples = cfg.samples or 20
    out = []
    for d in cfg.dims:
        for r in cfg.r_values(d, (0, 1)):
            chart = Chart(ChartParams(d=d, r=r, a=cfg.a, lvl=1), ring)
            seed = _rng(cfg, d, r).randrange(2**31)
            inst = digest({"suite": "extension", "d": d, "r": r, "a": cfg.a, "seed": seed})
            rep = ext_ses_check(chart, samples, seed)
            det = {"d": d, "r": r}
            out.append(_run("ext-group-law", inst, lambda rep=rep, det=det: (rep.group_law, det)))
            out.append(_run("ext-ses-exact-equivariant", inst, lambda rep=rep, det=det: (
                rep.inclusion_injective and rep.projection_kills_inclusion and rep.projection_of_y
                and rep.exact_in_middle and rep.equivariant, det)))
            out.append(_run("ext-non-split", inst, lambda rep=rep, det=det: (
                rep.non_split, dict(det, obstruction=[o.to_json() for o in rep.obstruction]))))
        D = min(cfg.D, 6 if d == 1 else 4)
        seed = _rng(cfg, "period", d).randrange(2**31)
        inst = digest({"suite": "extension", "period-algebra": d, "D": D, "seed": seed})

        def period(d=d, D=D, seed=seed):
            rep = derive_period_algebra(ring, d, D, samples=min(samples, 10), seed=seed)
            return rep.ok, {k: v for k, v in asdict(rep).items()}

        out.append(_run("period-algebra-iso", inst, period))
    return out


def suite_correspondence(cfg: SuiteConfig) -> list[PropertyResult]:
    ring = get_ring(cfg.ring)
    guard = ring.e - ring.g
    per_cell = cfg.instances or 100
    out = []
    for d, n in _cells(cfg):
        for k in range(per_cell):
            H, inst = _instance(cfg, d, n, k)

            def higgs_round(H=H):
                H2 = higgs_from_rep(rep_from_higgs(H), use_witness=False)
                return _theta_eq(H.theta, H2.theta, guard), {"d": H.d, "rank": H.rank}

            def rep_round(H=H):
                M = rep_from_higgs(H)
                bare = GammaRep(M.chart, M.rank, M.A)
                M2 = rep_from_higgs(higgs_from_rep(bare))
                return _theta_eq(M.A, M2.A, guard), {"d": H.d, "rank": H.rank}

            out.append(_run("round-trip-higgs-rep-higgs", inst, higgs_round))
            out.append(_run("round-trip-rep-higgs-rep", inst, rep_round))
            if k < 3:
                H2, _ = _instance(cfg, d, n, k, tag="partner")
                out.append(_run("direct-sum-compatible", inst, lambda H=H, H2=H2: (_theta_eq(
                    rep_from_higgs(H.direct_sum(H2)).A,
                    [mat_direct_sum(a, b) for a, b in zip(rep_from_higgs(H).A, rep_from_higgs(H2).A)], guard), {})))
                out.append(_run("tensor-compatible", inst, lambda H=H, H2=H2: (_theta_eq(
                    rep_from_higgs(H.tensor(H2)).A,
                    [mat_kron(a, b) for a, b in zip(rep_from_higgs(H).A, rep_from_higgs(H2).A)], guard), {})))
                out.append(_run("duality-compatible", inst, lambda H=H: (_theta_eq(
                    rep_from_higgs(H.dual()).A,
                    [mat_transpose(mat_inverse(a)) for a in rep_from_higgs(H).A], guard), {})))
    # group cohomology of M (x) P: degree-0 identification and torsion above
    for d, n in _cells(cfg):
        H, inst = _instance(cfg, d, n, 0, min_vpi=2, tag="cohomology")

        def h0(H=H):
            rep = h0_identification(H, cfg.D)
            return rep.ok, asdict(rep)

        def tors(H=H):
            rep = torsion_check(H, cfg.D)
            return rep.ok, {"D": rep.D, "D_inner": rep.D_inner,
                            "per_degree": {str(q): list(v) for q, v in rep.per_degree.items()}}

        out.append(_run("h0-identification", inst, h0))
        out.append(_run("higher-cohomology-killed-by-c", inst, tors))
    return out


def suite_decompletion(cfg: SuiteConfig) -> list[PropertyResult]:
    ring = get_ring(cfg.ring)
    per_cell = cfg.instances or 2
    out = []
    for d, n in _cells(cfg):
        for r in cfg.r_values(d, (0, 1)):
            for k in range(per_cell):
                params = ChartParams(d=d, r=r, a=cfg.a)
                H = random_higgs(ring, params, n, _rng(cfg, d, n, r, k))
                inst = digest(higgs_to_json(H))
                for alpha in perf_indices(H.chart):
                    if not any(alpha):
                        continue

                    def check(H=H, alpha=alpha):
                        rep = decompletion_component_check(H, alpha, level=1)
                        det = asdict(rep)
                        det["alpha"] = list(alpha)
                        return rep.ok, det

                    out.append(_run("decompletion-component", inst, check))
    return out


def suite_twist_eta(cfg: SuiteConfig) -> list[PropertyResult]:
    ring = get_ring(cfg.ring)
    total = cfg.instances or 50
    cells = _cells(cfg)
    out = []
    f = ring.rho_K()
    for k in range(total):
        d, n = cells[k % len(cells)]
        H, inst = _instance(cfg, d, n, k)

        def eta(H=H):
            rep = twist_eta_check(H)
            return rep.ok, asdict(rep)

        out.append(_run("twist-eta-isomorphism", inst, eta))
        if k < len(cells):
            def unit(H=H):
                C = higgs_de_rham(H)
                E = decalage(C, ring.one)
                return all(a.eq_mod(b, ring.e) for a, b in zip(C.diffs, E.complex.diffs)), {}

            def iterate(H=H):
                C = higgs_de_rham(twist(twist(H, "twist"), "twist"))
                twice = decalage(decalage(C, f).complex, f).complex
                once = decalage(C, f * f).complex
                pa, pb = cohomology_profile(twice), cohomology_profile(once)
                same = [x.to_json() for x in pa.degrees] == [x.to_json() for x in pb.degrees]
                return same and twice.ranks == once.ranks, {"ranks": once.ranks}

            out.append(_run("decalage-unit-identity", inst, unit))
            out.append(_run("decalage-iterate", inst, iterate))
    return out


def suite_h1(cfg: SuiteConfig) -> list[PropertyResult]:
    per_cell = cfg.instances or 2
    samples = cfg.samples or 50
    out = []
    for d, n in _cells(cfg):
        for k in range(per_cell):
            H, inst = _instance(cfg, d, n, k)
            try:
                rep = h1_scaling_check(H, samples=samples, D=cfg.D, rng=_rng(cfg, "omega", d, n, k))
            except SimpsonLabError as exc:
                out.append(_run("h1-comparison", inst, lambda exc=exc: (_ for _ in ()).throw(exc)))
                continue
            det = {"d": d, "rank": n}
            out.append(_run("h1-image-in-scaled", inst, lambda rep=rep, det=det: (rep.image_in_scaled, det)))
            out.append(_run("h1-scaled-in-image", inst, lambda rep=rep, det=det: (rep.scaled_in_image, det)))
            out.append(_run("h1-injective", inst, lambda rep=rep, det=det: (rep.injective, det)))
            out.append(_run("cocycle-two-path-agreement", inst, lambda rep=rep, det=det: (
                rep.paths_agree, dict(det, samples=rep.samples))))
    return out


def suite_cone(cfg: SuiteConfig) -> list[PropertyResult]:
    per_cell = cfg.instances or 3
    out = []
    for d, n in _cells(cfg):
        for k in range(per_cell):
            H, inst = _instance(cfg, d, n, k)
            try:
                rep = cone_torsion_check(H)
            except SimpsonLabError as exc:
                out.append(_run("cone-torsion-bound", inst, lambda exc=exc: (_ for _ in ()).throw(exc)))
                continue
            det = {"d": d, "rank": n, "exponent": rep.bound}
            out.append(_run("cone-chain-map", inst, lambda rep=rep, det=det: (rep.chain_map, det)))
            out.append(_run("cone-torsion-bound", inst, lambda rep=rep, det=det: (
                rep.killed, dict(det, profile=[p.to_json() for p in rep.profile.degrees]))))
    return out


def negative_hitchin_fixtures(ring: CyclotomicRing) -> list[HiggsModule]:
    """theta = (zeta_p - 1) at rank 1 and [[0, 1], [(zeta_p - 1)^2, 0]] at rank 2: both outside the locus."""
    chart = Chart(ChartParams(d=1, r=0), ring)
    z = ring.rho_K()
    return [HiggsModule(chart, 1, [[[z]]]),
            HiggsModule(chart, 2, [[[ring.zero, ring.one], [z * z, ring.zero]]])]


def suite_hitchin(cfg: SuiteConfig) -> list[PropertyResult]:
    ring = get_ring(cfg.ring)
    per_cell = cfg.instances or 10
    out = []
    for d, n in _cells(cfg):
        for k in range(per_cell):
            H, _ = _instance(cfg, d, n, k)
            small = twist(H, "twist")
            inst = digest(higgs_to_json(small))
            out.append(_run("small-presentation-in-locus", inst, lambda small=small: (
                small.cert is not None and small.cert.kind == "small" and in_small_locus(small), {})))
            if k == 0:
                rng = _rng(cfg, "conj", d, n)

                def conj(small=small, rng=rng):
                    P = _random_unimodular(ring, small.rank, rng)
                    Pi = mat_inverse(P)
                    moved = HiggsModule(small.chart, small.rank, [mat_mul(mat_mul(P, t), Pi) for t in small.theta])
                    a, b = hitchin(small), hitchin(moved)
                    zero = ring.zero
                    same = all(x.get(m, zero).eq_mod(y.get(m, zero)) for x, y in zip(a, b) for m in set(x) | set(y))
                    return same, {}

                out.append(_run("hitchin-conjugation-invariant", inst, conj))
    for H in negative_hitchin_fixtures(ring):
        inst = digest(higgs_to_json(H))
        out.append(_run("negative-fixture-rejected", inst, lambda H=H: (
            not in_small_locus(H), {"in_locus": in_small_locus(H), "rank": H.rank,
                                    "message": "expected-negative fixture reported NOT in locus"})))
    return out


def _random_unimodular(ring: CyclotomicRing, n: int, rng: random.Random) -> list:
    lo = [[ring.one if i == j else (random_unit_coeffs(ring, rng) if i > j else ring.zero) for j in range(n)]
          for i in range(n)]
    up = [[ring.one if i == j else (random_unit_coeffs(ring, rng) if i < j else ring.zero) for j in range(n)]
          for i in range(n)]
    return mat_mul(lo, up)


RUNNERS = {
    "poincare": suite_poincare,
    "sz": suite_sz,
    "extension": suite_extension,
    "correspondence": suite_correspondence,
    "decompletion": suite_decompletion,
    "twist-eta": suite_twist_eta,
    "h1-comparison": suite_h1,
    "cone-bound": suite_cone,
    "hitchin-locus": suite_hitchin,
}


def run_suite(cfg: SuiteConfig) -> Report:
    ring = get_ring(cfg.ring)
    results = RUNNERS[cfg.suite](cfg)
    results.sort(key=lambda r: (r.instance, r.property, canonical_json(r.detail)))
    audit = {"precision_exponent": ring.e, "guard": ring.g, "comparison_modulus": f"p^{ring.e - ring.g}",
             "trusted_uniformizer_exponent": trusted_exponent(ring), "uniformizer_length": ring.N}
    return Report(cfg, results, audit)
