"""Command-line entry point: suites, the correspondence, cohomology and the Hitchin map.

Exit codes: 0 pass, 1 property violation, 2 invalid input, 3 precision exhausted or not small.
"""

from __future__ import annotations

import json
import sys

import click

from .cohomology import FreeComplex, cohomology_profile, decalage, higgs_de_rham, rep_koszul
from .errors import InvalidInput, SimpsonLabError
from .higgs import GammaRep, hitchin, higgs_from_rep, in_small_locus, mat_eq_mod, rep_from_higgs
from .instances import canonical_json, higgs_to_json, instance_from_json, rep_to_json
from .ring import CyclotomicParams, RingElt, get_ring
from .suites import SUITES, SuiteConfig, run_suite


def _ring_options(fn):
    fn = click.option("--guard", "g", type=int, default=2, show_default=True, help="Guard digits g.")(fn)
    fn = click.option("--e", "e", type=int, default=8, show_default=True, help="Precision exponent e.")(fn)
    fn = click.option("--n", "n", type=int, default=1, show_default=True, help="Cyclotomic level n.")(fn)
    fn = click.option("--p", "p", type=int, default=3, show_default=True, help="Odd prime p.")(fn)
    return fn


def _format_option(fn):
    return click.option("--json/--text", "as_json", default=True, help="Output format.")(fn)


def _emit(obj: dict, as_json: bool, text_lines: list[str] | None = None, out: str | None = None) -> None:
    body = canonical_json(obj) + "\n" if as_json or text_lines is None else "\n".join(text_lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        click.echo(body, nl=False)


def _fail(exc: SimpsonLabError) -> None:
    click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
    sys.exit(exc.exit_code)


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Exact-precision checks of the local p-adic Simpson correspondence."""


@main.command()
@click.argument("suite", type=click.Choice(SUITES))
@_ring_options
@click.option("--d", "d", type=int, default=None, help="Relative dimension (default: 1 and 2).")
@click.option("--r", "r", type=int, default=None, help="Number of semistable coordinates beyond T_0.")
@click.option("--a", "a", type=int, default=1, show_default=True, help="Chart exponent in T_0...T_r = p^a.")
@click.option("--rank", type=int, default=None, help="Module rank (default: 1 and 2).")
@click.option("--D", "D", type=int, default=12, show_default=True, help="Truncation pd-degree.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--instances", type=int, default=None, help="Override the per-suite instance count.")
@click.option("--samples", type=int, default=None, help="Override the per-instance sample count.")
@_format_option
def verify(suite, p, n, e, g, d, r, a, rank, D, seed, instances, samples, as_json):
    """Run a property suite and print a deterministic report."""
    try:
        cfg = SuiteConfig(suite, CyclotomicParams(p, n, e, g), d=d, r=r, a=a, rank=rank, D=D, seed=seed,
                          fmt="json" if as_json else "text", instances=instances, samples=samples)
        report = run_suite(cfg)
    except SimpsonLabError as exc:
        _fail(exc)
    click.echo(report.render(), nl=False)
    sys.exit(report.exit_code)


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--to-rep", "direction", flag_value="to-rep", help="Higgs module to Gamma-representation.")
@click.option("--to-higgs", "direction", flag_value="to-higgs", help="Gamma-representation to Higgs module.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the image here.")
@_ring_options
@_format_option
def correspond(file, direction, out, p, n, e, g, as_json):
    """Apply the correspondence and stamp the image with a round-trip check."""
    if direction is None:
        raise click.UsageError("choose --to-rep or --to-higgs")
    try:
        inst = instance_from_json(_read_json(file), CyclotomicParams(p, n, e, g))
        ring = inst.value.ring
        guard = ring.e - ring.g
        if direction == "to-rep":
            if inst.kind != "higgs":
                raise InvalidInput("--to-rep needs a Higgs instance ('theta')")
            M = rep_from_higgs(inst.value)
            back = higgs_from_rep(GammaRep(M.chart, M.rank, M.A), use_witness=False)
            ok = all(mat_eq_mod(x, y, guard) for x, y in zip(inst.value.theta, back.theta))
            image = rep_to_json(M)
        else:
            if inst.kind != "rep":
                raise InvalidInput("--to-higgs needs a representation instance ('gamma')")
            H = higgs_from_rep(inst.value)
            back = rep_from_higgs(H)
            ok = all(mat_eq_mod(x, y, guard) for x, y in zip(inst.value.A, back.A))
            image = higgs_to_json(H)
    except SimpsonLabError as exc:
        _fail(exc)
    image["roundtrip"] = {"ok": ok, "modulus": f"p^{guard}", "source": inst.digest, "direction": direction}
    lines = [f"{direction}: rank {image['rank']}, round trip mod p^{guard} {'ok' if ok else 'FAILED'}"]
    _emit(image, as_json, lines, out)
    sys.exit(0 if ok else 1)


def _parse_factor(ring, text: str) -> RingElt:
    if text.strip().lower() in ("rho", "zeta_p-1", "zeta-1"):
        return ring.rho_K()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"cannot parse --eta factor {text!r}") from exc
    try:
        return RingElt.from_json(ring, obj)
    except (TypeError, ValueError, KeyError) as exc:
        raise InvalidInput(f"bad --eta factor {text!r}") from exc


@main.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--eta", default=None, help="Apply the decalage functor for this factor ('rho' or a ring element).")
@_ring_options
@_format_option
def cohomology(file, eta, p, n, e, g, as_json):
    """Cohomology profile of a complex, a Higgs de Rham complex or a Koszul complex of a representation."""
    try:
        obj = _read_json(file)
        if isinstance(obj, dict) and "ranks" in obj:
            rp = CyclotomicParams.from_json(obj["ring"]) if "ring" in obj else CyclotomicParams(p, n, e, g)
            C = FreeComplex.from_json(get_ring(rp), obj)
            kind = "complex"
        else:
            inst = instance_from_json(obj, CyclotomicParams(p, n, e, g))
            C = higgs_de_rham(inst.value) if inst.kind == "higgs" else rep_koszul(inst.value)
            kind = inst.kind
        if not C.square_zero():
            raise InvalidInput("differentials do not compose to zero")
        out = {"kind": kind, "ranks": C.ranks, "profile": cohomology_profile(C).to_json()}
        if eta is not None:
            E = decalage(C, _parse_factor(C.ring, eta)).complex
            out["eta"] = {"ranks": E.ranks, "profile": cohomology_profile(E).to_json(), "complex": E.to_json()}
    except SimpsonLabError as exc:
        _fail(exc)
    lines = []
    for key, prof in [("", out["profile"])] + ([("eta ", out["eta"]["profile"])] if "eta" in out else []):
        for dp in prof["degrees"]:
            lines.append(f"{key}H^{dp['q']}: free {dp['free']}, torsion {dp['torsion']}, length {dp['length']}")
    _emit(out, as_json, lines)
    sys.exit(0)


@main.command("hitchin")
@click.argument("file", type=click.Path(dir_okay=False))
@_ring_options
@_format_option
def hitchin_cmd(file, p, n, e, g, as_json):
    """Hitchin-map coefficients and membership in the small locus."""
    try:
        inst = instance_from_json(_read_json(file), CyclotomicParams(p, n, e, g))
        if inst.kind != "higgs":
            raise InvalidInput("hitchin needs a Higgs instance ('theta')")
        H = inst.value
        coeffs = [[{"monomial": list(m), "value": v.to_json() if hasattr(v, "to_json") else v}
                   for m, v in sorted(ck.items())] for ck in hitchin(H)]
        inside = in_small_locus(H)
    except SimpsonLabError as exc:
        _fail(exc)
    out = {"instance": inst.digest, "coefficients": coeffs, "in_small_locus": inside}
    lines = [f"instance {inst.digest[:16]}: {'in' if inside else 'NOT in'} the small locus"]
    _emit(out, as_json, lines)
    sys.exit(0)


if __name__ == "__main__":
    main()
