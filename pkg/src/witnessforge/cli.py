"""Command-line front end: ``witnessforge build|verify|cross``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on usage
errors.  Reports embed the expected closed-form value next to each computed
regression constant.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import io as wio
from .errors import NotCirculant
from .linalg import exact_eigenvalue_check, max_entangled_vector, partial_transpose, psd_certify_exact
from .maps import BreuerHall, Psi, Reduction, choi
from .matrix import Scalar, quadratic_form
from .spa import (
    CHOI_RAW,
    NORMALIZATIONS,
    TRACE_NORMALIZED,
    eb_support_check,
    swapped_isotropic_boundary,
    spa_threshold,
)
from .states import atomic_state, breuer_family, breuer_ppt_bound, isotropic, ppt_witness_state, spanning_family
from .verify import (
    DEFAULT_RESTARTS,
    NEGATIVITY_TOL,
    PASS,
    VerificationReport,
    certify_atomic,
    certify_block_positive,
    certify_indecomposable,
    certify_optimal,
    circulant_decompose,
    circulant_reassemble,
    mutual_detection_matrix,
    negative_spectrum_profile,
)

BUILD_KINDS = ("witness-psi", "witness-bh", "witness-reduction", "state-rho", "state-d", "state-iso", "state-breuer")
SUITES = ("all", "ew", "indecomposable", "atomic", "optimal", "circulant", "spa", "cross")
ALL_SUITES = ("ew", "indecomposable", "atomic", "optimal", "circulant", "spa")


@dataclass(frozen=True)
class RunConfig:
    k: int = 2
    tolerance: float = NEGATIVITY_TOL
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    output_format: str = "json"
    normalization: str = TRACE_NORMALIZED

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.output_format not in ("json", "markdown"):
            raise ValueError("format must be json or markdown")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "tol": self.tolerance,
            "seed": self.seed,
            "restarts": self.restarts,
            "normalization": self.normalization,
        }


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


# ---------------------------------------------------------------------------
# suites


def suite_ew(cfg: RunConfig) -> VerificationReport:
    k, d = cfg.k, 2 * cfg.k
    W = choi(Psi(k))
    r = VerificationReport()
    tr = W.matrix.trace()
    r.add("trace", tr == 2 * k, exact=tr, expected=2 * k)
    sigma = quadratic_form(W.matrix, max_entangled_vector(d))
    r.add("maximally-entangled-sum", sigma == -2 * k, exact=sigma, expected=-2 * k)
    r.add("eigenvalue--1", exact_eigenvalue_check(W.matrix, -1), expected=-1)
    if k >= 3:
        lam = Fraction(2 - k, k)
        r.add(f"eigenvalue-{lam}", exact_eigenvalue_check(W.matrix, lam), expected=lam)
    prof = negative_spectrum_profile(W, cfg.tolerance)
    want = 1 if k == 2 else 2
    r.add("negative-eigenvalue-count", prof.count == want, exact=Scalar(prof.count), expected=want,
          float_value=min(prof.values), tol=cfg.tolerance)
    pt = negative_spectrum_profile(partial_transpose(W.matrix, W.dims), cfg.tolerance)
    want = k * (k - 1) // 2
    r.add("pt-negative-eigenvalue-count", pt.count == want, exact=Scalar(pt.count), expected=want,
          float_value=min(pt.values), tol=cfg.tolerance,
          note="values " + ", ".join(f"{v:.12g}x{m}" for v, m in pt.clusters))
    r.extend(certify_block_positive(W, cfg.restarts, seed=cfg.seed, tol=cfg.tolerance))
    return r


def suite_indecomposable(cfg: RunConfig) -> VerificationReport:
    k = cfg.k
    W = choi(Psi(k))
    r = certify_indecomposable(W, ppt_witness_state(k))
    want = Fraction(-(k - 1), k * k * (k + 1))
    c = r["negative-expectation"]
    c.expected = want
    r.add("expected-value", c.exact == want, exact=c.exact, expected=want)
    return r


def suite_atomic(cfg: RunConfig) -> VerificationReport:
    k = cfg.k
    r = certify_atomic(choi(Psi(k)), atomic_state(k))
    want = Fraction(-1, 7 * k)
    c = r["negative-expectation"]
    c.expected = want
    r.add("expected-value", c.exact == want, exact=c.exact, expected=want)
    return r


def suite_optimal(cfg: RunConfig) -> VerificationReport:
    return certify_optimal(choi(Psi(cfg.k)), spanning_family(cfg.k))


def suite_circulant(cfg: RunConfig) -> VerificationReport:
    d = 2 * cfg.k
    W = choi(Psi(cfg.k)).matrix
    r = VerificationReport()
    try:
        blocks = circulant_decompose(W, d)
    except NotCirculant as exc:
        r.add("decomposes", False, note=str(exc))
        return r
    r.add("decomposes", True, exact=Scalar(len(blocks)), expected=d)
    r.add("reassembles-exactly", circulant_reassemble(blocks, d) == W)
    return r


def suite_spa(cfg: RunConfig) -> VerificationReport:
    k, d = cfg.k, 2 * cfg.k
    r = eb_support_check(k)
    r["spa-threshold"].note = "trace-normalized"
    r["isotropic-root==boundary"].note += f"; swapped-parametrisation boundary is {swapped_isotropic_boundary(d)}"
    if cfg.normalization == CHOI_RAW:
        got = spa_threshold(choi(Psi(k)), CHOI_RAW)
        want = Fraction(d * d, d * d + 1)
        r.add("spa-threshold[choi-raw]", got == want, exact=Scalar(got), expected=want,
              note="raw Choi matrix in the mixture")
    return r


def cross_grid(k: int) -> list:
    b = breuer_ppt_bound(k)
    return [Fraction(0), b / 2, b]


def suite_cross(cfg: RunConfig) -> tuple:
    """Mutual detection of the Psi and Breuer-Hall witnesses; returns (report, table)."""
    k = cfg.k
    W, BH = choi(Psi(k)), choi(BreuerHall(k))
    grid = cross_grid(k)
    states = [("rho", ppt_witness_state(k)), ("D", atomic_state(k))]
    states += [(f"breuer({lam})", breuer_family(k, lam)) for lam in grid]
    table = mutual_detection_matrix([W, BH], [s for _, s in states])
    r = VerificationReport()
    if k == 2:
        r.add("witnesses-coincide", W.matrix == BH.matrix)
    bh_rho = table[1][0]
    r.add("breuer-hall-on-rho>=0", bh_rho >= 0, exact=bh_rho, float_value=float(bh_rho))
    for (name, S), val in zip(states[2:], table[0][2:]):
        r.add(f"{name}-ppt", bool(psd_certify_exact(partial_transpose(S.matrix, S.dims))))
        r.add(f"psi-on-{name}>=0", val >= 0, exact=val, float_value=float(val))
    rows = {"witnesses": ["psi", "breuer-hall"], "states": [n for n, _ in states],
            "values": [[str(v) if v is not None else None for v in row] for row in table]}
    return r, rows


SUITE_FUNCS = {
    "ew": suite_ew,
    "indecomposable": suite_indecomposable,
    "atomic": suite_atomic,
    "optimal": suite_optimal,
    "circulant": suite_circulant,
    "spa": suite_spa,
}


def run_suite(name: str, cfg: RunConfig) -> dict:
    names = ALL_SUITES if name == "all" else (name,)
    report = VerificationReport()
    extra = {}
    for n in names:
        if n == "cross":
            sub, extra["detection_matrix"] = suite_cross(cfg)
        else:
            sub = SUITE_FUNCS[n](cfg)
        report.extend(sub, prefix=f"{n}/")
    out = {"suite": name, "config": cfg.to_json(), "status": report.status}
    out.update(report.to_json())
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# rendering


def render_markdown(doc: dict) -> str:
    cfg = doc["config"]
    lines = [f"# witnessforge {doc['suite']} (k={cfg['k']})", "",
             f"status: **{doc['status']}**  seed={cfg['seed']} restarts={cfg['restarts']} "
             f"tol={cfg['tol']} normalization={cfg['normalization']}", "",
             "| check | status | exact | expected | float | note |",
             "|---|---|---|---|---|---|"]
    for c in doc["checks"]:
        lines.append("| {} | {} | {} | {} | {} | {} |".format(
            c["name"], c["status"], _short(c.get("exact", "")), c.get("expected", ""),
            "" if "float" not in c else f"{c['float']:.12g}", c.get("note", "").replace("|", "/")))
    if "detection_matrix" in doc:
        m = doc["detection_matrix"]
        lines += ["", "| witness | " + " | ".join(m["states"]) + " |", "|---" * (len(m["states"]) + 1) + "|"]
        for w, row in zip(m["witnesses"], m["values"]):
            lines.append(f"| {w} | " + " | ".join(v if v is not None else "n/a" for v in row) + " |")
    return "\n".join(lines) + "\n"


def _short(text: str, width: int = 32) -> str:
    return text if len(text) <= width else text[: width - 3] + "..."


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(doc: dict, fmt: str) -> str:
    return wio.dumps(doc) if fmt == "json" else render_markdown(doc)


# ---------------------------------------------------------------------------
# build


def build_object(kind: str, k: int, d: int | None, p, lam) -> dict:
    if kind == "witness-psi":
        return wio.witness_to_json(choi(Psi(k)))
    if kind == "witness-bh":
        return wio.witness_to_json(choi(BreuerHall(k)))
    if kind == "witness-reduction":
        return wio.witness_to_json(choi(Reduction(d or 2 * k)))
    if kind == "state-rho":
        return wio.state_to_json(ppt_witness_state(k))
    if kind == "state-d":
        return wio.state_to_json(atomic_state(k))
    if kind == "state-iso":
        if p is None:
            raise ValueError("state-iso needs --p")
        return wio.state_to_json(isotropic(d or 2 * k, p))
    if kind == "state-breuer":
        if lam is None:
            raise ValueError("state-breuer needs --lambda")
        return wio.state_to_json(breuer_family(k, lam))
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=2, help="half dimension, d = 2k (default 2)")
    p.add_argument("--out", help="write to this file instead of stdout")


def _add_run(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=NEGATIVITY_TOL, help="negativity cutoff")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--format", choices=("json", "markdown"), default="json")
    p.add_argument("--normalization", choices=NORMALIZATIONS, default=TRACE_NORMALIZED)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="witnessforge", description="Build and certify entanglement witnesses.")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="write a witness or state as exact JSON")
    b.add_argument("kind", choices=BUILD_KINDS)
    _add_common(b)
    b.add_argument("--d", type=int, help="local dimension for reduction/isotropic (default 2k)")
    b.add_argument("--p", type=_fraction, help="noise weight, e.g. 1/2")
    b.add_argument("--lambda", dest="lam", type=_fraction, help="mixing weight, e.g. 1/10")

    v = sub.add_parser("verify", help="run a certification suite")
    v.add_argument("suite", choices=SUITES)
    _add_common(v)
    _add_run(v)

    c = sub.add_parser("cross", help="mutual detection table for the two witness families")
    _add_common(c)
    _add_run(c)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "build":
            if args.k < 2:
                raise ValueError("k must be at least 2")
            doc = build_object(args.kind, args.k, args.d, args.p, args.lam)
            _emit(wio.dumps(doc), args.out)
            return 0
        cfg = RunConfig(args.k, args.tol, args.seed, args.restarts, args.format, args.normalization)
    except (ValueError, TypeError) as exc:
        parser.error(str(exc))
    suite = "cross" if args.command == "cross" else args.suite
    doc = run_suite(suite, cfg)
    _emit(_render(doc, cfg.output_format), args.out)
    return 0 if doc["status"] == PASS else 1


if __name__ == "__main__":
    sys.exit(main())
