"""Command line interface: verification suites and table emitters.

Every table row carries an ``anchor`` column naming the result it checks.
Output is deterministic for a fixed configuration, and any nonzero residual
or failed verdict makes the exit code nonzero.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

import sympy

from . import cohomology as co
from .conformal import ResonanceError, b_bruteforce, b_closed_form, conformal_quantize, conformal_symbol
from .operators import SuperOp
from .scalars import HalfInt, PoleError, Scalar, sym
from .superline import DensityElement, SuperPoly
from .verification import SUITES, VerifyConfig, _Sampler, run_suite

SCHEMA_VERSION = "1.0"
FORMATS = ("json", "csv", "text")
MODES = ("line", "circle")


@dataclass(frozen=True)
class RunConfig:
    depth: int = 8
    weight_cutoff: Fraction = Fraction(8)
    sample_count: int = 20
    seed: int = 1729
    output_format: str = "json"
    mode: str = "line"

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.sample_count < 0:
            raise ValueError("sample_count must be nonnegative")
        if (2 * Fraction(self.weight_cutoff)).denominator != 1:
            raise ValueError("weight_cutoff must be a half-integer")
        if self.output_format not in FORMATS:
            raise ValueError(f"output_format must be one of {FORMATS}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        object.__setattr__(self, "weight_cutoff", Fraction(self.weight_cutoff))

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        data = json.loads(Path(path).read_text())
        version = data.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValueError(f"config schema {version} is not {SCHEMA_VERSION}")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "weight_cutoff" in data:
            data["weight_cutoff"] = Fraction(str(data["weight_cutoff"]))
        return cls(**data)

    def verify_config(self) -> VerifyConfig:
        return VerifyConfig(seed=self.seed, sample_count=self.sample_count, depth=self.depth,
                            weight_cutoff=int(self.weight_cutoff))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weight_cutoff"] = str(self.weight_cutoff)
        return d


class CliError(Exception):
    """A request outside what the command can answer; reported with exit code 2."""


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _document(command: str, cfg: RunConfig, rows: list[dict], passed: bool, extra: dict | None = None) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "config": cfg.to_dict(),
           "passed": passed, "rows": rows}
    if extra:
        doc.update(extra)
    return doc


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    rows = doc["rows"]
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(r.get(k, "")) for k in cols})
        return buf.getvalue()
    lines = [f"# {doc['command']}  passed={doc['passed']}"]
    for r in rows:
        lines.append("  ".join(f"{k}={_cell(r[k])}" for k in cols if k in r))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, sort_keys=True, ensure_ascii=False)
    return str(v)


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def parse_half(text: str) -> Fraction:
    value = Fraction(text)
    if (2 * value).denominator != 1:
        raise argparse.ArgumentTypeError(f"{text} is not a half-integer")
    return value


def parse_scalar(text: str) -> Scalar:
    return Scalar.parse(text)


_SLOT = re.compile(r"\[(?P<G>[^\]]*)\]\s*[·*]?\s*(?:D̄|Dbar)\^\(?(?P<z>[^)_\s]+)\)?_(?P<m>[01])")


def parse_superpoly(text: str, circle: bool = False) -> SuperPoly:
    """Parse ``G(x, xi)`` with ``xi^2 = 0``; scalar symbols may appear in the coefficients."""
    x, xi = sympy.Symbol("x"), sympy.Symbol("xi")
    names = {"x": x, "xi": xi, "ξ": xi, "lam": sympy.Symbol("lambda")}
    expr = sympy.expand(sympy.sympify(re.sub(r"\blambda\b", "lam", text.replace("ξ", "xi")), locals=names))
    terms: dict[tuple[int, int], Scalar] = {}
    for term in sympy.Add.make_args(expr):
        coeff, a, n = sympy.Integer(1), 0, 0
        for factor in sympy.Mul.make_args(term):
            base, exp = factor.as_base_exp()
            if base == xi:
                a += int(exp)
            elif base == x:
                n += int(exp)
            else:
                coeff *= factor
        if a > 1:
            continue
        key = (a, n)
        val = Scalar.from_sympy(coeff)
        terms[key] = terms[key] + val if key in terms else val
    if any(n < 0 for _, n in terms) and not circle:
        raise CliError("negative powers of x need --mode circle")
    return SuperPoly(terms, circle=circle)


def parse_operator(text: str, lam: Scalar, p: Scalar, circle: bool = False) -> SuperOp:
    """Parse ``[G_0]*Dbar^(z)_m + [G_1]*Dbar^(z-1)_(m-1) + ...``; orders must step down by one."""
    slots = [(m.group("G"), Scalar.parse(m.group("z")), int(m.group("m"))) for m in _SLOT.finditer(text)]
    if not slots:
        raise CliError("expected terms of the form [G]*Dbar^(z)_m")
    top = max(slots, key=lambda t: _order_key(t[1]))
    z0, m0 = top[1], top[2]
    coeffs: dict[int, SuperPoly] = {}
    for G, z, m in slots:
        gap = z0 - z
        if not gap.is_constant() or gap.as_fraction().denominator != 1 or gap.as_fraction() < 0:
            raise CliError("slot orders must differ from the top order by natural numbers")
        J = int(gap.as_fraction())
        if (m0 - J - m) % 2:
            raise CliError(f"lower index of slot {J} must be {(m0 - J) % 2}")
        poly = parse_superpoly(G, circle)
        coeffs[J] = coeffs[J] + poly if J in coeffs else poly
    n = max(coeffs) + 1
    return SuperOp(lam, p, z0, m0, [coeffs.get(J, SuperPoly.zero()) for J in range(n)])


def _order_key(z: Scalar):
    return z.as_fraction() if z.is_constant() else Fraction(0)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

_L, _P, _S = sym("lambda"), sym("p"), sym("s")


def _b_row(d: Fraction, m: int, lam, p, s, symbolic: bool) -> dict:
    r = s + d
    row = {"anchor": "b-coefficients", "r_minus_s": str(d), "m": m}
    if not symbolic:
        row.update({"lambda": str(lam), "p": str(p), "s": str(s)})
    if d in (Fraction(1, 2), Fraction(1)):
        row["anchor"] = "subdiagonal-vanishing"
        oracle = b_bruteforce(r, s, m, lam, p, "matrix")
        row.update(closed_form="0", oracle=str(oracle), residual=str(oracle))
        return row
    if d <= Fraction(5, 2):
        closed = b_closed_form(r, s, m, lam, p)
        oracle = b_bruteforce(r, s, m, lam, p, "assembly" if symbolic else "matrix")
        row.update(closed_form=str(closed), oracle=str(oracle), residual=str(closed - oracle))
        return row
    a = b_bruteforce(r, s, m, lam, p, "assembly")
    b = b_bruteforce(r, s, m, lam, p, "step")
    row.update(closed_form="", oracle=str(a), residual=str(a - b))
    return row


def cmd_b_table(args, cfg: RunConfig) -> dict:
    ms = (0, 1) if args.m == "both" else (int(args.m),)
    rows = []
    for d in args.rs:
        if d <= 0:
            raise CliError("r - s must be positive")
        for m in ms:
            if args.lp_mode == "symbolic":
                try:
                    rows.append(_b_row(d, m, _L, _P, _S, True))
                except (ResonanceError, PoleError) as exc:
                    raise CliError(f"resonant request: {exc}") from exc
                continue
            smp = _Sampler(cfg.seed + int(4 * d) + m)
            done = 0
            while done < cfg.sample_count:
                lam, p, s = smp.rational(), smp.rational(), smp.rational()
                try:
                    rows.append(_b_row(d, m, lam, p, s, False))
                except (ResonanceError, PoleError):
                    continue
                done += 1
    passed = all(r["residual"] == "0" for r in rows)
    return _document("b-table", cfg, rows, passed)


def cmd_verify(args, cfg: RunConfig) -> dict:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for n in names:
        if n not in SUITES:
            raise CliError(f"unknown suite {n!r}; choose from all, {', '.join(SUITES)}")
    rows, results = [], []
    for n in names:
        res = run_suite(n, cfg.verify_config())
        results.append(res)
        for c in res.checks:
            rows.append({"anchor": res.anchor, "suite": n, "check": c.name, "passed": c.passed, "detail": c.detail})
    passed = all(r.passed for r in results)
    if args.dump:
        out = Path(args.dump)
        out.mkdir(parents=True, exist_ok=True)
        for res in results:
            if not res.passed:
                (out / f"{res.key}.json").write_text(
                    json.dumps({"suite": res.key, "failures": [asdict(c) for c in res.failures()]}, indent=2,
                               ensure_ascii=False) + "\n")
    summary = {"suites": {r.key: r.passed for r in results}}
    return _document("verify", cfg, rows, passed, summary)


def cmd_classify(args, cfg: RunConfig) -> dict:
    kind = args.kind
    if kind == "transvectant":
        if len(args.values) != 3:
            raise CliError("transvectant needs MU NU K")
        mu, nu = Fraction(args.values[0]), Fraction(args.values[1])
        k = parse_half(args.values[2])
        if k < 0 or k > 3:
            raise CliError("outside the tabulated range 0 <= k <= 3")
        try:
            J = co.transvectant_solve(mu, nu, k, cutoff=cfg.depth)
            invariant = co.transvectant_classify(mu, nu, k, cutoff=cfg.depth)
        except co.NonUniqueTransvectant as exc:
            raise CliError(f"outside the tabulated range: {exc}") from exc
        row = {"anchor": "transvectant-invariance", "mu": str(mu), "nu": str(nu), "k": str(k),
               "solution_dimension": J.nullity, "verdict": "invariant" if invariant else "not invariant",
               "conditions": [str(v) for _, v in co.transvectant_conditions(mu, nu, k)]
               if not co._resonant_pair(mu, nu) else "diagonal resonant: direct e_3/2 test"}
        return _document("classify", cfg, [row], True)
    if kind == "ext1":
        if len(args.values) not in (1, 2):
            raise CliError("ext1 needs P [LAMBDA]")
        p = parse_half(args.values[0])
        lam = args.values[1] if len(args.values) == 2 else None
        rep = co.ext1_classify(lam, p)
        return _document("classify", cfg, [{"anchor": "ext1-dimensions", **rep.to_dict()}], True)
    if kind == "ext2":
        if len(args.values) not in (1, 2):
            raise CliError("ext2 needs P [LAMBDA]")
        p = parse_half(args.values[0])
        lam = args.values[1] if len(args.values) == 2 else None
        rep = co.ext2_dimension(lam, p)
        row = {"anchor": "ext2-dimensions", **rep.to_dict()}
        if not rep.covered:
            row["label"] = "unknown"
        return _document("classify", cfg, [row], rep.covered)
    if kind == "extension":
        if len(args.values) < 2:
            raise CliError("extension needs LAMBDA P1 [P2 [P3]]")
        lam = args.values[0]
        ps = tuple(parse_half(v) for v in args.values[1:])
        rep = co.extension_report(lam, ps)
        row = {"anchor": "extension-classification", **rep.to_dict()}
        if not rep.covered:
            row["label"] = "out of table"
        return _document("classify", cfg, [row], rep.covered)
    raise CliError(f"unknown classification {kind!r}")


def cmd_symbol(args, cfg: RunConfig) -> dict:
    lam, p = parse_scalar(args.lam), parse_scalar(args.p)
    circle = cfg.mode == "circle"
    if args.direction == "cs":
        T = parse_operator(args.text, lam, p, circle)
        comps = conformal_symbol(T, method=args.method, depth=cfg.depth)
        back = conformal_quantize(comps, lam, p, method="table") if T.exact and not circle else None
        rows = [{"anchor": "conformal-symbol", "slot": J, "weight": str(v.weight), "parity_shift": v.shift,
                 "component": str(v.body)} for J, v in enumerate(comps)]
        roundtrip = None if back is None else (back.padded(T.z0) - T).is_zero() if not back.is_zero() else T.is_zero()
        extra = {"operator": str(T), "roundtrip": roundtrip}
        return _document("symbol", cfg, rows, roundtrip is not False, extra)
    # cq: components separated by ';', starting at the given weight
    weight = parse_scalar(args.weight)
    parts = [t.strip() for t in args.text.split(";")]
    comps = [DensityElement(weight + Fraction(J, 2), parse_superpoly(t or "0", circle), (args.shift + J) % 2)
             for J, t in enumerate(parts)]
    T = conformal_quantize(comps, lam, p, method=args.method)
    back = conformal_symbol(T) if not T.is_zero() else comps
    ok = all((a.body - b.body).is_zero() for a, b in zip(comps, back))
    rows = [{"anchor": "conformal-quantization", "slot": J, "order": str(T.slot_order(J)[0]),
             "lower_index": T.slot_order(J)[1], "coefficient": str(G)} for J, G in enumerate(T.coeffs)]
    return _document("symbol", cfg, rows, ok, {"operator": str(T), "roundtrip": ok})


def _cochain(name: str, args):
    lam = parse_scalar(args.lam) if args.lam else sym("lambda")
    if name in ("theta", "alpha", "beta"):
        return co.named_cocycle(name)
    if args.p is None:
        raise CliError(f"{name} needs --p")
    if name == "beta_bar":
        return co.beta_bar(args.p, lam)
    if name == "sbol":
        return co.sbol_cochain(args.p, lam)
    if name == "alpha_bar":
        return co.alpha_bar(args.p, lam, extend=True)
    raise CliError(f"unknown cochain {name!r}")


def cmd_cohomology(args, cfg: RunConfig) -> dict:
    phi = _cochain(args.cochain, args)
    if args.cup:
        phi = co.cup(phi, _cochain(args.cup, args))
    if args.coboundary:
        phi = co.coboundary(phi)
    cutoff = HalfInt.of(cfg.weight_cutoff)
    rows = []
    for w in co.canonical_words(phi.degree, cutoff):
        v = phi.value(w)
        if not co._is_zero(v):
            rows.append({"anchor": "density-cohomology", "word": [str(i) for i in w], "value": str(v)})
    extra = {"cochain": phi.name, "degree": phi.degree, "parity": phi.parity, "module": str(phi.module)}
    return _document("cohomology", cfg, rows, True, extra)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="supercontact", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file with RunConfig fields and schema_version")
    ap.add_argument("--depth", type=int)
    ap.add_argument("--weight-cutoff", type=parse_half)
    ap.add_argument("--sample-count", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--format", dest="output_format", choices=FORMATS)
    ap.add_argument("--mode", choices=MODES)
    ap.add_argument("--output", help="write to this file instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("b-table", help="b^m_rs closed forms against the independent routes")
    b.add_argument("--rs", type=parse_half, nargs="+", default=[Fraction(3, 2), Fraction(2), Fraction(5, 2)])
    b.add_argument("--m", choices=("0", "1", "both"), default="both")
    b.add_argument("--lp-mode", choices=("symbolic", "points"), default="symbolic")
    b.set_defaults(func=cmd_b_table)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", help="suite name or 'all'")
    v.add_argument("--dump", help="directory for failure artifacts")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("classify", help="transvectant, ext1, ext2 or extension verdicts")
    c.add_argument("kind", choices=("transvectant", "ext1", "ext2", "extension"))
    c.add_argument("values", nargs="+")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("symbol", help="conformal symbol or quantization of a text operator")
    s.add_argument("direction", choices=("cs", "cq"))
    s.add_argument("text", help="operator '[G]*Dbar^(z)_m + ...' or ';'-separated components")
    s.add_argument("--lam", default="lambda")
    s.add_argument("--p", default="p")
    s.add_argument("--weight", default="0", help="weight of the first component (cq)")
    s.add_argument("--shift", type=int, default=0, help="parity shift of the first component (cq)")
    s.add_argument("--method", choices=("table", "lowest_weight"), default="table")
    s.set_defaults(func=cmd_symbol)

    h = sub.add_parser("cohomology", help="values of a cochain on words up to the weight cutoff")
    h.add_argument("cochain", choices=("theta", "alpha", "beta", "beta_bar", "alpha_bar", "sbol"))
    h.add_argument("--cup", choices=("theta", "alpha", "beta", "beta_bar", "alpha_bar", "sbol"))
    h.add_argument("--coboundary", action="store_true")
    h.add_argument("--p", type=parse_half)
    h.add_argument("--lam")
    h.set_defaults(func=cmd_cohomology)
    return ap


def resolve_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {k: getattr(args, k) for k in ("depth", "weight_cutoff", "sample_count", "seed", "output_format", "mode")
                 if getattr(args, k) is not None}
    return replace(cfg, **overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        doc = args.func(args, cfg)
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render(doc, cfg.output_format)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if doc["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
