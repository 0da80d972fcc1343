"""Command-line front end.

Every subcommand loads an instance file ``{"n", "r", "degrees", "forbidden"}``
and prints a versioned report. JSON reports have the shape::

    {"schema": 1, "command": ..., "inputs": {...}, "results": {...}, "rows": [...]}

``rows`` is the flat table also emitted by ``--format csv`` (see
``CSV_COLUMNS``). Integers beyond double precision, fractions and
high-precision reals are written as decimal strings. Reports contain no
timings, so identical configurations give byte-identical output.

``--budget`` bounds both the oracle search (nodes) and the sampler
(rejections per accepted sample).

Exit codes: 0 success, 2 invalid instance or arguments, 3 infeasible
instance, 4 budget or attempt limit exhausted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from hyperenum import formulas, oracle, sampler, switching
from hyperenum.hypercore import Instance, InvalidInstance, NonDivisible, validate_instance

SCHEMA_VERSION = 1
CSV_COLUMNS = ("quantity", "method", "value", "log_value", "stderr", "envelope_rho", "envelope_beta", "envelope_base")
REPORT_KEYS = ("schema", "command", "inputs", "results", "rows")
COMMANDS = ("exact", "formula", "prob", "expect", "sample", "switch-audit", "compare")

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 2, 3, 4
DEFAULT_SAMPLES = 10_000
_DOUBLE_EXACT = 2**53


class UsageError(ValueError):
    """A command-specific requirement is missing; maps to exit code 2."""


class Infeasible(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    instance_path: str
    format: str = "json"
    seed: Optional[int] = None
    samples: Optional[int] = None
    budget: Optional[int] = None
    threads: Optional[int] = None
    structure: Optional[str] = None
    out: Optional[str] = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.command == "expect" and self.structure is None:
            raise UsageError("expect needs --structure pm|hc")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise UsageError("--seed must fit in an unsigned 64-bit integer")
        for name in ("samples", "budget", "threads"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise UsageError(f"--{name} must be positive")

    @property
    def workers(self) -> int:
        return self.threads or 1

    @property
    def node_budget(self) -> int:
        return self.budget or oracle.DEFAULT_BUDGET

    @property
    def max_attempts(self) -> int:
        return self.budget or sampler.DEFAULT_MAX_ATTEMPTS


# --- value encoding ---------------------------------------------------------


def encode(value):
    """Convert a result value into plain JSON, keeping big numbers exact."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value if abs(value) <= _DOUBLE_EXACT else str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return value if math.isfinite(value) else str(value)
    if isinstance(value, mpmath.mpf):
        return mpmath.nstr(value, 20)
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    raise TypeError(f"cannot encode {type(value).__name__}")


def _log_of(value) -> Optional[mpmath.mpf]:
    if isinstance(value, (int, Fraction)):
        if value <= 0:
            return None
        with mpmath.workprec(formulas.PREC):
            return mpmath.log(value.numerator) - mpmath.log(value.denominator)
    if isinstance(value, float):
        return mpmath.log(value) if value > 0 else None
    return None


def _cell(value) -> str:
    if value is None:
        return ""
    encoded = encode(value)
    return encoded if isinstance(encoded, str) else repr(encoded)


class Report:
    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.results: dict = {}
        self.rows: list[dict] = []

    def row(self, quantity: str, method: str, value, *, log_value=None, stderr=None, envelope=None):
        if log_value is None:
            log_value = _log_of(value)
        self.rows.append(
            {
                "quantity": quantity,
                "method": method,
                "value": _cell(value),
                "log_value": _cell(log_value),
                "stderr": _cell(stderr),
                "envelope_rho": _cell(envelope.rho) if envelope else "",
                "envelope_beta": _cell(envelope.beta) if envelope else "",
                "envelope_base": _cell(envelope.base_term) if envelope else "",
            }
        )

    def formula_row(self, quantity: str, res: formulas.FormulaResult, method: str = "formula"):
        self.row(quantity, method, res.value, log_value=res.log_value, envelope=res.envelope)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "inputs": encode(self.inputs),
            "results": encode(self.results),
            "rows": self.rows,
        }

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2) + "\n"
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()


def parse_report(text: str, fmt: str = "json"):
    """Parse a rendered report and check it against the schema."""
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return list(reader)
    data = json.loads(text)
    missing = [k for k in REPORT_KEYS if k not in data]
    if missing:
        raise ValueError(f"report misses keys {missing}")
    if data["schema"] != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema {data['schema']}")
    if data["command"] not in COMMANDS:
        raise ValueError(f"unknown command {data['command']!r}")
    for row in data["rows"]:
        if tuple(row) != CSV_COLUMNS:
            raise ValueError(f"row has columns {tuple(row)}")
    return data


# --- commands ---------------------------------------------------------------


def _inputs(cfg: RunConfig, inst: Instance) -> dict:
    d = {"instance": inst.to_json(), "budget": cfg.node_budget, "threads": cfg.workers}
    if cfg.command in ("sample", "compare"):
        d["seed"] = cfg.seed or 0
        d["samples"] = cfg.samples
    if cfg.structure is not None:
        d["structure"] = cfg.structure
    return d


def _require_containment(inst: Instance) -> None:
    if not inst.containment_feasible:
        bad = [i for i, (a, b) in enumerate(zip(inst.k, inst.X.x)) if b > a]
        raise Infeasible(f"forbidden degree exceeds k at vertices {bad}")


def _rel_diff(approx, exact) -> Optional[mpmath.mpf]:
    if exact is None or exact == 0 or approx is None:
        return None
    with mpmath.workprec(formulas.PREC):
        e = mpmath.mpf(exact.numerator) / exact.denominator if isinstance(exact, Fraction) else mpmath.mpf(exact)
        return (mpmath.mpf(approx) - e) / e


def cmd_exact(cfg: RunConfig, inst: Instance, rep: Report) -> None:
    k, r, X = inst.k.degrees, inst.r, inst.X.edges
    avoiding = oracle.count_avoiding(k, r, X, budget=cfg.node_budget, workers=cfg.workers)
    total = oracle.count_all(k, r, budget=cfg.node_budget, workers=cfg.workers) if X else avoiding
    rep.results.update(count=avoiding, count_all=total)
    rep.row("count_avoiding", "oracle", avoiding)
    rep.row("count_all", "oracle", total)
    if X and inst.containment_feasible:
        containing = oracle.count_containing(k, r, X, budget=cfg.node_budget)
        rep.results["count_containing"] = containing
        rep.row("count_containing", "oracle", containing)
    if total:
        p = Fraction(avoiding, total)
        rep.results["prob_avoid"] = p
        rep.row("prob_avoid", "oracle", p)


def cmd_formula(cfg: RunConfig, inst: Instance, rep: Report) -> None:
    res = formulas.log_avoiding_formula(inst.k, inst.r, inst.X)
    rep.results["count"] = res.to_json()
    rep.formula_row("count_avoiding", res)
    if inst.X.t and inst.containment_feasible:
        cont = formulas.containment_probability_formula(inst.k, inst.r, inst.X)
        rep.results["prob_contain"] = cont.to_json()
        rep.formula_row("prob_contain", cont)
    elif inst.X.t:
        rep.results["notes"] = ["containment skipped: forbidden degree exceeds k"]


def cmd_prob(cfg: RunConfig, inst: Instance, rep: Report) -> None:
    _require_containment(inst)
    k, r, X = inst.k.degrees, inst.r, inst.X.edges
    p_avoid = oracle.prob_avoid_exact(k, r, X, budget=cfg.node_budget)
    p_contain = oracle.prob_contain_exact(k, r, X, budget=cfg.node_budget)
    rep.results.update(prob_avoid=p_avoid, prob_contain=p_contain)
    rep.row("prob_avoid", "oracle", p_avoid)
    rep.row("prob_contain", "oracle", p_contain)
    xis = []
    for e in X:
        try:
            xi = oracle.xi_exact(k, r, e, budget=cfg.node_budget)
        except oracle.DegenerateDenominator:
            xi = None
        xis.append({"edge": list(e), "xi": xi})
        rep.row(f"xi[{'-'.join(map(str, e))}]", "oracle", xi)
    rep.results["xi"] = xis
    if xis and all(d["xi"] is not None for d in xis):
        lower = 1 - sum(d["xi"] for d in xis)
        rep.results["sandwich_lower"] = lower
        rep.results["sandwich_ok"] = lower <= p_avoid <= 1
    if X:
        cont = formulas.containment_probability_formula(inst.k, r, inst.X)
        rep.results["prob_contain_formula"] = cont.to_json()
        rep.results["prob_contain_rel_diff"] = _rel_diff(cont.value, p_contain)
        rep.formula_row("prob_contain", cont)


def _regular_k(inst: Instance) -> Optional[int]:
    ks = set(inst.k.degrees)
    return ks.pop() if len(ks) == 1 else None


def _expectation_formulas(inst: Instance, structure: str):
    kreg = _regular_k(inst)
    if kreg is None:
        return None, None, "formula skipped: degree sequence is not regular"
    if structure == "pm":
        asym = formulas.expected_pm_formula(inst.n, inst.r, kreg)
    else:
        asym = formulas.expected_hc_formula(inst.n, inst.r, kreg)
    factorial_form = formulas.expected_structure_factorial_form(inst.n, inst.r, kreg, structure)
    return asym, factorial_form, None


def cmd_expect(cfg: RunConfig, inst: Instance, rep: Report) -> None:
    structure = oracle.Structure(cfg.structure)
    quantity = f"expectation_{cfg.structure}"
    exact = oracle.expectation_exact(inst.k.degrees, inst.r, structure, budget=cfg.node_budget)
    rep.results["exact"] = exact
    rep.row(quantity, "oracle", exact)
    asym, factorial_form, note = _expectation_formulas(inst, cfg.structure)
    degenerate = cfg.structure == "pm" and all(d == 1 for d in inst.k.degrees)
    if asym is not None:
        degenerate = degenerate or asym.degenerate
        rep.results["formula"] = asym.to_json()
        rep.results["factorial_form"] = factorial_form.to_json()
        rep.results["formula_rel_diff"] = _rel_diff(asym.value, exact)
        rep.formula_row(quantity, asym)
        rep.formula_row(quantity, factorial_form, method="factorial_form")
    else:
        rep.results["notes"] = [note]
    rep.results["degenerate"] = degenerate


def _sample_rows(cfg: RunConfig, inst: Instance, rep: Report) -> dict:
    seed = cfg.seed or 0
    samples = cfg.samples or DEFAULT_SAMPLES
    est = sampler.estimate_avoid_probability(
        inst.k.degrees, inst.r, inst.X.edges, samples, seed, workers=cfg.workers, max_attempts=cfg.max_attempts
    )
    out = {"prob_avoid": est.to_json()}
    rep.row("prob_avoid", "monte_carlo", est.estimate, stderr=est.stderr)
    if cfg.structure is not None:
        est_s = sampler.estimate_expectation(
            inst.k.degrees, inst.r, cfg.structure, samples, seed, workers=cfg.workers, max_attempts=cfg.max_attempts
        )
        out[f"expectation_{cfg.structure}"] = est_s.to_json()
        rep.row(f"expectation_{cfg.structure}", "monte_carlo", est_s.estimate, stderr=est_s.stderr)
    return out


def cmd_sample(cfg: RunConfig, inst: Instance, rep: Report) -> None:
    rep.inputs["samples"] = cfg.samples or DEFAULT_SAMPLES
    rep.results.update(_sample_rows(cfg, inst, rep))


def cmd_switch_audit(cfg: RunConfig, inst: Instance, rep: Report) -> None:
    if not inst.X.t:
        raise UsageError("switch-audit needs at least one edge in 'forbidden'")
    audits = []
    for e in inst.X.edges:
        audit = switching.audit_bounds(inst.k, inst.r, e, budget=cfg.node_budget, keep_rows=False)
        summary = audit.summary()
        audits.append(summary)
        tag = "-".join(map(str, e))
        rep.row(f"max_star_size[{tag}]", "switching", audit.max_star_size)
        rep.row(f"star_bound[{tag}]", "switching", audit.star_bound)
        rep.row(f"max_legal_reverse[{tag}]", "switching", audit.max_legal_reverse.get("inverse", 0))
        rep.row(f"reverse_bound[{tag}]", "switching", audit.reverse_bound)
        rep.row(f"xi[{tag}]", "oracle", Fraction(audit.xi) if audit.xi is not None else None)
        rep.row(f"xi_bound[{tag}]", "switching", audit.xi_switching_bound)
    rep.results["audits"] = audits
    rep.results["all_ok"] = all(a["bound_a_ok"] and a["bound_b_ok"] and a["identity_ok"] and a["unclassified"] == 0
                                for a in audits)


def cmd_compare(cfg: RunConfig, inst: Instance, rep: Report) -> None:
    _require_containment(inst)
    k, r, X = inst.k.degrees, inst.r, inst.X.edges
    budget = cfg.node_budget
    total = oracle.count_all(k, r, budget=budget, workers=cfg.workers)
    avoiding = oracle.count_avoiding(k, r, X, budget=budget, workers=cfg.workers) if X else total
    residual = (inst.k - inst.X.x).degrees
    containing = oracle.count_containing(k, r, X, budget=budget, check=True)
    via_residual = oracle.count_avoiding(residual, r, X, budget=budget)
    rep.results["exact"] = {"count_all": total, "count_avoiding": avoiding, "count_containing": containing}
    rep.results["duality_ok"] = containing == via_residual
    rep.row("count_all", "oracle", total)
    rep.row("count_avoiding", "oracle", avoiding)
    rep.row("count_containing", "oracle", containing)

    count_f = formulas.log_count_formula(inst.k, r)
    rep.results["formula"] = {"count_all": count_f.to_json()}
    rep.formula_row("count_all", count_f)
    diffs = {"count_all": _rel_diff(count_f.value, total)}
    if total and X:
        cont_f = formulas.containment_probability_formula(inst.k, r, inst.X)
        p_contain = Fraction(containing, total)
        rep.results["exact"]["prob_contain"] = p_contain
        rep.results["formula"]["prob_contain"] = cont_f.to_json()
        rep.row("prob_contain", "oracle", p_contain)
        rep.formula_row("prob_contain", cont_f)
        diffs["prob_contain"] = _rel_diff(cont_f.value, p_contain)
    if cfg.samples and total:
        mc = _sample_rows(cfg, inst, rep)
        rep.results["monte_carlo"] = mc
        p_avoid = Fraction(avoiding, total)
        est = mc["prob_avoid"]
        diffs["prob_avoid_monte_carlo"] = _rel_diff(est["estimate"], p_avoid)
        rep.results["monte_carlo_z"] = (
            (est["estimate"] - float(p_avoid)) / est["stderr"] if est["stderr"] > 0 else None
        )
    rep.results["relative_difference"] = diffs


HANDLERS = {
    "exact": cmd_exact,
    "formula": cmd_formula,
    "prob": cmd_prob,
    "expect": cmd_expect,
    "sample": cmd_sample,
    "switch-audit": cmd_switch_audit,
    "compare": cmd_compare,
}

INFEASIBLE_ERRORS = (
    Infeasible,
    NonDivisible,
    formulas.InfeasibleContainment,
    formulas.DegenerateDenominator,
    oracle.EmptyClass,
    oracle.DegenerateCycle,
)
BUDGET_ERRORS = (oracle.InstanceTooLarge, sampler.AttemptsExhausted)


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one command; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg.validate()
        inst = Instance.load(cfg.instance_path)
    except (UsageError, InvalidInstance) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: cannot read instance: {exc}", file=stderr)
        return EXIT_INVALID
    report = validate_instance(inst)
    if report.violations:
        print("infeasible: " + "; ".join(report.violations), file=stderr)
        return EXIT_INFEASIBLE
    rep = Report(cfg.command, _inputs(cfg, inst))
    try:
        HANDLERS[cfg.command](cfg, inst, rep)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except INFEASIBLE_ERRORS as exc:
        print(f"infeasible: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INFEASIBLE
    except BUDGET_ERRORS as exc:
        print(f"budget exhausted: {exc}", file=stderr)
        return EXIT_BUDGET
    text = rep.render(cfg.format)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperenum", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, help="sampler seed (unsigned 64-bit, default 0)")
        p.add_argument("--samples", type=int, help="Monte Carlo sample count")
        p.add_argument("--budget", type=int, help="oracle node budget; also caps sampler attempts per sample")
        p.add_argument("--threads", type=int, help="worker processes")
        p.add_argument("--out", help="write the report here instead of stdout")
        choices = ("pm", "hc")
        p.add_argument("--structure", choices=choices, required=name == "expect",
                       help="perfect matchings (pm) or loose Hamilton cycles (hc)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        instance_path=args.instance,
        format=args.format,
        seed=args.seed,
        samples=args.samples,
        budget=args.budget,
        threads=args.threads,
        structure=args.structure,
        out=args.out,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
