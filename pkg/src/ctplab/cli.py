"""Command line for building, solving, checking, and exporting instances.

Subcommands:

* `qbf` evaluates a QDIMACS game file.
* `reduce` translates a game file or a builtin graph into an instance
  plus a certificate file.
* `gadget` materializes a baiting or observation harness, optionally
  exporting a reference walker as a decision tree.
* `solve` finds the optimal expected cost of an instance, or evaluates a
  decision-tree policy file against it.
* `export-dot` renders an instance as Graphviz text.
* `verify` runs a named check suite and reports one line per check.

Exit codes: 0 success, 1 verify checks failed, 2 bad input, 3 an
enumeration or step cap was exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from .gadgets import (
    GadgetParameterError,
    bailout_policy_cost,
    baiting_harness,
    detour_price,
    forward_policy_cost,
    observation_harness,
    section_count,
)
from .model import (
    Cost,
    CtpInstance,
    EnumerationCapError,
    InstanceBuilder,
    InvalidInstanceError,
    SplitMix64,
    Variant,
    as_fraction,
    load_instance,
    save_instance,
)
from .policy import (
    Action,
    IllegalActionError,
    InfeasibleWeatherError,
    PolicyLoopError,
    evaluate_exact,
    export_decision_tree,
    load_policy,
    reference_policy,
    simulate,
)
from .reductions import (
    CertificateError,
    CoverSensingPolicy,
    certificate,
    has_vertex_cover,
    named_vc,
    normalize_half_prob,
    qbf_to_ctp,
    qbf_to_ctpdep,
    reference_trip,
    vc_to_sensing,
)
from .solve import (
    QbfFormula,
    decompose_into_paths,
    CommittingPolicy,
    parse_qdimacs,
    qbf_eval,
    solve,
    solve_dependent,
    solve_disjoint_bruteforce,
    solve_independent,
    solve_sensing,
)

DEFAULT_PRECISION = 20
DEFAULT_SEED = 20260819

# Winnable and unwinnable games small enough to solve exactly, used by
# the ctpdep suite and the acceptance checks.
GAME_BATTERY: tuple[tuple[QbfFormula, bool], ...] = (
    (QbfFormula.of(2, ((1, 2),)), True),
    (QbfFormula.of(2, ((1,), (-1,))), False),
    (QbfFormula.of(2, ((1, 2), (-1, -2))), True),
    (QbfFormula.of(2, ((-1, 2), (1, -2), (1, 2))), False),
    (QbfFormula.of(2, ((2,), (-1, 2), (1, 2))), True),
    (QbfFormula.of(4, ((1, 2), (3, 4))), True),
    (QbfFormula.of(4, ((1, 3),)), False),
    (QbfFormula.of(4, ((3,), (-3,))), False),
)


# ---------------------------------------------------------------------------
# rendering

def render_rational(value: Fraction, precision: int = DEFAULT_PRECISION,
                    ) -> str:
    """Rational as `num/den (decimal)` with `precision` significant digits."""
    with localcontext() as ctx:
        ctx.prec = max(1, precision)
        decimal = Decimal(value.numerator) / Decimal(value.denominator)
    text = str(decimal)
    if "E" not in text and "e" not in text and "." not in text:
        text += ".0"
    return f"{value.numerator}/{value.denominator} ({text})"


def render_cost(cost: Cost, precision: int = DEFAULT_PRECISION) -> str:
    if cost.is_infinite:
        return "inf"
    return render_rational(cost.fraction, precision)


def _dot_quantity(value: Fraction, precision: int) -> str:
    if value.denominator <= 1024:
        return f"{value.numerator}/{value.denominator}"
    with localcontext() as ctx:
        ctx.prec = max(1, precision)
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def instance_to_dot(instance: CtpInstance,
                    precision: int = DEFAULT_PRECISION) -> str:
    """Graphviz text: dashed uncertain edges labeled `cost|chance`."""
    directed = any(e.directed for e in instance.edges)
    kind, op = ("digraph", "->") if directed else ("graph", "--")
    lines = [f"{kind} ctp {{", "  rankdir=LR;"]
    for vertex in instance.vertices:
        if vertex == instance.s:
            lines.append(f'  "{vertex}" [shape=doublecircle];')
        elif vertex == instance.t:
            lines.append(f'  "{vertex}" [shape=doubleoctagon];')
    for e in instance.edges:
        label = ("inf" if e.cost.is_infinite
                 else _dot_quantity(e.cost.fraction, precision))
        attrs = []
        if e.uncertain:
            label += f"|{_dot_quantity(e.block_p, precision)}"
            attrs.append("style=dashed")
        if directed and not e.directed:
            attrs.append("dir=none")
        attrs.insert(0, f'label="{label}"')
        lines.append(f'  "{e.tail}" {op} "{e.head}" [{", ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# toy generators shared by the oracle suite and the test battery

def random_disjoint_instance(stream: SplitMix64, max_paths: int = 4,
                             max_edges: int = 3,
                             max_uncertain: int = 10) -> CtpInstance:
    """Random instance made of internally disjoint routes from s to t.

    The last route is always sure, so the optimum is finite. Blocking
    chances are dyadic, which also makes these instances valid inputs
    for the normal-form rewrite.
    """
    chances = (Fraction(1, 2), Fraction(1, 4), Fraction(3, 4),
               Fraction(3, 8), Fraction(7, 8))
    builder = InstanceBuilder(Variant.INDEPENDENT)
    builder.set_endpoints("s", "t")
    paths = 2 + stream.uniform_below(max_paths - 1)
    uncertain = 0
    for p in range(paths):
        edges = 1 + stream.uniform_below(max_edges)
        prev = "s"
        for j in range(edges):
            nxt = "t" if j == edges - 1 else f"p{p}v{j}"
            cost = Fraction(stream.uniform_below(9), 2)
            block = Fraction(0)
            if p < paths - 1 and uncertain < max_uncertain:
                if stream.uniform_below(3):
                    block = chances[stream.uniform_below(len(chances))]
                    uncertain += 1
            builder.add_edge(prev, nxt, cost, id=f"p{p}e{j}", block_p=block)
            prev = nxt
    return builder.build()


# ---------------------------------------------------------------------------
# verify suites

@dataclass
class CheckResult:
    id: str
    status: str
    expected: str
    actual: str


@dataclass
class VerifyReport:
    suite: str
    checks: list[CheckResult]
    elapsed: float

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "elapsed_seconds": round(self.elapsed, 3),
            "passed": self.passed,
            "checks": [vars(c) for c in self.checks],
        }


def _show(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if value is None:
        return "none"
    return str(value)


class _Checker:
    def __init__(self) -> None:
        self.checks: list[CheckResult] = []

    def equal(self, cid: str, expected, actual) -> None:
        status = "pass" if expected == actual else "fail"
        self.checks.append(CheckResult(cid, status, _show(expected),
                                       _show(actual)))

    def holds(self, cid: str, condition: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(
            cid, "pass" if condition else "fail", "holds",
            detail or ("holds" if condition else "fails")))


def _suite_gadgets(args) -> list[CheckResult]:
    out = _Checker()
    lengths = ([as_fraction(args.L)] if args.L
               else [Fraction(3, 2), Fraction(2)])
    for length in lengths:
        instance, handle = baiting_harness(length)
        result = solve_independent(instance)
        expected = forward_policy_cost(length, length)
        out.equal(f"solver-matches-forward-walk-L={length}",
                  Cost.of(expected), result.optimal_cost)
        out.equal(f"first-step-enters-corridor-L={length}",
                  str(Action.move(handle.path_edges[0])),
                  str(result.optimal_first_action))
    for m in range(1, 9):
        length = Fraction(8 * m + 16)
        forward = forward_policy_cost(length, length)
        out.holds(f"forward-under-three-quarters-m={m}",
                  forward < Fraction(3, 4), _show(forward))
        sections = section_count(length)
        bail = min(bailout_policy_cost(length, j, 1)
                   for j in range(1, sections + 1))
        out.holds(f"forward-beats-every-bailout-m={m}", forward < bail,
                  f"forward {_show(forward)} best bailout {_show(bail)}")
        spur = detour_price(length)
        out.holds(f"detour-return-beats-second-corridor-m={m}",
                  2 * spur + 2 < 3 * length / 2)
        out.holds(f"second-corridor-beats-triple-spur-m={m}",
                  3 * length / 2 < 2 * spur + 3 * spur / 4 + spur)
        p1 = certificate(2, m).p1
        out.holds(f"guard-blocking-floor-m={m}",
                  p1 > 1 - Fraction(2, 3 * length + 1))
        retry = spur + 2
        out.holds(f"retry-recursion-contracts-m={m}",
                  retry < 1 + p1 * (1 + retry))
    if args.trials:
        length = Fraction(2)
        instance, handle = baiting_harness(length)
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal=handle.exit_shortcut)
        mean, sem = simulate(instance, policy, args.trials,
                             seed=args.seed)
        target = float(forward_policy_cost(length, length))
        gap = abs(mean - target)
        out.holds("simulated-mean-within-4-sigma",
                  gap <= 4 * sem or sem == 0,
                  f"mean {mean:.6f} target {target:.6f} sem {sem:.6f}")
    return out.checks


def _suite_ctpdep(args) -> list[CheckResult]:
    out = _Checker()
    cap = args.cap or 200_000
    for formula, winnable in GAME_BATTERY:
        if args.n and formula.n != args.n:
            continue
        if args.m and formula.m != args.m:
            continue
        assert qbf_eval(formula) is winnable
        instance, fee = qbf_to_ctpdep(formula)
        result = solve_dependent(instance, belief_cap=cap)
        label = f"n={formula.n}-m={formula.m}-{'win' if winnable else 'loss'}"
        move = "enter" if winnable else "default"
        out.equal(f"first-move-{label}", str(Action.move(move)),
                  str(result.optimal_first_action))
        cost = Cost.zero() if winnable else Cost.of(fee)
        out.equal(f"optimal-cost-{label}", cost, result.optimal_cost)
    return out.checks


def _suite_ctp_cert(args) -> list[CheckResult]:
    out = _Checker()
    sizes = [(n, m)
             for n in ([args.n] if args.n else [2, 4, 6, 8])
             for m in ([args.m] if args.m else range(1, 9))]
    sandwich = True
    gap_ok = True
    witness = ""
    for n, m in sizes:
        cert = certificate(n, m)
        if not cert.B0 < cert.h < cert.B1:
            sandwich = False
            witness = f"(n={n}, m={m})"
        gap = Fraction(1, 4 ** (n // 2)) * m * cert.P_rt * cert.P_r0
        if cert.h - cert.B0 != gap:
            gap_ok = False
            witness = f"(n={n}, m={m})"
    out.holds("fee-sandwich-B0-h-B1", sandwich,
              witness or f"{len(sizes)} sizes")
    out.holds("fee-gap-identity", gap_ok, witness or f"{len(sizes)} sizes")
    for n, m in ((2, 1), (2, 2), (4, 2)):
        if args.n and n != args.n:
            continue
        if args.m and m != args.m:
            continue
        formula = QbfFormula.of(n, ((1,),) * m)
        instance, cert = qbf_to_ctp(formula)
        edges = {e.id: e for e in instance.edges}
        position = instance.s
        total = Fraction(0)
        intact = True
        for eid in reference_trip(formula):
            edge = edges.get(eid)
            if edge is None or position not in (edge.tail, edge.head):
                intact = False
                break
            position = (edge.head if position == edge.tail else edge.tail)
            total += edge.cost.fraction
        intact = intact and position == "exam.r0"
        out.holds(f"trip-walks-to-exam-entrance-n={n}-m={m}", intact)
        out.equal(f"trip-cost-matches-ledger-n={n}-m={m}", cert.D_pt, total)
    return out.checks


def _suite_sensing(args) -> list[CheckResult]:
    out = _Checker()
    alpha = as_fraction(args.alpha) if args.alpha else Fraction(1, 2)
    names = [args.graph] if args.graph else ["p3", "k3"]
    for name in names:
        vc = named_vc(name, args.k if args.k is not None else 1)
        instance, cert = vc_to_sensing(vc, alpha)
        covered = has_vertex_cover(vc)
        result = solve_sensing(instance)
        default = result.optimal_first_action == Action.move("default")
        out.equal(f"default-exactly-when-uncovered-{name}-k={vc.k}",
                  not covered, default)
        out.holds(f"cover-gain-positive-{name}-k={vc.k}",
                  cert.g_prime_lb > 0, _show(cert.g_prime_lb))
        out.holds(f"overbudget-gain-negative-{name}-k={vc.k}",
                  cert.g_dprime_ub < 0, _show(cert.g_dprime_ub))
        target = Fraction(vc.k + 1 - alpha, vc.k + 1)
        out.holds(f"all-open-floor-{name}-k={vc.k}",
                  (1 - cert.eps) ** len(vc.edges) >= target)
    return out.checks


def _suite_oracle(args) -> list[CheckResult]:
    out = _Checker()
    seed = args.seed
    agree = 0
    for i in range(25):
        instance = random_disjoint_instance(SplitMix64(seed + i))
        brute = solve_disjoint_bruteforce(instance)
        exact = solve_independent(instance)
        if brute.optimal_cost == exact.optimal_cost:
            agree += 1
    out.equal("bruteforce-matches-solver", "25/25", f"{agree}/25")
    preserved = 0
    normal = 0
    for i in range(20):
        instance = random_disjoint_instance(SplitMix64(seed + 1000 + i))
        rewritten = normalize_half_prob(instance)
        if (solve_independent(rewritten).optimal_cost
                == solve_independent(instance).optimal_cost):
            preserved += 1
        if all(e.block_p == Fraction(1, 2) and e.cost == Cost.zero()
               for e in rewritten.edges if e.uncertain):
            normal += 1
    out.equal("normal-form-preserves-optimum", "20/20", f"{preserved}/20")
    out.equal("normal-form-is-all-fair-coins", "20/20", f"{normal}/20")
    match = 0
    for i in range(10):
        instance = random_disjoint_instance(SplitMix64(seed + 2000 + i))
        paths = decompose_into_paths(instance)
        policy = CommittingPolicy(paths, tuple(range(len(paths))))
        by_weather = evaluate_exact(instance, policy, mode="weathers")
        by_tree = evaluate_exact(instance, policy, mode="tree")
        if by_weather.expected_cost == by_tree.expected_cost:
            match += 1
    out.equal("weather-and-tree-evaluations-agree", "10/10", f"{match}/10")
    return out.checks


_SUITES = {
    "gadgets": _suite_gadgets,
    "ctpdep": _suite_ctpdep,
    "ctp-cert": _suite_ctp_cert,
    "sensing": _suite_sensing,
    "oracle": _suite_oracle,
}


# ---------------------------------------------------------------------------
# commands

def _cert_path(out_path: Path) -> Path:
    name = out_path.name
    if name.endswith(".json"):
        name = name[: -len(".json")]
    return out_path.with_name(name + ".cert.json")


def _cmd_qbf(args) -> int:
    formula = parse_qdimacs(Path(args.formula).read_text())
    winnable = qbf_eval(formula, cap=args.cap)
    if args.json:
        print(json.dumps({"n": formula.n, "m": formula.m,
                          "winnable": winnable}))
    else:
        verdict = "winnable" if winnable else "unwinnable"
        print(f"{formula.n} variables, {formula.m} clauses: {verdict}")
    return 0


def _cmd_reduce(args) -> int:
    if args.target == "sensing":
        if not args.graph:
            raise InvalidInstanceError(
                "reduce sensing needs --graph (k3 or p3)")
        vc = named_vc(args.graph, args.k if args.k is not None else 1)
        alpha = as_fraction(args.alpha) if args.alpha else Fraction(1, 2)
        instance, cert = vc_to_sensing(vc, alpha)
        out_path = Path(args.out) if args.out else Path(
            f"{args.graph}.instance.json")
        summary = (f"eps {cert.eps} visit fee "
                   f"{render_rational(cert.C, args.precision)}")
    else:
        if not args.formula:
            raise InvalidInstanceError(
                f"reduce {args.target} needs a QDIMACS file")
        formula = parse_qdimacs(Path(args.formula).read_text())
        stem = Path(args.formula).stem
        if args.target == "ctpdep":
            instance, fee = qbf_to_ctpdep(formula, h=args.h)
            cert = None
            out_path = Path(args.out) if args.out else Path(
                f"{stem}.instance.json")
            summary = f"direct fee {render_rational(fee, args.precision)}"
        else:
            instance, cert = qbf_to_ctp(formula)
            out_path = Path(args.out) if args.out else Path(
                f"{stem}.instance.json")
            summary = (f"fee {render_rational(cert.h, args.precision)} "
                       f"over {cert.vertex_count} vertices")
    save_instance(instance, out_path)
    print(f"wrote {out_path} ({len(instance.vertices)} vertices, "
          f"{len(instance.edges)} edges)")
    if cert is not None:
        cert_path = _cert_path(out_path)
        cert_path.write_text(cert.to_json())
        print(f"wrote {cert_path}")
    print(summary)
    return 0


def _cmd_gadget(args) -> int:
    length = as_fraction(args.L)
    charge = as_fraction(args.charge) if args.charge else None
    fallback = as_fraction(args.fallback)
    if args.kind == "baiting":
        instance, handle = baiting_harness(length, charge=charge,
                                           fallback=fallback)
    else:
        instance, handle = observation_harness(length, charge=charge,
                                               fallback=fallback)
    out_path = Path(args.out) if args.out else Path(
        f"{args.kind}.instance.json")
    save_instance(instance, out_path)
    print(f"wrote {out_path} ({len(instance.vertices)} vertices, "
          f"{len(instance.edges)} edges)")
    if args.policy:
        terminal = "charge" if charge is not None else handle.exit_shortcut
        if args.policy == "baiting_pi_j":
            walker = reference_policy(args.policy, handle=handle,
                                      rounds=args.rounds,
                                      fallback="fallback")
        else:
            walker = reference_policy(args.policy, handle=handle,
                                      terminal=terminal)
        outcome, tree = export_decision_tree(instance, walker)
        policy_path = (Path(args.policy_out) if args.policy_out
                       else out_path.with_name(f"{args.policy}.tree.json"))
        policy_path.write_text(tree.to_json())
        print(f"wrote {policy_path}")
        print("expected cost: "
              f"{render_cost(outcome.expected_cost, args.precision)}")
    return 0


def _cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    if args.policy:
        policy = load_policy(args.policy)
        outcome = evaluate_exact(instance, policy)
        if args.json:
            print(json.dumps({
                "expected_cost": render_cost(outcome.expected_cost,
                                             args.precision),
                "outcomes": len(outcome.outcome_breakdown),
            }))
        else:
            print("expected cost: "
                  f"{render_cost(outcome.expected_cost, args.precision)}")
            print(f"outcome branches: {len(outcome.outcome_breakdown)}")
        return 0
    result = solve(instance, belief_cap=args.cap or 200_000)
    first = (str(result.optimal_first_action)
             if result.optimal_first_action else "depends on opening statuses")
    if args.json:
        print(json.dumps({
            "optimal_cost": render_cost(result.optimal_cost, args.precision),
            "first_action": first,
            "beliefs_expanded": result.stats.beliefs_expanded,
        }))
    else:
        print("optimal cost: "
              f"{render_cost(result.optimal_cost, args.precision)}")
        print(f"first action: {first}")
        print(f"beliefs expanded: {result.stats.beliefs_expanded}")
    return 0


def _cmd_export_dot(args) -> int:
    instance = load_instance(args.instance)
    text = instance_to_dot(instance, args.precision)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def _cmd_verify(args) -> int:
    runner = _SUITES[args.suite]
    start = time.monotonic()
    checks = runner(args)
    report = VerifyReport(args.suite, checks, time.monotonic() - start)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        for check in report.checks:
            print(f"{check.status.upper():4} {check.id}: "
                  f"expected {check.expected}, got {check.actual}")
        passed = sum(1 for c in report.checks if c.status == "pass")
        print(f"suite {report.suite}: {passed}/{len(report.checks)} "
              f"checks passed in {report.elapsed:.2f}s")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctplab",
        description="Exact laboratory for Canadian Traveler constructions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_qbf = sub.add_parser("qbf", help="evaluate a QDIMACS game")
    p_qbf.add_argument("formula")
    p_qbf.add_argument("--cap", type=int, default=24)
    p_qbf.add_argument("--json", action="store_true")
    p_qbf.set_defaults(func=_cmd_qbf)

    p_red = sub.add_parser("reduce", help="translate a game or a graph")
    p_red.add_argument("target", choices=["ctpdep", "ctp", "sensing"])
    p_red.add_argument("formula", nargs="?",
                       help="QDIMACS file for ctpdep and ctp")
    p_red.add_argument("-o", "--out")
    p_red.add_argument("--h", help="direct fee override for ctpdep")
    p_red.add_argument("--graph", choices=["k3", "p3"])
    p_red.add_argument("--k", type=int)
    p_red.add_argument("--alpha")
    p_red.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    p_red.set_defaults(func=_cmd_reduce)

    p_gad = sub.add_parser("gadget", help="materialize a gadget harness")
    p_gad.add_argument("kind", choices=["baiting", "observation"])
    p_gad.add_argument("--L", required=True, help="corridor length")
    p_gad.add_argument("--charge")
    p_gad.add_argument("--fallback", default="1")
    p_gad.add_argument("-o", "--out")
    p_gad.add_argument("--policy",
                       choices=["baiting_pi", "baiting_pi_j", "og_pi_g"])
    p_gad.add_argument("--rounds", type=int, default=1)
    p_gad.add_argument("--policy-out")
    p_gad.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    p_gad.set_defaults(func=_cmd_gadget)

    p_sol = sub.add_parser("solve", help="solve or evaluate an instance")
    p_sol.add_argument("instance")
    p_sol.add_argument("--policy", help="decision tree file to evaluate")
    p_sol.add_argument("--cap", type=int)
    p_sol.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    p_sol.add_argument("--json", action="store_true")
    p_sol.set_defaults(func=_cmd_solve)

    p_dot = sub.add_parser("export-dot", help="render as Graphviz text")
    p_dot.add_argument("instance")
    p_dot.add_argument("-o", "--out")
    p_dot.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    p_dot.set_defaults(func=_cmd_export_dot)

    p_ver = sub.add_parser("verify", help="run a check suite")
    p_ver.add_argument("suite", choices=sorted(_SUITES))
    p_ver.add_argument("--L")
    p_ver.add_argument("--n", type=int)
    p_ver.add_argument("--m", type=int)
    p_ver.add_argument("--graph", choices=["k3", "p3"])
    p_ver.add_argument("--k", type=int)
    p_ver.add_argument("--alpha")
    p_ver.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_ver.add_argument("--trials", type=int, default=4096)
    p_ver.add_argument("--cap", type=int)
    p_ver.add_argument("--json", action="store_true")
    p_ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EnumerationCapError, PolicyLoopError) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return 3
    except (InvalidInstanceError, GadgetParameterError, CertificateError,
            IllegalActionError, InfeasibleWeatherError, ValueError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


__all__ = [
    "CheckResult",
    "GAME_BATTERY",
    "VerifyReport",
    "build_parser",
    "instance_to_dot",
    "main",
    "random_disjoint_instance",
    "render_cost",
    "render_rational",
]


if __name__ == "__main__":
    sys.exit(main())
