"""Catalog module for the lambdamu workbench.

The named counterexample terms and the claim suite that checks what is known about
them: non-confluence of the symmetric rules, which applications diverge, and the
single-redex and must-pass-through chains behind the strong-normalization results.
"""

import asyncio
import logging
from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from lambdamu.exceptions import BudgetExceededError, LambdaMuError
from lambdamu.models import ClaimResult, ClaimStatus, SuiteReport, VerdictKind
from lambdamu.modules.analysis import (
    SnVerdict,
    audit_verdict,
    must_pass_through,
    single_redex_step,
    sn_verdict,
)
from lambdamu.modules.reduction import redexes, successors
from lambdamu.modules.substitution import subst_lambda, subst_mu_right
from lambdamu.modules.terms import (
    App,
    Lam,
    Mu,
    Named,
    Term,
    Var,
    all_names,
    alpha_eq,
    canonical_key,
    is_subterm,
    parse,
    print_term,
)
from lambdamu.utils import fresh_name

logger = logging.getLogger(__name__)


def _fill(template: str, **terms: Term) -> Term:
    """Parse a template and plug closed terms in for its free λ-variables."""
    result = parse(template)
    for name, value in terms.items():
        result = subst_lambda(result, name, value)
    return result


def pair(t1: Term, t0: Term) -> Term:
    """The pair ``\\f.(f T1 T0)`` with ``f`` fresh for both components."""
    taken = all_names(t1, t0)
    f = "f" if "f" not in taken else fresh_name("f", taken)
    return Lam(f, App(App(Var(f), t1), t0))


def catalog() -> Dict[str, Term]:
    """Build the named terms.

    ``N`` has the free μ-variable ``a``, ``Mpair`` the free λ-variable ``x`` and
    ``Mprime`` the free μ-variable ``b``.

    Returns:
        The terms by name: zero, one, delta, P, M0, M1, N, Mpair and Mprime.
    """
    zero = parse("\\x.\\y.y")
    one = parse("\\x.\\y.x")
    delta = parse("\\x.(x x)")
    p = _fill(
        "\\x.\\y.\\z.(y (z one zero) (z zero one) (\\d.one) delta delta)",
        one=one,
        zero=zero,
        delta=delta,
    )
    m0 = _fill("\\x.(x P zero)", P=p, zero=zero)
    m1 = _fill("\\x.(x P one)", P=p, one=one)
    return {
        "zero": zero,
        "one": one,
        "delta": delta,
        "P": p,
        "M0": m0,
        "M1": m1,
        "N": parse("[a](\\z.[a] z)"),
        "Mpair": pair(App(Var("x"), m1), App(Var("x"), m0)),
        "Mprime": pair(
            Named("b", _fill("\\x.(x M1)", M1=m1)),
            Named("b", _fill("\\x.(x M0)", M0=m0)),
        ),
    }


@dataclass(frozen=True)
class Claim:
    """A named check over the catalog."""

    name: str
    check: Callable[[], ClaimResult]


class _Suite:
    """Claims over one catalog with shared budgets."""

    def __init__(self, max_nodes: int, max_term_size: int, scout_steps: int, seed: int):
        self.max_nodes = max_nodes
        self.max_term_size = max_term_size
        self.scout_steps = scout_steps
        self.seed = seed
        self.terms = catalog()

    def verdict(self, t: Term) -> SnVerdict:
        return sn_verdict(
            t, self.max_nodes, self.max_term_size, self.scout_steps, self.seed
        )

    def passes(self, u: Term, v: Term) -> Optional[bool]:
        return must_pass_through(u, v, self.max_nodes, self.max_term_size)

    def claims(self) -> List[Claim]:
        c = self.terms
        mu_n = Mu("a", c["N"])
        lam_m = Lam("x", c["Mpair"])
        claims = [
            Claim(
                "(mu a.x) (mu b.y) reduces to both mu a.x and mu b.y",
                lambda: self.two_reducts("(mu a.x) (mu b.y)", "mu a.x", "mu b.y"),
            ),
            Claim(
                "(\\z.x) (mu b.y) reduces to both x and mu b.y",
                lambda: self.two_reducts("(\\z.x) (mu b.y)", "x", "mu b.y"),
            ),
        ]
        for i, j in (("1", "0"), ("0", "1")):
            t = App(c["M" + i], c["M" + j])
            claims.append(
                Claim(
                    f"(M{i} M{j}) is not SN",
                    lambda t=t: self.diverges(t, App(c["delta"], c["delta"])),
                )
            )
        for i in ("0", "1"):
            t = App(c["M" + i], c["M" + i])
            claims.append(Claim(f"(M{i} M{i}) is SN", lambda t=t: self.normalizes(t)))
        for i in ("0", "1"):
            claims.append(
                Claim(
                    f"(M{i} M{i}) reaches one through single-redex steps",
                    lambda i=i: self.head_chain(c["M" + i]),
                )
            )
        for i in ("0", "1"):
            claims.append(
                Claim(
                    f"(mu a.N M{i}) reaches mu a.[a] [a] one",
                    lambda i=i: self.mu_chain(mu_n, c["M" + i]),
                )
            )
            claims.append(
                Claim(
                    f"(\\x.(x M{i})) (mu a.N) must pass through mu a.[a] [a] one",
                    lambda i=i: self.both_branches(mu_n, c["M" + i]),
                )
            )
        substituted = subst_lambda(c["Mpair"], "x", mu_n)
        claims += [
            Claim(
                "Mpair[x:=mu a.N] is the pair of (mu a.N M1) and (mu a.N M0)",
                lambda: self.same_term(
                    substituted, pair(App(mu_n, c["M1"]), App(mu_n, c["M0"]))
                ),
            ),
            Claim("Mpair[x:=mu a.N] is SN", lambda: self.normalizes(substituted)),
            Claim(
                "(\\x.Mpair) (mu a.N) is not SN",
                lambda: self.diverges(App(lam_m, mu_n), App(c["delta"], c["delta"])),
            ),
            Claim(
                "Mprime[b=r mu a.N] is SN",
                lambda: self.normalizes(subst_mu_right(c["Mprime"], "b", mu_n)),
            ),
            Claim(
                "(mu b.Mprime) (mu a.N) is not SN",
                lambda: self.diverges(App(Mu("b", c["Mprime"]), mu_n), None),
            ),
        ]
        return claims

    def two_reducts(self, source: str, left: str, right: str) -> ClaimResult:
        reducts = [t for _, t in successors(parse(source))]
        expected = [parse(left), parse(right)]
        exact = len(reducts) == 2 and all(
            alpha_eq(r, e) for r, e in zip(reducts, expected)
        )
        normal = all(not redexes(r) for r in reducts)
        shown = ", ".join(print_term(r) for r in reducts)
        return _result(exact and normal, f"reducts: {shown}")

    def diverges(self, t: Term, expected: Optional[Term]) -> ClaimResult:
        verdict = self.verdict(t)
        if verdict.kind == VerdictKind.UNKNOWN:
            return _unknown(verdict)
        if verdict.kind != VerdictKind.NON_SN:
            return _result(False, verdict.describe())
        audited = audit_verdict(verdict)
        detail = verdict.describe()
        if expected is not None:
            seen = any(is_subterm(expected, term) for term in verdict.witness.terms)
            detail += f", witness contains {print_term(expected)}: {seen}"
            audited = audited and seen
        return _result(audited, detail + f", audit {'ok' if audited else 'failed'}")

    def normalizes(self, t: Term) -> ClaimResult:
        verdict = self.verdict(t)
        if verdict.kind == VerdictKind.UNKNOWN:
            return _unknown(verdict)
        if verdict.kind != VerdictKind.SN:
            return _result(False, verdict.describe())
        audited = audit_verdict(verdict)
        return _result(audited, verdict.describe() + f", audit {'ok' if audited else 'failed'}")

    def head_chain(self, m: Term) -> ClaimResult:
        c = self.terms
        one, delta = c["one"], c["delta"]
        const_one = Lam("d", one)
        stages = [
            App(App(App(one, const_one), delta), delta),
            App(App(Lam("y", const_one), delta), delta),
            App(const_one, delta),
            one,
        ]
        return self.chain(App(m, m), stages)

    def mu_chain(self, mu_n: Term, m: Term) -> ClaimResult:
        source = App(mu_n, m)
        first = Mu("a", Named("a", App(Lam("z", Named("a", App(Var("z"), m))), m)))
        second = Mu("a", Named("a", Named("a", App(m, m))))
        target = Mu("a", Named("a", Named("a", self.terms["one"])))
        links = [
            ("single", source, first),
            ("single", first, second),
            ("must", second, target),
        ]
        return self.links(links)

    def both_branches(self, mu_n: Term, m: Term) -> ClaimResult:
        source = App(Lam("x", App(Var("x"), m)), mu_n)
        target = Mu("a", Named("a", Named("a", self.terms["one"])))
        branches = len(redexes(source))
        outcome = self.links([("must", source, target)])
        if outcome.status == ClaimStatus.PASS and branches != 2:
            return _result(False, f"{branches} redexes instead of 2")
        return outcome

    def chain(self, source: Term, stages: List[Term]) -> ClaimResult:
        links = [("must", source, stages[0])]
        links += [("single", u, v) for u, v in zip(stages, stages[1:])]
        return self.links(links)

    def links(self, links) -> ClaimResult:
        for position, (kind, u, v) in enumerate(links, start=1):
            if kind == "single":
                holds: Optional[bool] = single_redex_step(u, v)
            else:
                holds = self.passes(u, v)
            if holds is None:
                return ClaimResult(
                    name="",
                    status=ClaimStatus.UNKNOWN,
                    detail=f"link {position} not decided within the node budget",
                )
            if not holds:
                return _result(False, f"link {position} ({kind}) fails")
        return _result(True, f"{len(links)} links verified")

    def same_term(self, t: Term, expected: Term) -> ClaimResult:
        same = canonical_key(t) == canonical_key(expected)
        return _result(same, "alpha-equal" if same else f"got {print_term(t)}")


def _result(holds: bool, detail: str) -> ClaimResult:
    return ClaimResult(
        name="", status=ClaimStatus.PASS if holds else ClaimStatus.FAIL, detail=detail
    )


def _unknown(verdict: SnVerdict) -> ClaimResult:
    return ClaimResult(name="", status=ClaimStatus.UNKNOWN, detail=verdict.describe())


def _evaluate(claim: Claim) -> ClaimResult:
    try:
        result = claim.check()
    except BudgetExceededError as e:
        result = ClaimResult(name="", status=ClaimStatus.UNKNOWN, detail=e.message)
    except LambdaMuError as e:
        result = ClaimResult(name="", status=ClaimStatus.FAIL, detail=e.message)
    result = result.model_copy(update={"name": claim.name})
    logger.info(result.line())
    return result


def claims(
    max_nodes: int = 1_000_000,
    max_term_size: int = 2000,
    scout_steps: int = 400,
    seed: int = 0,
) -> List[Claim]:
    """The claim suite in report order."""
    return _Suite(max_nodes, max_term_size, scout_steps, seed).claims()


def run_catalog_suite(
    max_nodes: int = 1_000_000,
    max_term_size: int = 2000,
    scout_steps: int = 400,
    seed: int = 0,
) -> SuiteReport:
    """Evaluate every claim in order.

    Returns:
        One PASS, FAIL or UNKNOWN entry per claim.
    """
    return SuiteReport(
        claims=[
            _evaluate(claim)
            for claim in claims(max_nodes, max_term_size, scout_steps, seed)
        ]
    )


class CatalogModule:
    """Catalog module for the lambdamu workbench.

    This module provides the named terms and the claim suite.
    """

    def __init__(
        self,
        max_nodes: int = 1_000_000,
        max_term_size: int = 2000,
        scout_steps: int = 400,
        seed: int = 0,
        executor: Optional[Executor] = None,
    ):
        """Initialize the Catalog module.

        Args:
            max_nodes: Node budget of every verdict.
            max_term_size: Terms with more symbols are not expanded.
            scout_steps: Length of the cycle scouts.
            seed: Seed of the random scouts.
            executor: Executor the asynchronous suite runs claims on.
        """
        self.max_nodes = max_nodes
        self.max_term_size = max_term_size
        self.scout_steps = scout_steps
        self.seed = seed
        self._executor = executor

    def catalog(self) -> Dict[str, Term]:
        """The named terms; see :func:`catalog`."""
        return catalog()

    def pair(self, t1: Term, t0: Term) -> Term:
        """Pair constructor; see :func:`pair`."""
        return pair(t1, t0)

    def run_catalog_suite(self, max_nodes: Optional[int] = None) -> SuiteReport:
        """Run the claim suite sequentially; see :func:`run_catalog_suite`."""
        return run_catalog_suite(
            self.max_nodes if max_nodes is None else max_nodes,
            self.max_term_size,
            self.scout_steps,
            self.seed,
        )

    async def run_catalog_suite_async(
        self, max_nodes: Optional[int] = None
    ) -> SuiteReport:
        """Run the claims concurrently on the executor; the report keeps claim order.

        Args:
            max_nodes: Node budget, defaulting to the configured one.

        Returns:
            The suite report.
        """
        loop = asyncio.get_running_loop()
        suite = claims(
            self.max_nodes if max_nodes is None else max_nodes,
            self.max_term_size,
            self.scout_steps,
            self.seed,
        )
        results = await asyncio.gather(
            *(loop.run_in_executor(self._executor, _evaluate, claim) for claim in suite)
        )
        return SuiteReport(claims=list(results))
