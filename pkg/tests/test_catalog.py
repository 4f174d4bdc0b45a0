"""Tests for the Catalog module."""

import pytest

from lambdamu import Workbench
from lambdamu.models import ClaimStatus, VerdictKind
from lambdamu.modules.analysis import audit_verdict, sn_verdict
from lambdamu.modules.catalog import CatalogModule, catalog, claims, pair, run_catalog_suite
from lambdamu.modules.reduction import successors
from lambdamu.modules.substitution import subst_lambda
from lambdamu.modules.terms import (
    App,
    Mu,
    Var,
    alpha_eq,
    cxty,
    free_vars,
    is_subterm,
    parse,
    print_term,
)


@pytest.fixture
def catalog_module():
    """Create a CatalogModule instance for testing."""
    return CatalogModule(max_nodes=1, scout_steps=40)


@pytest.fixture
def terms():
    """The named terms."""
    return catalog()


def test_catalog_terms(terms):
    """Test the shapes of the named terms."""
    assert set(terms) == {"zero", "one", "delta", "P", "M0", "M1", "N", "Mpair", "Mprime"}
    assert print_term(terms["zero"]) == r"\x. \y. y"
    assert print_term(terms["one"]) == r"\x. \y. x"
    assert print_term(terms["delta"]) == r"\x. x x"
    assert print_term(terms["N"]) == r"[a] (\z. [a] z)"
    m0 = subst_lambda(parse(r"\x.(x Q zero)"), "Q", terms["P"])
    assert alpha_eq(terms["M0"], subst_lambda(m0, "zero", terms["zero"]))


def test_catalog_sizes(terms):
    """Test that term sizes are stable across runs."""
    assert cxty(terms["P"]) == 39
    assert cxty(terms["M0"]) == 46
    assert cxty(terms["M1"]) == 46
    assert cxty(terms["N"]) == 4
    assert cxty(catalog()["M0"]) == cxty(terms["M0"])


def test_catalog_free_variables(terms):
    """Test which catalog terms are open."""
    assert free_vars(terms["N"]) == (frozenset(), frozenset({"a"}))
    assert free_vars(terms["Mpair"]) == (frozenset({"x"}), frozenset())
    assert free_vars(terms["Mprime"]) == (frozenset(), frozenset({"b"}))
    for name in ("zero", "one", "delta", "P", "M0", "M1"):
        assert free_vars(terms[name]) == (frozenset(), frozenset())


def test_pair():
    """Test the pair method."""
    assert alpha_eq(pair(Var("u"), Var("v")), parse(r"\f.(f u v)"))
    p = pair(Var("f"), Var("g"))
    assert p.binder != "f"
    assert alpha_eq(p, parse(r"\h.(h f g)"))


def test_delta_loops(terms):
    """Test that delta applied to itself reduces to itself."""
    dd = App(terms["delta"], terms["delta"])
    assert [alpha_eq(t, dd) for _, t in successors(dd)] == [True]


def test_mpair_substitution(terms):
    """Test that substituting into Mpair distributes over both components."""
    mu_n = Mu("a", terms["N"])
    substituted = subst_lambda(terms["Mpair"], "x", mu_n)
    assert alpha_eq(
        substituted, pair(App(mu_n, terms["M1"]), App(mu_n, terms["M0"]))
    )


def test_substituted_pair_is_sn_by_parts(terms):
    """Test that Mpair[x:=mu a.N] is SN through the verdicts of its two components."""
    mu_n = Mu("a", terms["N"])
    substituted = subst_lambda(terms["Mpair"], "x", mu_n)
    verdict = sn_verdict(substituted)
    assert verdict.kind == VerdictKind.SN
    assert verdict.describe() == "SN, spine of 2 SN arguments"
    assert all(c.eta is not None and len(c.graph) < 100 for c in verdict.components)
    assert audit_verdict(verdict)

    by_name = {claim.name: claim for claim in claims()}
    result = by_name["Mpair[x:=mu a.N] is SN"].check()
    assert result.status == ClaimStatus.PASS
    assert result.detail.endswith("audit ok")


def test_crossed_applications_diverge(terms):
    """Test that (M1 M0) has an infinite reduction through delta delta."""
    dd = App(terms["delta"], terms["delta"])
    verdict = sn_verdict(App(terms["M1"], terms["M0"]))
    assert verdict.kind == VerdictKind.NON_SN
    assert audit_verdict(verdict)
    assert any(is_subterm(dd, t) for t in verdict.witness.terms)


def test_claim_order():
    """Test the claim suite layout."""
    names = [claim.name for claim in claims()]
    assert len(names) == 17
    assert len(set(names)) == 17
    assert names[0] == "(mu a.x) (mu b.y) reduces to both mu a.x and mu b.y"
    assert "(M1 M0) is not SN" in names
    assert "Mprime[b=r mu a.N] is SN" in names
    assert names[-1] == "(mu b.Mprime) (mu a.N) is not SN"


def test_suite_on_tiny_budget(catalog_module):
    """Test that running out of budget yields UNKNOWN, never FAIL."""
    report = catalog_module.run_catalog_suite()
    assert [c.name for c in report.claims] == [c.name for c in claims()]
    assert all(c.status != ClaimStatus.FAIL for c in report.claims)
    assert report.claims[0].status == ClaimStatus.PASS
    assert report.claims[1].status == ClaimStatus.PASS
    assert report.exit_code in (0, 2)
    assert report.lines()[0].startswith("CLAIM (mu a.x) (mu b.y) reduces to both")


@pytest.mark.asyncio
async def test_suite_async_keeps_order():
    """Test the run_catalog_suite_async method."""
    async with Workbench(max_nodes=1, scout_steps=40, max_workers=4) as workbench:
        report = await workbench.run_catalog_suite_async()
    assert [c.name for c in report.claims] == [c.name for c in claims()]
    sequential = run_catalog_suite(max_nodes=1, scout_steps=40)
    assert [c.status for c in report.claims] == [c.status for c in sequential.claims]


@pytest.mark.slow
def test_equal_applications_normalize(terms):
    """Test that (M0 M0) and (M1 M1) are strongly normalizing."""
    for name in ("M0", "M1"):
        verdict = sn_verdict(App(terms[name], terms[name]))
        assert verdict.kind == VerdictKind.SN
        assert audit_verdict(verdict)


@pytest.mark.slow
@pytest.mark.asyncio
async def test_full_suite_passes():
    """Test that every claim passes within the default budget."""
    async with Workbench() as workbench:
        report = await workbench.run_catalog_suite_async()
    failing = [c.line() for c in report.claims if c.status != ClaimStatus.PASS]
    assert not failing
    assert report.all_passed
    assert report.exit_code == 0
