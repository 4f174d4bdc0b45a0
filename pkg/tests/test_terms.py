"""Tests for the Terms module."""

import pytest
from hypothesis import given, settings

from lambdamu.exceptions import NamespaceError, TermSyntaxError
from lambdamu.modules.catalog import catalog
from lambdamu.modules.terms import (
    App,
    Lam,
    Mu,
    Named,
    Selector,
    TermsModule,
    Var,
    alpha_eq,
    canonical_key,
    cxty,
    free_vars,
    is_subterm,
    parse,
    print_term,
    replace_at,
    subterm_at,
    subterms,
)
from tests.strategies import rebind, terms


@pytest.fixture
def terms_module():
    """Create a TermsModule instance for testing."""
    return TermsModule()


def test_parse_lambda():
    """Test parsing nested abstractions."""
    assert parse(r"\x.\y. x y") == Lam("x", Lam("y", App(Var("x"), Var("y"))))


def test_parse_mu_naming():
    """Test parsing a μ-abstraction over a naming."""
    assert parse("mu a.[a] x") == Mu("a", Named("a", Var("x")))


def test_parse_application_is_left_associative():
    """Test that application associates to the left."""
    assert parse("x y z") == App(App(Var("x"), Var("y")), Var("z"))


def test_parse_naming_binds_an_atom():
    """Test that a naming only takes the following atom."""
    assert parse("[a] x y") == App(Named("a", Var("x")), Var("y"))
    assert parse(r"[a] \z.[a] z") == Named("a", Lam("z", Named("a", Var("z"))))


def test_parse_trailing_binder_argument():
    """Test that a binder in argument position extends as far right as possible."""
    assert parse(r"f \y.y z") == App(Var("f"), Lam("y", App(Var("y"), Var("z"))))
    assert parse("f x mu b.[b] y") == App(
        App(Var("f"), Var("x")), Mu("b", Named("b", Var("y")))
    )
    assert parse(r"f [a] \y.y") == App(Var("f"), Named("a", Lam("y", Var("y"))))
    assert parse(r"f [a] x y") == App(App(Var("f"), Named("a", Var("x"))), Var("y"))
    peirce = parse(r"\f. mu a.[a](f \y. mu b.[a] y)")
    assert peirce == Lam(
        "f",
        Mu(
            "a",
            Named("a", App(Var("f"), Lam("y", Mu("b", Named("a", Var("y")))))),
        ),
    )
    assert alpha_eq(parse(print_term(peirce)), peirce)
    with pytest.raises(TermSyntaxError):
        parse(r"f \y.y )")


def test_parse_syntax_error():
    """Test that malformed input raises a syntax error."""
    with pytest.raises(TermSyntaxError):
        parse(r"\x. (x")


def test_parse_reserved_word():
    """Test that mu cannot be used as a variable."""
    with pytest.raises(TermSyntaxError):
        parse(r"\mu. x")


def test_parse_namespace_clash():
    """Test that a λ-bound name cannot be used as a naming tag."""
    with pytest.raises(NamespaceError):
        parse(r"\a.[a] a")


def test_print_terms():
    """Test the printed forms."""
    assert print_term(Lam("x", Var("x"))) == r"\x. x"
    assert print_term(Mu("a", Named("a", Var("y")))) == "mu a. [a] y"
    assert print_term(parse(r"(\x. x) (\y. y) z")) == r"(\x. x) (\y. y) z"


def test_catalog_round_trip():
    """Test that every catalog term prints and parses back."""
    for name, t in catalog().items():
        assert alpha_eq(parse(print_term(t)), t), name


@given(terms)
@settings(max_examples=200, deadline=None)
def test_print_parse_round_trip(t):
    """Test parse after print on random terms."""
    assert alpha_eq(parse(print_term(t)), t)


def test_alpha_eq_examples():
    """Test alpha-equivalence on simple pairs."""
    assert alpha_eq(parse(r"\x.x"), parse(r"\y.y"))
    assert alpha_eq(parse("mu a.[a]x"), parse("mu b.[b]x"))
    assert not alpha_eq(parse(r"\x.y"), parse(r"\x.z"))
    assert not alpha_eq(parse(r"\x.\y.x"), parse(r"\x.\y.y"))


def test_canonical_key_examples():
    """Test canonical keys on simple pairs."""
    assert canonical_key(parse(r"\x.x")) == canonical_key(parse(r"\y.y"))
    assert canonical_key(parse(r"\x.y")) != canonical_key(parse(r"\x.z"))
    assert canonical_key(parse("mu a.[a](x x)")) == canonical_key(parse("mu b.[b](x x)"))


def test_canonical_key_separates_namespaces():
    """Test that free names of different kinds do not collide."""
    assert canonical_key(parse("[a] x")) != canonical_key(parse("[x] a"))


@given(terms)
@settings(max_examples=200, deadline=None)
def test_alpha_eq_under_renaming(t):
    """Test that renaming binders keeps alpha-equivalence and the key."""
    renamed = rebind(t)
    assert alpha_eq(t, renamed)
    assert alpha_eq(renamed, t)
    assert canonical_key(t) == canonical_key(renamed)


@given(terms, terms)
@settings(max_examples=200, deadline=None)
def test_canonical_key_agrees_with_alpha_eq(t1, t2):
    """Test that keys and alpha-equivalence agree in both directions."""
    same = canonical_key(t1) == canonical_key(t2)
    assert same == alpha_eq(t1, t2)
    if t1 == t2:
        assert same


def test_cxty_examples():
    """Test symbol counts."""
    assert cxty(parse("x")) == 1
    assert cxty(parse(r"\x.x")) == 2
    assert cxty(parse("x y")) == 3
    assert cxty(parse("mu a.[a] x")) == 3


@given(terms)
@settings(max_examples=100, deadline=None)
def test_cxty_counts_subterms(t):
    """Test that every node is a sub-term and strict sub-terms are smaller."""
    entries = subterms(t)
    assert len(entries) == cxty(t)
    for path, sub in entries:
        assert subterm_at(t, path) is sub
        if path:
            assert cxty(sub) < cxty(t)


def test_subterms_preorder():
    """Test the preorder enumeration."""
    assert subterms(parse("x")) == [((), Var("x"))]
    assert subterms(parse("x y")) == [
        ((), App(Var("x"), Var("y"))),
        ((Selector.APP_FUN,), Var("x")),
        ((Selector.APP_ARG,), Var("y")),
    ]


def test_is_subterm():
    """Test the sub-term relations up to alpha."""
    m = parse(r"x (\y.y)")
    assert is_subterm(parse(r"\z.z"), m)
    assert is_subterm(m, m)
    assert not is_subterm(m, m, strict=True)
    assert is_subterm(parse("x"), m, strict=True)


def test_replace_at():
    """Test replacing a sub-term by path."""
    t = parse(r"\x. x y")
    path = (Selector.LAM_BODY, Selector.APP_ARG)
    assert print_term(replace_at(t, path, Var("z"))) == r"\x. x z"
    with pytest.raises(ValueError):
        replace_at(t, (Selector.MU_BODY,), Var("z"))
    with pytest.raises(ValueError):
        subterm_at(t, (Selector.APP_FUN,))


def test_free_vars():
    """Test free variables in both namespaces."""
    assert free_vars(parse(r"\x.(x y)")) == ({"y"}, set())
    assert free_vars(parse(r"[a] \z.[a] z")) == (set(), {"a"})
    assert free_vars(parse("mu a.[a]x")) == ({"x"}, set())


def test_terms_module(terms_module):
    """Test the module methods."""
    t = terms_module.parse(r"\x.x")
    assert terms_module.print(t) == r"\x. x"
    assert terms_module.alpha_eq(t, parse(r"\y.y"))
    assert terms_module.cxty(t) == 2
