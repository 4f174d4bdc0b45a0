"""Tests for the Standardization module."""

import random
from typing import List, Optional

import pytest

from lambdamu.exceptions import InvalidRedexError, InvalidTraceError, NotStandardError
from lambdamu.modules.generators import TermGenerator
from lambdamu.modules.reduction import (
    RedexRef,
    ReductionTrace,
    Rule,
    Strategy,
    normalize,
    redexes,
    step,
    successors,
    validate_trace,
)
from lambdamu.modules.standardization import (
    Clause,
    ClauseNode,
    LiftKind,
    StandardCertificate,
    StandardizationModule,
    absorb_step,
    is_standard,
    leaf_certificate,
    lg,
    lift_standard,
    standardize,
    verify_certificate,
)
from lambdamu.modules.substitution import subst_lambda, subst_mu_left, subst_mu_right
from lambdamu.modules.terms import (
    App,
    Lam,
    Mu,
    Named,
    Selector,
    Term,
    Var,
    alpha_eq,
    canonical_key,
    cxty,
    parse,
    subterm_at,
    subterms,
)

HEAD_FIRST = [r"(\x.x) ((\y.y) z)", r"(\y.y) z", "z"]
ARGUMENT_FIRST = [r"(\x.x) ((\y.y) z)", r"(\x.x) z", "z"]

PURE_CORPUS = [
    r"(\x.x) ((\y.y) z)",
    r"(\x.(x x)) ((\y.y) z)",
    r"(\x.\y.x) ((\z.z) w) v",
    r"(\x.(x x)) (\y.y)",
    r"(\x.y) ((\z.(z z)) (\z.(z z)))",
    r"\x.((\y.y) ((\z.z) x))",
    r"(\x.((\y.y) x)) z",
    r"x ((\y.y) z) ((\w.w) z)",
    r"((\x.\y.x) z) ((\w.w) v)",
    r"(\x.(x ((\y.y) x))) (\z.z)",
    r"(\f.(f (f z))) (\y.y)",
]

MU_CORPUS = [
    "(mu a.x) (mu b.y)",
    "(mu a.[a] x) y",
    "(mu a.[a] x) (mu b.[b] y)",
    r"(\z.x) (mu b.y)",
    r"(\x.x) (mu a.[a] ((\y.y) z))",
    r"(mu a.[a] (\y.y)) z w",
    r"mu a.[a] ((\x.x) (mu b.[a] y))",
    r"(mu a.[b] ((\x.x) y)) z",
    "[a] ((mu b.[b] x) (mu c.[a] y))",
    r"(\x.x) ((mu a.[a] z) w)",
    r"x (mu a.[a] ((\y.y) z))",
    r"(mu a.[a] [a] x) ((\y.y) z)",
    r"((\x.mu a.[a] x) y) z",
    r"(\f.(f y)) (mu b.[b] (\z.z))",
    r"(mu a.[a] (\x.[a] x)) (\y.y)",
    r"(mu a.x) ((\y.y) (mu b.z))",
    r"((\x.x) (mu a.[a] y)) (mu b.[b] z)",
    r"(\x.(x x)) (mu a.[a] y)",
    "mu c.[c] ((mu a.[c] x) (mu b.[b] y))",
    r"(\x.((\y.y) x)) (mu a.[a] z)",
    r"[c] ((\x.\y.x) (mu a.[c] z) w)",
]


@pytest.fixture
def standardization_module():
    """Create a StandardizationModule instance for testing."""
    return StandardizationModule()


def _trace(texts: List[str]) -> ReductionTrace:
    """A trace through the given terms, recovering each fired redex."""
    terms = [parse(text) for text in texts]
    steps = []
    for current, following in zip(terms, terms[1:]):
        target = canonical_key(following)
        steps.append(next(r for r in redexes(current) if canonical_key(step(current, r)) == target))
    return ReductionTrace(tuple(terms), tuple(steps))


def _argument_first() -> ReductionTrace:
    """The argument redex of ARGUMENT_FIRST, then the head redex."""
    t0 = parse(ARGUMENT_FIRST[0])
    inner = RedexRef((Selector.APP_ARG,), Rule.BETA)
    t1 = step(t0, inner)
    outer = RedexRef((), Rule.BETA)
    return ReductionTrace((t0, t1, step(t1, outer)), (inner, outer))


def _all_traces(t: Term, max_steps: int) -> List[ReductionTrace]:
    found: List[ReductionTrace] = []

    def walk(terms, steps):
        found.append(ReductionTrace(tuple(terms), tuple(steps)))
        if len(steps) < max_steps:
            for redex, reduct in successors(terms[-1]):
                walk(terms + [reduct], steps + [redex])

    walk([t], [])
    return found


def _same_endpoints(a: ReductionTrace, b: ReductionTrace) -> bool:
    return alpha_eq(a.first, b.first) and alpha_eq(a.last, b.last)


def test_lg():
    """Test the lg method."""
    assert lg(ReductionTrace((parse("x"),))) == 0
    assert lg(_trace(HEAD_FIRST)) == 2
    tr = _argument_first()
    assert lg(tr) == len(tr.steps) == 2


def test_is_standard_examples():
    """Test the is_standard method on the basic traces."""
    leaf = is_standard(ReductionTrace((parse("x"),)))
    assert leaf.root.clause == Clause.LENGTH_ONE

    cert = is_standard(_trace(HEAD_FIRST))
    assert cert.root.clause == Clause.BETA_HEAD
    assert cert.root.split == 0
    assert cert.root.children[1].clause == Clause.BETA_HEAD
    assert verify_certificate(cert)

    with pytest.raises(NotStandardError) as excinfo:
        is_standard(_argument_first())
    assert excinfo.value.message == "Not standard: no clause covers terms 0..2 at root"


def test_is_standard_follows_recorded_redexes():
    """Test that the fired redexes decide standardness when the terms alone cannot."""
    argument_first = _argument_first()
    head_first = _trace(ARGUMENT_FIRST)
    assert [canonical_key(t) for t in head_first.terms] == [
        canonical_key(t) for t in argument_first.terms
    ]
    assert head_first.steps == (RedexRef((), Rule.BETA), RedexRef((), Rule.BETA))
    assert is_standard(head_first).root.clause == Clause.BETA_HEAD
    with pytest.raises(NotStandardError):
        is_standard(argument_first)

    cert = is_standard(head_first)
    assert not verify_certificate(StandardCertificate(argument_first, cert.root))

    wrong = ReductionTrace(head_first.terms, (RedexRef((Selector.APP_FUN,), Rule.BETA),) * 2)
    with pytest.raises(InvalidTraceError):
        is_standard(wrong)


def test_not_standard_names_the_widest_slice():
    """Test which undecomposable slice the error reports."""
    t0 = parse(r"(\v.v) ((\x.x) ((\y.y) z))")
    fired = [
        RedexRef((), Rule.BETA),
        RedexRef((Selector.APP_ARG,), Rule.BETA),
        RedexRef((), Rule.BETA),
    ]
    terms = [t0]
    for redex in fired:
        terms.append(step(terms[-1], redex))
    with pytest.raises(NotStandardError) as excinfo:
        is_standard(ReductionTrace(tuple(terms), tuple(fired)))
    assert excinfo.value.message == "Not standard: no clause covers terms 0..3 at root"


def test_is_standard_under_binders():
    """Test the wrapping clauses."""
    cert = is_standard(_trace([r"\w.((\x.x) w)", r"\w.w"]))
    assert cert.root.clause == Clause.LAMBDA
    assert cert.root.children[0].focus == (Selector.LAM_BODY,)

    cert = is_standard(_trace([r"[a] (mu b.[b] ((\x.x) y))", "[a] (mu b.[b] y)"]))
    assert cert.root.clause == Clause.NAMED
    assert cert.root.children[0].clause == Clause.MU

    cert = is_standard(_trace([r"x ((\y.y) z)", "x z"]))
    assert cert.root.clause in (Clause.VAR_APP, Clause.APP_SPLIT)


def test_is_standard_mu_prime():
    """Test a trace that fires a μ' redex at the head."""
    cert = is_standard(_trace(["(mu a.x) (mu b.y)", "mu b.y"]))
    assert cert.root.clause == Clause.MU_PRIME_HEAD
    cert = is_standard(_trace(["(mu a.x) (mu b.y)", "mu a.x"]))
    assert cert.root.clause == Clause.MU_HEAD


def test_is_standard_rejects_bad_traces():
    """Test that a trace that does not replay is refused."""
    bad = ReductionTrace((parse("x"), parse("y")), (RedexRef((), Rule.BETA),))
    with pytest.raises(InvalidTraceError):
        is_standard(bad)
    with pytest.raises(InvalidTraceError):
        standardize(bad)


def test_certificate_round_trip():
    """Test the JSON form of certificates."""
    cert = is_standard(_trace(HEAD_FIRST))
    model = cert.to_model()
    assert model.root.clause == "beta-head"
    assert len(model.trace.terms) == 3
    assert ClauseNode.from_model(model.root) == cert.root


def test_verify_certificate_rejects_forgery():
    """Test the verify_certificate method on altered certificates."""
    cert = is_standard(_trace(HEAD_FIRST))
    forged = StandardCertificate(cert.trace, ClauseNode(Clause.APP_SPLIT, 0, 2, (), 1))
    assert not verify_certificate(forged)
    shifted = StandardCertificate(cert.trace, ClauseNode(Clause.LENGTH_ONE, 0, 0, ()))
    assert not verify_certificate(shifted)


def test_standardize_examples():
    """Test the standardize method on the basic traces."""
    same = ReductionTrace((parse("x"),))
    tr, cert = standardize(same)
    assert tr.terms == same.terms
    assert cert.root.clause == Clause.LENGTH_ONE

    tr, cert = standardize(_argument_first())
    assert tr.steps == (RedexRef((), Rule.BETA), RedexRef((), Rule.BETA))
    assert [canonical_key(t) for t in tr.terms] == [
        canonical_key(parse(text)) for text in HEAD_FIRST
    ]
    assert verify_certificate(cert)

    original = _trace(["(mu a.x) (mu b.y)", "mu b.y"])
    tr, cert = standardize(original)
    assert _same_endpoints(tr, original)
    assert verify_certificate(cert)


def test_standardize_cuts_at_first_mu_head():
    """Test a μ redex fired after both sides of the application reduced."""
    original = _trace(
        [
            r"((\u.mu a.[a] u) y) ((\w.w) z)",
            r"(mu a.[a] y) ((\w.w) z)",
            "(mu a.[a] y) z",
            "mu a.[a] (y z)",
        ]
    )
    with pytest.raises(NotStandardError):
        is_standard(original)
    tr, cert = standardize(original)
    assert _same_endpoints(tr, original)
    assert lg(tr) == 3
    assert alpha_eq(tr.terms[2], parse(r"mu a.[a] (y ((\w.w) z))"))
    assert cert.root.clause == Clause.MU_HEAD
    assert cert.root.split == 1


def test_absorb_step():
    """Test the absorb_step method."""
    t = parse(HEAD_FIRST[0])
    for redex, reduct in successors(t):
        cert = absorb_step(leaf_certificate(t), (redex, reduct))
        assert lg(cert.trace) == 1
        assert alpha_eq(cert.trace.last, reduct)
        assert verify_certificate(cert)

    prefix = is_standard(_trace(HEAD_FIRST[:2]))
    last = prefix.trace.last
    redex = redexes(last)[0]
    cert = absorb_step(prefix, (redex, parse("z")))
    assert lg(cert.trace) == 2
    assert cert.root.clause == Clause.BETA_HEAD

    with pytest.raises(InvalidRedexError):
        absorb_step(leaf_certificate(t), (redexes(t)[0], parse("w")))


def test_standardize_every_short_trace():
    """Test that every reduction of up to four steps standardizes with its endpoints."""
    corpus = [parse(text) for text in PURE_CORPUS + MU_CORPUS]
    assert len(corpus) >= 30
    assert all(cxty(t) <= 12 for t in corpus)
    count = 0
    for t in corpus:
        for original in _all_traces(t, 4):
            tr, cert = standardize(original)
            assert _same_endpoints(tr, original), original
            assert validate_trace(tr)
            assert cert.trace == tr
            count += 1
    assert count > 100


def test_standard_traces_stay_standard():
    """Test that a standard trace is recognised after being standardized again."""
    for text in MU_CORPUS[:8]:
        for original in _all_traces(parse(text), 2):
            tr, _ = standardize(original)
            again, _ = standardize(tr)
            assert is_standard(again)
            assert _same_endpoints(again, original)


def _labelled(t: Term) -> Term:
    """Give every λ a distinct letters-only binder."""
    labels = iter(f"k{c}" for c in "abcdefghijklmnopqrstuvwxyz")

    def go(node: Term, env) -> Term:
        if isinstance(node, Var):
            return Var(env.get(node.name, node.name))
        if isinstance(node, Lam):
            label = next(labels)
            return Lam(label, go(node.body, {**env, node.binder: label}))
        return App(go(node.fun, env), go(node.arg, env))

    return go(t, {})


def _label(name: str) -> str:
    return name.rstrip("'0123456789")


def _classically_standard(tr: ReductionTrace) -> Optional[bool]:
    """Leftmost-residual standardness: no step fires a residual of a redex left of an
    earlier fired one. None when the λ labels cannot tell residuals apart."""
    frozen = set()
    for term, fired in zip(tr.terms, tr.steps):
        alternatives = [r for r in redexes(term) if r != fired]
        target = canonical_key(step(term, fired))
        if any(canonical_key(step(term, r)) == target for r in alternatives):
            return None
        lams = [(path, node) for path, node in subterms(term) if isinstance(node, Lam)]
        order = {path: index for index, (path, _) in enumerate(lams)}
        fired_path = fired.path + (Selector.APP_FUN,)
        if _label(subterm_at(term, fired_path).binder) in frozen:
            return False
        left_paths = {
            r.path + (Selector.APP_FUN,)
            for r in redexes(term)
            if order[r.path + (Selector.APP_FUN,)] < order[fired_path]
        }
        left = {_label(subterm_at(term, path).binder) for path in left_paths}
        if any(_label(node.binder) in left and path not in left_paths for path, node in lams):
            return None
        frozen |= left
    return True


def _relabelled(tr: ReductionTrace) -> ReductionTrace:
    terms = [_labelled(tr.first)]
    for fired in tr.steps:
        terms.append(step(terms[-1], fired))
    return ReductionTrace(tuple(terms), tr.steps)


def test_agrees_with_leftmost_residual_standardness():
    """Test is_standard against the classical definition on pure λ-terms."""
    compared = 0
    rejected = 0
    for text in PURE_CORPUS:
        for original in _all_traces(parse(text), 3):
            tr = _relabelled(original)
            expected = _classically_standard(tr)
            if expected is None:
                continue
            try:
                is_standard(tr)
                actual = True
            except NotStandardError:
                actual = False
            assert actual == expected, [str(t) for t in tr.terms]
            compared += 1
            rejected += not actual
    assert compared > 30
    assert rejected > 0


M_TERMS = [
    r"[a] (x ((\y.y) z))",
    r"(\w.w) ([a] x)",
    r"x (mu b.[a] ((\y.y) x))",
    r"(\y.[a] y) x",
]
N_TERMS = [
    r"(\u.u) (mu c.[c] v)",
    r"(\u.u) v",
    r"mu c.[c] ((\u.u) v)",
    "v",
]


def _certified(text: str):
    t = parse(text)
    _, tr = normalize(t, Strategy.LEFTMOST_OUTERMOST, max_steps=20)
    return standardize(tr)[1]


def _expected_endpoint(kind: LiftKind, m: Term, n: Optional[Term]) -> Term:
    if kind == LiftKind.WRAP_LAMBDA:
        return Lam("x", m)
    if kind == LiftKind.WRAP_MU:
        return Mu("a", m)
    if kind == LiftKind.WRAP_NAMED:
        return Named("a", m)
    if kind == LiftKind.APP_PAIR:
        return App(m, n)
    if kind == LiftKind.SUBST_LAMBDA:
        return subst_lambda(m, "x", n)
    if kind == LiftKind.SUBST_MU_RIGHT:
        return subst_mu_right(m, "a", n)
    return subst_mu_left(m, "a", n)


_LIFT_NAMES = {
    LiftKind.WRAP_LAMBDA: "x",
    LiftKind.WRAP_MU: "a",
    LiftKind.WRAP_NAMED: "a",
    LiftKind.APP_PAIR: None,
    LiftKind.SUBST_LAMBDA: "x",
    LiftKind.SUBST_MU_RIGHT: "a",
    LiftKind.SUBST_MU_LEFT: "a",
}


def test_lift_standard_closure():
    """Test every lift kind over pairs of certified traces."""
    lifted = 0
    for m_text in M_TERMS:
        first = _certified(m_text)
        for n_text in N_TERMS:
            second = _certified(n_text)
            for kind in LiftKind:
                cert = lift_standard(kind, first, second, _LIFT_NAMES[kind])
                m, p = first.trace.first, first.trace.last
                n, q = second.trace.first, second.trace.last
                assert alpha_eq(cert.trace.first, _expected_endpoint(kind, m, n)), kind
                assert alpha_eq(cert.trace.last, _expected_endpoint(kind, p, q)), kind
                assert verify_certificate(cert)
                lifted += 1
    assert lifted >= 100


def _random_certified(gen: TermGenerator, rng: random.Random) -> StandardCertificate:
    """Standardize up to three random steps from a random term."""
    terms = [gen.term(max_cxty=7)]
    fired: List[RedexRef] = []
    for _ in range(rng.randint(0, 3)):
        options = redexes(terms[-1])
        if not options:
            break
        fired.append(rng.choice(options))
        terms.append(step(terms[-1], fired[-1]))
    _, cert = standardize(ReductionTrace(tuple(terms), tuple(fired)))
    assert verify_certificate(cert)
    return cert


def test_lift_standard_on_generated_pairs():
    """Test every lift kind over seeded pairs of certified traces."""
    gen = TermGenerator(seed=53)
    rng = random.Random(53)
    for _ in range(100):
        first = _random_certified(gen, rng)
        second = _random_certified(gen, rng)
        m, p = first.trace.first, first.trace.last
        n, q = second.trace.first, second.trace.last
        for kind in LiftKind:
            cert = lift_standard(kind, first, second, _LIFT_NAMES[kind])
            assert alpha_eq(cert.trace.first, _expected_endpoint(kind, m, n)), (kind, m, n)
            assert alpha_eq(cert.trace.last, _expected_endpoint(kind, p, q)), (kind, p, q)
            assert verify_certificate(cert)


def test_lift_standard_examples():
    """Test the lift_standard method on small inputs."""
    cert = lift_standard(LiftKind.WRAP_MU, leaf_certificate(parse("x")), name="a")
    assert cert.root.clause == Clause.LENGTH_ONE
    assert alpha_eq(cert.trace.first, parse("mu a.x"))

    left = is_standard(_trace([r"(\y.y) (\x.x)", r"\x.x"]))
    cert = lift_standard(LiftKind.APP_PAIR, left, leaf_certificate(parse("z")))
    assert cert.root.clause == Clause.APP_SPLIT
    assert [canonical_key(t) for t in cert.trace.terms] == [
        canonical_key(parse(r"((\y.y) (\x.x)) z")),
        canonical_key(parse(r"(\x.x) z")),
    ]

    with pytest.raises(NotStandardError):
        lift_standard(LiftKind.APP_PAIR, left)
    with pytest.raises(NotStandardError):
        lift_standard(LiftKind.WRAP_LAMBDA, left)


def test_standardization_module(standardization_module):
    """Test the StandardizationModule wrappers."""
    tr = _argument_first()
    assert standardization_module.lg(tr) == 2
    standard, cert = standardization_module.standardize(tr)
    assert standardization_module.verify_certificate(cert)
    assert standardization_module.is_standard(standard).root == cert.root
    leaf = leaf_certificate(tr.first)
    extended = standardization_module.absorb_step(leaf, (tr.steps[0], tr.terms[1]))
    assert lg(extended.trace) == 1
    wrapped = standardization_module.lift_standard(LiftKind.WRAP_LAMBDA, cert, name="q")
    assert isinstance(wrapped.trace.first, Lam)
