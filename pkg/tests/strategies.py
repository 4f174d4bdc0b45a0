"""Hypothesis strategies for terms."""

from hypothesis import strategies as st

from lambdamu.modules.generators import LAMBDA_NAMES, MU_NAMES
from lambdamu.modules.substitution import rename_lambda, rename_mu
from lambdamu.modules.terms import App, Lam, Mu, Named, Term, Var

lambda_names = st.sampled_from(LAMBDA_NAMES)
mu_names = st.sampled_from(MU_NAMES)

terms = st.recursive(
    st.builds(Var, lambda_names),
    lambda children: st.one_of(
        st.builds(Lam, lambda_names, children),
        st.builds(App, children, children),
        st.builds(Mu, mu_names, children),
        st.builds(Named, mu_names, children),
    ),
    max_leaves=10,
)

pure_terms = st.recursive(
    st.builds(Var, lambda_names),
    lambda children: st.one_of(
        st.builds(Lam, lambda_names, children),
        st.builds(App, children, children),
    ),
    max_leaves=10,
)


def rebind(t: Term) -> Term:
    """Rename every binder, which must leave the term alpha-equal."""
    if isinstance(t, Lam):
        new = t.binder + "_r"
        return Lam(new, rebind(rename_lambda(t.body, t.binder, new)))
    if isinstance(t, Mu):
        new = t.binder + "_r"
        return Mu(new, rebind(rename_mu(t.body, t.binder, new)))
    if isinstance(t, Named):
        return Named(t.name, rebind(t.body))
    if isinstance(t, App):
        return App(rebind(t.fun), rebind(t.arg))
    return t
