import numpy as np
import pytest

from fxrange import affine
from fxrange.data import RunConfig
from fxrange.pipeline import initial_state, resolve_dataset


def make_config(n, n_hidden, m, seed=0, initial=None, online=60, **kw):
    return RunConfig(
        n=n, n_hidden=n_hidden, m=m, seed=seed,
        initial_samples=initial if initial is not None else 3 * n_hidden,
        online_samples=online, **kw,
    )


@pytest.fixture
def desk_small():
    cfg = make_config(4, 5, 3, seed=7, initial=30, online=90)
    ds = resolve_dataset(cfg)
    return cfg, ds, initial_state(cfg, ds)


class DagNode:
    """Expression node carrying both the affine form and a concrete
    evaluator over sampled noise-symbol assignments."""

    def __init__(self, form, eval_fn, leaf_ids):
        self.form = form
        self.eval_fn = eval_fn
        self.leaf_ids = leaf_ids

    def sample(self, rng, count):
        eps = {nid: rng.uniform(-1.0, 1.0, size=count) for nid in self.leaf_ids}
        return self.eval_fn(eps)


def _leaf(rng, ctx):
    lo, hi = sorted(rng.uniform(-3.0, 3.0, size=2))
    form = affine.from_interval(lo, hi, ctx)
    if form.is_constant():
        return DagNode(form, lambda eps, c=form.center: np.full(1, c), frozenset())
    (nid, coeff), = form.terms.items()
    c = form.center
    return DagNode(form, lambda eps, nid=nid, c=c, k=coeff: c + k * eps[nid], frozenset([nid]))


def random_dag(rng, ctx, depth):
    """Random expression over +, -, *, / with interval-valued leaves.

    Division denominators are shifted to be sign-definite, matching the
    reciprocal's precondition.
    """
    if depth == 0 or rng.random() < 0.25:
        return _leaf(rng, ctx)
    a = random_dag(rng, ctx, depth - 1)
    b = random_dag(rng, ctx, depth - 1)
    ids = a.leaf_ids | b.leaf_ids
    op = rng.integers(0, 4)
    if op == 0:
        return DagNode(affine.add(a.form, b.form), lambda e: a.eval_fn(e) + b.eval_fn(e), ids)
    if op == 1:
        return DagNode(affine.sub(a.form, b.form), lambda e: a.eval_fn(e) - b.eval_fn(e), ids)
    if op == 2:
        return DagNode(affine.mul(a.form, b.form, ctx), lambda e: a.eval_fn(e) * b.eval_fn(e), ids)
    iv = b.form.interval()
    shift = 0.0 if iv.lo > 0.1 else 0.5 - iv.lo
    den_form = affine.add(b.form, affine.constant(shift, ctx))
    den = DagNode(den_form, lambda e: b.eval_fn(e) + shift, b.leaf_ids)
    return DagNode(affine.div(a.form, den.form, ctx), lambda e: a.eval_fn(e) / den.eval_fn(e), ids)


def assert_sound(node, rng, samples=2000):
    iv = node.form.interval()
    values = node.sample(rng, samples)
    tol = 1e-9 * (1.0 + max(abs(iv.lo), abs(iv.hi)))
    assert values.min() >= iv.lo - tol, f"{values.min()} below {iv.lo}"
    assert values.max() <= iv.hi + tol, f"{values.max()} above {iv.hi}"
