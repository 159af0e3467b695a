"""Static range analysis of the OS-ELM training and prediction graphs.

The training graph is instantiated for a single step: empirically the
observed ranges of every intermediate at step 1 cover the later steps
(the hypothesis experiment below measures exactly this), so one unrolling
stands in for the whole online run.  The lone division's denominator
1 + h P h' is provably above 1 for a positive-definite P; when the affine
overapproximation of it dips below 1 the lower bound is floored there so
the reciprocal stays well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import affine, linalg
from .affine import AffineForm, AnalysisContext, Interval
from .linalg import AffineMatrix
from .oselm import ModelState, train_step

# Every variable the analysis, the baseline, and the fixed-point simulator
# agree to report.  Order matters for stable serialization.
VARIABLES = (
    "x", "t", "alpha", "b", "e", "h",
    "gamma1", "gamma2", "gamma3", "gamma4", "gamma5",
    "gamma6", "gamma7", "gamma8", "gamma9", "gamma10",
    "P", "beta", "y",
)

STEP_VARIABLES = (
    "e", "h", "gamma1", "gamma2", "gamma3", "gamma4", "gamma5",
    "gamma6", "gamma7", "gamma8", "gamma9", "gamma10", "P", "beta",
)


class AnalysisBug(RuntimeError):
    """An internal contradiction: something provably true failed to hold."""


@dataclass(frozen=True)
class InputSpec:
    alpha: np.ndarray
    bias: np.ndarray
    P0: np.ndarray
    beta0: np.ndarray
    x_interval: Interval = Interval(0.0, 1.0)
    t_interval: Interval = Interval(0.0, 1.0)

    @property
    def n(self) -> int:
        return self.alpha.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.alpha.shape[1]

    @property
    def m(self) -> int:
        return self.beta0.shape[1]


@dataclass
class RangeReport:
    variables: dict[str, Interval]

    def __getitem__(self, name: str) -> Interval:
        return self.variables[name]


def clamp_gamma5(g5: AffineForm, ctx: AnalysisContext) -> AffineForm:
    """Floor the denominator's lower bound at 1.

    1 + h P h' is strictly above 1 whenever P is positive-definite, so a
    computed lower bound below 1 is pure overapproximation slack and can be
    raised without losing soundness.  An upper bound below 1 can't happen
    and is treated as a bug.
    """
    iv = g5.interval()
    if iv.hi < 1.0:
        raise AnalysisBug(f"denominator upper bound {iv.hi} < 1")
    if iv.lo >= 1.0:
        return g5
    return affine.from_interval(1.0, iv.hi, ctx)


def beta_union(beta0_hat: AffineMatrix, beta1_hat: AffineMatrix, ctx: AnalysisContext) -> AffineMatrix:
    """Per-element interval hull of the two output-weight estimates,
    re-expressed on fresh noise symbols."""
    if beta0_hat.shape != beta1_hat.shape:
        raise linalg.ShapeError("beta shapes differ")
    forms = []
    for a, b in zip(beta0_hat.elems, beta1_hat.elems):
        hull = a.interval().hull(b.interval())
        forms.append(affine.from_interval(hull.lo, hull.hi, ctx))
    return AffineMatrix(beta0_hat.rows, beta0_hat.cols, tuple(forms))


def _input_matrix(iv: Interval, cols: int, ctx: AnalysisContext) -> AffineMatrix:
    forms = [affine.from_interval(iv.lo, iv.hi, ctx) for _ in range(cols)]
    return AffineMatrix(1, cols, tuple(forms))


@dataclass
class TrainingAnalysis:
    intervals: dict[str, Interval]
    beta0_hat: AffineMatrix
    beta1_hat: AffineMatrix


def analyze_training_graph(spec: InputSpec, ctx: AnalysisContext, clamp: bool = True) -> TrainingAnalysis:
    """Run one training step in affine arithmetic and record every range.

    Product variables are reported as the hull of their element intervals
    and their accumulator trace.  P and beta are hulled with their initial
    (constant) contents since the same buffer holds both.
    """
    alpha_m = linalg.mat_from_reals(spec.alpha.tolist(), ctx)
    b_m = linalg.mat_from_reals([spec.bias.tolist()], ctx)
    P0_m = linalg.mat_from_reals(spec.P0.tolist(), ctx)
    beta0_m = linalg.mat_from_reals(spec.beta0.tolist(), ctx)

    x = _input_matrix(spec.x_interval, spec.n, ctx)
    t = _input_matrix(spec.t_interval, spec.m, ctx)

    iv: dict[str, Interval] = {
        "x": spec.x_interval,
        "t": spec.t_interval,
        "alpha": linalg.mat_interval(alpha_m),
        "b": linalg.mat_interval(b_m),
    }

    e, tr_e = linalg.mat_mul(x, alpha_m, ctx)
    iv["e"] = linalg.mat_interval(e).hull(tr_e.interval)
    h = linalg.mat_add(e, b_m)
    iv["h"] = linalg.mat_interval(h)
    hT = linalg.transpose(h)

    g1, tr1 = linalg.mat_mul(P0_m, hT, ctx)
    iv["gamma1"] = linalg.mat_interval(g1).hull(tr1.interval)
    g2, tr2 = linalg.mat_mul(h, P0_m, ctx)
    iv["gamma2"] = linalg.mat_interval(g2).hull(tr2.interval)
    g3, tr3 = linalg.mat_mul(g1, g2, ctx)
    iv["gamma3"] = linalg.mat_interval(g3).hull(tr3.interval)
    g4, tr4 = linalg.mat_mul(g2, hT, ctx)
    iv["gamma4"] = linalg.mat_interval(g4).hull(tr4.interval)

    g5 = affine.add(g4.at(0, 0), affine.constant(1.0, ctx))
    if clamp:
        g5 = clamp_gamma5(g5, ctx)
    iv["gamma5"] = g5.interval()
    inv_g5 = affine.recip(g5, ctx)

    g6 = linalg.scale(g3, inv_g5, ctx)
    iv["gamma6"] = linalg.mat_interval(g6)
    P1 = linalg.mat_sub(P0_m, g6)
    iv["P"] = linalg.mat_interval(P1).hull(linalg.mat_interval(P0_m))

    g7, tr7 = linalg.mat_mul(P1, hT, ctx)
    iv["gamma7"] = linalg.mat_interval(g7).hull(tr7.interval)
    g8, tr8 = linalg.mat_mul(h, beta0_m, ctx)
    iv["gamma8"] = linalg.mat_interval(g8).hull(tr8.interval)
    g9 = linalg.mat_sub(t, g8)
    iv["gamma9"] = linalg.mat_interval(g9)
    g10, tr10 = linalg.mat_mul(g7, g9, ctx)
    iv["gamma10"] = linalg.mat_interval(g10).hull(tr10.interval)
    beta1 = linalg.mat_add(beta0_m, g10)
    iv["beta"] = linalg.mat_interval(beta1).hull(linalg.mat_interval(beta0_m))

    return TrainingAnalysis(iv, beta0_m, beta1)


def analyze_prediction_graph(spec: InputSpec, beta_hull: AffineMatrix, ctx: AnalysisContext) -> dict[str, Interval]:
    """AA over the inference pass: e = x alpha, h = e + b, y = h beta."""
    alpha_m = linalg.mat_from_reals(spec.alpha.tolist(), ctx)
    b_m = linalg.mat_from_reals([spec.bias.tolist()], ctx)
    x = _input_matrix(spec.x_interval, spec.n, ctx)

    e, tr_e = linalg.mat_mul(x, alpha_m, ctx)
    h = linalg.mat_add(e, b_m)
    y, tr_y = linalg.mat_mul(h, beta_hull, ctx)
    return {
        "e": linalg.mat_interval(e).hull(tr_e.interval),
        "h": linalg.mat_interval(h),
        "y": linalg.mat_interval(y).hull(tr_y.interval),
    }


def analyze(spec: InputSpec, ctx: AnalysisContext | None = None, clamp: bool = True) -> RangeReport:
    """Full pipeline: training graph, beta hull, prediction graph."""
    ctx = ctx or AnalysisContext()
    training = analyze_training_graph(spec, ctx, clamp=clamp)
    hull = beta_union(training.beta0_hat, training.beta1_hat, ctx)
    pred = analyze_prediction_graph(spec, hull, ctx)
    variables = dict(training.intervals)
    variables["y"] = pred["y"]
    ordered = {name: variables[name] for name in VARIABLES}
    return RangeReport(ordered)


# ---------------------------------------------------------------------------
# Dynamic probing (shared by the hypothesis experiment, the simulation
# baseline, and the soundness tests).

def probe_step_batch(state: ModelState, X: np.ndarray, T: np.ndarray) -> dict[str, tuple[float, float]]:
    """Evaluate one training step on a batch of probe inputs and return the
    observed (min, max) of every step variable.  y coincides with gamma8
    under identity activation but is tracked under its own name."""
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float)
    P, beta = state.P, state.beta
    E = X @ state.alpha
    H = E + state.bias
    G1 = H @ P.T
    G2 = H @ P
    G3 = np.einsum("bi,bj->bij", G1, G2)
    G4 = np.einsum("bi,bi->b", G2, H)
    G5 = 1.0 + G4
    G6 = G3 / G5[:, None, None]
    Pn = P[None, :, :] - G6
    G7 = np.einsum("bij,bj->bi", Pn, H)
    G8 = H @ beta
    G9 = T - G8
    G10 = np.einsum("bi,bj->bij", G7, G9)
    Bn = beta[None, :, :] + G10
    values = {
        "x": X, "t": T, "e": E, "h": H,
        "gamma1": G1, "gamma2": G2, "gamma3": G3, "gamma4": G4, "gamma5": G5,
        "gamma6": G6, "gamma7": G7, "gamma8": G8, "gamma9": G9, "gamma10": G10,
        "P": Pn, "beta": Bn, "y": G8,
    }
    return {k: (float(v.min()), float(v.max())) for k, v in values.items()}


@dataclass
class HypothesisTrace:
    """Per-step observed extrema, step indices starting at 1."""

    extrema: dict[str, list[tuple[float, float]]] = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return len(next(iter(self.extrema.values()))) if self.extrema else 0

    def rows(self):
        for name, seq in self.extrema.items():
            for step, (lo, hi) in enumerate(seq, start=1):
                yield step, name, lo, hi


def run_hypothesis_experiment(
    state0: ModelState,
    online_x: np.ndarray,
    online_t: np.ndarray,
    probes: int = 1000,
    seed: int = 0,
) -> HypothesisTrace:
    """Per-step interval measurement.

    At each online step: snapshot the state, feed ``probes`` random [0, 1]
    samples through the step and record extrema of every variable, then
    advance with the real sample.
    """
    rng = np.random.default_rng(seed)
    state = ModelState(state0.alpha, state0.bias, state0.P.copy(), state0.beta.copy())
    trace = HypothesisTrace({name: [] for name in STEP_VARIABLES})
    n, m = state.alpha.shape[0], state.beta.shape[1]
    for x, t in zip(np.atleast_2d(online_x), np.atleast_2d(online_t)):
        X = rng.uniform(0.0, 1.0, size=(probes, n)) if probes else np.zeros((0, n))
        T = rng.uniform(0.0, 1.0, size=(probes, m)) if probes else np.zeros((0, m))
        if probes:
            extrema = probe_step_batch(state, X, T)
            for name in STEP_VARIABLES:
                trace.extrema[name].append(extrema[name])
        state, _ = train_step(state, x, t)
    return trace


def check_hypothesis(trace: HypothesisTrace) -> dict[str, float]:
    """Fraction of steps >= 2 whose observed interval fits inside step 1's."""
    result = {}
    for name, seq in trace.extrema.items():
        if len(seq) < 2:
            result[name] = 1.0
            continue
        lo1, hi1 = seq[0]
        contained = sum(1 for lo, hi in seq[1:] if lo1 <= lo and hi <= hi1)
        result[name] = contained / (len(seq) - 1)
    return result
