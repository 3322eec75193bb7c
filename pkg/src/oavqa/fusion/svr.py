"""Epsilon-SVR with an RBF kernel, trained by sequential minimal optimisation.

The dual is solved in the 2n-variable form

    min 1/2 a'Qa + p'a   s.t.  y'a = 0,  0 <= a <= C

with ``y = [+1]*n + [-1]*n``, ``p = [eps - z, eps + z]`` and
``Q[s, t] = y_s y_t K(x_s mod n, x_t mod n)``. Working pairs are chosen by the
second-order rule of Fan, Chen & Lin (2005); the update and bias recovery
mirror LIBSVM so trained models agree with it up to the stopping tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

TAU = 1e-12


class SvrError(ValueError):
    pass


class SvrConvergenceError(SvrError):
    def __init__(self, iterations: int, violation: float):
        super().__init__(f"SMO did not converge in {iterations} iterations (KKT gap {violation:.3g})")
        self.iterations = iterations
        self.violation = violation


@dataclass(frozen=True)
class SvrConfig:
    gamma: float = 0.05
    C: float = 1024.0
    epsilon: float = 0.1
    tol: float = 1e-3
    max_iter: int = 2_000_000
    kernel: str = "rbf"

    def __post_init__(self):
        if self.kernel != "rbf":
            raise SvrError(f"unsupported kernel {self.kernel!r}")
        if self.gamma <= 0 or self.C <= 0 or self.epsilon < 0 or self.tol <= 0:
            raise SvrError("need gamma > 0, C > 0, epsilon >= 0, tol > 0")


@dataclass
class SvrModel:
    support_vectors: np.ndarray  # (m, d) inputs after scaling
    dual_coef: np.ndarray  # (m,) alpha - alpha*
    bias: float
    scale_min: np.ndarray  # (d,)
    scale_max: np.ndarray  # (d,)
    config: SvrConfig
    schema: tuple[str, ...] = ()
    support_index: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    diagnostics: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return int(self.scale_min.shape[0])

    def scale(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.dim:
            raise SvrError(f"input has {X.shape[1]} dimensions, model expects {self.dim}")
        span = self.scale_max - self.scale_min
        safe = np.where(span > 0, span, 1.0)
        out = np.where(span > 0, (X - self.scale_min) / safe, 0.0)
        return np.clip(out, 0.0, 1.0)

    def decision(self, Xs: np.ndarray) -> np.ndarray:
        if len(self.dual_coef) == 0:
            return np.full(len(Xs), self.bias)
        # correctly rounded sum: the expansion cancels heavily when many duals sit at C
        terms = rbf_kernel(Xs, self.support_vectors, self.config.gamma) * self.dual_coef
        return np.array([math.fsum(row) for row in terms.tolist()]) + self.bias

    def predict(self, X):
        return self.decision(self.scale(X))

    def to_json(self) -> str:
        doc = {
            "type": "epsilon_svr",
            "config": asdict(self.config),
            "schema": list(self.schema),
            "scale_min": self.scale_min.tolist(),
            "scale_max": self.scale_max.tolist(),
            "bias": self.bias,
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "support_index": self.support_index.tolist(),
            "diagnostics": self.diagnostics,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SvrModel":
        d = json.loads(text)
        if d.get("type") != "epsilon_svr":
            raise SvrError("not an SVR model document")
        dim = len(d["scale_min"])
        return cls(
            support_vectors=np.asarray(d["support_vectors"], dtype=np.float64).reshape(-1, dim),
            dual_coef=np.asarray(d["dual_coef"], dtype=np.float64),
            bias=float(d["bias"]),
            scale_min=np.asarray(d["scale_min"], dtype=np.float64),
            scale_max=np.asarray(d["scale_max"], dtype=np.float64),
            config=SvrConfig(**d["config"]),
            schema=tuple(d.get("schema", ())),
            support_index=np.asarray(d.get("support_index", []), dtype=np.int64),
            diagnostics=d.get("diagnostics", {}),
        )


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    # direct differences; the expanded |a|^2 + |b|^2 - 2ab form loses digits to cancellation
    return np.exp(-gamma * cdist(A, B, "sqeuclidean"))


def _smo(K: np.ndarray, z: np.ndarray, cfg: SvrConfig, track_objective: bool):
    n = len(z)
    C = cfg.C
    y = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([cfg.epsilon - z, cfg.epsilon + z])
    idx = np.concatenate([np.arange(n), np.arange(n)])
    kd = np.diag(K).copy()
    alpha = np.zeros(2 * n)
    G = p.copy()
    history = [0.0] if track_objective else None

    it = 0
    gap = np.inf
    while it < cfg.max_iter:
        neg_yg = -y * G
        up = np.where(y > 0, alpha < C, alpha > 0)
        low = np.where(y > 0, alpha > 0, alpha < C)
        cand = np.where(up, neg_yg, -np.inf)
        i = int(np.argmax(cand))
        g_max = cand[i]
        g_min = np.min(np.where(low, neg_yg, np.inf))
        gap = g_max - g_min
        if gap < cfg.tol:
            break

        ki = K[idx[i], idx]
        b = g_max - neg_yg
        a = kd[idx[i]] + kd[idx] - 2.0 * ki
        a = np.where(a > 0, a, TAU)
        score = np.where(low & (b > 0), -(b * b) / a, np.inf)
        j = int(np.argmin(score))

        ai_old, aj_old = alpha[i], alpha[j]
        kij = K[idx[i], idx[j]]
        quad = kd[idx[i]] + kd[idx[j]] - 2.0 * kij
        quad = quad if quad > 0 else TAU
        if y[i] != y[j]:
            delta = (-G[i] - G[j]) / quad
            diff = ai_old - aj_old
            ai, aj = ai_old + delta, aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            delta = (G[i] - G[j]) / quad
            total = ai_old + aj_old
            ai, aj = ai_old - delta, aj_old + delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        d_i, d_j = ai - ai_old, aj - aj_old
        # column t of Q is y * y_t * K[idx, idx_t]
        G += y * (y[i] * d_i * ki + y[j] * d_j * K[idx[j], idx])
        it += 1
        if track_objective:
            history.append(0.5 * float(alpha @ (G + p)))
    else:
        raise SvrConvergenceError(it, float(gap))

    # bias as in LIBSVM: mean over free variables, else midpoint of the feasible interval
    yg = y * G
    at_upper = alpha >= C
    at_lower = alpha <= 0
    free = ~(at_upper | at_lower)
    if free.any():
        rho = float(yg[free].mean())
    else:
        ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
        lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
        ub = yg[ub_mask].min() if ub_mask.any() else np.inf
        lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
        rho = float((ub + lb) / 2.0)
    beta = alpha[:n] - alpha[n:]
    objective = 0.5 * float(alpha @ (G + p))
    return beta, -rho, it, float(gap), objective, history


def train_svr(X, z, config: SvrConfig | None = None, schema=(), track_objective: bool = False) -> SvrModel:
    """Fit an epsilon-SVR on min-max scaled inputs.

    Scaling bounds come from ``X`` and are stored in the model; later inputs are
    clipped to the training range.
    """
    cfg = config or SvrConfig()
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    z = np.asarray(z, dtype=np.float64).ravel()
    if X.shape[0] != z.shape[0]:
        raise SvrError(f"{X.shape[0]} inputs but {z.shape[0]} targets")
    if X.shape[0] < 2:
        raise SvrError("need at least two training samples")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(z))):
        raise SvrError("training data contains non-finite values")
    if schema and len(schema) != X.shape[1]:
        raise SvrError(f"schema names {len(schema)} dimensions, inputs have {X.shape[1]}")

    lo, hi = X.min(axis=0), X.max(axis=0)
    model = SvrModel(np.empty((0, X.shape[1])), np.empty(0), 0.0, lo, hi, cfg, tuple(schema))
    Xs = model.scale(X)
    K = rbf_kernel(Xs, Xs, cfg.gamma)
    beta, bias, iters, gap, objective, history = _smo(K, z, cfg, track_objective)
    sv = beta != 0
    model.support_vectors = Xs[sv]
    model.dual_coef = beta[sv]
    model.support_index = np.flatnonzero(sv)
    model.bias = bias
    model.diagnostics = {
        "iterations": iters,
        "kkt_gap": gap,
        "objective": objective,
        "n_support": int(sv.sum()),
        "n_bounded": int(np.sum(np.abs(beta) >= cfg.C)),
    }
    if track_objective:
        model.diagnostics["objective_history"] = history
    return model


def predict_svr(model: SvrModel, x) -> float | np.ndarray:
    """Predict one input vector (returns a float) or a batch (returns an array)."""
    x = np.asarray(x, dtype=np.float64)
    out = model.predict(x)
    return float(out[0]) if x.ndim == 1 else out


def kkt_violation(model: SvrModel, X, z) -> float:
    """Largest KKT violation of the trained model on its training data, in target units.

    Points with zero dual weight must sit inside the epsilon tube, free points on
    its boundary, and bounded points on or outside it.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    z = np.asarray(z, dtype=np.float64)
    Xs = model.scale(X)
    eps, C = model.config.epsilon, model.config.C
    beta = np.zeros(len(z))
    beta[model.support_index] = model.dual_coef
    r = z - model.decision(Xs)  # beta > 0 means the target sits above the tube
    worst = 0.0
    for b, res in zip(beta, r):
        if b == 0:
            v = max(0.0, abs(res) - eps)
        elif abs(b) >= C:
            v = max(0.0, eps - np.sign(b) * res)
        else:
            v = abs(np.sign(b) * res - eps)
        worst = max(worst, v)
    return worst
