"""
Bipartite graph network mapping an instance graph to per-binary probabilities.

numpy float64 throughout, with a hand-written reverse pass. Layout:
  variable/constraint embeddings (affine + layer norm), an affine edge embedding,
  two rounds of interleaved half-convolutions (constraints first, then variables),
  each update an MLP over [own state, pooled neighbour messages], and an MLP head
  with a sigmoid on the binary variables' final states. Messages are averaged over the
  receiving node's degree by default; plain sums are available for small graphs.
"""
import json
import logging
import os
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from predsearch.config import HIDDEN_DIM
from predsearch.errors import DimensionMismatchError, ModelCompatibilityError
from predsearch.models.graph_model import CON_FEATURES, VAR_FEATURES, BipartiteGraph
from predsearch.models.train_model import Aggregation, ModelCheckpoint

logger = logging.getLogger(__name__)

LAYERS = 2
LN_EPS = 1e-5

Params = Dict[str, np.ndarray]


def _shapes(hidden: int) -> List[Tuple[str, Tuple[int, ...], str]]:
    """(name, shape, init) for every parameter, in a fixed order."""
    h = hidden
    spec = [
        ("embed_var.W", (VAR_FEATURES, h), "xavier"),
        ("embed_var.b", (h,), "zeros"),
        ("embed_var.gamma", (h,), "ones"),
        ("embed_var.beta", (h,), "zeros"),
        ("embed_con.W", (CON_FEATURES, h), "xavier"),
        ("embed_con.b", (h,), "zeros"),
        ("embed_con.gamma", (h,), "ones"),
        ("embed_con.beta", (h,), "zeros"),
        ("embed_edge.W", (1, h), "xavier"),
        ("embed_edge.b", (h,), "zeros"),
    ]
    for k in range(1, LAYERS + 1):
        for side in ("con", "var"):
            p = f"conv{k}.{side}"
            spec += [
                (f"{p}.W1", (2 * h, h), "xavier"),
                (f"{p}.b1", (h,), "zeros"),
                (f"{p}.W2", (h, h), "xavier"),
                (f"{p}.b2", (h,), "zeros"),
            ]
    spec += [
        ("head.W1", (h, h), "xavier"),
        ("head.b1", (h,), "zeros"),
        ("head.W2", (h, 1), "xavier"),
        ("head.b2", (1,), "zeros"),
    ]
    return spec


def _scatter_sum(index: np.ndarray, values: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros((size, values.shape[1]))
    np.add.at(out, index, values)
    return out


def _layer_norm(z: np.ndarray, gamma: np.ndarray, beta: np.ndarray):
    mu = z.mean(axis=1, keepdims=True)
    var = z.var(axis=1, keepdims=True)
    inv_sd = 1.0 / np.sqrt(var + LN_EPS)
    xhat = (z - mu) * inv_sd
    return gamma * xhat + beta, (xhat, inv_sd)


def _layer_norm_backward(dy: np.ndarray, gamma: np.ndarray, cache):
    xhat, inv_sd = cache
    dgamma = np.sum(dy * xhat, axis=0)
    dbeta = np.sum(dy, axis=0)
    dxhat = dy * gamma
    dz = inv_sd * (dxhat - dxhat.mean(axis=1, keepdims=True)
                   - xhat * np.mean(dxhat * xhat, axis=1, keepdims=True))
    return dz, dgamma, dbeta


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logit_loss(logits: Sequence[float], target: Sequence[float]) -> float:
    """Cross-entropy of sigmoid(logits) against soft targets, computed without the clamp."""
    z = np.asarray(logits, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    return float(np.sum(np.logaddexp(0.0, z) - t * z))


def loss(pred: Sequence[float], target: Sequence[float], eps: float = 1e-7) -> float:
    """Soft-target binary cross-entropy summed over variables."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise DimensionMismatchError(f"prediction length {pred.shape} != target length {target.shape}")
    p = np.clip(pred, eps, 1.0 - eps)
    return float(-np.sum(target * np.log(p) + (1.0 - target) * np.log(1.0 - p)))


def entropy_bound(target: Sequence[float]) -> float:
    """sum_d H(p_d): the smallest value the soft-target cross-entropy can take."""
    t = np.asarray(target, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(t > 0, t * np.log(t), 0.0) + np.where(t < 1, (1 - t) * np.log(1 - t), 0.0)
    return float(-np.sum(terms))


class GnnModel:
    def __init__(self, params: Params, hidden_dim: int, seed: int = 0, edge_term: bool = True,
                 aggregation: Aggregation = Aggregation.MEAN):
        self.params = params
        self.hidden_dim = hidden_dim
        self.seed = seed
        self.edge_term = edge_term
        self.aggregation = Aggregation(aggregation)

    @classmethod
    def init(cls, hidden_dim: int = HIDDEN_DIM, seed: int = 0, edge_term: bool = True,
             aggregation: Aggregation = Aggregation.MEAN) -> "GnnModel":
        """Xavier-uniform weights, zero biases, unit layer-norm gains."""
        rng = np.random.default_rng(seed)
        params: Params = {}
        for name, shape, kind in _shapes(hidden_dim):
            if kind == "xavier":
                limit = np.sqrt(6.0 / (shape[0] + shape[1]))
                params[name] = rng.uniform(-limit, limit, size=shape)
            elif kind == "ones":
                params[name] = np.ones(shape)
            else:
                params[name] = np.zeros(shape)
        return cls(params, hidden_dim, seed, edge_term, aggregation)

    @classmethod
    def zeros(cls, hidden_dim: int = HIDDEN_DIM, edge_term: bool = True,
              aggregation: Aggregation = Aggregation.MEAN) -> "GnnModel":
        params = {name: np.zeros(shape) for name, shape, _ in _shapes(hidden_dim)}
        return cls(params, hidden_dim, 0, edge_term, aggregation)

    @property
    def num_parameters(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def copy(self) -> "GnnModel":
        return GnnModel({k: v.copy() for k, v in self.params.items()}, self.hidden_dim, self.seed, self.edge_term,
                        self.aggregation)

    # -- forward -------------------------------------------------------------

    def _inverse_degrees(self, g: BipartiteGraph) -> Tuple[np.ndarray, np.ndarray]:
        """Per-node message scale: 1/degree (isolated nodes 1) for mean pooling, else 1."""
        if self.aggregation == Aggregation.SUM:
            return np.ones((g.m, 1)), np.ones((g.n, 1))
        con_deg = np.bincount(g.edge_rows, minlength=g.m).astype(np.float64)
        var_deg = np.bincount(g.edge_cols, minlength=g.n).astype(np.float64)
        return (1.0 / np.maximum(con_deg, 1.0))[:, None], (1.0 / np.maximum(var_deg, 1.0))[:, None]

    def _mlp(self, prefix: str, a: np.ndarray):
        P = self.params
        u = a @ P[f"{prefix}.W1"] + P[f"{prefix}.b1"]
        r = np.maximum(u, 0.0)
        return r @ P[f"{prefix}.W2"] + P[f"{prefix}.b2"], (a, u, r)

    def _mlp_backward(self, prefix: str, dout: np.ndarray, cache, grads: Params) -> np.ndarray:
        P = self.params
        a, u, r = cache
        grads[f"{prefix}.W2"] += r.T @ dout
        grads[f"{prefix}.b2"] += dout.sum(axis=0)
        du = (dout @ P[f"{prefix}.W2"].T) * (u > 0)
        grads[f"{prefix}.W1"] += a.T @ du
        grads[f"{prefix}.b1"] += du.sum(axis=0)
        return du @ P[f"{prefix}.W1"].T

    def _forward(self, g: BipartiteGraph):
        if g.var_feats.shape[1] != VAR_FEATURES or g.con_feats.shape[1] != CON_FEATURES:
            raise DimensionMismatchError(
                f"graph features {g.var_feats.shape[1]}/{g.con_feats.shape[1]} do not match the model "
                f"({VAR_FEATURES}/{CON_FEATURES})")
        P = self.params
        rows, cols = g.edge_rows, g.edge_cols
        cache = {}
        inv_c, inv_v = self._inverse_degrees(g)
        hv, cache["ln_var"] = _layer_norm(g.var_feats @ P["embed_var.W"] + P["embed_var.b"],
                                          P["embed_var.gamma"], P["embed_var.beta"])
        hc, cache["ln_con"] = _layer_norm(g.con_feats @ P["embed_con.W"] + P["embed_con.b"],
                                          P["embed_con.gamma"], P["embed_con.beta"])
        he = g.edge_coeffs[:, None] * P["embed_edge.W"] + P["embed_edge.b"]
        if not self.edge_term:
            he = np.zeros_like(he)

        layers = []
        for k in range(1, LAYERS + 1):
            mc = _scatter_sum(rows, hv[cols] + he, g.m) * inv_c
            hc, con_cache = self._mlp(f"conv{k}.con", np.concatenate([hc, mc], axis=1))
            mv = _scatter_sum(cols, hc[rows] + he, g.n) * inv_v
            hv, var_cache = self._mlp(f"conv{k}.var", np.concatenate([hv, mv], axis=1))
            layers.append((con_cache, var_cache))
        cache["layers"] = layers

        logits, cache["head"] = self._mlp("head", hv[: g.q])
        cache["inv"] = (inv_c, inv_v)
        return logits[:, 0], cache

    def forward(self, g: BipartiteGraph) -> np.ndarray:
        logits, _ = self._forward(g)
        return sigmoid(logits)

    # -- backward ------------------------------------------------------------

    def backward(self, g: BipartiteGraph, target: Sequence[float]) -> Tuple[float, Params]:
        """
        Loss of one graph and its exact gradient with respect to every parameter.

        Sigmoid and cross-entropy are fused in logit space, so saturated predictions still
        get the full pred - target signal. The value matches `loss` whenever the predictions
        lie inside its clamp.
        """
        target = np.asarray(target, dtype=np.float64)
        if target.shape != (g.q,):
            raise DimensionMismatchError(f"target has {target.shape[0]} entries, graph has q={g.q}")
        P = self.params
        grads: Params = {k: np.zeros_like(v) for k, v in P.items()}
        logits, cache = self._forward(g)
        value = logit_loss(logits, target)
        dlogits = sigmoid(logits) - target

        H = self.hidden_dim
        rows, cols = g.edge_rows, g.edge_cols
        inv_c, inv_v = cache["inv"]
        dhv = np.zeros((g.n, H))
        dhv[: g.q] = self._mlp_backward("head", dlogits[:, None], cache["head"], grads)
        dhc = np.zeros((g.m, H))
        dhe = np.zeros((len(rows), H))

        for k in range(LAYERS, 0, -1):
            con_cache, var_cache = cache["layers"][k - 1]
            dav = self._mlp_backward(f"conv{k}.var", dhv, var_cache, grads)
            dhv, dmv = dav[:, :H], dav[:, H:]
            dmv_e = (dmv * inv_v)[cols]
            dhc = dhc + _scatter_sum(rows, dmv_e, g.m)
            dhe += dmv_e
            dac = self._mlp_backward(f"conv{k}.con", dhc, con_cache, grads)
            dhc, dmc = dac[:, :H], dac[:, H:]
            dmc_e = (dmc * inv_c)[rows]
            dhv = dhv + _scatter_sum(cols, dmc_e, g.n)
            dhe += dmc_e

        if self.edge_term:
            grads["embed_edge.W"] += (g.edge_coeffs[:, None] * dhe).sum(axis=0, keepdims=True)
            grads["embed_edge.b"] += dhe.sum(axis=0)

        dz, grads["embed_var.gamma"], grads["embed_var.beta"] = _layer_norm_backward(
            dhv, P["embed_var.gamma"], cache["ln_var"])
        grads["embed_var.W"] += g.var_feats.T @ dz
        grads["embed_var.b"] += dz.sum(axis=0)
        dz, grads["embed_con.gamma"], grads["embed_con.beta"] = _layer_norm_backward(
            dhc, P["embed_con.gamma"], cache["ln_con"])
        grads["embed_con.W"] += g.con_feats.T @ dz
        grads["embed_con.b"] += dz.sum(axis=0)
        return value, grads

    def batch_gradient(self, graphs: Sequence[BipartiteGraph],
                       targets: Sequence[Sequence[float]]) -> Tuple[float, Params]:
        """Loss and gradient averaged over the instances of a batch."""
        total = 0.0
        acc: Params = {k: np.zeros_like(v) for k, v in self.params.items()}
        for g, t in zip(graphs, targets):
            value, grads = self.backward(g, t)
            total += value
            for k in acc:
                acc[k] += grads[k]
        size = len(graphs)
        return total / size, {k: v / size for k, v in acc.items()}

    # -- checkpoints ---------------------------------------------------------

    def to_checkpoint(self, meta: Optional[dict] = None) -> ModelCheckpoint:
        return ModelCheckpoint(
            dims={"var_features": VAR_FEATURES, "con_features": CON_FEATURES,
                  "hidden": self.hidden_dim, "layers": LAYERS},
            seed=self.seed,
            edge_term=self.edge_term,
            aggregation=self.aggregation,
            shapes={k: list(v.shape) for k, v in self.params.items()},
            params={k: v.ravel().tolist() for k, v in self.params.items()},
            meta=meta or {},
        )

    @classmethod
    def from_checkpoint(cls, ckpt: ModelCheckpoint) -> "GnnModel":
        dims = ckpt.dims
        if dims.get("var_features") != VAR_FEATURES or dims.get("con_features") != CON_FEATURES \
                or dims.get("layers") != LAYERS:
            raise ModelCompatibilityError(f"checkpoint dims {dims} do not match this model layout")
        hidden = dims["hidden"]
        expected = {name: shape for name, shape, _ in _shapes(hidden)}
        if set(expected) != set(ckpt.params):
            raise ModelCompatibilityError("checkpoint parameter names do not match this model layout")
        params = {}
        for name, shape in expected.items():
            if tuple(ckpt.shapes.get(name, ())) != shape:
                raise ModelCompatibilityError(f"parameter {name}: shape {ckpt.shapes.get(name)} != {list(shape)}")
            params[name] = np.asarray(ckpt.params[name], dtype=np.float64).reshape(shape)
        return cls(params, hidden, ckpt.seed, ckpt.edge_term, ckpt.aggregation)

    def save(self, path: str, meta: Optional[dict] = None):
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_checkpoint(meta).model_dump(mode="json"), f, sort_keys=True)
        logger.info(f"Saved model ({self.num_parameters} parameters) to {path}")

    @classmethod
    def load(cls, path: str) -> "GnnModel":
        with open(path, encoding="utf-8") as f:
            return cls.from_checkpoint(ModelCheckpoint.model_validate(json.load(f)))


def forward(model: GnnModel, graph: BipartiteGraph) -> np.ndarray:
    return model.forward(graph)


def backward(model: GnnModel, graph: BipartiteGraph, target: Sequence[float]) -> Params:
    return model.backward(graph, target)[1]
