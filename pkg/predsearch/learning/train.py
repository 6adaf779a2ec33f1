import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from predsearch.learning.gnn import GnnModel, loss
from predsearch.learning.optim import Adam, clip_by_global_norm
from predsearch.models.graph_model import BipartiteGraph
from predsearch.models.train_model import EpochRecord, TrainConfig, TrainHistory

logger = logging.getLogger(__name__)

Sample = Tuple[BipartiteGraph, Sequence[float]]


def dataset_loss(model: GnnModel, samples: Sequence[Sample], eps: float = 1e-7) -> float:
    """Mean per-instance loss of a frozen model."""
    if not samples:
        return float("nan")
    return float(np.mean([loss(model.forward(g), t, eps) for g, t in samples]))


def train(
    train_set: List[Sample],
    cfg: Optional[TrainConfig] = None,
    valid_set: Optional[List[Sample]] = None,
) -> Tuple[GnnModel, TrainHistory]:
    """
    Adam on shuffled mini-batches. Returns the snapshot with the lowest validation loss
    (training loss when no validation set is given) and the per-epoch history.
    """
    cfg = cfg or TrainConfig()
    if not train_set:
        raise ValueError("training set is empty")
    model = GnnModel.init(cfg.hidden_dim, cfg.seed, cfg.edge_term, cfg.aggregation)
    opt = Adam(cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps)
    shuffle_rng = np.random.default_rng([cfg.seed, 1])
    history = TrainHistory()
    best: Optional[GnnModel] = None
    best_score = np.inf

    logger.info(
        f"Training on {len(train_set)} instances ({len(valid_set or [])} validation), "
        f"{model.num_parameters} parameters, lr={cfg.lr}, batch={cfg.batch_size}, epochs={cfg.epochs}"
    )
    for epoch in range(1, cfg.epochs + 1):
        order = shuffle_rng.permutation(len(train_set))
        for start in range(0, len(order), cfg.batch_size):
            batch = [train_set[i] for i in order[start:start + cfg.batch_size]]
            _, grads = model.batch_gradient([g for g, _ in batch], [t for _, t in batch])
            clip_by_global_norm(grads, cfg.clip_norm)
            opt.step(model.params, grads)

        train_loss = dataset_loss(model, train_set, cfg.log_eps)
        valid_loss = dataset_loss(model, valid_set, cfg.log_eps) if valid_set else None
        history.epochs.append(EpochRecord(epoch=epoch, train_loss=train_loss, valid_loss=valid_loss))
        score = valid_loss if valid_loss is not None else train_loss
        if score < best_score:
            best_score = score
            best = model.copy()
            history.best_epoch = epoch
            history.best_valid_loss = valid_loss
        logger.info(f"Epoch {epoch}/{cfg.epochs}: train_loss={train_loss:.6f}"
                    + (f", valid_loss={valid_loss:.6f}" if valid_loss is not None else ""))

    return best if best is not None else model, history
