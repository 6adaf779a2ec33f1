import logging

import numpy as np

from predsearch.milp.dense import SENSE_CODE
from predsearch.models.graph_model import CON_FEATURES, POS_EMB_BITS, VAR_FEATURES, BipartiteGraph
from predsearch.models.milp_model import MilpInstance, VarKind

logger = logging.getLogger(__name__)

_NORM_EPS = 1e-10

NORMALIZATION_META = {
    "var_features": ["obj", "v_coeff", "Nv_coeff", "max_coeff", "min_coeff", "int"]
                    + [f"pos_emb_{k}" for k in range(POS_EMB_BITS)],
    "con_features": ["c_coeff", "Nc_coeff", "rhs", "sense"],
    "obj": "c_j / (max_k |c_k| + 1e-10)",
    "rhs": "b_i / (max_j |A_ij| + |b_i| + 1e-10)",
    "pos_emb": "little-endian bits of j mod 4096 (0-based j)",
    "sense": {"LE": 0, "EQ": 1, "GE": 2},
    "edge": "raw coefficient",
    "var_width": VAR_FEATURES,
}


def position_embedding(n: int) -> np.ndarray:
    codes = np.arange(n, dtype=np.int64) % (1 << POS_EMB_BITS)
    return ((codes[:, None] >> np.arange(POS_EMB_BITS)[None, :]) & 1).astype(np.float64)


def featurize(inst: MilpInstance) -> BipartiteGraph:
    n, m = inst.num_vars, inst.num_rows
    rows, cols, coeffs = [], [], []
    for i, row in enumerate(inst.rows):
        for j in sorted(row.coeffs):
            rows.append(i)
            cols.append(j)
            coeffs.append(row.coeffs[j])
    edge_rows = np.asarray(rows, dtype=np.int64)
    edge_cols = np.asarray(cols, dtype=np.int64)
    edge_coeffs = np.asarray(coeffs, dtype=np.float64)

    c = np.asarray(inst.objective, dtype=np.float64)
    cmax = np.max(np.abs(c)) if n else 0.0

    nv = np.bincount(edge_cols, minlength=n).astype(np.float64)
    vsum = np.bincount(edge_cols, weights=edge_coeffs, minlength=n)
    vmax = np.full(n, -np.inf)
    vmin = np.full(n, np.inf)
    np.maximum.at(vmax, edge_cols, edge_coeffs)
    np.minimum.at(vmin, edge_cols, edge_coeffs)
    isolated = nv == 0

    var_feats = np.zeros((n, VAR_FEATURES))
    var_feats[:, 0] = c / (cmax + _NORM_EPS)
    var_feats[:, 1] = np.where(isolated, 0.0, vsum / np.maximum(nv, 1.0))
    var_feats[:, 2] = nv
    var_feats[:, 3] = np.where(isolated, 0.0, vmax)
    var_feats[:, 4] = np.where(isolated, 0.0, vmin)
    var_feats[:, 5] = [1.0 if k == VarKind.BINARY else 0.0 for k in inst.var_kind]
    var_feats[:, 6:] = position_embedding(n)

    nc = np.bincount(edge_rows, minlength=m).astype(np.float64)
    csum = np.bincount(edge_rows, weights=edge_coeffs, minlength=m)
    cabs = np.zeros(m)
    np.maximum.at(cabs, edge_rows, np.abs(edge_coeffs))
    b = np.asarray([r.rhs for r in inst.rows], dtype=np.float64)

    con_feats = np.zeros((m, CON_FEATURES))
    con_feats[:, 0] = np.where(nc == 0, 0.0, csum / np.maximum(nc, 1.0))
    con_feats[:, 1] = nc
    con_feats[:, 2] = b / (cabs + np.abs(b) + _NORM_EPS)
    con_feats[:, 3] = [SENSE_CODE[r.sense] for r in inst.rows]

    logger.debug(f"Featurized {inst.name}: {n} vars, {m} rows, {len(edge_coeffs)} edges")
    return BipartiteGraph(
        var_feats=var_feats,
        con_feats=con_feats,
        edge_rows=edge_rows,
        edge_cols=edge_cols,
        edge_coeffs=edge_coeffs,
        n=n,
        m=m,
        q=inst.num_binary,
        normalization_meta=dict(NORMALIZATION_META),
    )
