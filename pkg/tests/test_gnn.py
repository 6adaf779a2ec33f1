import numpy as np
import pytest

from predsearch.errors import DimensionMismatchError, ModelCompatibilityError
from predsearch.instgen.independent_set import gen_independent_set
from predsearch.learning import (
    GnnModel, backward, entropy_bound, exact_marginals, featurize, forward, logit_loss, loss, train,
)
from predsearch.learning.optim import Adam, clip_by_global_norm
from predsearch.learning.train import dataset_loss
from predsearch.models.milp_model import Sense
from predsearch.models.train_model import Aggregation, TrainConfig
from tests.conftest import binary_instance, random_binary_instance


def loss_at(model, g, target):
    return loss(model.forward(g), target)


@pytest.fixture
def graph():
    return featurize(random_binary_instance(0, n=6, m=4))


@pytest.fixture
def target():
    return np.array([0.9, 0.1, 0.5, 0.3, 0.7, 0.0])


class TestForward:
    def test_zero_model_outputs_half(self, graph):
        probs = forward(GnnModel.zeros(hidden_dim=8), graph)
        np.testing.assert_array_equal(probs, np.full(6, 0.5))

    def test_one_output_per_binary(self, mixed):
        probs = GnnModel.init(hidden_dim=8, seed=1).forward(featurize(mixed))
        assert probs.shape == (1,)
        assert 0.0 < probs[0] < 1.0

    def test_isolated_variable_ignores_constraints(self):
        a = binary_instance([1.0, -2.0, 3.0], [({0: 1.0, 1: 1.0}, 1.0, Sense.LE)])
        b = binary_instance([1.0, -2.0, 3.0], [({0: 4.0, 1: -1.0}, 7.0, Sense.GE)])
        model = GnnModel.init(hidden_dim=8, seed=3)
        assert model.forward(featurize(a))[2] == pytest.approx(model.forward(featurize(b))[2], rel=1e-12)

    def test_deterministic(self, graph):
        a = GnnModel.init(hidden_dim=16, seed=5).forward(graph)
        b = GnnModel.init(hidden_dim=16, seed=5).forward(graph)
        np.testing.assert_array_equal(a, b)
        c = GnnModel.init(hidden_dim=16, seed=6).forward(graph)
        assert not np.array_equal(a, c)

    def test_default_width(self):
        model = GnnModel.init()
        assert model.params["conv1.con.W1"].shape == (128, 64)
        assert model.params["head.W2"].shape == (64, 1)

    def test_constraint_order_does_not_matter(self):
        inst = random_binary_instance(4, n=7, m=5)
        flipped = binary_instance(inst.objective, [(r.coeffs, r.rhs, r.sense) for r in reversed(inst.rows)])
        model = GnnModel.init(hidden_dim=16, seed=8)
        a, b = featurize(inst), featurize(flipped)
        np.testing.assert_allclose(model.forward(a), model.forward(b), rtol=1e-10)
        t = np.linspace(0.0, 1.0, 7)
        assert model.backward(a, t)[0] == pytest.approx(model.backward(b, t)[0], rel=1e-10)

    def test_fresh_model_not_saturated_on_large_graph(self):
        g = featurize(gen_independent_set(150, 4, seed=0))
        probs = GnnModel.init(seed=0).forward(g)
        assert probs.min() > 1e-4 and probs.max() < 1.0 - 1e-4

    def test_sum_aggregation_scales_with_degree(self):
        g = featurize(random_binary_instance(2, n=6, m=4))
        mean = GnnModel.init(hidden_dim=8, seed=1)
        total = GnnModel(mean.params, 8, seed=1, aggregation=Aggregation.SUM)
        assert not np.allclose(mean.forward(g), total.forward(g))


class TestLoss:
    def test_uniform_prediction(self):
        assert loss([0.5, 0.5], [0.5, 0.5]) == pytest.approx(2.0 * np.log(2.0))

    def test_matched_limit(self):
        assert loss([1.0 - 1e-7], [1.0]) < 1e-6

    def test_clamped_at_zero_prediction(self):
        assert np.isfinite(loss([0.0], [1.0]))

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            loss([0.5], [0.5, 0.5])

    def test_logit_form_matches_inside_clamp(self):
        z = np.array([-3.0, -0.2, 0.0, 1.5, 4.0])
        t = np.array([0.0, 0.3, 0.5, 1.0, 0.8])
        assert logit_loss(z, t) == pytest.approx(loss(1.0 / (1.0 + np.exp(-z)), t), rel=1e-10)

    def test_logit_form_is_unclamped(self):
        assert logit_loss([40.0], [0.0]) == pytest.approx(40.0)
        assert loss([1.0], [0.0]) < 17.0

    def test_entropy_bound_is_minimum(self):
        t = np.array([0.2, 0.5, 1.0, 0.0])
        assert entropy_bound(t) == pytest.approx(-0.2 * np.log(0.2) - 0.8 * np.log(0.8) + np.log(2.0))
        assert loss(np.clip(t, 1e-12, 1 - 1e-12), t) >= entropy_bound(t) - 1e-9


class TestBackward:
    def test_finite_differences(self, graph, target):
        model = GnnModel.init(hidden_dim=8, seed=2)
        _, grads = model.backward(graph, target)
        rng = np.random.default_rng(0)
        h = 1e-6
        for name, p in model.params.items():
            for flat in rng.choice(p.size, size=min(3, p.size), replace=False):
                idx = np.unravel_index(flat, p.shape)
                orig = p[idx]
                p[idx] = orig + h
                up = loss_at(model, graph, target)
                p[idx] = orig - h
                down = loss_at(model, graph, target)
                p[idx] = orig
                numeric = (up - down) / (2 * h)
                np.testing.assert_allclose(grads[name][idx], numeric, rtol=1e-4, atol=1e-7, err_msg=name)

    def test_finite_differences_without_edge_term(self, graph, target):
        model = GnnModel.init(hidden_dim=8, seed=4, edge_term=False)
        _, grads = model.backward(graph, target)
        assert not grads["embed_edge.W"].any()
        p = model.params["conv2.var.W1"]
        h = 1e-6
        orig = p[3, 2]
        p[3, 2] = orig + h
        up = loss_at(model, graph, target)
        p[3, 2] = orig - h
        down = loss_at(model, graph, target)
        p[3, 2] = orig
        np.testing.assert_allclose(grads["conv2.var.W1"][3, 2], (up - down) / (2 * h), rtol=1e-4, atol=1e-7)

    def test_zero_model_at_half_targets(self, graph):
        grads = backward(GnnModel.zeros(hidden_dim=8), graph, np.full(6, 0.5))
        assert grads["head.b2"][0] == 0.0

    def test_head_bias_gradient_is_residual_sum(self, graph, target):
        model = GnnModel.init(hidden_dim=8, seed=7)
        _, grads = model.backward(graph, target)
        assert grads["head.b2"][0] == pytest.approx(np.sum(model.forward(graph) - target))

    def test_duplicate_batch_equals_single(self, graph, target):
        model = GnnModel.init(hidden_dim=8, seed=1)
        single_loss, single = model.backward(graph, target)
        batch_loss, batch = model.batch_gradient([graph, graph], [target, target])
        assert batch_loss == pytest.approx(single_loss)
        for name in single:
            np.testing.assert_allclose(batch[name], single[name], rtol=1e-12, atol=1e-15)

    def test_saturated_head_keeps_gradient(self, graph):
        model = GnnModel.zeros(hidden_dim=8)
        model.params["head.b2"][0] = 40.0
        value, grads = model.backward(graph, np.zeros(6))
        assert value == pytest.approx(240.0)
        assert grads["head.b2"][0] == pytest.approx(6.0)

    def test_target_length_checked(self, graph):
        with pytest.raises(DimensionMismatchError):
            GnnModel.zeros(hidden_dim=8).backward(graph, [0.5])

    def test_matches_torch_autograd(self, graph, target):
        torch = pytest.importorskip("torch")
        F = torch.nn.functional
        model = GnnModel.init(hidden_dim=8, seed=9)
        _, grads = model.backward(graph, target)

        P = {k: torch.tensor(v, dtype=torch.float64, requires_grad=True) for k, v in model.params.items()}
        rows = torch.tensor(graph.edge_rows)
        cols = torch.tensor(graph.edge_cols)
        coeffs = torch.tensor(graph.edge_coeffs, dtype=torch.float64)

        def mlp(prefix, a):
            return torch.relu(a @ P[f"{prefix}.W1"] + P[f"{prefix}.b1"]) @ P[f"{prefix}.W2"] + P[f"{prefix}.b2"]

        hv = F.layer_norm(torch.tensor(graph.var_feats) @ P["embed_var.W"] + P["embed_var.b"], (8,),
                          P["embed_var.gamma"], P["embed_var.beta"], eps=1e-5)
        hc = F.layer_norm(torch.tensor(graph.con_feats) @ P["embed_con.W"] + P["embed_con.b"], (8,),
                          P["embed_con.gamma"], P["embed_con.beta"], eps=1e-5)
        inv_c = 1.0 / torch.bincount(rows, minlength=graph.m).clamp(min=1).to(torch.float64)[:, None]
        inv_v = 1.0 / torch.bincount(cols, minlength=graph.n).clamp(min=1).to(torch.float64)[:, None]
        he = coeffs[:, None] * P["embed_edge.W"] + P["embed_edge.b"]
        for k in (1, 2):
            mc = torch.zeros(graph.m, 8, dtype=torch.float64).index_add(0, rows, hv[cols] + he) * inv_c
            hc = mlp(f"conv{k}.con", torch.cat([hc, mc], dim=1))
            mv = torch.zeros(graph.n, 8, dtype=torch.float64).index_add(0, cols, hc[rows] + he) * inv_v
            hv = mlp(f"conv{k}.var", torch.cat([hv, mv], dim=1))
        pred = torch.sigmoid(mlp("head", hv[: graph.q])[:, 0]).clamp(1e-7, 1 - 1e-7)
        t = torch.tensor(target)
        value = -(t * torch.log(pred) + (1 - t) * torch.log(1 - pred)).sum()
        value.backward()

        assert value.item() == pytest.approx(loss_at(model, graph, target), rel=1e-10)
        for name, tensor in P.items():
            np.testing.assert_allclose(grads[name], tensor.grad.numpy(), rtol=1e-7, atol=1e-10, err_msg=name)


class TestCheckpoint:
    def test_save_load(self, tmp_path, graph):
        model = GnnModel.init(hidden_dim=8, seed=3)
        path = str(tmp_path / "model.json")
        model.save(path, meta={"epochs": 1})
        loaded = GnnModel.load(path)
        assert loaded.hidden_dim == 8 and loaded.seed == 3
        np.testing.assert_array_equal(loaded.forward(graph), model.forward(graph))

    def test_save_creates_missing_directories(self, tmp_path, graph):
        model = GnnModel.init(hidden_dim=8, seed=3, aggregation=Aggregation.SUM)
        path = tmp_path / "runs" / "is" / "model.json"
        model.save(str(path))
        loaded = GnnModel.load(str(path))
        assert loaded.aggregation == Aggregation.SUM
        np.testing.assert_array_equal(loaded.forward(graph), model.forward(graph))

    def test_incompatible_dims(self):
        ckpt = GnnModel.init(hidden_dim=8).to_checkpoint()
        bad = ckpt.model_copy(update={"dims": {**ckpt.dims, "var_features": 17}})
        with pytest.raises(ModelCompatibilityError):
            GnnModel.from_checkpoint(bad)

    def test_wrong_shape(self):
        ckpt = GnnModel.init(hidden_dim=8).to_checkpoint()
        shapes = {**ckpt.shapes, "head.W2": [1, 8]}
        with pytest.raises(ModelCompatibilityError):
            GnnModel.from_checkpoint(ckpt.model_copy(update={"shapes": shapes}))


class TestOptimizer:
    def test_first_step_moves_by_lr(self):
        params = {"w": np.array([1.0, -2.0])}
        Adam(lr=0.1).step(params, {"w": np.array([3.0, -0.5])})
        np.testing.assert_allclose(params["w"], [0.9, -1.9], rtol=1e-6)

    def test_zero_lr(self):
        params = {"w": np.array([1.0])}
        Adam(lr=0.0).step(params, {"w": np.array([5.0])})
        assert params["w"][0] == 1.0

    def test_clip(self):
        grads = {"a": np.array([3.0]), "b": np.array([4.0])}
        assert clip_by_global_norm(grads, 1.0) == pytest.approx(5.0)
        np.testing.assert_allclose([grads["a"][0], grads["b"][0]], [0.6, 0.8], rtol=1e-9)
        assert clip_by_global_norm(grads, None) == pytest.approx(1.0)


class TestTrain:
    def test_zero_lr_leaves_parameters(self, graph, target):
        cfg = TrainConfig(lr=0.0, epochs=3, hidden_dim=8, seed=4)
        model, history = train([(graph, target)], cfg)
        init = GnnModel.init(8, 4)
        for name in init.params:
            np.testing.assert_array_equal(model.params[name], init.params[name])
        assert len({e.train_loss for e in history.epochs}) == 1

    def test_same_seed_same_history(self, graph, target):
        cfg = TrainConfig(epochs=5, hidden_dim=8, batch_size=1, seed=2)
        other = featurize(random_binary_instance(5, n=6, m=3))
        data = [(graph, target), (other, np.full(6, 0.25))]
        _, a = train(data, cfg)
        _, b = train(data, cfg)
        assert a == b

    def test_fits_single_instance(self, triangle):
        p = exact_marginals(triangle)
        g = featurize(triangle)
        cfg = TrainConfig(epochs=200, seed=0)
        model, history = train([(g, p)], cfg)
        best = min(e.train_loss for e in history.epochs)
        assert best - entropy_bound(p) < 1e-3
        assert dataset_loss(model, [(g, p)]) == pytest.approx(best)

    def test_validation_selects_snapshot(self, graph, target):
        other = featurize(random_binary_instance(11, n=5, m=3))
        cfg = TrainConfig(epochs=4, hidden_dim=8, seed=1)
        model, history = train([(graph, target)], cfg, valid_set=[(other, np.full(5, 0.5))])
        best = min(history.epochs, key=lambda e: e.valid_loss)
        assert history.best_epoch == best.epoch
        assert dataset_loss(model, [(other, np.full(5, 0.5))]) == pytest.approx(best.valid_loss)

    def test_empty_dataset_loss(self):
        assert np.isnan(dataset_loss(GnnModel.zeros(8), []))
