import math

import numpy as np
import pytest
import scipy.sparse as sp

from ontopred.AnnotationSet import (
    AnnotationSet,
    count_annotations,
    propagate_true_path,
)
from ontopred.GcnModel import (
    AdamState,
    ModelConfig,
    ModelParams,
    adam_step,
    backward,
    bce_loss,
    embed_terms,
    forward,
    gcn_forward,
    init_params,
    load_checkpoint,
    predict,
    project_sequence,
    save_checkpoint,
)
from ontopred.GoFeatures import build_graph_inputs, build_onehot_features
from ontopred.OntologyGraph import OntologyGraph
from ontopred.const import CHECKPOINT_MAGIC, Namespace
from ontopred.exceptions import (
    CheckpointError,
    PreconditionError,
    ShapeMismatchError,
)
from ontopred.synthetic import random_annotations, random_dag

R, A, B, C = 0, 1, 2, 3


def _sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def _tiny_instance(seed, n_layers):
    """Six-term random DAG, three-wide model, batch of two proteins."""
    rng = np.random.default_rng(1000 + seed)
    g = random_dag(6, seed=seed, window=3)
    records = random_annotations(g, 4, seed=seed)
    annotations = propagate_true_path(AnnotationSet.from_records(records, g), g)
    u = count_annotations(annotations, g)
    if u[g.roots()[0]] == 0:
        u.U[g.roots()[0]] = 1
    graph, _, _ = build_graph_inputs(u, g, Namespace.MFO)
    cfg = ModelConfig(n_terms=6, d0=3, d=3, n_layers=n_layers, seq_dim=4, seed=seed)
    params = init_params(cfg)
    params.b_proj[:] = rng.normal(scale=0.1, size=3)
    E = rng.normal(size=(2, 4))
    T = (rng.random((2, 6)) < 0.5).astype(np.float64)
    return graph, params, E, T


def _loss(params, graph, E, T, projection_relu=False):
    return bce_loss(forward(params, graph, E, projection_relu).logits, T)


def _numeric_gradient(params, graph, E, T, name, step=1e-5):
    array = params.named()[name]
    grad = np.zeros_like(array)
    for idx in np.ndindex(array.shape):
        saved = array[idx]
        array[idx] = saved + step
        up = _loss(params, graph, E, T)
        array[idx] = saved - step
        down = _loss(params, graph, E, T)
        array[idx] = saved
        grad[idx] = (up - down) / (2 * step)
    return grad


def test_init_params_deterministic_and_bounded():
    cfg = ModelConfig(n_terms=10, d0=4, d=5, seq_dim=7, seed=3)
    first, second = init_params(cfg), init_params(cfg)
    for name, value in first.named().items():
        assert np.array_equal(value, second.named()[name])
    bound = math.sqrt(6.0 / (10 + 4))
    assert np.all(np.abs(first.W_embed) <= bound)
    assert first.W_gcn[0].shape == (4, 5)
    assert first.W_gcn[1].shape == (5, 5)
    assert np.all(first.b_proj == 0.0)
    other = init_params(ModelConfig(n_terms=10, d0=4, d=5, seq_dim=7, seed=4))
    assert not np.array_equal(first.W_embed, other.W_embed)


@pytest.mark.parametrize("layers", [0, 5])
def test_config_rejects_layer_count(layers):
    with pytest.raises(PreconditionError):
        ModelConfig(n_terms=4, d0=3, d=3, n_layers=layers)


def test_config_width_from_depth(t1):
    cfg = ModelConfig.from_graph(t1, Namespace.MFO)
    assert (cfg.d0, cfg.d) == (3, 3)
    assert ModelConfig.from_graph(t1, Namespace.MFO, hidden_dim=8).d == 8


def test_config_width_capped():
    n = 100
    g = OntologyGraph(
        terms=tuple(f"GO:{i:07d}" for i in range(1, n + 1)),
        names=tuple(str(i) for i in range(n)),
        namespaces=(Namespace.BPO,) * n,
        parents=((),) + tuple((i - 1,) for i in range(1, n)),
    )
    assert ModelConfig.from_graph(g, Namespace.BPO).d == 80
    assert ModelConfig.from_graph(g, Namespace.BPO, depth_cap=50).d0 == 50


def test_embed_terms_sums_ancestor_rows(t1):
    onehot = build_onehot_features(t1)
    W = np.arange(12, dtype=np.float64).reshape(4, 3)
    H0 = embed_terms(onehot, W)
    assert H0[R].tolist() == W[R].tolist()
    assert H0[C].tolist() == W.sum(axis=0).tolist()
    assert H0[A].tolist() == (W[R] + W[A]).tolist()


def test_embed_terms_shape_mismatch(t1):
    with pytest.raises(ShapeMismatchError):
        embed_terms(build_onehot_features(t1), np.zeros((5, 3)))


def test_gcn_identity_layer():
    H0 = np.abs(np.random.default_rng(0).normal(size=(5, 3)))
    H, AH, Hs = gcn_forward(H0, sp.identity(5, format="csr"), [np.eye(3)])
    assert np.array_equal(H, H0)
    assert len(AH) == len(Hs) == 1


def test_gcn_zero_weights():
    H0 = np.ones((3, 2))
    a_hat = sp.csr_matrix(np.full((3, 3), 1.0 / 3.0))
    H, _, _ = gcn_forward(H0, a_hat, [np.zeros((2, 2)), np.ones((2, 2))])
    assert np.all(H == 0.0)


def test_gcn_two_layer_hand_case():
    a_hat = sp.csr_matrix(np.array([[1.0, 0.0], [0.4, 0.6]]))
    H0 = np.array([[1.0], [2.0]])
    H, _, _ = gcn_forward(H0, a_hat, [np.array([[2.0]]), np.array([[0.5]])])
    assert H[:, 0] == pytest.approx([1.0, 1.36], abs=1e-12)


def test_gcn_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        gcn_forward(np.ones((3, 2)), sp.identity(4, format="csr"), [np.eye(2)])


def test_project_sequence():
    W = np.eye(5, 3)
    e = np.array([1.0, -2.0, 3.0, 4.0, 5.0])
    assert project_sequence(e, W, np.zeros(3)).tolist() == [1.0, -2.0, 3.0]
    assert project_sequence(np.zeros(5), W, np.zeros(3)).tolist() == [0.0] * 3
    assert project_sequence(e, W, np.zeros(3), relu=True).tolist() == [1.0, 0.0, 3.0]
    with pytest.raises(ShapeMismatchError):
        project_sequence(np.ones(4), W, np.zeros(3))


def test_predict_hand_case():
    H = np.array([[1.0, -1.0], [0.0, 0.0]])
    y = predict(H, np.array([2.0, 0.5]))
    assert y[0] == pytest.approx(_sigmoid(1.5), abs=1e-12)
    assert y[0] == pytest.approx(0.8175744761936437, abs=1e-12)
    assert y[1] == 0.5


def test_predict_zero_projection_is_half():
    H = np.random.default_rng(1).normal(size=(4, 3))
    assert np.all(predict(H, np.zeros((2, 3))) == 0.5)


def test_bce_loss_values():
    assert bce_loss(np.zeros((3, 4)), np.ones((3, 4))) == pytest.approx(math.log(2))
    logits = np.array([[0.0, 2.0], [-1.0, 3.0]])
    targets = np.array([[1.0, 0.0], [0.0, 1.0]])
    expected = (
        math.log(2)
        + math.log(1 + math.exp(2))
        + math.log(1 + math.exp(-1))
        + math.log(1 + math.exp(-3))
    ) / 4
    assert bce_loss(logits, targets) == pytest.approx(expected, abs=1e-12)


def test_bce_loss_is_finite_when_saturated():
    logits = np.array([[800.0, -800.0]])
    assert bce_loss(logits, np.array([[1.0, 0.0]])) == pytest.approx(0.0, abs=1e-12)
    assert bce_loss(logits, np.array([[0.0, 1.0]])) == pytest.approx(800.0)


def test_bce_loss_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        bce_loss(np.zeros((2, 3)), np.zeros((3, 2)))


@pytest.mark.parametrize("seed", range(20))
def test_gradients_match_central_differences(seed):
    n_layers = 1 + seed % 2
    graph, params, E, T = _tiny_instance(seed, n_layers)
    cache = forward(params, graph, E)
    grads = backward(cache, T, graph.a_hat, graph.onehot)
    assert list(grads) == list(params.named())
    for name in params.named():
        numeric = _numeric_gradient(params, graph, E, T, name)
        diff = np.linalg.norm(grads[name] - numeric)
        scale = max(np.linalg.norm(grads[name]), np.linalg.norm(numeric), 1e-8)
        assert diff / scale < 1e-5, name


def test_gradients_with_projection_relu():
    graph, params, E, T = _tiny_instance(3, 2)
    params.b_proj[:] = [0.3, -0.2, 0.25]
    grads = backward(forward(params, graph, E, True), T, graph.a_hat, graph.onehot)
    step = 1e-5
    array = params.W_proj
    numeric = np.zeros_like(array)
    for idx in np.ndindex(array.shape):
        saved = array[idx]
        array[idx] = saved + step
        up = _loss(params, graph, E, T, True)
        array[idx] = saved - step
        down = _loss(params, graph, E, T, True)
        array[idx] = saved
        numeric[idx] = (up - down) / (2 * step)
    diff = np.linalg.norm(grads["W_proj"] - numeric)
    assert diff <= 1e-5 * max(np.linalg.norm(numeric), 1e-8)


def test_saturated_optimum_has_vanishing_gradient():
    graph, params, E, _ = _tiny_instance(5, 2)
    params.W_proj *= 1e6
    cache = forward(params, graph, E)
    T = (cache.Y > 0.5).astype(np.float64)
    grads = backward(cache, T, graph.a_hat, graph.onehot)
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    assert total < 1e-6


def test_duplicated_batch_has_same_gradient():
    graph, params, E, T = _tiny_instance(8, 2)
    once = backward(forward(params, graph, E), T, graph.a_hat, graph.onehot)
    E2, T2 = np.vstack([E, E]), np.vstack([T, T])
    twice = backward(forward(params, graph, E2), T2, graph.a_hat, graph.onehot)
    for name in once:
        assert np.allclose(once[name], twice[name], rtol=0, atol=1e-12)


def test_backward_shape_mismatch():
    graph, params, E, T = _tiny_instance(0, 1)
    cache = forward(params, graph, E)
    with pytest.raises(ShapeMismatchError):
        backward(cache, T[:1], graph.a_hat, graph.onehot)


def test_adam_first_step_moves_by_lr():
    params = {"w": np.zeros(1)}
    adam_step(params, {"w": np.ones(1)}, AdamState(), lr=1e-3)
    assert params["w"][0] == pytest.approx(-1e-3, rel=1e-6)


def test_adam_zero_gradient_leaves_params():
    params = {"w": np.array([0.5, -2.0])}
    state = AdamState()
    for _ in range(3):
        adam_step(params, {"w": np.zeros(2)}, state)
    assert params["w"].tolist() == [0.5, -2.0]
    assert state.t == 3


def test_adam_step_is_sign_of_gradient_scale_free():
    small = {"w": np.zeros(2)}
    large = {"w": np.zeros(2)}
    adam_step(small, {"w": np.array([1e-3, -1e-3])}, AdamState())
    adam_step(large, {"w": np.array([1e3, -1e3])}, AdamState())
    assert np.allclose(small["w"], large["w"], rtol=1e-4)
    assert small["w"][0] < 0 < small["w"][1]


def test_checkpoint_round_trip(tmp_path):
    cfg = ModelConfig(n_terms=7, d0=3, d=4, n_layers=3, seq_dim=5, seed=11)
    params = init_params(cfg)
    params.b_proj[:] = [0.1, -1e-17, 3.0, 1.0 / 3.0]
    path = tmp_path / "model.txt"
    save_checkpoint(path, cfg, params)
    assert path.read_text().splitlines()[0] == f"{CHECKPOINT_MAGIC} v1 7 3 4 3 5"
    shape, loaded = load_checkpoint(path)
    assert shape == {"n_terms": 7, "d0": 3, "d": 4, "n_layers": 3, "seq_dim": 5}
    for name, value in params.named().items():
        assert np.array_equal(loaded.named()[name], value), name
    assert loaded.b_proj.shape == (4,)


def test_checkpoint_bad_header(tmp_path):
    path = tmp_path / "model.txt"
    path.write_text("NOTAMODEL v1 1 1 1 1 1\n")
    with pytest.raises(CheckpointError):
        load_checkpoint(path)
    path.write_text(f"{CHECKPOINT_MAGIC} v9 1 1 1 1 1\n")
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_checkpoint_truncated_body(tmp_path):
    cfg = ModelConfig(n_terms=4, d0=2, d=2, n_layers=1, seq_dim=3)
    path = tmp_path / "model.txt"
    save_checkpoint(path, cfg, init_params(cfg))
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-2]) + "\n")
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_params_copy_is_independent():
    params = init_params(ModelConfig(n_terms=3, d0=2, d=2, seq_dim=2))
    clone = params.copy()
    clone.W_embed[0, 0] += 1.0
    assert clone.W_embed[0, 0] != params.W_embed[0, 0]
    assert isinstance(ModelParams.from_named(params.named()), ModelParams)
