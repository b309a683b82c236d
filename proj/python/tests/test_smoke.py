import math

import numpy as np
import pytest

import _romes as rm


@pytest.fixture(scope="module")
def operator():
    mesh = rm.build_mesh(6)
    return mesh, rm.assemble_affine_components(mesh)


def test_mesh_counts():
    mesh = rm.build_mesh(6)
    assert mesh.n_nodes == 49
    assert mesh.n_triangles == 72
    assert mesh.n_dofs == 42
    with pytest.raises(ValueError):
        rm.build_mesh(7)  # not divisible by 3


def test_hifi_solve_and_outputs(operator):
    mesh, op = operator
    mu = np.full(9, 2.0)
    u = rm.solve_hifi(op, mu)
    # scaling the conductivity scales the solution inversely
    u1 = rm.solve_hifi(op, np.full(9, 1.0))
    assert np.allclose(u, 0.5 * u1)
    # compliant output equals the energy of the solution
    s = rm.compliant_output(op, u)
    assert s == pytest.approx(rm.energy_norm(op, mu, u) ** 2, rel=1e-10)
    assert set(op.output_ids) == {"compliant", "point_1", "point_2"}


def test_reduced_model_bounds(operator):
    mesh, op = operator
    cands = rm.sample_parameter_box(20, 2)
    greedy = rm.greedy_build(op, cands, rm.GreedyOptions(1e-3, 10, 5))
    assert greedy.basis.p >= 2
    model = rm.offline_project(op, greedy.basis)
    mu = rm.sample_parameter_box(1, 9)[0]
    uhat = rm.solve_projected(model.primal, mu)
    b = rm.error_bounds(model, mu, uhat)
    err = rm.energy_norm(op, mu, rm.solve_hifi(op, mu) - greedy.basis.V @ uhat)
    assert b.energy_lb <= err <= b.energy_ub
    assert b.alpha_lb == mu.min()

    text = rm.reduced_model_to_json(model)
    back = rm.reduced_model_from_json(text)
    assert np.allclose(rm.solve_projected(back.primal, mu), uhat)


def test_surrogate_roundtrip(operator):
    mesh, op = operator
    cands = rm.sample_parameter_box(20, 2)
    greedy = rm.greedy_build(op, cands, rm.GreedyOptions(1e-2, 6, 5))
    model = rm.offline_project(op, greedy.basis)
    points = rm.sample_parameter_box(60, 3)
    table = rm.collect_samples(op, model, points, rm.CollectOptions(20, 2))
    assert len(table.rows) == 60
    assert table.rows[0].split == "train"
    assert table.rows[59].split == "validation"

    spec = rm.SurrogateSpec()
    spec.indicator.kind = rm.IndicatorKind.LogResidualEuclid
    spec.error.kind = rm.ErrorKind.EnergyStateError
    sur = rm.train_surrogate(table, spec)
    pred = rm.predict_row(sur, table, table.rows[30])
    assert pred.back_mode > 0
    assert math.isfinite(pred.used_var)

    back = rm.surrogate_from_json(rm.surrogate_to_json(sur))
    pred2 = rm.predict_row(back, table, table.rows[30])
    assert pred2.mean == pytest.approx(pred.mean, rel=1e-12)

    effs = rm.effectivities(sur, table, 0.5)
    assert len(effs) > 0 and all(e > 0 for e in effs)

    csv = rm.table_to_csv(table)
    table2 = rm.table_from_csv(csv)
    assert len(table2.rows) == len(table.rows)


def test_gp_interpolates():
    x = np.linspace(-1, 1, 8).reshape(-1, 1)
    y = np.sin(2 * x[:, 0])
    gp = rm.gp_fit_fixed(rm.TrainingSet(x, y), 0.3, 1e-12)
    for i in range(8):
        assert gp.predict(x[i]).mean == pytest.approx(y[i], abs=1e-6)


def test_rvm_prunes_linear():
    x = np.linspace(-0.6, 0.9, 30).reshape(-1, 1)
    y = 1.0 + 2.0 * x[:, 0]
    cfg = rm.RvmConfig()
    cfg.estimate_noise = False
    cfg.fixed_sigma2 = 1e-6
    model = rm.rvm_train(rm.TrainingSet(x, y), cfg)
    assert all(k <= 1 for k in model.active)


def test_pipeline_chain(tmp_path):
    cfg = rm.ExperimentConfig()
    cfg.mesh_divisions = 3
    cfg.greedy_candidates = 10
    cfg.greedy_tol = 1e-2
    cfg.greedy_max_p = 6
    cfg.sample_total = 30
    cfg.sample_train = 10
    cfg.sample_validation = 20
    cfg.threads = 2
    full = rm.config_from_json(rm.config_to_json(cfg))
    assert rm.config_hash(full) == rm.config_hash(cfg)

    out = str(tmp_path)
    assert rm.cmd_offline(cfg, out) == 0
    assert rm.cmd_sample(cfg, out + "/reduced_model.json", out) == 0
    assert rm.cmd_train_validate(cfg, out + "/samples.csv", out) == 0
    assert (tmp_path / "report.json").exists()
