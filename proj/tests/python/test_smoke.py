import numpy as np
import pytest

import marginforge as mf


def test_analytic_two_point_problem():
    data = mf.Dataset(np.array([[0.0], [1.0]]), np.array([1, -1]))
    result = mf.solve(data, mf.KernelSpec.linear(10.0))
    assert result.alphas == pytest.approx([2.0, 2.0], abs=1e-6)
    assert result.model.bias == pytest.approx(1.0, abs=1e-6)
    assert result.model.decision_value(np.array([0.25])) == pytest.approx(0.5, abs=1e-9)


def test_dataset_round_trip_through_libsvm_text():
    data = mf.Dataset.from_libsvm_text("+1 1:0.5 3:2\n-1 2:1\n")
    assert len(data) == 2
    assert data.dim == 3
    again = mf.Dataset.from_libsvm_text(data.to_libsvm_text())
    assert again.fingerprint == data.fingerprint
    np.testing.assert_array_equal(data.features(), [[0.5, 0, 2], [0, 1, 0]])


def test_parse_error_is_raised():
    with pytest.raises(mf.ParseError):
        mf.Dataset.from_libsvm_text("+1 3:1 1:2\n")


def test_local_sampling_and_cglq_run_end_to_end():
    data = mf.make_two_gaussians(3000, seed=7)
    test = mf.make_two_gaussians(1000, seed=8)
    train, validation = mf.split(data, 0.1, seed=3)
    kernel = mf.KernelSpec.rbf(0.5, 1.0)
    full = mf.solve(train, kernel).model

    cfg = mf.LocalSamplingConfig()
    cfg.kernel = kernel
    cfg.seed = 11
    sweep = mf.beta_sweep(train, validation, cfg)
    assert sweep.betas[0] == pytest.approx(0.1)
    local_err = mf.error_rate(sweep.best.model, test)

    ccfg = mf.CglqConfig()
    ccfg.kernel = kernel
    ccfg.seed = 11
    baseline = mf.cglq(train, ccfg, validation)
    assert baseline.enrichment_rounds <= 20

    full_err = mf.error_rate(full, test)
    assert local_err / full_err < 1.3
    assert mf.error_rate(baseline.model, test) / full_err < 1.3


def test_sampling_weights_are_normalized():
    weights = mf.sampling_weights([1.0, 2.0, 4.0])
    assert sum(weights) == pytest.approx(1.0, abs=1e-12)
    assert weights[0] > weights[1] > weights[2]


def test_model_json_round_trip_and_scaling():
    data = mf.make_two_gaussians(200, seed=1)
    model = mf.solve(data, mf.KernelSpec.rbf(1.0, 1.0)).model
    again = mf.SvmModel.from_json(model.to_json())
    assert again.decision_values(data) == model.decision_values(data)
    scaled = mf.scale_model(model, 7.3)
    assert scaled.predict(data) == model.predict(data)


def test_config_error_on_bad_kernel():
    data = mf.make_two_gaussians(20, seed=1)
    with pytest.raises(mf.ConfigError):
        mf.solve(data, mf.KernelSpec.rbf(-1.0, 1.0))
