# Copyright 2026 The cavsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import cavsim


def test_limits():
    assert cavsim.purcell_limit(623e6, 5.841e6, 205.8e-6) == pytest.approx(1.17, abs=0.01)
    assert cavsim.thermal_dephasing_limit(71e3, 147.4e-6, 0.0025) == pytest.approx(59e-3, abs=1e-3)
    with pytest.raises(ValueError):
        cavsim.purcell_limit(1e6, 0.0, 1e-6)


def test_params_roundtrip():
    p = cavsim.SystemParams()
    p.T1_A = 30e-3
    assert p.T1_A == 30e-3
    p.T1_A = 5e-3
    with pytest.raises(ValueError):
        p.validate()
    p.T1_A = 30e-3
    p.validate()


def test_protocols():
    ideal = cavsim.simulate_protocol(3, "SFP", noise=False)
    assert ideal["fidelity"] > 1 - 1e-9
    sb = cavsim.simulate_protocol(3, "SB")
    sfp = cavsim.simulate_protocol(3, "SFP")
    assert sfp["fidelity"] >= sb["fidelity"]
    assert sum(sb["population"]) == pytest.approx(1.0, abs=1e-9)


def test_fock_lifetime_law():
    t1 = cavsim.fock_lifetimes([1, 2])
    p = cavsim.SystemParams()
    assert t1[0] == pytest.approx(p.T1_A, rel=0.01)
    assert t1[1] == pytest.approx(p.T1_A / 2, rel=0.01)


def test_qudit_gates():
    c = cavsim.csum(3)
    assert c.shape == (9, 9)
    assert np.allclose(c.conj().T @ c, np.eye(9))
    assert cavsim.entangling_power_exact(c, 3) == pytest.approx(0.375)
    value, err = cavsim.entangling_power(c, 3, 20000, 5)
    assert abs(value - 0.375) < 4 * err
    u = cavsim.vrbs_unitary(-5.5e6)
    assert cavsim.gate_fidelity(u, u) == pytest.approx(1.0)
    assert cavsim.entangling_power_exact(u, 3) == pytest.approx(0.379, abs=0.01)


def test_fits():
    t = np.linspace(0, 0.1, 200)
    fit = cavsim.exp_decay_fit(list(t), list(np.exp(-t / 0.02)))
    assert fit["tau"] == pytest.approx(0.02, rel=1e-9)
    f_bs, f_swap = cavsim.bs_fidelity(1.0, 4 / math.pi * 0.003, 0.0)
    assert f_bs == pytest.approx(0.997)
    assert 1 - f_swap == pytest.approx(2 * (1 - f_bs))
    p_up, _ = cavsim.heating_fit([1.0], [0.01])
    assert p_up == pytest.approx(0.01)


def test_experiments(tmp_path):
    names = cavsim.experiment_names()
    assert "limits" in names
    cfg = cavsim.example_config("limits", quick=True)
    cavsim.validate_config(cfg)
    out, summary, files = cavsim.run_experiment(cfg, str(tmp_path / "limits"))
    assert files[-1] == "manifest.json"
    assert (tmp_path / "limits" / "manifest.json").exists()
    assert summary["purcell_limit_s"]["Alice"] == pytest.approx(1.17, abs=0.01)
    bad = dict(cfg)
    del bad["seed"]
    with pytest.raises(ValueError, match="seed"):
        cavsim.validate_config(bad)


def test_numerical_error_type(tmp_path):
    csv = tmp_path / "flat.csv"
    csv.write_text("T_k,Q0\n" + "".join(f"{0.05 * i},1e9\n" for i in range(1, 11)))
    cfg = cavsim.example_config("tls-fit", quick=True)
    del cfg["tls_fit"]["synthetic"]
    cfg["tls_fit"]["data_csv"] = str(csv)
    with pytest.raises(cavsim.NumericalError):
        cavsim.run_experiment(cfg, str(tmp_path / "out"))
    assert not (tmp_path / "out").exists()
