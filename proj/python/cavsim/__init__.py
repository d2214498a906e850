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

"""Open-system simulation of a transmon coupled to two storage cavities."""

import json as _json

from ._core import (
    NumericalError,
    SystemParams,
    __version__,
    bs_fidelity,
    csum,
    entangling_power,
    entangling_power_exact,
    exp_decay_fit,
    experiment_names,
    fock_lifetimes,
    gate_fidelity,
    heating_fit,
    purcell_limit,
    simulate_protocol,
    thermal_dephasing_limit,
    vrbs_unitary,
)
from . import _core


def example_config(name, quick=False):
    """Ready-to-run configuration for a registered experiment, as a dict."""
    return _json.loads(_core.example_config(name, quick))


def validate_config(config):
    """Raise ValueError with a field path if the config is invalid."""
    _core.validate_config(_json.dumps(config))


def run_experiment(config, out_dir="", workers=0):
    """Run an experiment; returns (output directory, summary dict, written files)."""
    out, summary, files = _core.run_experiment(_json.dumps(config), out_dir, workers)
    return out, _json.loads(summary), files


__all__ = [
    "NumericalError",
    "SystemParams",
    "__version__",
    "bs_fidelity",
    "csum",
    "entangling_power",
    "entangling_power_exact",
    "example_config",
    "exp_decay_fit",
    "experiment_names",
    "fock_lifetimes",
    "gate_fidelity",
    "heating_fit",
    "purcell_limit",
    "run_experiment",
    "simulate_protocol",
    "thermal_dephasing_limit",
    "validate_config",
    "vrbs_unitary",
]
