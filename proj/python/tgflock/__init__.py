"""Python access to the tgflock core."""

import json

from . import _core
from ._core import (
    TgflockError,
    __version__,
    assumption_b_margin,
    check_assumption_b,
    circulant,
    cluster_count,
    corollary3_ratio,
    diameter,
    e_matrix,
    fiedler_value,
    fluctuation_norm,
    graph_from_json,
    graph_to_json,
    integrate,
    integrate_laplacian,
    is_neighbor_connected,
    is_strongly_connected,
    laplacian,
    one_leader,
    overlapping_cliques,
    perturb_weights,
    row_dominance_margin,
    similarity,
    spectrum,
    three_group,
    two_body_classify,
    two_leaders,
    list_presets,
    velocity_deviation,
)


def preset_config(name):
    return json.loads(_core.preset_config_json(name))


def run_scenario(config):
    """Run a scenario dict (or preset name) and return its manifest with summary."""
    if isinstance(config, str):
        config = preset_config(config)
    return json.loads(_core.run_scenario_json(json.dumps(config)))

