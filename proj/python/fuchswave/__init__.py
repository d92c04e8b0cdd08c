"""Python front end for the fuchswave core."""

import json as _json

from ._fuchswave import (  # noqa: F401
    CoefficientModel,
    FuchswaveError,
    ZoneConfig,
    __version__,
    classify,
    fit_decay,
    fundamental,
    lambda_,
    lp_lq_rate,
    run_cli,
)
from ._fuchswave import run_experiment as _run_experiment


def run_experiment(config):
    """Run an experiment from a config dict; returns the result as a dict."""
    return _json.loads(_run_experiment(_json.dumps(config)))
