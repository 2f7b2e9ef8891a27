"""Python face of the cardiac mechanics solver.

The heavy lifting lives in the compiled `_core` module; this wrapper turns
its JSON report into plain dictionaries.
"""

import json

from ._core import __version__, case_info, default_config, validate_config
from ._core import run_bench_json as _run_bench_json

__all__ = ["__version__", "case_info", "default_config", "validate_config", "run_bench"]


def run_bench(config):
    """Run every sweep combination of `config` and return the report dict."""
    return json.loads(_run_bench_json(dict(config)))
