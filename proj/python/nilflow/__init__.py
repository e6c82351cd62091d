"""Python access to the nilflow experiments."""

import json

from ._core import NilflowError, fit_witness, joint_kernel_dim, kam, rep_spectrum, subcommands
from ._core import execute as _execute

__all__ = ["NilflowError", "fit_witness", "joint_kernel_dim", "kam", "rep_spectrum", "run", "subcommands"]


def _text(value):
    if isinstance(value, (list, tuple)):
        return ", ".join(str(v) for v in value)
    return str(value)


def run(subcommand, **keys):
    """Run a subcommand with config keys as keyword arguments.

    Returns a dict with ``exit_code``, ``header``, ``rows`` and the parsed
    JSON ``summary``.
    """
    code, header, rows, summary = _execute(subcommand, [(k, _text(v)) for k, v in keys.items()])
    return {"exit_code": code, "header": header, "rows": rows, "summary": json.loads(summary)}
