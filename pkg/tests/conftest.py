import contextlib
import io

import numpy as np
import pytest

from gradsamp import GsParams, IterationRecord


@pytest.fixture
def record_factory():
    """IterationRecord with sane defaults, any field overridable."""

    def make(**kw):
        base = dict(
            k=0,
            x=np.zeros(2),
            f_x=1.0,
            grad_x=np.ones(2),
            epsilon_k=0.1,
            nu_k=1e-6,
            g_k=np.ones(2),
            g_norm=float(np.sqrt(2.0)),
            t_k=0.5,
            n_fevals=1,
            n_gevals=1,
            perturbed=False,
            null_step=False,
        )
        base.update(kw)
        return IterationRecord(**base)

    return make


@pytest.fixture
def base_params():
    def make(**kw):
        base = dict(epsilon0=0.1)
        base.update(kw)
        return GsParams(**base)

    return make


def run_cli(argv):
    """Run the CLI in-process; returns (exit_code, stdout, stderr)."""
    from gradsamp.cli import run

    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run(list(argv))
    return code, out.getvalue(), err.getvalue()
