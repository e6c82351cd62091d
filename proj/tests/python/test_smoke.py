import math

import pytest

import nilflow

PHI = (1 + math.sqrt(5)) / 2


def test_subcommands_listed():
    assert "gh-report" in nilflow.subcommands()
    assert "kam" in nilflow.subcommands()


def test_witness_golden():
    w = nilflow.fit_witness([1.0, PHI], 1.0, 100)
    assert w["valid"]
    assert sorted(map(abs, w["argmin"])) == [55, 89]


def test_witness_resonance():
    w = nilflow.fit_witness([1.0, 0.5], 1.0, 10)
    assert not w["valid"]


def test_spectrum_nonpositive_and_sorted():
    eig, trusted = nilflow.rep_spectrum([1.0, PHI], [1.0], 1, 32)
    assert len(eig) == 32 and trusted == 10
    assert all(x <= 0 for x in eig)
    assert all(abs(a) <= abs(b) for a, b in zip(eig, eig[1:]))


def test_joint_kernel():
    assert nilflow.joint_kernel_dim([1.0, PHI], [1.0], N=4, M=32, K=5) == 1


def test_kam_converges():
    out = nilflow.kam([1.0, PHI], eps=1e-3)
    assert out["converged"]
    assert out["residuals"][-1] <= 1e-12
    assert abs(out["slope"] - 2.0) <= 0.2


def test_run_verdicts():
    ok = nilflow.run("gh-report", N=4, M=32)
    assert ok["exit_code"] == 0 and ok["summary"]["certified"]
    bad = nilflow.run("gh-report", alpha=["1", "1/2"], N=4, M=32, K=10)
    assert bad["exit_code"] == 2
    assert bad["summary"]["toral_argmin"] == [1, -2]


def test_errors_raise():
    with pytest.raises(nilflow.NilflowError):
        nilflow.run("kam", K="abc")
    with pytest.raises(nilflow.NilflowError):
        nilflow.rep_spectrum([1.0, PHI], [1.0], 0, 32)
