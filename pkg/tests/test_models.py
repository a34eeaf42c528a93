import sys
import textwrap

import numpy as np
import pytest

from gadd.errors import DomainError, ModelProtocolError
from gadd.models import (CallableModel, ExternalModel, PolynomialModel, additive_linear,
                         polynomial_from_terms, quadratic_symmetric)


def script(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body))
    return [sys.executable, str(path)]


SUM = """
    import sys
    for line in sys.stdin:
        print(repr(sum(float(t) for t in line.split())), flush=True)
"""


def test_quadratic_symmetric_expands_to_published_form():
    y = quadratic_symmetric()
    want = {(0, 0, 0): 12.0, (1, 0, 0): 4.0, (0, 1, 0): 4.0, (0, 0, 1): 4.0,
            (1, 1, 0): 1.0, (1, 0, 1): 1.0, (0, 1, 1): 1.0}
    assert y.terms == want


def test_polynomial_and_callable_models_agree(rng):
    poly = polynomial_from_terms(2, [((1, 1), 2.0), ((0, 2), -1.0), ((0, 0), 0.5)])
    pm = PolynomialModel(poly)
    cm = CallableModel(lambda p: 2 * p[0] * p[1] - p[1] ** 2 + 0.5, 2)
    x = rng.normal(size=(10, 2))
    np.testing.assert_allclose(pm.evaluate(x), cm.evaluate(x))
    assert pm.evaluations == cm.evaluations == 10
    with pytest.raises(DomainError):
        pm.evaluate(np.zeros((3, 3)))
    with pytest.raises(DomainError):
        polynomial_from_terms(2, [((1,), 1.0)])


def test_additive_linear():
    y = additive_linear([1.0, -2.0], 3.0)
    assert y(np.array([1.0, 1.0])) == pytest.approx(2.0)


def test_external_model_round_trip(tmp_path, rng):
    x = rng.normal(size=(7, 3))
    with ExternalModel(script(tmp_path, "sum.py", SUM), 3) as m:
        np.testing.assert_allclose(m.evaluate(x), x.sum(axis=1), rtol=1e-15)
        assert m.evaluations == 7 + 1   # handshake at the origin counts


def test_external_model_parallel_width_is_deterministic(tmp_path, rng):
    x = rng.normal(size=(25, 2))
    with ExternalModel(script(tmp_path, "sum.py", SUM), 2, width=3) as m:
        a = m.evaluate(x)
    with ExternalModel(script(tmp_path, "sum.py", SUM), 2, width=1) as m:
        b = m.evaluate(x)
    np.testing.assert_array_equal(a, b)


def test_builtin_served_over_protocol(rng):
    x = rng.normal(size=(5, 3))
    with ExternalModel([sys.executable, "-m", "gadd.serve", "quadratic_symmetric"], 3) as m:
        np.testing.assert_allclose(m.evaluate(x), quadratic_symmetric()(x), rtol=1e-15)


def test_malformed_line_is_quoted(tmp_path):
    bad = script(tmp_path, "bad.py", """
        import sys
        for line in sys.stdin:
            print("value: 3.5", flush=True)
    """)
    with pytest.raises(ModelProtocolError, match="'value: 3.5'"):
        with ExternalModel(bad, 2, restarts=3) as m:
            m.evaluate(np.zeros((1, 2)))


def test_timeout(tmp_path):
    slow = script(tmp_path, "slow.py", """
        import sys, time
        for line in sys.stdin:
            time.sleep(10)
    """)
    with pytest.raises(ModelProtocolError, match="did not answer"):
        with ExternalModel(slow, 1, timeout=0.3) as m:
            m.evaluate(np.zeros((1, 1)))


def test_restart_after_crash(tmp_path):
    # dies after every second answer; one restart per failure is allowed
    flaky = script(tmp_path, "flaky.py", """
        import sys
        for k, line in enumerate(sys.stdin):
            if k == 2:
                sys.exit(1)
            print(repr(sum(float(t) for t in line.split())), flush=True)
    """)
    with ExternalModel(flaky, 1, restarts=5) as m:
        np.testing.assert_allclose(m.evaluate(np.arange(4.0)[:, None]), np.arange(4.0))
    with pytest.raises(ModelProtocolError, match="exited"):
        with ExternalModel(flaky, 1, restarts=0) as m:
            m.evaluate(np.arange(4.0)[:, None])


def test_missing_executable():
    with pytest.raises(ModelProtocolError, match="cannot start"):
        with ExternalModel("/nonexistent/model-binary", 2) as m:
            m.evaluate(np.zeros((1, 2)))
