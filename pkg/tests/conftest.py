import os
import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from seqreal.names import FiniteList, Geometric, Spike, Zeros

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=600, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

STYLES = ("standard", "leftApprox", "seeded(1)", "seeded(2)", "seeded(3)")


def rationals(max_num=10**6, max_den=10**4):
    return st.builds(Fraction, st.integers(-max_num, max_num), st.integers(1, max_den))


def specs():
    return st.one_of(
        st.just(Zeros()),
        st.builds(lambda i, v: Spike(index=i, value_at=v), st.integers(0, 12), rationals()),
        st.builds(lambda vs: FiniteList(entries=tuple(vs)), st.lists(rationals(10**4, 100), max_size=8)),
        st.builds(
            lambda r: Geometric(ratio=r),
            st.builds(Fraction, st.integers(-9, 9), st.integers(10, 40)),
        ),
    )


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(module.line(number, *results[number]))
