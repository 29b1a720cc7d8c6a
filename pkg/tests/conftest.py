from fractions import Fraction
from pathlib import Path

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])

small_q = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


def matrices(max_rows=5, max_cols=5, entries=small_q):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r)))


def integer_vectors(dim, lo=-2, hi=2):
    return st.lists(st.integers(lo, hi), min_size=dim, max_size=dim).filter(any)


def arrangements(dim, min_size=2, max_size=5, lo=-2, hi=2):
    """Lists of pairwise non-proportional nonzero integer normals."""
    from relspace.exactq import line_representative, vec

    def dedupe(vs):
        seen, out = set(), []
        for v in vs:
            key = line_representative(vec(v))
            if key not in seen:
                seen.add(key)
                out.append(v)
        return out

    return (st.lists(integer_vectors(dim, lo, hi), min_size=min_size, max_size=max_size + 3)
            .map(dedupe).filter(lambda vs: min_size <= len(vs) <= max_size))
