import os
from functools import lru_cache

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("quick", max_examples=10, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@lru_cache(maxsize=None)
def n4_ideals(p: int):
    """(P3, I3, Q3, f, det) over F_p (p = 0: Q), shared across test modules."""
    from pmx.minors import (determinant, determinantal_ideal, f_polynomial,
                            principal_minor_ideal, q_ideal)
    from pmx.poly import Field

    F = Field(p)
    P3 = principal_minor_ideal(4, 3, F)
    I3 = determinantal_ideal(4, 3, F, ring=P3.ring)
    Q3 = q_ideal(4, F)
    return P3, I3, Q3, f_polynomial(P3.ring), determinant(P3.ring)


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in __import__("sys").modules.items()
                if name.endswith("test_acceptance") and hasattr(m, "RESULTS")), None)
    if mod is None or not mod.RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(mod.RESULTS):
        parts = mod.RESULTS[crit]
        states = {s for _, s, _ in parts}
        overall = "FAIL" if "FAIL" in states else ("PASS" if "PASS" in states else "SKIP")
        notes = "; ".join(f"{label}: {s} ({d})" for label, s, d in parts)
        tr.write_line(f"criterion {crit:2d}: {overall}  {notes}")
