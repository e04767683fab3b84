"""One test per acceptance criterion, each driven by its shipped config file.

Run ``pytest tests/test_acceptance.py -v`` for the per-criterion PASS/FAIL
lines (printed in the terminal summary), or execute this file directly.
"""

import time
from pathlib import Path

import pytest

from interplab.config import load_config
from interplab.experiments import run_experiment

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

# criterion -> (title, [(config, checks that must all pass)], wall-clock budget in seconds)
CRITERIA = {
    1: ("scalar quadratic oracle", [("c01_scalar_oracle", ["closed_form", "runtime", "converged"])], 5.0),
    2: ("sphere preservation", [("c02_sphere", ["sphere_preservation", "sphere_median_improves"])], 600.0),
    3: ("round trip", [("c03_round_trip", ["round_trip", "round_trip_median_decreasing"])], None),
    4: ("vertical invariance", [("c04_vertical_lp", ["vertical_invariance"]),
                                ("c04_vertical_fourier", ["vertical_invariance"])], None),
    5: ("duality", [("c05_duality", ["duality_gap", "scalar_identity"])], None),
    6: ("maximum modulus", [("c06_maxmod", ["F_at_base", "max_modulus", "scalar_constant"])], None),
    7: ("division by e^z - e^s", [("c07_kadets", ["reconstruction", "division_norm_bound",
                                           "perturbation_bound"])], None),
    8: ("James space", [("c08_james", ["james_norm_one", "dual_inequality", "blowup_monotone",
                                       "dp_equals_enumeration"])], None),
    9: ("operator interpolation", [("c09_operator", ["operator_bound"])], None),
    10: ("midpoint inequality and modulus envelope", [("c10_modulus", ["midpoint_inequality",
                                                                       "single_envelope"])], None),
    11: ("Mazur comparison", [("c11_mazur", ["angle_threshold", "angle_decreasing_in_K"])], None),
}

RESULTS: dict[int, str] = {}


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    if isinstance(v, list) and len(v) > 4:
        return "[" + ", ".join(_fmt(u) for u in v[:4]) + ", ...]"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(u) for u in v) + "]"
    return str(v)


def evaluate(number: int) -> tuple[bool, str]:
    title, runs, budget = CRITERIA[number]
    ok, parts = True, []
    t0 = time.perf_counter()
    for name, wanted in runs:
        res = run_experiment(load_config(CONFIGS / f"{name}.json"))
        for key in wanted:
            c = res.checks[key]
            ok = ok and c["passed"]
            thr = "" if c["threshold"] is None else f"/{_fmt(c['threshold'])}"
            val = "" if c["value"] is None else f"={_fmt(c['value'])}{thr}"
            parts.append(f"{key}{val}:{'ok' if c['passed'] else 'FAIL'}")
    elapsed = time.perf_counter() - t0
    if budget is not None:
        ok = ok and elapsed < budget
        parts.append(f"wall={elapsed:.1f}s/{budget:g}s")
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'} {title}: " + "; ".join(parts)
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, line = evaluate(number)
    RESULTS[number] = line
    print(line)
    assert ok, line


if __name__ == "__main__":
    for n in sorted(CRITERIA):
        print(evaluate(n)[1], flush=True)
