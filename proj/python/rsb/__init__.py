"""Decorated trees, their algebraic operations, and a numerical model on a periodic grid.

Trees are passed as strings in the same syntax the command-line tool uses,
for example ``"X^(0,1)*I[t,(0,0)](Xi[x])"``. Linear combinations come back
as dicts mapping canonical tree strings to ``fractions.Fraction``.
"""

import json
from pathlib import Path

from ._core import (
    Model,
    RsbError,
    Spec,
    canonical,
    classical_gamma,
    degree,
    delta1,
    delta2,
    enumerate,
    graft,
    mstar,
    star1,
    star2,
    symmetry,
    verify_report,
)

def _spec_dir():
    here = Path(__file__).resolve().parent
    for candidate in (here / "specs", here.parents[1] / "specs"):  # wheel, then source checkout
        if (candidate / "desk.json").is_file():
            return candidate
    raise RsbError("bundled specs not found next to the package")


SPEC_DIR = _spec_dir()


def bundled_spec(name):
    """Load one of the bundled specs: ``"phi4"`` or ``"desk"``."""
    return Spec.load(str(SPEC_DIR / f"{name}.json"))


def verify(suite="all", seed=42):
    """Run identity suites on the bundled specs and return the parsed report."""
    return json.loads(verify_report(suite, seed, str(SPEC_DIR)))


__all__ = [
    "Model",
    "RsbError",
    "SPEC_DIR",
    "Spec",
    "bundled_spec",
    "canonical",
    "classical_gamma",
    "degree",
    "delta1",
    "delta2",
    "enumerate",
    "graft",
    "mstar",
    "star1",
    "star2",
    "symmetry",
    "verify",
]
