"""Python access to the reslab core: ladders, spectra, Newton solves and branches."""

import json

from . import _core
from ._core import (
    AssemblyError,
    ConfigError,
    ConvergenceError,
    DomainError,
    Error,
    IoError,
    LadderOverflow,
    NearDegeneracyError,
    UnboundConstant,
)

__version__ = _core.__version__


def plan_ladder(dim, p=None):
    """Bootstrap schedule for dimension `dim`; `p` is rational text, None means V1 = 0."""
    return json.loads(_core.plan_ladder(dim, None if p is None else str(p)))


def check_example(alpha=1.0):
    """Hypothesis report for the logarithmic example nonlinearity."""
    return json.loads(_core.check_example(alpha))


def default_config():
    return _core.default_config()


class Problem:
    """One configured experiment (TOML text, or the bundled default)."""

    def __init__(self, config=None):
        self._p = _core.Problem(config)

    @property
    def config(self):
        return self._p.config

    @property
    def config_hash(self):
        return self._p.config_hash

    def coordinates(self):
        return self._p.coordinates()

    def spectrum(self, k):
        """(eigenvalues, eigenvectors) of the k lowest levels."""
        return self._p.spectrum(k)

    def seed(self, j, amplitude):
        return self._p.seed(j, amplitude)

    def residual(self, lam, u):
        return self._p.residual(lam, u)

    def energy(self, lam, u):
        return self._p.energy(lam, u)

    def solve(self, lam, seed):
        """Newton solve; returns (u, state dict)."""
        u, state = self._p.solve(lam, seed)
        return u, json.loads(state)

    def continue_branch(self, start, end, steps, seed):
        return json.loads(self._p.continue_branch(start, end, steps, seed))

    def probe(self, lam, trials):
        return json.loads(self._p.probe(lam, trials))


__all__ = [
    "AssemblyError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "Error",
    "IoError",
    "LadderOverflow",
    "NearDegeneracyError",
    "Problem",
    "UnboundConstant",
    "check_example",
    "default_config",
    "plan_ladder",
]
