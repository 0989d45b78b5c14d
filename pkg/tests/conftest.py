import time
from dataclasses import dataclass, field

import pytest

from sphanova.basis import build_catalog
from sphanova.fit import assemble, fit_joint, fit_staged
from sphanova.sphere import SampleSet
from sphanova.testfns import test_function

D, M, Q, NMAX = 10, 10_000, 2, 10

_LOG = pytest.StashKey[list]()


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    lines: list[str]


@dataclass
class D10Cache:
    """Designs and fits at the benchmark configuration, with the time each took.

    ``cost`` maps each entry to ``(seconds, finished_at)`` so a criterion
    can add the build time of entries built before it started; its reported
    runtime then does not depend on test order.
    """

    catalog: object = None
    cost: dict = field(default_factory=dict)
    _designs: dict = field(default_factory=dict)
    _fits: dict = field(default_factory=dict)

    def _timed(self, key, fn):
        t0 = time.perf_counter()
        out = fn()
        t1 = time.perf_counter()
        self.cost[key] = (t1 - t0, t1)
        return out

    def design(self, seed):
        if self.catalog is None:
            self.catalog = self._timed(("catalog",), lambda: build_catalog(D, Q, NMAX))
        if seed not in self._designs:
            def make():
                pts = SampleSet.draw(lambda x: x[:, 0], D, M, seed).points
                return pts, assemble(pts, self.catalog)
            self._designs[seed] = self._timed(("design", seed), make)
        return self._designs[seed]

    def fit(self, name, seed, strategy="joint"):
        key = (name, seed, strategy)
        if key not in self._fits:
            pts, dm = self.design(seed)
            tf = test_function(name)
            s = SampleSet(pts, tf(pts), seed)
            fitter = fit_joint if strategy == "joint" else fit_staged
            self._fits[key] = (self._timed(("fit",) + key, lambda: fitter(s, self.catalog, design=dm)), s)
        return self._fits[key]

    def cost_before(self, keys, t0):
        """Build time of ``keys`` that were already cached at time ``t0``."""
        return sum(self.cost[k][0] for k in set(keys) if k in self.cost and self.cost[k][1] <= t0)


@pytest.fixture(scope="session")
def d10():
    return D10Cache()


@pytest.fixture(scope="session")
def acceptance_log(request):
    log = []
    request.config.stash[_LOG] = log
    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_LOG, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(log, key=lambda c: c.number):
        terminalreporter.write_line(f"{'PASS' if c.passed else 'FAIL'}  criterion {c.number}: {c.title}")
        for line in c.lines:
            terminalreporter.write_line(f"      {line}")
