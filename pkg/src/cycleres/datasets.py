"""Benchmark series: Mackey-Glass, NARMA-10, smoothed sunspot numbers.

All tasks share the segmentation washout=100, train=1000, validation=1000,
test=1000 and pair input u_t with the target horizon steps ahead.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.random import default_rng

from .errors import ConstantSeries, ParseError, PersistentDivergence, TooShort

log = logging.getLogger(__name__)

MG17 = "mg17"
NARMA10 = "narma10"
MSTSN = "mstsn"

WASHOUT, TRAIN, VALIDATION, TEST = 100, 1000, 1000, 1000
TOTAL = WASHOUT + TRAIN + VALIDATION + TEST  # inputs consumed by every task


@dataclass
class TaskSpec:
    name: str
    horizon: int = None  # defaults to 84 for MG-17, 1 otherwise
    seed: int = None     # NARMA input draw
    mstsn_path: str = None
    normalize: bool = None  # min-max to [0,1]; defaults to True only for MSTSN

    def __post_init__(self):
        if self.name not in (MG17, NARMA10, MSTSN):
            raise ValueError(f"unknown task {self.name!r}")
        if self.horizon is None:
            self.horizon = 84 if self.name == MG17 else 1
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.normalize is None:
            self.normalize = self.name == MSTSN


@dataclass
class SplitSeries:
    """Inputs/targets plus the four contiguous segment slices."""

    inputs: np.ndarray    # (TOTAL,)
    targets: np.ndarray   # (TOTAL,), targets[t] pairs with inputs[t]
    washout: slice = field(default=slice(0, WASHOUT))
    train: slice = field(default=slice(WASHOUT, WASHOUT + TRAIN))
    validation: slice = field(default=slice(WASHOUT + TRAIN, WASHOUT + TRAIN + VALIDATION))
    test: slice = field(default=slice(WASHOUT + TRAIN + VALIDATION, TOTAL))


def gen_mackey_glass(total: int, history_value: float = 1.2, transient: int = 1000) -> np.ndarray:
    """Mackey-Glass (tau=17) series via Euler steps of size 0.1.

    z_{t+1} = z_t + 0.1 * (0.2 * z_{t-170} / (1 + z_{t-170}^10) - 0.1 * z_t)
    with z_t = history_value for t <= 0. The first `transient` samples are
    discarded and the next `total` returned.
    """
    delay = 170  # tau / step = 17 / 0.1
    steps = transient + total
    z = np.empty(delay + 1 + steps)
    z[: delay + 1] = history_value  # indices 0..delay hold z_{-170}..z_0
    for t in range(delay, delay + steps):
        lag = z[t - delay]
        z[t + 1] = z[t] + 0.1 * (0.2 * lag / (1.0 + lag**10) - 0.1 * z[t])
    out = z[delay + 1 + transient :]
    assert np.isfinite(out).all()
    return out


def _narma_iterate(mu: np.ndarray, guard: float = 10.0):
    """Run the NARMA-10 recursion; returns the series or None if it diverged."""
    total = mu.shape[0]
    z = np.zeros(total)
    for t in range(9, total - 1):
        z[t + 1] = (
            0.3 * z[t]
            + 0.05 * z[t] * z[t - 9 : t + 1].sum()
            + 1.5 * mu[t - 9] * mu[t]
            + 0.1
        )
        if abs(z[t + 1]) > guard:
            return None
    return z


def gen_narma10(total: int, seed, max_attempts: int = 10):
    """NARMA-10 inputs and outputs.

    mu_t is i.i.d. uniform on [0, 0.5]; z is zero for the first ten steps and
    then follows the tenth-order recursion. The map occasionally diverges for
    unlucky draws, in which case the input is regenerated with the next seed
    (logged); after `max_attempts` failures PersistentDivergence is raised.
    """
    if total < 11:
        raise ValueError("total must be >= 11")
    for attempt in range(max_attempts):
        mu = default_rng(seed + attempt).uniform(0.0, 0.5, size=total)
        z = _narma_iterate(mu)
        if z is not None:
            if attempt:
                log.warning("narma10: regenerated %d time(s) from seed %s", attempt, seed)
            return mu, z
    raise PersistentDivergence(f"narma10 diverged for {max_attempts} seeds from {seed}")


def load_mstsn(path) -> np.ndarray:
    """Load the 13-month smoothed monthly sunspot series (SIDC CSV layout).

    Rows are semicolon-delimited with the smoothed value in the 4th field;
    the value -1 marks the undefined head/tail of the smoothing window and
    those rows are dropped from both ends.
    """
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(";")
            if len(fields) < 4:
                raise ParseError(f"expected >= 4 ';'-separated fields, got {len(fields)}", lineno)
            try:
                values.append(float(fields[3]))
            except ValueError as exc:
                raise ParseError(f"bad smoothed value {fields[3]!r}", lineno) from exc
    arr = np.array(values)
    defined = arr != -1.0
    if not defined.any():
        raise TooShort("file contains only sentinel values")
    first, last = np.flatnonzero(defined)[[0, -1]]
    arr = arr[first : last + 1]
    if (arr == -1.0).any():
        raise ParseError("sentinel value inside the defined range", int(first + np.flatnonzero(arr == -1.0)[0] + 1))
    return arr


def normalize_unit(series: np.ndarray) -> np.ndarray:
    """Affine map onto [0, 1]: min -> 0, max -> 1."""
    lo, hi = float(series.min()), float(series.max())
    if hi <= lo:
        raise ConstantSeries("max must exceed min")
    return (series - lo) / (hi - lo)


def make_task(spec: TaskSpec) -> SplitSeries:
    """Build the input/target split for a task.

    For MG-17 and MSTSN the input is the series itself and the target is the
    series `horizon` steps ahead; for NARMA-10 the input is the external
    drive mu and the target the next output z_{t+1}.
    """
    if spec.name == NARMA10:
        mu, z = gen_narma10(TOTAL + spec.horizon, 0 if spec.seed is None else spec.seed)
        inputs = mu[:TOTAL]
        targets = z[spec.horizon : TOTAL + spec.horizon]
    else:
        if spec.name == MG17:
            raw = gen_mackey_glass(TOTAL + spec.horizon)
        else:
            if spec.mstsn_path is None:
                raise ValueError("mstsn task needs mstsn_path")
            raw = load_mstsn(spec.mstsn_path)
        if spec.normalize:
            raw = normalize_unit(raw)
        if raw.shape[0] < TOTAL + spec.horizon:
            raise TooShort(f"need {TOTAL + spec.horizon} samples, have {raw.shape[0]}")
        inputs = raw[:TOTAL]
        targets = raw[spec.horizon : TOTAL + spec.horizon]
    return SplitSeries(inputs=np.ascontiguousarray(inputs), targets=np.ascontiguousarray(targets))
