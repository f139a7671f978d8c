"""Cycle-reservoir state dynamics.

A single reservoir is a ring: the state coupling is rho times the full-cycle
permutation sending index i to (i+1) mod n, with ±1 input signs and an
optional small ±1 bias. A network of order k couples k such rings through a
DAG: each encoder receives the scaled external input (when attached) plus
sign-coupled, gain-scaled states of its upstream encoders, updated within the
same timestep in topological order.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import kernels, topology
from .errors import NonFiniteState
from .signs import Allocation, allocate_couplings, make_sign_source


class Activation(enum.IntEnum):
    IDENTITY = 0
    TANH = 1

    def apply(self, arr):
        return np.tanh(arr) if self is Activation.TANH else np.asarray(arr, dtype=np.float64)

    @classmethod
    def parse(cls, name: str) -> "Activation":
        return cls[name.strip().upper()]


def cycle_shift(state: np.ndarray, rho: float) -> np.ndarray:
    """Apply the contractive full-cycle permutation: rho * C * state.

    C sends ring index i to (i+1) mod n, so output slot (i+1) mod n receives
    input slot i. Implemented as a rotation and scale; equals the explicit
    permutation-matrix product.
    """
    return rho * np.roll(np.asarray(state, dtype=np.float64), 1)


@dataclass
class SCRParams:
    """One ring reservoir: size, contraction factor, signs, bias."""

    n: int
    rho: float
    input_signs: np.ndarray
    bias_signs: np.ndarray
    bias_scale: float = 1e-5
    bias_enabled: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie strictly in (0, 1)")
        for name in ("input_signs", "bias_signs"):
            v = np.asarray(getattr(self, name))
            if v.shape != (self.n,) or not np.isin(v, (-1, 1)).all():
                raise ValueError(f"{name} must be {self.n} values in {{-1, +1}}")
        if self.bias_scale < 0:
            raise ValueError("bias_scale must be >= 0")


@dataclass
class MSCRGenotype:
    """The searched object: input scalings s, edge gains H, attachments d, wiring A.

    s[i] scales the external input into encoder i; H[j, i] scales the state
    of encoder j fed into encoder i; d[i] attaches the external input;
    A[j, i] = 1 wires encoder j's output into encoder i. Diagonals of H and
    A are zero (no self-loops).
    """

    k: int
    s: np.ndarray
    H: np.ndarray
    d: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=np.float64)
        self.H = np.asarray(self.H, dtype=np.float64)
        self.d = np.asarray(self.d, dtype=np.uint8)
        self.A = np.asarray(self.A, dtype=np.uint8)
        if self.s.shape != (self.k,) or self.d.shape != (self.k,):
            raise ValueError("s and d must have length k")
        if self.H.shape != (self.k, self.k) or self.A.shape != (self.k, self.k):
            raise ValueError("H and A must be k x k")
        if np.diagonal(self.A).any() or np.diagonal(self.H).any():
            raise ValueError("A and H must have zero diagonals")
        if not np.isin(self.d, (0, 1)).all() or not np.isin(self.A, (0, 1)).all():
            raise ValueError("d and A must be 0/1")

    @classmethod
    def single(cls, input_scale: float = 1.0) -> "MSCRGenotype":
        return cls(k=1, s=np.array([input_scale]), H=np.zeros((1, 1)),
                   d=np.ones(1, dtype=np.uint8), A=np.zeros((1, 1), dtype=np.uint8))


@dataclass
class BuildContext:
    """Everything besides the genotype needed to stand up a system."""

    n: int
    rho: float = 0.95
    activation: Activation = Activation.TANH
    sign_mode: str = "pi"
    sign_seed: object = None
    bias_enabled: bool = True
    bias_scale: float = 1e-5

    def make_source(self):
        return make_sign_source(self.sign_mode, self.sign_seed)


class MSCRSystem:
    """A runnable network of ring reservoirs with a fixed evaluation order."""

    def __init__(self, genotype: MSCRGenotype, n: int, rho: float,
                 activation: Activation, allocation: Allocation,
                 bias_enabled: bool, bias_scale: float,
                 report: topology.TopologyReport, repaired: np.ndarray):
        if not 0.0 < rho < 1.0:
            raise ValueError("rho must lie strictly in (0, 1)")
        self.genotype = genotype
        self.n = n
        self.rho = float(rho)
        self.activation = activation
        self.allocation = allocation
        self.bias_enabled = bias_enabled
        self.bias_scale = float(bias_scale)
        self.report = report
        self.repaired = repaired
        k = genotype.k

        self._drive = genotype.d.astype(np.float64) * genotype.s
        self._v_in = allocation.v_in.astype(np.float64)
        if bias_enabled:
            self._bias_eff = bias_scale * allocation.bias.astype(np.float64)
        else:
            self._bias_eff = np.zeros((k, n))

        # Edges grouped by destination in evaluation order, sources ascending,
        # so upstream states are already updated when consumed. Sign matrices
        # are stored transposed (source dim first) for the kernels.
        ptr = [0]
        srcs, gains, mats = [], [], []
        for dst in report.eval_order:
            for src in range(k):
                if repaired[src, dst]:
                    srcs.append(src)
                    gains.append(genotype.H[src, dst])
                    mats.append(allocation.cross[(src, dst)].T)
            ptr.append(len(srcs))
        self._edge_ptr = np.array(ptr, dtype=np.int64)
        self._edge_src = np.array(srcs, dtype=np.int64)
        self._edge_gain = np.array(gains, dtype=np.float64)
        if mats:
            self._edge_signs = np.ascontiguousarray(np.stack(mats), dtype=np.int8)
        else:
            self._edge_signs = np.zeros((0, n, n), dtype=np.int8)
        self._order = np.asarray(report.eval_order, dtype=np.int64)
        self.state = np.zeros((k, n))

    @property
    def k(self) -> int:
        return self.genotype.k

    @property
    def state_dim(self) -> int:
        return self.genotype.k * self.n

    def encoder_params(self, i: int) -> SCRParams:
        """Per-ring view: size, contraction, signs and bias of encoder i."""
        return SCRParams(n=self.n, rho=self.rho,
                         input_signs=self.allocation.v_in[i],
                         bias_signs=self.allocation.bias[i],
                         bias_scale=self.bias_scale,
                         bias_enabled=self.bias_enabled)

    def reset(self):
        self.state[:] = 0.0

    def step(self, u: float) -> np.ndarray:
        """Advance one timestep; returns the concatenated state."""
        return self.run([u], washout=0, reset=False)[0]

    def run(self, inputs, washout: int = 0, reset: bool = True,
            initial_state=None, backend=None) -> np.ndarray:
        """Drive the system through `inputs`, returning post-washout states.

        The state starts from zero (or `initial_state`), one row of the
        result per timestep after the first `washout` steps. Raises
        NonFiniteState if any component diverges.
        """
        inputs = np.ascontiguousarray(inputs, dtype=np.float64)
        total = inputs.shape[0]
        if not 0 <= washout <= total:
            raise ValueError(f"washout {washout} outside [0, {total}]")
        if reset:
            self.reset()
        if initial_state is not None:
            self.state[:] = np.asarray(initial_state, dtype=np.float64).reshape(self.k, self.n)
        out = np.empty((total - washout, self.state_dim))
        impl = backend if backend is not None else kernels.active
        status = impl.run_sequence(
            self.state, inputs, self.rho, self._drive, self._v_in,
            self._bias_eff, self._edge_ptr, self._edge_src, self._edge_signs,
            self._edge_gain, self._order, int(self.activation), washout, out,
        )
        if status >= 0:
            raise NonFiniteState(int(status))
        return out


def build_system(genotype: MSCRGenotype, ctx: BuildContext) -> MSCRSystem:
    """Stand up a runnable system: repair the wiring, order it, draw signs."""
    report, repaired = topology.analyze(genotype.A, genotype.d)
    allocation = allocate_couplings(ctx.make_source(), genotype.k, ctx.n, repaired)
    return MSCRSystem(genotype, ctx.n, ctx.rho, ctx.activation, allocation,
                      ctx.bias_enabled, ctx.bias_scale, report, repaired)


def scr_single(n: int, rho: float, sign_source, activation: Activation,
               input_scale: float = 1.0, bias_enabled: bool = False,
               bias_scale: float = 1e-5) -> MSCRSystem:
    """A single ring reservoir as an order-1 network (shared code path)."""
    genotype = MSCRGenotype.single(input_scale)
    report, repaired = topology.analyze(genotype.A, genotype.d)
    allocation = allocate_couplings(sign_source, 1, n, repaired)
    return MSCRSystem(genotype, n, rho, activation, allocation,
                      bias_enabled, bias_scale, report, repaired)
