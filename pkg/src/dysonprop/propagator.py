"""Series coefficients of the time-evolution operator and their assembly.

Order-l contributions are sums over index tuples (g_1..g_{l+1}) of a
divided difference of the phase function over the tuple's energies times a
chain product of perturbation matrix elements.  The l-truncated partial
sum approximates e^{-iHt} with error O(lambda^{N+1}) in the coupling.

An independently evaluated, epsilon-regularized form built from resolvent
partial fractions is provided as a cross-check; it converges to the
divided-difference route as epsilon -> 0 and is meant to be extrapolated
(see ``richardson_limit``), never used as the reference path.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np

from .divdiff import dd_phase
from .model import SpectralModel

DEFAULT_TUPLE_BUDGET = 2_000_000
_BUDGET_ENV = "DYSONPROP_TUPLE_BUDGET"

#: Compensated accumulation kicks in at this dimension and above.
_KAHAN_DIM = 8


class TupleBudgetError(RuntimeError):
    """Tuple enumeration would exceed the configured budget."""


def tuple_budget() -> int:
    raw = os.environ.get(_BUDGET_ENV)
    if raw is None:
        return DEFAULT_TUPLE_BUDGET
    return int(raw)


def _check_budget(dim: int, l: int) -> None:
    cost = dim ** (l + 1)
    budget = tuple_budget()
    if cost > budget:
        raise TupleBudgetError(
            f"order {l} over dimension {dim} needs {cost} tuples "
            f"(budget {budget}; set {_BUDGET_ENV} to override)"
        )


@dataclass
class OperatorMatrix:
    """Dense complex matrix tagged with its meaning and parameters."""

    entries: np.ndarray
    kind: str  # "propagator" | "resolvent" | "green-td" | "series-term"
    params: dict

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError("operator matrices must be square")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("operator entries must be finite")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class TruncationSpec:
    """Highest perturbation order kept in a partial sum."""

    N: int

    def __post_init__(self):
        if self.N < 0 or int(self.N) != self.N:
            raise ValueError(f"truncation order must be a nonnegative integer, got {self.N}")


def normalize_sign(sign) -> int:
    """Map '+', '-', +1, -1 to the integer sign of the i*epsilon shift."""
    if sign in ("+", 1, +1):
        return 1
    if sign in ("-", -1):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def _chain_weight(h1: np.ndarray, tup: tuple) -> complex:
    w = 1.0 + 0.0j
    for a, b in zip(tup, tup[1:]):
        w *= h1[a, b]
        if w == 0:
            return 0j
    return w


def a_coefficient(model: SpectralModel, l: int, g: int, gp: int, t: float) -> complex:
    """Single series coefficient at order l between basis states g, g'."""
    if l < 0:
        raise ValueError("order must be >= 0")
    e = model.energies
    if l == 0:
        return complex(np.exp(-1j * e[g] * t)) if g == gp else 0j
    _check_budget(model.dim, l)
    h1 = model.h1
    cache: dict[tuple, complex] = {}
    total = 0j
    for mid in itertools.product(range(model.dim), repeat=l - 1):
        tup = (g, *mid, gp)
        w = _chain_weight(h1, tup)
        if w == 0:
            continue
        key = tuple(sorted(tup))
        dd = cache.get(key)
        if dd is None:
            dd = dd_phase([e[k] for k in tup], t)
            cache[key] = dd
        total += dd * w
    return complex(total)


def a_matrix(model: SpectralModel, l: int, t: float) -> OperatorMatrix:
    """Order-l series term as a matrix in the unperturbed eigenbasis.

    Divided differences are shared across tuples with equal node multisets
    (the value is symmetric in the nodes), so the dominant cost is one
    evaluation per multiset rather than per tuple.
    """
    if l < 0:
        raise ValueError("order must be >= 0")
    d = model.dim
    e = model.energies
    if l == 0:
        return OperatorMatrix(
            np.diag(np.exp(-1j * e * t)), "series-term", {"t": t, "l": 0}
        )
    _check_budget(d, l)
    h1 = model.h1
    out = np.zeros((d, d), dtype=complex)
    comp = np.zeros((d, d), dtype=complex) if d >= _KAHAN_DIM else None
    cache: dict[tuple, complex] = {}
    for tup in itertools.product(range(d), repeat=l + 1):
        w = _chain_weight(h1, tup)
        if w == 0:
            continue
        key = tuple(sorted(tup))
        dd = cache.get(key)
        if dd is None:
            dd = dd_phase([e[k] for k in tup], t)
            cache[key] = dd
        term = dd * w
        i, j = tup[0], tup[-1]
        if comp is None:
            out[i, j] += term
        else:  # Kahan step
            y = term - comp[i, j]
            s = out[i, j] + y
            comp[i, j] = (s - out[i, j]) - y
            out[i, j] = s
    return OperatorMatrix(out, "series-term", {"t": t, "l": l})


def truncated_evolution(model: SpectralModel, spec: TruncationSpec, t: float) -> OperatorMatrix:
    """Partial sum of the series through order spec.N."""
    if isinstance(spec, int):
        spec = TruncationSpec(spec)
    total = np.zeros((model.dim, model.dim), dtype=complex)
    for l in range(spec.N + 1):
        total += a_matrix(model, l, t).entries
    return OperatorMatrix(total, "propagator", {"t": t, "N": spec.N})


def epsilon_form_evolution(
    model: SpectralModel, spec: TruncationSpec, t: float, eps: float, sign
) -> OperatorMatrix:
    """Resolvent partial-fraction form of the truncated evolution operator.

    Each tuple's energies are split by graded imaginary shifts
    E_m -> E_m -+ i*m*eps (position m, sign '+' selects the retarded
    prescription), which puts -+i*eps-type offsets into every resolvent
    denominator and renders all partial fractions finite.  Individual
    terms grow like 1/eps near coincident energies while the assembled
    matrix converges to ``truncated_evolution`` as eps -> 0; callers are
    expected to extrapolate over a ladder of eps values.
    """
    if isinstance(spec, int):
        spec = TruncationSpec(spec)
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    sgn = normalize_sign(sign)
    d = model.dim
    e = model.energies
    h1 = model.h1
    out = np.zeros((d, d), dtype=complex)
    for l in range(spec.N + 1):
        _check_budget(d, l)
        for tup in itertools.product(range(d), repeat=l + 1):
            w = _chain_weight(h1, tup) if l else 1.0 + 0j
            if w == 0:
                continue
            nodes = np.array([e[k] for k in tup], dtype=complex)
            nodes -= 1j * sgn * eps * np.arange(l + 1)
            val = 0j
            for i in range(l + 1):
                denom = 1.0 + 0j
                for j in range(l + 1):
                    if j != i:
                        denom *= nodes[i] - nodes[j]
                val += np.exp(-1j * nodes[i] * t) / denom
            out[tup[0], tup[-1]] += val * w
    return OperatorMatrix(
        out, "propagator", {"t": t, "N": spec.N, "eps": eps, "sign": sgn}
    )


def richardson_limit(eps_values, samples):
    """Polynomial (Neville) extrapolation of samples f(eps_k) to eps = 0.

    Works on scalars or arrays; eps values must be distinct.
    """
    eps_values = [float(x) for x in eps_values]
    if len(eps_values) != len(samples) or not samples:
        raise ValueError("need one sample per eps value")
    tableau = [np.asarray(s, dtype=complex) for s in samples]
    n = len(tableau)
    for level in range(1, n):
        nxt = []
        for i in range(n - level):
            e0, e1 = eps_values[i], eps_values[i + level]
            nxt.append((e0 * tableau[i + 1] - e1 * tableau[i]) / (e0 - e1))
        tableau = nxt
    out = tableau[0]
    return complex(out) if out.ndim == 0 else out
