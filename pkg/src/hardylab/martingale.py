"""Finite-depth martingales on grid products, stored by terminal values.

A depth-n martingale is kept as one complex array over grid^n (coordinate 1
slowest).  Every level is recomputed by averaging the terminal array over
the trailing coordinates, so the filtration structure cannot be violated by
construction.  Operations work difference-wise: the conjugation-even and
-odd parts, the dyadic projection, and the transform all act on the
martingale differences and reassemble a terminal array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .torus import TorusGrid, batch_analyze

MEMORY_GUARD_ENTRIES = 2**24


@dataclass(frozen=True, eq=False)
class MartingaleField:
    """Terminal values of a depth-n martingale on the n-fold grid product."""

    grid: TorusGrid
    depth: int
    terminal: np.ndarray

    def __post_init__(self):
        if not isinstance(self.depth, (int, np.integer)) or self.depth < 1:
            raise ValueError(f"depth must be a positive integer; got {self.depth!r}")
        n = self.grid.n_points
        if n**self.depth > MEMORY_GUARD_ENTRIES:
            raise ValueError(
                f"memory guard: {n}^{self.depth} exceeds {MEMORY_GUARD_ENTRIES} entries"
            )
        term = np.asarray(self.terminal, dtype=np.complex128)
        expected = (n,) * self.depth
        if term.shape != expected:
            raise ValueError(f"terminal must have shape {expected}; got {term.shape}")
        term = term.copy()
        term.setflags(write=False)
        object.__setattr__(self, "terminal", term)


@dataclass(frozen=True, eq=False)
class AdaptedPhases:
    """Unimodular transform multipliers; terms[k] lives on grid^k."""

    grid: TorusGrid
    terms: tuple

    def __post_init__(self):
        n = self.grid.n_points
        cleaned = []
        for k, w in enumerate(self.terms):
            arr = np.asarray(w, dtype=np.complex128)
            if arr.shape != (n,) * k:
                raise ValueError(f"term {k} must have shape {(n,) * k}; got {arr.shape}")
            if arr.size and float(np.max(np.abs(np.abs(arr) - 1.0))) > 1e-12:
                raise ValueError(f"term {k} is not unimodular")
            arr = arr.copy()
            arr.setflags(write=False)
            cleaned.append(arr)
        if not cleaned:
            raise ValueError("at least one multiplier term is required")
        object.__setattr__(self, "terms", tuple(cleaned))

    @property
    def depth(self) -> int:
        return len(self.terms)


@dataclass(frozen=True, eq=False)
class SquareFunctionProfile:
    """Per-level conditional second moments and the combined square function."""

    level_moments: tuple
    combined: np.ndarray


def level(field: MartingaleField, k: int) -> np.ndarray:
    """Average the terminal array over coordinates k+1..n; shape (N,)*k."""
    if not 0 <= k <= field.depth:
        raise ValueError(f"level index {k} outside 0..{field.depth}")
    arr = field.terminal
    for _ in range(field.depth - k):
        arr = arr.mean(axis=-1)
    return np.asarray(arr)


def difference(field: MartingaleField, k: int) -> np.ndarray:
    """Martingale difference at level k; conditional mean over coordinate k is 0."""
    if not 1 <= k <= field.depth:
        raise ValueError(f"difference index {k} outside 1..{field.depth}")
    return level(field, k) - level(field, k - 1)[..., np.newaxis]


def differences(field: MartingaleField) -> list:
    """All differences in one backward sweep, consistent with level()."""
    levels = [field.terminal]
    for _ in range(field.depth):
        levels.append(levels[-1].mean(axis=-1))
    levels.reverse()  # levels[k] is level k
    return [levels[k] - levels[k - 1][..., np.newaxis] for k in range(1, field.depth + 1)]


def field_from_differences(grid: TorusGrid, depth: int, base: complex, diffs) -> MartingaleField:
    """Assemble a terminal array from a constant level 0 and per-level differences."""
    if len(diffs) != depth:
        raise ValueError(f"expected {depth} difference arrays; got {len(diffs)}")
    n = grid.n_points
    if n**depth > MEMORY_GUARD_ENTRIES:
        raise ValueError("memory guard exceeded")
    terminal = np.full((n,) * depth, complex(base), dtype=np.complex128)
    for k, d in enumerate(diffs, start=1):
        d = np.asarray(d, dtype=np.complex128)
        if d.shape != (n,) * k:
            raise ValueError(f"difference {k} must have shape {(n,) * k}; got {d.shape}")
        terminal += d.reshape(d.shape + (1,) * (depth - k))
    return MartingaleField(grid, depth, terminal)


def _broadcast_sum(moments, depth: int, n: int) -> np.ndarray:
    """Sum per-level arrays (shape (N,)*(k-1)) over the grid^(n-1) base."""
    total = np.zeros((n,) * (depth - 1))
    for k, q in enumerate(moments, start=1):
        total += q.reshape(q.shape + (1,) * (depth - k))
    return total


def cond_square_profile(field: MartingaleField) -> SquareFunctionProfile:
    """Conditional second moments q_k = E_{k-1}|diff_k|^2 and their combined root."""
    moments = tuple(np.mean(np.abs(d) ** 2, axis=-1) for d in differences(field))
    combined = np.sqrt(_broadcast_sum(moments, field.depth, field.grid.n_points))
    return SquareFunctionProfile(moments, combined)


def previsible_norm(field: MartingaleField) -> float:
    """L^1 norm of the conditional square function."""
    return float(np.mean(cond_square_profile(field).combined))


def _even_part(diff: np.ndarray) -> np.ndarray:
    return 0.5 * (diff + np.flip(diff, axis=-1))


def _odd_part(diff: np.ndarray) -> np.ndarray:
    # exact antisymmetry: flipping negates these values bit-for-bit
    return 0.5 * (diff - np.flip(diff, axis=-1))


def cosine_part(field: MartingaleField) -> MartingaleField:
    """Martingale whose differences average each difference over conjugation
    of its newest coordinate."""
    diffs = [_even_part(d) for d in differences(field)]
    return field_from_differences(field.grid, field.depth, complex(level(field, 0)), diffs)


def sine_part(field: MartingaleField) -> MartingaleField:
    """Remainder of the even/odd split; differences are conjugation-odd."""
    diffs = [_odd_part(d) for d in differences(field)]
    return field_from_differences(field.grid, field.depth, 0.0, diffs)


def transform(field: MartingaleField, phases: AdaptedPhases) -> MartingaleField:
    """Real martingale with differences Im(w_{k-1} * diff_k)."""
    if phases.grid.n_points != field.grid.n_points:
        raise ValueError("grid mismatch between field and phases")
    if phases.depth < field.depth:
        raise ValueError(
            f"phases depth {phases.depth} shorter than field depth {field.depth}"
        )
    diffs = []
    for k, d in enumerate(differences(field), start=1):
        w = phases.terms[k - 1][..., np.newaxis]
        diffs.append((w * d).imag.astype(np.complex128))
    return field_from_differences(field.grid, field.depth, 0.0, diffs)


def is_hardy_martingale(field: MartingaleField, tol: float) -> bool:
    """True iff every newest-coordinate slice of every difference is analytic.

    Each slice y -> diff_k(x, y) must put at most tol^2 of its energy on
    frequencies m <= 0 (mean, negatives, and the Nyquist bucket).  Slices
    whose total energy sits at round-off scale of the terminal array are the
    zero function for this purpose: recomputing levels by averaging leaves
    ~1e-16 junk in mathematically vanishing differences, and junk carries no
    frequency information.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    grid = field.grid
    neg = grid.frequencies <= 0
    zero_floor = (1e-13 * float(np.max(np.abs(field.terminal), initial=0.0))) ** 2
    for d in differences(field):
        rows = d.reshape(-1, grid.n_points)
        coeffs = batch_analyze(grid, rows)
        bad = np.sum(np.abs(coeffs[:, neg]) ** 2, axis=1)
        total = np.mean(np.abs(rows) ** 2, axis=1)
        if np.any((bad > tol * tol * total) & (total > zero_floor)):
            return False
    return True


def check_transform_isometry(field: MartingaleField, phases: AdaptedPhases,
                             hardy_tol: float = 1e-8):
    """Previsible norms of the cosine part and of the transform.

    For a Hardy martingale the two agree to round-off: conditioned on the
    past, the newest slice is analytic, and both the even part and
    Im(w * slice) carry exactly half its energy.
    """
    if not is_hardy_martingale(field, hardy_tol):
        raise ValueError("transform isometry requires a Hardy martingale")
    return previsible_norm(cosine_part(field)), previsible_norm(transform(field, phases))


def project_dyadic_cells(grid: TorusGrid, arr: np.ndarray) -> np.ndarray:
    """Average over the sign cells of every coordinate of arr.

    Each axis is first symmetrized over the pairing j <-> N-1-j (the cells
    are closed under it), so conjugation-odd input projects to exact zero.
    """
    proj = grid.dyadic_projector
    for axis in range(arr.ndim):
        arr = 0.5 * (arr + np.flip(arr, axis=axis))
        arr = np.moveaxis(np.tensordot(proj, arr, axes=([1], [axis])), 0, axis)
    return arr


def dyadic_project(field: MartingaleField) -> MartingaleField:
    """Difference-wise conditional expectation given all coordinate signs."""
    diffs = [project_dyadic_cells(field.grid, d) for d in differences(field)]
    return field_from_differences(field.grid, field.depth, complex(level(field, 0)), diffs)
