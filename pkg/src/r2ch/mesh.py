"""Uniform periodic mesh and the finite-difference operators of the scheme.

Grid functions are plain 1-D float64 arrays of length ``grid.M``; node ``i``
sits at ``x_i = xmin + i*h`` for ``i = 0..M-1`` and node ``M`` is node ``0``.

Operators (all periodic, index arithmetic mod M)::

    central_diff   (w[i+1] - w[i-1]) / (2h)
    third_diff     (w[i+2] - 2w[i+1] + 2w[i-1] - w[i-2]) / (2h^3)
    apply_helmholtz  m = u - (u[i+2] - 2u[i] + u[i-2]) / (4h^2)   (m = B u)
    solve_helmholtz  u = B^{-1} m via the circulant's Fourier spectrum
    coupling_flux  (u[i+1]+u[i])(r[i+1]+r[i]) - (u[i-1]+u[i])(r[i-1]+r[i])
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class HelmholtzSolveError(RuntimeError):
    """The circulant solve missed its residual target."""


@dataclass(frozen=True)
class PeriodicGrid:
    xmin: float
    xmax: float
    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 5:
            raise ValueError(f"M must be an integer >= 5, got {self.M!r}")
        if not self.xmax > self.xmin:
            raise ValueError(f"degenerate domain [{self.xmin}, {self.xmax}]")
        object.__setattr__(self, "M", int(self.M))

    @property
    def length(self) -> float:
        return self.xmax - self.xmin

    @property
    def h(self) -> float:
        return (self.xmax - self.xmin) / self.M

    @cached_property
    def x(self) -> np.ndarray:
        x = self.xmin + self.h * np.arange(self.M)
        x.flags.writeable = False
        return x

    @cached_property
    def helmholtz_symbol(self) -> np.ndarray:
        """Eigenvalues of B on the rfft modes: 1 + sin^2(2 pi k / M) / h^2."""
        k = np.arange(self.M // 2 + 1)
        lam = 1.0 + np.sin(2.0 * np.pi * k / self.M) ** 2 / self.h**2
        lam.flags.writeable = False
        return lam

    def refined(self) -> "PeriodicGrid":
        return PeriodicGrid(self.xmin, self.xmax, 2 * self.M)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.M)

    def check(self, w: np.ndarray, name: str = "w") -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.M,):
            raise ValueError(f"{name} has shape {w.shape}, expected ({self.M},)")
        return w


def shift(w: np.ndarray, k: int) -> np.ndarray:
    """result[i] = w[(i + k) mod M]."""
    return np.roll(w, -k)


def central_diff(w: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(w, -1) - np.roll(w, 1)) / (2.0 * h)


def third_diff(w: np.ndarray, h: float) -> np.ndarray:
    if w.shape[-1] < 5:
        raise ValueError("third_diff needs at least 5 nodes")
    return (np.roll(w, -2) - 2.0 * np.roll(w, -1) + 2.0 * np.roll(w, 1) - np.roll(w, 2)) / (
        2.0 * h**3
    )


def apply_helmholtz(u: np.ndarray, h: float) -> np.ndarray:
    if u.shape[-1] < 5:
        raise ValueError("apply_helmholtz needs at least 5 nodes")
    return u - (np.roll(u, -2) - 2.0 * u + np.roll(u, 2)) / (4.0 * h * h)


def apply_helmholtz_nested(u: np.ndarray, h: float) -> np.ndarray:
    """Same operator written as m = u - D(Du) with D the central difference."""
    return u - central_diff(central_diff(u, h), h)


@dataclass(frozen=True)
class HelmholtzSolver:
    """Reusable inverse of B for one grid.

    B is circulant and symmetric, so it is diagonal in the DFT basis with
    eigenvalues >= 1; the solve is two real FFTs and a division.
    """

    grid: PeriodicGrid
    rtol: float = 1e-12
    check_residual: bool = True
    _lam: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_lam", self.grid.helmholtz_symbol)

    def __call__(self, m: np.ndarray) -> np.ndarray:
        M = self.grid.M
        u = np.fft.irfft(np.fft.rfft(m) / self._lam, M)
        if self.check_residual:
            res = self.residual(u, m)
            if not res <= self.rtol:
                raise HelmholtzSolveError(f"Helmholtz relative residual {res:.3e} exceeds {self.rtol:g}")
        return u

    def residual(self, u: np.ndarray, m: np.ndarray) -> float:
        """Normwise relative residual |Bu - m| / (|B| |u| + |m|), max norms."""
        r = np.max(np.abs(apply_helmholtz(u, self.grid.h) - m), initial=0.0)
        norm_b = 1.0 + 1.0 / self.grid.h**2
        scale = norm_b * np.max(np.abs(u), initial=0.0) + np.max(np.abs(m), initial=0.0)
        return 0.0 if r == 0.0 else r / scale


def solve_helmholtz(m: np.ndarray, grid: PeriodicGrid) -> np.ndarray:
    return HelmholtzSolver(grid)(np.asarray(m, dtype=float))


def coupling_flux(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    up, um = np.roll(u, -1), np.roll(u, 1)
    rp, rm = np.roll(rho, -1), np.roll(rho, 1)
    return (up + u) * (rp + rho) - (um + u) * (rm + rho)


def second_diff(w: np.ndarray) -> np.ndarray:
    """Undivided second difference w[i+1] - 2w[i] + w[i-1]."""
    return np.roll(w, -1) - 2.0 * w + np.roll(w, 1)
