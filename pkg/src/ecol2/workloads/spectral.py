"""Pseudospectral solver for the two dispersive/chaotic problems.

Both equations share the nonlinear term u u_x = (u^2/2)_x; only the
linear symbol differs:

    KdV: u_t + u u_x + u_xxx = 0          ->  L(k) = i k^3
    KS:  u_t + u u_x + u_xx + u_xxxx = 0  ->  L(k) = k^2 - k^4

The stiff linear part is integrated exactly via exponentials of L; the
nonlinearity is advanced by classical RK4 in the transformed variable
with 2/3-rule dealiasing.  Internal grids are powers of two (the
compiled FFT requires it) and at least 256 points unless overridden;
output is restricted/extended to the grid by spectral resampling.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import SolverError, ValidationError
from ._backend import kernels
from .grids import FieldSolution, Grid1D, fourier_resample

SPECTRAL_EQUATIONS = ("kdv", "ks")

_INTERNAL_NX_MIN = 256

# advective accuracy target: dt <= _DT_ACCURACY / (u_max * k_max); validated
# by the self-convergence suite (halving dt moves the t=10 field < 1e-4)
_DT_ACCURACY = 0.05

_BLOWUP_LIMIT = 1e8


def next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


def _wavenumbers(n: int, length: float) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)


def _dealias_mask(n: int) -> np.ndarray:
    modes = np.rint(np.fft.fftfreq(n) * n).astype(np.int64)
    return (np.abs(modes) < n / 3.0).astype(np.float64)


def spectral_solve(
    equation: str,
    u0,
    grid: Grid1D,
    *,
    dt: float | None = None,
    internal_nx: int | None = None,
    dealias: bool = True,
    provenance: str = "reference-numeric",
) -> FieldSolution:
    """Evolve u0 over the grid's output times.

    dt forces the internal substep (rounded down so output times are hit
    exactly); internal_nx forces the transform size (power of two).
    Blow-up raises with the first output time at which the state was
    no longer finite.
    """
    if equation not in SPECTRAL_EQUATIONS:
        raise ValidationError(
            f"equation must be one of {SPECTRAL_EQUATIONS}, got {equation!r}"
        )
    if not grid.periodic:
        raise ValidationError("spectral grids are periodic")
    u0 = np.asarray(u0, dtype=np.float64)
    if u0.shape != (grid.nx,):
        raise ValidationError(f"u0 shape {u0.shape} does not match grid nx {grid.nx}")
    if not np.all(np.isfinite(u0)):
        raise ValidationError("u0 must be finite")

    n_int = internal_nx if internal_nx is not None else next_pow2(
        max(grid.nx, _INTERNAL_NX_MIN)
    )
    if n_int < 16 or (n_int & (n_int - 1)) != 0:
        raise ValidationError(f"internal_nx must be a power of two >= 16, got {n_int}")

    u_int = fourier_resample(u0, n_int) if n_int != grid.nx else u0.copy()
    k = _wavenumbers(n_int, grid.length)
    if equation == "kdv":
        symbol = 1j * k**3
    else:
        symbol = (k**2 - k**4).astype(np.complex128)

    u_scale = max(1.0, float(np.max(np.abs(u_int))))
    k_max = math.pi * n_int / grid.length
    dt_limit = _DT_ACCURACY / (u_scale * k_max)
    nsub, dt_sub = _substeps(grid.dt_out, dt_limit, dt)

    e_half = np.exp(0.5 * dt_sub * symbol)
    e_full = np.exp(dt_sub * symbol)
    g = -0.5j * dt_sub * k
    if dealias:
        g = g * _dealias_mask(n_int)

    v = kernels.from_physical(u_int)
    values = np.empty((grid.nt, grid.nx))
    values[0] = u0
    residue = 0.0
    t = grid.t
    for j in range(1, grid.nt):
        v = kernels.spectral_evolve(v, e_half, e_full, g, nsub)
        u_j, res_j = kernels.to_physical(v)
        if not np.all(np.isfinite(u_j)) or np.max(np.abs(u_j)) > _BLOWUP_LIMIT:
            raise SolverError(
                f"{equation} solution blew up by t = {t[j]:.6g} "
                f"(dt = {dt_sub:.4g}, internal nx = {n_int})"
            )
        residue = max(residue, res_j)
        values[j] = fourier_resample(u_j, grid.nx) if n_int != grid.nx else u_j
    return FieldSolution(
        grid,
        values,
        provenance,
        work_points=(grid.nt - 1) * nsub * n_int,
        max_imag_residue=residue,
    )


def _substeps(dt_out: float, dt_limit: float, dt_forced: float | None) -> tuple[int, float]:
    if dt_forced is not None:
        if not 0 < dt_forced:
            raise ValidationError(f"dt must be > 0, got {dt_forced}")
        nsub = max(1, math.ceil(dt_out / dt_forced - 1e-12))
    else:
        nsub = max(1, math.ceil(dt_out / dt_limit - 1e-12))
    return nsub, dt_out / nsub
