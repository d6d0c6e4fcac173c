"""Four-level double-lambda atom: state, level data, and equations of motion.

Levels |1>, |2> are the ground pair, |3>, |4> the excited pair; the dipole
allowed transitions are 1-3, 1-4, 2-3 and 2-4.  The equations of motion are
the ten coupled density-matrix equations for this system written without the
rotating wave approximation, i.e. the instantaneous Rabi values carry the
full oscillating field including the carrier.  There is no 1-2 or 3-4
coupling and no ground-state decoherence term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import IntegrationFailureError, InvariantViolationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LevelScheme:
    """Transition angular frequencies of the four-level atom (rad/s).

    Stores the three independent splittings from the lowest level; the
    remaining differences are derived so additivity identities hold exactly.
    """

    omega21: float
    omega31: float
    omega41: float

    def __post_init__(self):
        if not (0.0 < self.omega21 < self.omega31 < self.omega41):
            raise ValueError(
                "level scheme must satisfy 0 < omega21 < omega31 < omega41, got "
                f"omega21={self.omega21!r}, omega31={self.omega31!r}, "
                f"omega41={self.omega41!r}"
            )

    @classmethod
    def from_comb_indices(cls, n21: float, n43: float, n41: float,
                          rep_rate_hz: float) -> "LevelScheme":
        """Build a scheme whose splittings are n_ij comb spacings of a train
        with repetition frequency ``rep_rate_hz`` (omega_ij = 2*pi*n_ij*nu)."""
        if rep_rate_hz <= 0.0:
            raise ValueError(f"rep_rate_hz must be positive, got {rep_rate_hz!r}")
        w21 = TWO_PI * n21 * rep_rate_hz
        w41 = TWO_PI * n41 * rep_rate_hz
        w31 = w41 - TWO_PI * n43 * rep_rate_hz
        return cls(omega21=w21, omega31=w31, omega41=w41)

    @property
    def omega32(self) -> float:
        return self.omega31 - self.omega21

    @property
    def omega42(self) -> float:
        return self.omega41 - self.omega21

    @property
    def omega43(self) -> float:
        return self.omega41 - self.omega31

    def comb_indices(self, rep_rate_hz: float) -> tuple[float, float, float]:
        """Return (n21, n43, n41) for a given repetition frequency."""
        nu = TWO_PI * rep_rate_hz
        return (self.omega21 / nu, self.omega43 / nu, self.omega41 / nu)


@dataclass(frozen=True)
class DecayRates:
    """Spontaneous decay rates gamma_ij (s^-1) of the excited levels into the
    ground pair.  All-zero rates are allowed (closed-system limit)."""

    gamma41: float
    gamma42: float
    gamma31: float
    gamma32: float

    def __post_init__(self):
        for name in ("gamma41", "gamma42", "gamma31", "gamma32"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @classmethod
    def uniform(cls, gamma: float) -> "DecayRates":
        return cls(gamma, gamma, gamma, gamma)

    @property
    def total3(self) -> float:
        """Total decay rate of level |3>."""
        return self.gamma31 + self.gamma32

    @property
    def total4(self) -> float:
        """Total decay rate of level |4>."""
        return self.gamma41 + self.gamma42

    @property
    def lifetime3(self) -> float:
        return 1.0 / self.total3 if self.total3 > 0.0 else math.inf

    @property
    def lifetime4(self) -> float:
        return 1.0 / self.total4 if self.total4 > 0.0 else math.inf


@dataclass(frozen=True)
class DriveSample:
    """Instantaneous real Rabi values (rad/s) on the four allowed transitions.

    Values are the full oscillating drive, carrier included.  The reversed
    index order (Omega_ji) equals Omega_ij since all values are real.
    """

    rabi13: float
    rabi14: float
    rabi23: float
    rabi24: float

    @classmethod
    def uniform(cls, rabi: float) -> "DriveSample":
        return cls(rabi, rabi, rabi, rabi)

    @classmethod
    def zero(cls) -> "DriveSample":
        return cls(0.0, 0.0, 0.0, 0.0)


class DensityMatrix:
    """4x4 complex Hermitian unit-trace state of the atom.

    Wraps the full 4x4 grid as an immutable array.  Indices are 0-based in
    storage but named 1..4 in the physics (``rho12`` is ``matrix[0, 1]``).
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        arr = np.array(matrix, dtype=np.complex128, copy=True)
        if arr.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    def __reduce__(self):
        return (DensityMatrix, (np.asarray(self.matrix),))

    def __repr__(self):
        pops = ", ".join(f"{p:.6g}" for p in self.populations)
        return f"DensityMatrix(populations=[{pops}], |rho12|={self.abs_rho12:.6g})"

    def __array__(self, dtype=None, copy=None):
        return np.array(self.matrix, dtype=dtype)

    @classmethod
    def from_populations(cls, p1: float, p2: float, p3: float, p4: float,
                         rho12: complex = 0.0) -> "DensityMatrix":
        m = np.zeros((4, 4), dtype=np.complex128)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = p1, p2, p3, p4
        m[0, 1] = rho12
        m[1, 0] = np.conj(rho12)
        return cls(m)

    @classmethod
    def equal_ground_mixture(cls) -> "DensityMatrix":
        """rho11 = rho22 = 1/2, everything else zero (zero initial coherence)."""
        return cls.from_populations(0.5, 0.5, 0.0, 0.0)

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diagonal(self.matrix)).copy()

    @property
    def rho12(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def abs_rho12(self) -> float:
        return abs(self.matrix[0, 1])

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    @property
    def trace_error(self) -> float:
        return abs(self.trace - 1.0)

    @property
    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    @property
    def min_eigenvalue(self) -> float:
        sym = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(sym)[0])

    def symmetrized(self) -> "DensityMatrix":
        """Return (rho + rho^dagger)/2."""
        return DensityMatrix(0.5 * (self.matrix + self.matrix.conj().T))

    def validate(self, *, trace_tol: float = 1e-9, herm_tol: float = 1e-12,
                 eig_tol: float = 1e-9) -> None:
        """Raise InvariantViolationError if any state invariant is broken."""
        problems = []
        if self.trace_error > trace_tol:
            problems.append(f"|trace - 1| = {self.trace_error:.3e} > {trace_tol:g}")
        if self.hermiticity_defect > herm_tol:
            problems.append(
                f"hermiticity defect = {self.hermiticity_defect:.3e} > {herm_tol:g}")
        if self.min_eigenvalue < -eig_tol:
            problems.append(
                f"min eigenvalue = {self.min_eigenvalue:.3e} < -{eig_tol:g}")
        diag = self.populations
        if np.any(diag < -eig_tol) or np.any(diag > 1.0 + eig_tol):
            problems.append(f"diagonal out of [0, 1]: {diag}")
        if problems:
            raise InvariantViolationError("; ".join(problems))


def bloch_rhs(state, drive: DriveSample, levels: LevelScheme,
              decays: DecayRates) -> np.ndarray:
    """Right-hand side d(rho)/dt of the ten coupled density-matrix equations.

    ``state`` may be a DensityMatrix or a bare (4, 4) complex array.  The
    lower triangle of the returned derivative is the conjugate of the upper
    triangle; the trace of the derivative is zero analytically.
    """
    rho = np.asarray(getattr(state, "matrix", state), dtype=np.complex128)

    r12, r13, r14 = rho[0, 1], rho[0, 2], rho[0, 3]
    r23, r24, r34 = rho[1, 2], rho[1, 3], rho[2, 3]
    r21, r31, r41 = rho[1, 0], rho[2, 0], rho[3, 0]
    r32, r42, r43 = rho[2, 1], rho[3, 1], rho[3, 2]
    r11, r22, r33, r44 = rho[0, 0], rho[1, 1], rho[2, 2], rho[3, 3]

    o13, o14 = drive.rabi13, drive.rabi14
    o23, o24 = drive.rabi23, drive.rabi24
    w21, w31, w41 = levels.omega21, levels.omega31, levels.omega41
    w32, w42, w43 = levels.omega32, levels.omega42, levels.omega43
    g41, g42, g31, g32 = decays.gamma41, decays.gamma42, decays.gamma31, decays.gamma32
    G3, G4 = decays.total3, decays.total4

    d11 = (g41 * r44 + g31 * r33) + 1j * (o13 * (r31 - r13) + o14 * (r41 - r14))
    d22 = (g42 * r44 + g32 * r33) + 1j * (o23 * (r32 - r23) + o24 * (r42 - r24))
    d33 = -G3 * r33 + 1j * (o13 * (r13 - r31) + o23 * (r23 - r32))
    d44 = -G4 * r44 + 1j * (o14 * (r14 - r41) + o24 * (r24 - r42))

    d12 = 1j * (w21 * r12 + o13 * r32 + o14 * r42 - o23 * r13 - o24 * r14)
    d13 = -0.5 * G3 * r13 + 1j * (w31 * r13 + o13 * (r33 - r11) + o14 * r43 - o23 * r12)
    d14 = -0.5 * G4 * r14 + 1j * (w41 * r14 + o14 * (r44 - r11) + o13 * r34 - o24 * r12)
    d23 = -0.5 * G3 * r23 + 1j * (w32 * r23 + o23 * (r33 - r22) + o24 * r43 - o13 * r21)
    d24 = -0.5 * G4 * r24 + 1j * (w42 * r24 + o24 * (r44 - r22) + o23 * r34 - o14 * r21)
    d34 = (-0.5 * (G3 + G4) * r34
           + 1j * (w43 * r34 + o13 * r14 + o23 * r24 - o14 * r31 - o24 * r32))

    out = np.empty((4, 4), dtype=np.complex128)
    out[0, 0], out[1, 1], out[2, 2], out[3, 3] = d11, d22, d33, d44
    out[0, 1], out[0, 2], out[0, 3] = d12, d13, d14
    out[1, 2], out[1, 3], out[2, 3] = d23, d24, d34
    out[1, 0], out[2, 0], out[3, 0] = np.conj(d12), np.conj(d13), np.conj(d14)
    out[2, 1], out[3, 1], out[3, 2] = np.conj(d23), np.conj(d24), np.conj(d34)
    return out


DriveFunction = Callable[[float], DriveSample]


def rk4_step(state, t: float, h: float, drive_fn: DriveFunction,
             levels: LevelScheme, decays: DecayRates) -> DensityMatrix:
    """Advance the state from t to t + h with one classic RK4 step.

    The drive is evaluated at t, t + h/2 and t + h.  The result is
    re-symmetrized to (rho + rho^dagger)/2; the trace is left untouched so
    trace drift stays visible as a diagnostic.
    """
    if h <= 0.0:
        raise ValueError(f"step h must be positive, got {h!r}")
    rho = np.asarray(getattr(state, "matrix", state), dtype=np.complex128)

    d0 = drive_fn(t)
    dm = drive_fn(t + 0.5 * h)
    d1 = drive_fn(t + h)

    k1 = bloch_rhs(rho, d0, levels, decays)
    k2 = bloch_rhs(rho + 0.5 * h * k1, dm, levels, decays)
    k3 = bloch_rhs(rho + 0.5 * h * k2, dm, levels, decays)
    k4 = bloch_rhs(rho + h * k3, d1, levels, decays)
    new = rho + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)

    if not np.all(np.isfinite(new.view(np.float64))):
        raise IntegrationFailureError(
            "RK4 step produced a non-finite state", time_s=t, step_s=h)
    return DensityMatrix(0.5 * (new + new.conj().T))
