"""Complex quadratic symbols on phase space: Hamilton maps and singular spaces.

A symbol is q(X) = X^T Q X with Q complex symmetric of size 2n, X = (x, xi).
Its Hamilton map F satisfies q(X, Y) = sigma(X, F Y) for the polarized form
and the symplectic pairing of (x, xi) with (y, eta). With the standard
matrix J = [[0, I], [-I, 0]] the map is F = J Q, i.e. in Hessian quarters
F = [[Q_{xi x}, Q_{xi xi}], [-Q_{x x}, -Q_{x xi}]], and Q = -J F holds as a
self-consistency identity.

The singular space is the set of real phase-space vectors killed by every
Re F (Im F)^j for j = 0, ..., 2n-1. When it is trivial, the smallest
truncation length already giving a trivial intersection is the index k0
that governs how fast the associated semigroup regularizes.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "QuadraticForm",
    "HamiltonMap",
    "SingularSpaceResult",
    "symplectic_matrix",
    "hamilton_map",
    "singular_space",
    "partial_ellipticity_check",
    "harmonic_oscillator_form",
    "rotated_harmonic_form",
    "free_laplacian_form",
    "kramers_fokker_planck_form",
    "catalog",
]

_CONSISTENCY_TOL = 1e-12


@dataclass(frozen=True)
class QuadraticForm:
    """q(X) = X^T Q X on R^{2n}, Q complex symmetric, X = (x, xi)."""

    dim: int
    Q: np.ndarray = field(repr=False)

    def __post_init__(self):
        Q = np.array(self.Q, dtype=np.complex128)
        m = 2 * self.dim
        if Q.shape != (m, m):
            raise ValueError(f"Q must be {m}x{m} for dim {self.dim}")
        if np.max(np.abs(Q - Q.T)) > _CONSISTENCY_TOL * max(1.0, np.max(np.abs(Q))):
            raise ValueError("Q must be symmetric")
        Q = (Q + Q.T) / 2.0
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)

    def __call__(self, X) -> complex:
        v = np.asarray(X, dtype=np.complex128).reshape(2 * self.dim)
        return complex(v @ self.Q @ v)

    def real_part_nonnegative(self, tol: float = 1e-10) -> bool:
        eig = np.linalg.eigvalsh(self.Q.real)
        return bool(np.min(eig) >= -tol)


@dataclass(frozen=True)
class HamiltonMap:
    """F with q(X, Y) = sigma(X, F Y); the consistency defect is stored."""

    dim: int
    F: np.ndarray = field(repr=False)
    defect: float = 0.0

    def __post_init__(self):
        F = np.array(self.F, dtype=np.complex128)
        m = 2 * self.dim
        if F.shape != (m, m):
            raise ValueError(f"F must be {m}x{m} for dim {self.dim}")
        F.setflags(write=False)
        object.__setattr__(self, "F", F)

    @property
    def realpart(self) -> np.ndarray:
        return self.F.real.copy()

    @property
    def imagpart(self) -> np.ndarray:
        return self.F.imag.copy()


def symplectic_matrix(n: int) -> np.ndarray:
    """Standard J = [[0, I], [-I, 0]] of size 2n."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def hamilton_map(q: QuadraticForm) -> HamiltonMap:
    """Hamilton map of q, built two ways and cross-checked to 1e-12.

    Block construction from the Hessian quarters of Q and the direct product
    F = J Q must agree; their max-entry difference is the stored defect.
    The returned map satisfies Q = -J F to the same tolerance.
    """
    n = q.dim
    Qxx = q.Q[:n, :n]
    Qxxi = q.Q[:n, n:]
    Qxix = q.Q[n:, :n]
    Qxixi = q.Q[n:, n:]
    blocks = np.block([[Qxix, Qxixi], [-Qxx, -Qxxi]])
    direct = symplectic_matrix(n) @ q.Q
    defect = float(np.max(np.abs(blocks - direct)))
    scale = max(1.0, float(np.max(np.abs(q.Q))))
    if defect > _CONSISTENCY_TOL * scale:
        raise ValueError(f"Hamilton map construction inconsistent (defect {defect:.3e})")
    return HamiltonMap(n, blocks, defect)


@dataclass(frozen=True)
class SingularSpaceResult:
    """Singular space basis, its dimension, and the truncation index k0.

    basis: (dimS, 2n) orthonormal real rows spanning the space. k0 is the
    smallest j such that the vectors killed by Re F (Im F)^i for all i < j+1
    already reduce to {0}; it is None when the full space is nontrivial.
    ambiguous flags a rank decision where some singular value fell inside
    the threshold band (tol/8, 8 tol) relative to the largest.
    """

    dim: int
    basis: np.ndarray = field(repr=False)
    k0: int | None
    ambiguous: bool

    @property
    def dimS(self) -> int:
        return self.basis.shape[0]


def _real_nullspace(rows: list[np.ndarray], size: int, tol: float):
    """Orthonormal basis of the real joint kernel of the stacked matrices.

    Complex matrices contribute their real and imaginary parts separately: a
    real vector is killed by M iff it is killed by both Re M and Im M.
    Returns (basis (k, size), ambiguous flag).
    """
    stack = []
    for M in rows:
        stack.append(np.asarray(M.real, dtype=np.float64))
        if np.iscomplexobj(M) and np.max(np.abs(M.imag)) > 0:
            stack.append(np.asarray(M.imag, dtype=np.float64))
    A = np.vstack(stack) if stack else np.zeros((1, size))
    sv = np.linalg.svd(A, compute_uv=False)
    top = sv[0] if sv.size else 0.0
    if top == 0.0:
        return np.eye(size), False
    _, s, Vt = np.linalg.svd(A)
    cut = tol * top
    ambiguous = bool(np.any((s > cut / 8.0) & (s < cut * 8.0)))
    rank = int(np.sum(s > cut))
    return Vt[rank:], ambiguous


def singular_space(F: HamiltonMap, tol: float = 1e-9) -> SingularSpaceResult:
    """Real vectors killed by Re F (Im F)^j for all j up to 2n-1, plus k0.

    The truncated kernels are computed for growing j; they are nested and
    non-increasing in dimension, so the first trivial one gives k0.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    n = F.dim
    ReF = F.F.real
    ImF = F.F.imag
    rows: list[np.ndarray] = []
    power = np.eye(2 * n)
    k0 = None
    basis = np.eye(2 * n)
    ambiguous = False
    for j in range(2 * n):
        rows.append(ReF @ power)
        basis, amb = _real_nullspace(rows, 2 * n, tol)
        ambiguous = ambiguous or amb
        if basis.shape[0] == 0 and k0 is None:
            k0 = j
        power = power @ ImF
    if basis.shape[0] > 0:
        k0 = None
    return SingularSpaceResult(dim=n, basis=basis, k0=k0, ambiguous=ambiguous)


def partial_ellipticity_check(
    q: QuadraticForm, S_basis: np.ndarray, samples: int = 64, tol: float = 1e-9
) -> bool:
    """True iff q has no zero on the unit sphere of span(S_basis).

    Vacuously true for a trivial space. Unit samples are drawn from a
    deterministic low-discrepancy sweep of the coefficient sphere.
    """
    B = np.asarray(S_basis, dtype=np.float64).reshape(-1, 2 * q.dim)
    k = B.shape[0]
    if k == 0:
        return True
    gram = B @ B.T
    if np.max(np.abs(gram - np.eye(k))) > 1e-8:
        raise ValueError("S basis must be orthonormal")
    if k == 1:
        coeffs = np.ones((1, 1))
    else:
        # deterministic directions: rows of a normalized Kronecker lattice
        i = np.arange(1, samples + 1)[:, None]
        alphas = 1.0 / np.linspace(1.3247, 2.618, k)[None, :]
        coeffs = np.mod(0.5 + i * alphas, 1.0) * 2.0 - 1.0
        norms = np.linalg.norm(coeffs, axis=1, keepdims=True)
        coeffs = coeffs / np.where(norms == 0, 1.0, norms)
    for c in coeffs:
        v = c @ B
        if abs(q(v)) <= tol:
            return False
    return True


# -- catalog of named forms --------------------------------------------------


def harmonic_oscillator_form(n: int = 1) -> QuadraticForm:
    """q = |x|^2 + |xi|^2."""
    return QuadraticForm(n, np.eye(2 * n))


def rotated_harmonic_form(theta: float, n: int = 1) -> QuadraticForm:
    """q = e^{i theta} (|x|^2 + |xi|^2), |theta| < pi/2."""
    if not abs(theta) < np.pi / 2:
        raise ValueError("rotation angle must satisfy |theta| < pi/2")
    return QuadraticForm(n, np.exp(1j * theta) * np.eye(2 * n))


def free_laplacian_form(n: int = 1) -> QuadraticForm:
    """q = |xi|^2."""
    Q = np.zeros((2 * n, 2 * n))
    Q[n:, n:] = np.eye(n)
    return QuadraticForm(n, Q)


def kramers_fokker_planck_form() -> QuadraticForm:
    """q(x, v, xi, eta) = eta^2 + v^2 + i (v xi - x eta), n = 2."""
    Q = np.zeros((4, 4), dtype=np.complex128)
    Q[1, 1] = 1.0  # v^2
    Q[3, 3] = 1.0  # eta^2
    Q[1, 2] = Q[2, 1] = 0.5j  # i v xi
    Q[0, 3] = Q[3, 0] = -0.5j  # -i x eta
    return QuadraticForm(2, Q)


def catalog() -> dict[str, QuadraticForm]:
    """Named reproducible fixtures."""
    return {
        "harmonic": harmonic_oscillator_form(1),
        "rotated-harmonic": rotated_harmonic_form(np.pi / 4, 1),
        "free-laplacian": free_laplacian_form(1),
        "kramers-fokker-planck": kramers_fokker_planck_form(),
    }


def singular_space_summary(result: SingularSpaceResult) -> dict:
    """JSON-ready view: {dimS, k0, basis}."""
    return {
        "dimS": int(result.dimS),
        "k0": result.k0,
        "basis": [[float(v) for v in row] for row in result.basis],
    }
