"""Dense small-scale model of k bosons in n modes.

States live on the symmetric power in the occupancy (Fock) basis, labels in
colex order.  A label ``m`` stands for the normalized state
``prod_i (a_i^dagger)^{m_i} / sqrt(m_i!) |0>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exactcomb import DomainError, SizeError, multiset_coefficient
from .occupancy import check_occupancy, iter_occupancy_vectors
from .rng import as_generator

BASIS_CAP = 10**4
LIFT_CAP = 10**3

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
EIGEN_FLOOR = -1e-9
UNITARY_TOL = 1e-9


class StateError(DomainError):
    pass


@dataclass(frozen=True)
class SymmetricBasis:
    n: int
    k: int
    labels: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return _label_index(self.n, self.k)[tuple(int(x) for x in label)]


@lru_cache(maxsize=64)
def _labels(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(iter_occupancy_vectors(n, k))


@lru_cache(maxsize=64)
def _label_index(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {lab: i for i, lab in enumerate(_labels(n, k))}


def symmetric_basis(n: int, k: int, cap: int = BASIS_CAP) -> SymmetricBasis:
    d = multiset_coefficient(n, k)
    if d > cap:
        raise SizeError(f"symmetric power dimension multiset({n},{k}) = {d} exceeds cap {cap}")
    return SymmetricBasis(n, k, _labels(n, k))


def check_pure_state(psi, tol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise StateError("a pure state is a 1-D amplitude vector")
    if abs(np.vdot(psi, psi).real - 1) > tol:
        raise StateError("pure state is not normalized")
    return psi


def check_density_matrix(rho, tol: float = HERMITIAN_TOL, floor: float = EIGEN_FLOOR) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StateError("density matrix must be square")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise StateError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise StateError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < floor:
        raise StateError("density matrix has a negative eigenvalue")
    return rho


def uniform_state(d: int) -> np.ndarray:
    if d < 1:
        raise StateError("dimension must be >= 1")
    return np.eye(d, dtype=complex) / d


def pure_density(psi) -> np.ndarray:
    psi = check_pure_state(psi)
    return np.outer(psi, psi.conj())


def basis_state(n: int, label) -> np.ndarray:
    """Unit vector of occupancy ``label`` on the symmetric power."""
    label = check_occupancy(label, n)
    basis = symmetric_basis(n, sum(label))
    v = np.zeros(basis.dim, dtype=complex)
    v[basis.index(label)] = 1.0
    return v


def birthday_measurement_distribution(rho, n: int, k: int) -> dict[tuple[int, ...], float]:
    """Outcome law of measuring every birthday: the occupancy-basis diagonal."""
    basis = symmetric_basis(n, k)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (basis.dim, basis.dim):
        raise StateError(f"expected a {basis.dim}x{basis.dim} matrix for n={n}, k={k}")
    diag = np.real(np.diag(rho))
    return {lab: float(p) for lab, p in zip(basis.labels, diag)}


def _sqrt_multinomial(k: int, labels) -> np.ndarray:
    lf = math.lgamma(k + 1)
    return np.array([math.exp(0.5 * (lf - sum(math.lgamma(m + 1) for m in lab))) for lab in labels])


def symmetrize_product_state(psi, k: int) -> np.ndarray:
    """Amplitudes of psi^(tensor k) on the occupancy basis.

    Label m gets sqrt(k! / prod m_i!) * prod psi_i^m_i, which makes the
    birthday measurement multinomial(k; |psi_i|^2).
    """
    psi = check_pure_state(psi)
    n = psi.size
    basis = symmetric_basis(n, k)
    labs = np.array(basis.labels, dtype=np.int64).reshape(basis.dim, n)
    amps = _sqrt_multinomial(k, basis.labels) * np.prod(psi[None, :] ** labs, axis=1)
    return amps / np.linalg.norm(amps)


def haar_unitary(m: int, rng=None, size: int | None = None) -> np.ndarray:
    """Haar-random unitary: QR of a complex Ginibre matrix with R's diagonal made positive."""
    if m < 1:
        raise StateError("m must be >= 1")
    gen = as_generator(rng)
    shape = (m, m) if size is None else (size, m, m)
    z = (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[..., None, :]


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return float(np.abs(u @ np.swapaxes(u.conj(), -1, -2) - eye).max()) <= tol


@lru_cache(maxsize=32)
def _lift_tables(n: int, k: int):
    # raise_maps[t][r, i]: index in degree t+1 of label r (degree t) plus e_i
    raise_maps = []
    for t in range(k):
        idx = _label_index(n, t + 1)
        rows = []
        for lab in _labels(n, t):
            row = []
            for i in range(n):
                up = list(lab)
                up[i] += 1
                row.append(idx[tuple(up)])
            rows.append(row)
        raise_maps.append(np.array(rows, dtype=np.int64).reshape(len(rows), n))
    labels = _labels(n, k)
    # creation order for each target column: mode j repeated m_j times
    cols = np.array([[j for j, m in enumerate(lab) for _ in range(m)] for lab in labels],
                    dtype=np.int64).reshape(len(labels), k)
    fact = np.array([math.exp(0.5 * sum(math.lgamma(m + 1) for m in lab)) for lab in labels])
    return raise_maps, cols, fact


def lift_unitary_to_symmetric(u, k: int, cap: int = LIFT_CAP) -> np.ndarray:
    """Matrix of the k-th symmetric power of ``u`` in the occupancy basis.

    Column m' expands prod_j (sum_i u_ij a_i^dagger)^{m'_j} / sqrt(m'_j!) |0>;
    the coefficient of the monomial prod a_i^dagger^{m_i} times sqrt(prod m_i!)
    is the entry at row m.  A leading batch axis on ``u`` is supported.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[-1]
    d = multiset_coefficient(n, k)
    if d > cap:
        raise SizeError(f"lift dimension multiset({n},{k}) = {d} exceeds cap {cap}")
    batch = u.shape[:-2]
    raise_maps, cols, fact = _lift_tables(n, k)
    poly = np.ones(batch + (1, d), dtype=complex)
    for t in range(k):
        d_next = multiset_coefficient(n, t + 1)
        nxt = np.zeros(batch + (d_next, d), dtype=complex)
        coeff = u[..., :, cols[:, t]]  # (..., n, d): u[i, j_t(col)]
        for i in range(n):
            nxt[..., raise_maps[t][:, i], :] += poly * coeff[..., i, None, :]
        poly = nxt
    return poly * fact[:, None] / fact[None, :]


def lift_unitary_tensor_oracle(u, k: int) -> np.ndarray:
    """Same matrix by brute force on (C^n)^(tensor k); only for tiny n**k."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    labels = _labels(n, k)
    full = np.ones((1, 1), dtype=complex)
    for _ in range(k):
        full = np.kron(full, u)
    # symmetrized basis vectors as columns of an n**k x d isometry
    iso = np.zeros((n**k, len(labels)), dtype=complex)
    for col, lab in enumerate(labels):
        for flat in range(n**k):
            digits = np.unravel_index(flat, (n,) * k)
            if tuple(np.bincount(np.array(digits, dtype=np.int64), minlength=n)) == lab:
                iso[flat, col] = 1.0
        iso[:, col] /= np.linalg.norm(iso[:, col])
    return iso.conj().T @ full @ iso


def trace_distance(rho, sigma) -> float:
    ev = np.linalg.eigvalsh(np.asarray(rho) - np.asarray(sigma))
    return float(0.5 * np.abs(ev).sum())


def haar_average_state(sigma, n: int, k: int, M: int, rng=None, chunk: int = 500) -> np.ndarray:
    """(1/M) sum_i S^k(U_i) sigma S^k(U_i)^dagger over Haar-random U_i.

    Draws are made in fixed-size chunks and summed in order, so the result
    depends only on ``(rng, M, chunk)``.
    """
    if M < 1:
        raise StateError("M must be >= 1")
    sigma = np.asarray(sigma, dtype=complex)
    gen = as_generator(rng)
    acc = np.zeros_like(sigma)
    done = 0
    while done < M:
        b = min(chunk, M - done)
        lifts = lift_unitary_to_symmetric(haar_unitary(n, gen, size=b), k)
        acc += (lifts @ sigma @ np.swapaxes(lifts.conj(), -1, -2)).sum(axis=0)
        done += b
    out = acc / M
    return 0.5 * (out + out.conj().T)


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    max_residual: float
    tolerance: float
    trials: int


def verify_invariance(rho, n: int, k: int, trials: int = 50, tol: float = 1e-8, rng=None) -> InvarianceReport:
    """Largest entrywise change of ``rho`` under conjugation by lifted Haar unitaries."""
    rho = np.asarray(rho, dtype=complex)
    lifts = lift_unitary_to_symmetric(haar_unitary(n, rng, size=trials), k)
    moved = lifts @ rho @ np.swapaxes(lifts.conj(), -1, -2)
    res = float(np.abs(moved - rho[None]).max())
    return InvarianceReport(res <= tol, res, tol, trials)


def multinomial_distribution(k: int, probs) -> dict[tuple[int, ...], float]:
    """multinomial(k; probs) as a map from occupancy label to probability."""
    probs = np.asarray(probs, dtype=float)
    out = {}
    for lab in _labels(probs.size, k):
        w = math.factorial(k)
        p = 1.0
        for m, q in zip(lab, probs):
            w //= math.factorial(m)
            p *= q**m
        out[lab] = w * p
    return out


def matrix_to_json(a) -> list[list[list[float]]]:
    """Row-major nested lists of ``[re, im]`` pairs."""
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
