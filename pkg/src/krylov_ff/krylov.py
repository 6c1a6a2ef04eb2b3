"""Multi-reference real-time Krylov subspace machinery.

Builds the basis phi_{nr} = exp(-iH n tau)|r>, projects H and the identity
onto it (subspace matrices H, S), optionally perturbs the matrix elements
with seeded complex Gaussian noise, regularizes S by singular-value
thresholding, and propagates the expansion coefficients to arbitrary times.

Propagation uses canonical orthogonalization: with S = U D U^dag and
X = U_kept D_kept^(-1/2), the whitened Hamiltonian Ht = X^dag H X is
Hermitian and c(t) = X W exp(-i Lambda t) W^dag X^dag d0, where (Lambda, W)
is the spectrum of Ht.  On the kept subspace this equals the direct
exp(-i S^-1 H t) S^-1 d0 solution while staying exactly norm- and
energy-conserving at any t.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .exact import SpectralDecomposition, evolve_exact
from .operators import PauliSumOperator, apply_operator


class EmptySubspaceError(ValueError):
    """All singular values of S fell below the threshold."""


@dataclass(frozen=True)
class NoiseConfig:
    """Additive complex Gaussian noise on the subspace matrix elements.

    ``sigma`` is the total standard deviation per element: off-diagonal
    elements get independent real/imaginary parts with std sigma/sqrt(2)
    each (so E|delta|^2 = sigma^2), diagonal elements get real noise with
    std sigma.  Deterministic for a fixed seed.
    """

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class KrylovConfig:
    tau: float = 0.1
    krylov_dim: int = 6
    svd_threshold: float = 1e-9
    noise: NoiseConfig | None = None

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.krylov_dim < 1:
            raise ValueError(f"krylov_dim must be >= 1, got {self.krylov_dim}")
        if self.svd_threshold < 0:
            raise ValueError(f"svd_threshold must be >= 0, got {self.svd_threshold}")


@dataclass
class KrylovBasis:
    """R references, each evolved through M steps of size tau.

    ``columns[:, k]`` holds phi_{nr} with the flat index k = n + r*M
    (references are 0-indexed here), so each reference's ladder occupies a
    contiguous block and growing the pool appends columns at the end.
    """

    tau: float
    steps: int
    references: list[np.ndarray]
    columns: np.ndarray

    @property
    def size(self) -> int:
        return self.columns.shape[1]


@dataclass
class SubspaceModel:
    """Projected matrices and, once whitened, the spectral propagator.

    ``assemble_subspace_matrices`` fills h, s, d0 only; whitening completes
    the remaining fields.
    """

    h: np.ndarray
    s: np.ndarray
    d0: np.ndarray
    kept_rank: int | None = None
    kept_singular_values: np.ndarray | None = None
    whitener: np.ndarray | None = None
    s_pinv: np.ndarray | None = None
    reduced_hamiltonian: np.ndarray | None = None
    reduced_eigenvalues: np.ndarray | None = None
    reduced_eigenvectors: np.ndarray | None = None
    propagator_basis: np.ndarray | None = field(default=None, repr=False)
    y0: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.d0.shape[0]

    @property
    def whitened(self) -> bool:
        return self.whitener is not None


def _hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def build_krylov_basis(
    decomp: SpectralDecomposition, references, cfg: KrylovConfig
) -> KrylovBasis:
    """Evolve each reference through n*tau for n = 0..M-1."""
    refs = [np.asarray(r, dtype=complex) for r in references]
    if not refs:
        raise ValueError("empty reference list")
    steps = cfg.krylov_dim
    blocks = []
    for r in refs:
        if r.shape != (decomp.dim,):
            raise ValueError(f"reference has shape {r.shape}, expected ({decomp.dim},)")
        norm = np.linalg.norm(r)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"reference is not normalized (norm {norm!r})")
        block = np.empty((decomp.dim, steps), dtype=complex)
        block[:, 0] = r  # n = 0 column is the reference itself, untouched
        if steps > 1:
            block[:, 1:] = evolve_exact(decomp, r, cfg.tau * np.arange(1, steps))
        blocks.append(block)
    return KrylovBasis(
        tau=cfg.tau,
        steps=steps,
        references=refs,
        columns=np.concatenate(blocks, axis=1),
    )


def assemble_subspace_matrices(
    basis: KrylovBasis, hamiltonian: PauliSumOperator, psi0: np.ndarray
) -> SubspaceModel:
    """Projected H, overlap S, and initial overlaps d0 = <phi_k|psi0>."""
    phi = basis.columns
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (phi.shape[0],):
        raise ValueError(f"psi0 has shape {psi0.shape}, expected ({phi.shape[0]},)")
    h_phi = np.column_stack([apply_operator(hamiltonian, phi[:, k]) for k in range(phi.shape[1])])
    # Hermitize to kill rounding asymmetry from the independent column products.
    s = _hermitize(phi.conj().T @ phi)
    h = _hermitize(phi.conj().T @ h_phi)
    d0 = phi.conj().T @ psi0
    return SubspaceModel(h=h, s=s, d0=d0)


def perturb_matrices(model: SubspaceModel, noise: NoiseConfig) -> SubspaceModel:
    """Add seeded complex Gaussian noise to H, S, and d0, keeping Hermiticity.

    Emulates finite measurement precision of the matrix elements.  With
    sigma = 0 the input model is returned unchanged.  Returns a fresh
    pre-whitening model; rerun whitening afterwards.
    """
    if noise.sigma == 0:
        return model
    rng = np.random.default_rng(noise.seed)
    sigma = noise.sigma

    def noisy(a: np.ndarray) -> np.ndarray:
        k = a.shape[0]
        out = a.astype(complex).copy()
        rows, cols = np.triu_indices(k, k=1)
        delta = rng.normal(0.0, sigma / np.sqrt(2.0), size=(2, rows.size))
        out[rows, cols] += delta[0] + 1j * delta[1]
        out[cols, rows] = out[rows, cols].conj()
        out[np.diag_indices(k)] = a.diagonal().real + rng.normal(0.0, sigma, size=k)
        return out

    h = noisy(model.h)
    s = noisy(model.s)
    delta = rng.normal(0.0, sigma / np.sqrt(2.0), size=(2, model.d0.size))
    d0 = model.d0 + delta[0] + 1j * delta[1]
    return SubspaceModel(h=h, s=s, d0=d0)


def threshold_and_whiten(model: SubspaceModel, eps: float) -> SubspaceModel:
    """Discard singular values of S at or below eps and whiten.

    For Hermitian positive-semidefinite S the eigendecomposition is its SVD;
    rounding-level negative eigenvalues are clamped to zero first.  The
    thresholded pseudoinverse S+ is kept for diagnostics.
    """
    if eps < 0:
        raise ValueError(f"threshold must be >= 0, got {eps}")
    d, u = np.linalg.eigh(_hermitize(model.s))
    d = np.where(d < 0, 0.0, d)
    keep = d > eps
    if not keep.any():
        raise EmptySubspaceError(
            f"all {d.size} singular values are <= {eps:g} (largest {d.max():g})"
        )
    d_kept = d[keep]
    u_kept = u[:, keep]
    x = u_kept / np.sqrt(d_kept)
    s_pinv = (u_kept / d_kept) @ u_kept.conj().T
    ht = _hermitize(x.conj().T @ model.h @ x)
    lam, w = np.linalg.eigh(ht)
    xw = x @ w
    return replace(
        model,
        kept_rank=int(keep.sum()),
        kept_singular_values=np.sort(d_kept)[::-1],
        whitener=x,
        s_pinv=s_pinv,
        reduced_hamiltonian=ht,
        reduced_eigenvalues=lam,
        reduced_eigenvectors=w,
        propagator_basis=xw,
        y0=w.conj().T @ (x.conj().T @ model.d0),
    )


def fast_forward_coefficients(model: SubspaceModel, t) -> np.ndarray:
    """Expansion coefficients c(t) = X W exp(-i Lambda t) W^dag X^dag d0.

    At t = 0 this is the projected c(0) = S+ d0.  The time argument is
    arbitrary (not restricted to multiples of tau) and may be a scalar or a
    1-D array; the result has shape (RM,) or (RM, len(t)).
    """
    if not model.whitened:
        raise ValueError("model has not been whitened; call threshold_and_whiten first")
    t_arr = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.outer(model.reduced_eigenvalues, t_arr.reshape(-1)))
    c = model.propagator_basis @ (phases * model.y0[:, None])
    return c[:, 0] if t_arr.ndim == 0 else c


def subspace_propagator(model: SubspaceModel, t: float) -> np.ndarray:
    """RM x RM matrix mapping d0-style overlap vectors to c(t)."""
    if not model.whitened:
        raise ValueError("model has not been whitened; call threshold_and_whiten first")
    phases = np.exp(-1j * model.reduced_eigenvalues * float(t))
    return model.propagator_basis @ (phases[:, None] * model.propagator_basis.conj().T)


def reconstruct_state(basis: KrylovBasis, c: np.ndarray) -> np.ndarray:
    """Unnormalized |psi_K> = sum_k c_k |phi_k>; its norm^2 equals c^dag S c.

    Accepts a coefficient vector or an (RM, nt) matrix of columns.
    """
    c = np.asarray(c, dtype=complex)
    if c.shape[0] != basis.size:
        raise ValueError(f"coefficient length {c.shape[0]} does not match basis size {basis.size}")
    return basis.columns @ c
