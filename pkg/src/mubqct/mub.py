"""Complete sets of mutually unbiased bases in dimension d = 2^k.

The family consists of the computational basis plus d bases whose vectors
have components (1/sqrt(d)) * i^(Tr((a + 2b) x)), with a, b, x ranging over
Teichmuller representatives in GR(4, k) and Tr the Z4-valued ring trace.
These are the common eigenbases of the d + 1 maximal commuting classes of
generalized Pauli operators; the closed form avoids a numerically fragile
simultaneous diagonalization and is exactly reproducible.

Whatever the construction, validity is decided by `verify_unbiasedness`,
which checks orthonormality and the |<e_i|f_j>| = 1/sqrt(d) overlap law
exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .galois import MAX_K, phase_tables

# i^n for n mod 4, exact complex literals so the build is bit-reproducible
_PHASES = np.array([1.0 + 0.0j, 0.0 + 1.0j, -1.0 + 0.0j, 0.0 - 1.0j])


@dataclass(frozen=True)
class Dimension:
    """A power-of-two Hilbert space dimension d = 2^k."""

    k: int
    d: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.d != 1 << self.k:
            raise ValueError(f"d must equal 2^k, got d={self.d}, k={self.k}")

    @classmethod
    def from_k(cls, k: int) -> "Dimension":
        if not isinstance(k, int) or k < 1:
            raise ValueError(f"k must be a positive integer, got {k!r}")
        return cls(k=k, d=1 << k)

    @classmethod
    def from_d(cls, d: int) -> "Dimension":
        if not isinstance(d, int) or d < 2 or d & (d - 1):
            raise ValueError(f"d must be a power of two >= 2, got {d!r}")
        return cls(k=d.bit_length() - 1, d=d)


@dataclass(frozen=True)
class MubFamily:
    """d + 1 orthonormal bases, pairwise unbiased.

    `bases[theta][:, i]` is the i-th vector of basis theta; theta = 0 is
    the computational basis.  The array is read-only.
    """

    dimension: Dimension
    bases: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = self.dimension.d
        if self.bases.shape != (d + 1, d, d):
            raise ValueError(f"bases must have shape {(d + 1, d, d)}, got {self.bases.shape}")

    @property
    def d(self) -> int:
        return self.dimension.d

    @property
    def n_bases(self) -> int:
        return self.dimension.d + 1


@dataclass(frozen=True)
class VerificationReport:
    """Worst-case deviations of a candidate family from exact MUB conditions."""

    d: int
    n_bases: int
    tol: float
    passed: bool
    max_orthonormality_dev: float
    worst_orthonormality: tuple[int, int, int]  # (theta, i, j)
    max_unbiasedness_dev: float
    worst_unbiasedness: tuple[int, int, int, int]  # (theta1, theta2, i, j)

    def to_dict(self) -> dict:
        t, i, j = self.worst_orthonormality
        t1, t2, i2, j2 = self.worst_unbiasedness
        return {
            "d": self.d,
            "n_bases": self.n_bases,
            "tol": self.tol,
            "passed": self.passed,
            "max_orthonormality_dev": self.max_orthonormality_dev,
            "worst_orthonormality": {"theta": t, "i": i, "j": j},
            "max_unbiasedness_dev": self.max_unbiasedness_dev,
            "worst_unbiasedness": {"theta1": t1, "theta2": t2, "i": i2, "j": j2},
        }


def build_mub_family(k: int) -> MubFamily:
    """Construct the full family of 2^k + 1 mutually unbiased bases.

    Vector order within each basis follows the split-balanced labeling:
    the natural Galois labels u are rotated (u -> u >> 1 with the low bit
    moved to the top) in every basis, and the same permutation is applied
    to the Hilbert-space coordinates.  Under this labeling the two halves
    {i < d/2} and {i >= d/2} that carry the protocol bit are maximally
    symmetric across the family: the averaged half-mixtures reach the
    flat-spectrum trace distance 2/sqrt(d+1) that the closed-form
    discrimination bounds assume.  Deterministic: repeated calls return
    identical arrays.  Supported for 1 <= k <= 8 (d up to 256).
    """
    if not isinstance(k, int) or isinstance(k, bool):
        raise ValueError(f"k must be an integer, got {k!r}")
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must be in 1..{MAX_K}, got {k}")
    dim = Dimension.from_k(k)
    d = dim.d
    mul, tr2, tr4 = phase_tables(k)

    bases = np.zeros((d + 1, d, d), dtype=complex)
    bases[0] = np.eye(d)
    scale = 1.0 / np.sqrt(d)
    for a in range(d):
        # exponent[x, b] = Tr(a x) + 2 tr2(b x) mod 4, all indices field bitmasks
        expo = (tr4[mul[a]][:, None] + 2 * tr2[mul]) % 4
        bases[1 + a] = _PHASES[expo] * scale

    # split-balanced labeling: even Galois labels fill the lower half,
    # odd labels the upper half; permuting rows identically keeps theta=0
    # the exact identity (a global unitary, so all invariants survive)
    perm = np.array(
        [2 * j if j < d // 2 else 2 * (j - d // 2) + 1 for j in range(d)], dtype=np.int64
    )
    bases = bases[:, :, perm][:, perm, :]

    # global-phase convention: first nonzero component of each vector is
    # real positive (the construction already satisfies it; enforced for
    # robustness against future construction changes)
    for theta in range(1, d + 1):
        first = bases[theta][0]
        if np.any(first == 0) or np.any(np.abs(first.imag) > 0) or np.any(first.real <= 0):
            _normalize_column_phases(bases[theta])

    bases.setflags(write=False)
    return MubFamily(dimension=dim, bases=bases)


def _normalize_column_phases(basis: np.ndarray) -> None:
    d = basis.shape[0]
    for j in range(d):
        col = basis[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size == 0:
            continue
        pivot = col[nz[0]]
        col *= np.conj(pivot) / np.abs(pivot)


def verify_unbiasedness(family: MubFamily, tol: float = 1e-9) -> VerificationReport:
    """Exhaustively check orthonormality and pairwise unbiasedness.

    Reports the largest absolute deviation from <e_i|e_j> = delta_ij within
    each basis and from |<e_i|f_j>| = 1/sqrt(d) across distinct bases,
    together with the indices achieving them.
    """
    bases = family.bases
    d = family.d
    n = family.n_bases
    target = 1.0 / np.sqrt(d)
    eye = np.eye(d)

    max_ortho = -1.0
    worst_ortho = (0, 0, 0)
    for theta in range(n):
        dev = np.abs(bases[theta].conj().T @ bases[theta] - eye)
        idx = np.unravel_index(np.argmax(dev), dev.shape)
        if dev[idx] > max_ortho:
            max_ortho = float(dev[idx])
            worst_ortho = (theta, int(idx[0]), int(idx[1]))

    max_unb = -1.0
    worst_unb = (0, 1, 0, 0)
    for t1 in range(n):
        for t2 in range(t1 + 1, n):
            dev = np.abs(np.abs(bases[t1].conj().T @ bases[t2]) - target)
            idx = np.unravel_index(np.argmax(dev), dev.shape)
            if dev[idx] > max_unb:
                max_unb = float(dev[idx])
                worst_unb = (t1, t2, int(idx[0]), int(idx[1]))

    passed = bool(max_ortho <= tol and max_unb <= tol)
    return VerificationReport(
        d=d,
        n_bases=n,
        tol=tol,
        passed=passed,
        max_orthonormality_dev=max_ortho,
        worst_orthonormality=worst_ortho,
        max_unbiasedness_dev=max_unb,
        worst_unbiasedness=worst_unb,
    )


def basis_state(family: MubFamily, theta: int, i: int) -> np.ndarray:
    """The i-th vector of basis theta, as a length-d complex array."""
    if not 0 <= theta < family.n_bases:
        raise ValueError(f"theta must be in 0..{family.n_bases - 1}, got {theta}")
    if not 0 <= i < family.d:
        raise ValueError(f"i must be in 0..{family.d - 1}, got {i}")
    return family.bases[theta][:, i].copy()


def export_family(family: MubFamily, path) -> None:
    """Write the family as text: one vector per line, 17 significant digits.

    Format: a header line `d=<d> bases=<d+1>`, then for each vector a line
    `theta i re_0 im_0 re_1 im_1 ...`.
    """
    d = family.d
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"d={d} bases={family.n_bases}\n")
        for theta in range(family.n_bases):
            for i in range(d):
                col = family.bases[theta][:, i]
                parts = [str(theta), str(i)]
                for c in col:
                    parts.append(f"{c.real:.17g}")
                    parts.append(f"{c.imag:.17g}")
                fh.write(" ".join(parts) + "\n")


def load_family(path) -> MubFamily:
    """Read a family written by `export_family`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        d = int(header[0].split("=")[1])
        n_bases = int(header[1].split("=")[1])
        bases = np.zeros((n_bases, d, d), dtype=complex)
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            theta, i = int(parts[0]), int(parts[1])
            vals = np.array([float(x) for x in parts[2:]])
            bases[theta][:, i] = vals[0::2] + 1j * vals[1::2]
    bases.setflags(write=False)
    return MubFamily(dimension=Dimension.from_d(d), bases=bases)
