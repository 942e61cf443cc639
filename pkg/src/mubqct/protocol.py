"""Round-level model of the two-party key distribution protocol.

Alice encodes a bit x and a sub-index r as the basis state |e_theta(i_xr)>
with i_xr = (d/2) x + r, drawn in a basis theta that stays computationally
hidden (timelocked) until after the quantum signal decoheres.  Bob, who is
authorized, learns theta in time and applies the two-outcome projector pair
splitting the basis into its lower and upper halves.

`run_protocol` simulates the full loop over a lossy channel with threshold
detectors: per-copy transmission and visibility Bernoullis, per-detector
dark counts, fair-coin resolution of double clicks, erasure when nothing
clicks.  `multiparty_run` splits the copy budget across several receivers
sharing one encoding stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .detection import ChannelModel, DetectorModel
from .errors import ConstraintError
from .mub import Dimension, MubFamily, basis_state, build_mub_family

TRANSCRIPT_HEADER = "round,x,r,theta,outcome"


def encode_index(x: int, r: int, d: int) -> int:
    """Map (bit, sub-index) to the basis vector index i = (d/2) x + r."""
    Dimension.from_d(d)
    if x not in (0, 1):
        raise ValueError(f"x must be 0 or 1, got {x!r}")
    if not 0 <= r < d // 2:
        raise ValueError(f"r must be in 0..{d // 2 - 1}, got {r!r}")
    return (d // 2) * x + r


def prepare_state(family: MubFamily, x: int, r: int, theta: int) -> np.ndarray:
    """Alice's signal state |e_theta(i_xr)> for one protocol round."""
    i = encode_index(x, r, family.d)
    return basis_state(family, theta, i)


def bob_povm(family: MubFamily, theta: int) -> tuple[np.ndarray, np.ndarray]:
    """Two-outcome measurement (M0, M1) projecting onto basis half-spaces.

    M_b sums the rank-one projectors of basis theta over indices with
    (d/2) b <= i < (d/2) (b + 1); M0 + M1 = identity.
    """
    if not 0 <= theta < family.n_bases:
        raise ValueError(f"theta must be in 0..{family.n_bases - 1}, got {theta}")
    half = family.d // 2
    v = family.bases[theta]
    m0 = v[:, :half] @ v[:, :half].conj().T
    m1 = v[:, half:] @ v[:, half:].conj().T
    return m0, m1


class _Locked:
    """Sentinel returned when a timelocked payload is not yet readable."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "LOCKED"


LOCKED = _Locked()


@dataclass(frozen=True)
class TimelockEnvelope:
    """A payload hidden from unauthorized readers until `unlock_time`.

    Time is an abstract integer tick counter.  The security premise of the
    protocol is that the signal decoheres strictly before `unlock_time`,
    so an adversary can no longer exploit the payload once readable.
    """

    payload: object
    unlock_time: int
    created_at: int = 0

    def __post_init__(self):
        if self.unlock_time < self.created_at:
            raise ValueError("unlock_time must be >= created_at")


def timelock_reveal(envelope: TimelockEnvelope, now: int, view: str):
    """Read a timelocked payload.

    The authorized view always reads the payload (the recipient holds the
    key material out of band); the adversary view reads it only once
    `now >= unlock_time`, and gets LOCKED before that.
    """
    if view == "authorized":
        return envelope.payload
    if view == "adversary":
        return envelope.payload if now >= envelope.unlock_time else LOCKED
    raise ValueError(f"view must be 'authorized' or 'adversary', got {view!r}")


def decohere(rho: np.ndarray, delta: float) -> np.ndarray:
    """Depolarize a density matrix: (1 - delta) rho + delta I/d."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must be in [0, 1], got {delta}")
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"rho must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-9:
        raise ValueError("rho is not Hermitian within 1e-9")
    if abs(np.trace(rho).real - 1.0) > 1e-9 or abs(np.trace(rho).imag) > 1e-9:
        raise ValueError("rho does not have unit trace within 1e-9")
    if np.linalg.eigvalsh(rho).min() < -1e-9:
        raise ValueError("rho is not positive semidefinite within 1e-9")
    d = rho.shape[0]
    return (1.0 - delta) * rho + delta * np.eye(d) / d


@dataclass(frozen=True)
class ProtocolParams:
    """Configuration of one simulated protocol session."""

    d: int
    m: int
    n_rounds: int
    seed: int
    channel: ChannelModel = field(default_factory=ChannelModel)
    detector: DetectorModel = field(default_factory=DetectorModel)
    photon_statistics: str = "fixed"
    mu: Optional[float] = None
    allow_insecure_mu: bool = False

    def __post_init__(self):
        Dimension.from_d(self.d)
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.n_rounds < 1:
            raise ValueError(f"n_rounds must be >= 1, got {self.n_rounds}")
        if self.photon_statistics not in ("fixed", "poisson"):
            raise ValueError(
                f"photon_statistics must be 'fixed' or 'poisson', got {self.photon_statistics!r}"
            )
        if self.photon_statistics == "poisson":
            if self.mu is None or self.mu <= 0:
                raise ValueError("poisson statistics require mu > 0")
            budget = math.sqrt(self.d)
            if self.mu + 4.0 * math.sqrt(self.mu) > budget and not self.allow_insecure_mu:
                raise ConstraintError(
                    f"mu + 4 sqrt(mu) = {self.mu + 4 * math.sqrt(self.mu):.6g} exceeds "
                    f"sqrt(d) = {budget:.6g}; set allow_insecure_mu to override"
                )


@dataclass(frozen=True)
class ProtocolTranscript:
    """Per-round records and sifted-key view of one protocol run.

    outcome is Bob's declared bit, or -1 when the round is erased: no
    detector clicked, or the firing pattern was ambiguous (signal split
    across detectors, signal contradicted by a dark count).  Sifting
    keeps exactly the non-erased rounds.
    """

    d: int
    m: int
    seed: int
    x: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    outcome: np.ndarray

    @property
    def n_rounds(self) -> int:
        return self.x.size

    @property
    def clicked(self) -> np.ndarray:
        return self.outcome >= 0

    @property
    def n_clicks(self) -> int:
        return int(np.count_nonzero(self.clicked))

    @property
    def click_rate(self) -> float:
        return self.n_clicks / self.n_rounds

    @property
    def alice_sifted(self) -> np.ndarray:
        return self.x[self.clicked]

    @property
    def bob_sifted(self) -> np.ndarray:
        return self.outcome[self.clicked]

    @property
    def p_c_empirical(self) -> float:
        """Fraction of clicked rounds where Bob's bit matches Alice's."""
        if self.n_clicks == 0:
            return float("nan")
        return float(np.count_nonzero(self.alice_sifted == self.bob_sifted) / self.n_clicks)

    @property
    def p_e_empirical(self) -> float:
        if self.n_clicks == 0:
            return float("nan")
        return float(np.count_nonzero(self.alice_sifted != self.bob_sifted) / self.n_clicks)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(TRANSCRIPT_HEADER + "\n")
            for idx in range(self.n_rounds):
                fh.write(
                    f"{idx},{self.x[idx]},{self.r[idx]},{self.theta[idx]},{self.outcome[idx]}\n"
                )


def _draw_encoding_stream(rng: np.random.Generator, d: int, n: int):
    xs = rng.integers(0, 2, size=n).astype(np.int8)
    rs = rng.integers(0, d // 2, size=n).astype(np.int64)
    thetas = rng.integers(0, d + 1, size=n).astype(np.int64)
    return xs, rs, thetas


def _simulate_detection(
    rng: np.random.Generator,
    xs: np.ndarray,
    copies,
    s: float,
    visibility: float,
    p_dark: float,
    n_detectors: int = 2,
) -> np.ndarray:
    """Threshold-detector outcomes for one receiver; -1 marks erasures.

    copies may be a scalar (fixed source) or a per-round array (Poisson
    source); s is the per-copy survival probability T * eta.  Rounds are
    declared right/wrong by the same event classes as the closed-form
    click statistics: all arrivals on one side with no conflicting dark
    count, or a lone dark count with no arrival.  Ambiguous rounds
    (signal split across detectors, signal contradicted by a dark count)
    are erased, so the sifted error statistics match the closed forms;
    the one right-and-wrong overlap class, no arrival with darks on both
    sides, is resolved by a fair coin.
    """
    n = xs.size
    arrivals = rng.binomial(copies, s, size=n) if np.ndim(copies) == 0 else rng.binomial(copies, s)
    n_good = rng.binomial(arrivals, visibility)
    dark_good = rng.random(n) < p_dark
    dark_bad = rng.binomial(n_detectors - 1, p_dark, size=n) > 0
    coin = rng.integers(0, 2, size=n).astype(np.int8)

    got_signal = arrivals > 0
    all_good = got_signal & (n_good == arrivals)
    all_bad = got_signal & (n_good == 0)
    no_arrival = ~got_signal
    dark_none = ~dark_good & ~dark_bad

    right = (all_good & (dark_none | dark_good)) | (no_arrival & dark_good)
    wrong = (all_bad & (dark_none | dark_bad)) | (no_arrival & dark_bad)
    overlap = right & wrong

    outcome = np.full(n, -1, dtype=np.int8)
    outcome[right & ~wrong] = xs[right & ~wrong]
    outcome[wrong & ~right] = 1 - xs[wrong & ~right]
    outcome[overlap] = np.where(coin[overlap] == 0, xs[overlap], 1 - xs[overlap])
    return outcome


def run_protocol(params: ProtocolParams, family: Optional[MubFamily] = None) -> ProtocolTranscript:
    """Simulate a full session; deterministic for a given seed.

    The family argument is only consulted for shape consistency (states
    never need to be materialized: in the honest protocol Bob's conditional
    outcome law depends only on x and the channel), so passing None skips
    the construction cost at large d.
    """
    if family is not None and family.d != params.d:
        raise ValueError(f"family dimension {family.d} does not match params.d {params.d}")
    ss = np.random.SeedSequence(params.seed)
    alice_seed, bob_seed = ss.spawn(2)
    alice_rng = np.random.default_rng(alice_seed)
    bob_rng = np.random.default_rng(bob_seed)

    xs, rs, thetas = _draw_encoding_stream(alice_rng, params.d, params.n_rounds)
    if params.photon_statistics == "poisson":
        copies = alice_rng.poisson(params.mu, size=params.n_rounds)
    else:
        copies = params.m

    # basis disclosure rides a timelocked envelope; the honest receiver
    # reads it through the authorized view irrespective of the clock
    envelope = TimelockEnvelope(payload=thetas, unlock_time=1, created_at=0)
    revealed = timelock_reveal(envelope, now=0, view="authorized")
    assert revealed is thetas

    s = params.channel.transmittance * params.detector.eta
    outcome = _simulate_detection(
        bob_rng, xs, copies, s, params.detector.visibility, params.detector.p_dark,
        params.detector.n_detectors,
    )
    return ProtocolTranscript(
        d=params.d, m=params.m, seed=params.seed, x=xs, r=rs, theta=thetas, outcome=outcome
    )


@dataclass(frozen=True)
class MultipartyResult:
    """Transcripts of all receivers sharing one encoding stream."""

    n_parties: int
    copies_per_party: int
    transcripts: tuple[ProtocolTranscript, ...]


def multiparty_run(params: ProtocolParams, n_parties: int) -> MultipartyResult:
    """Run the protocol toward n_parties receivers at once.

    The number of simultaneous receivers is capped at floor(sqrt(d)) so the
    total copy count stays within the regime the eavesdropping bounds
    cover; the m copies are split evenly, floor(m / n_parties) each.  With
    n_parties = 1 this reproduces `run_protocol` exactly.
    """
    if n_parties < 1:
        raise ValueError(f"n_parties must be >= 1, got {n_parties}")
    cap = math.isqrt(params.d)
    if n_parties > cap:
        raise ConstraintError(
            f"n_parties = {n_parties} exceeds floor(sqrt(d)) = {cap}, the maximum "
            f"number of receivers covered by the multi-copy security bounds"
        )
    if params.photon_statistics != "fixed":
        raise ConstraintError("multiparty runs support fixed photon statistics only")
    copies_each = params.m // n_parties
    if copies_each < 1:
        raise ConstraintError(
            f"m = {params.m} copies split over {n_parties} parties leaves none for some party"
        )

    ss = np.random.SeedSequence(params.seed)
    children = ss.spawn(1 + n_parties)
    alice_rng = np.random.default_rng(children[0])
    xs, rs, thetas = _draw_encoding_stream(alice_rng, params.d, params.n_rounds)

    s = params.channel.transmittance * params.detector.eta
    transcripts = []
    for p in range(n_parties):
        rng = np.random.default_rng(children[1 + p])
        outcome = _simulate_detection(
            rng, xs, copies_each, s, params.detector.visibility, params.detector.p_dark,
            params.detector.n_detectors,
        )
        transcripts.append(
            ProtocolTranscript(
                d=params.d,
                m=copies_each,
                seed=params.seed,
                x=xs,
                r=rs,
                theta=thetas,
                outcome=outcome,
            )
        )
    return MultipartyResult(
        n_parties=n_parties, copies_per_party=copies_each, transcripts=tuple(transcripts)
    )


def privacy_amplify(bits, seed: int, out_len: int) -> np.ndarray:
    """Compress a bit string with a seeded binary Toeplitz hash.

    The seed expands to the out_len + len(bits) - 1 diagonal entries of a
    Toeplitz matrix over GF(2); the output is the matrix-vector product
    mod 2.  Distinct seeds give independent hash choices from the family.
    """
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size and not np.all((bits == 0) | (bits == 1)):
        raise ValueError("input must be a 0/1 bit string")
    n = bits.size
    if not 0 <= out_len <= n:
        raise ValueError(f"out_len must be in 0..{n}, got {out_len}")
    if out_len == 0:
        return np.zeros(0, dtype=np.uint8)
    rng = np.random.default_rng(seed)
    diag = rng.integers(0, 2, size=out_len + n - 1)
    # out[j] = sum_i diag[j - i + n - 1] bits[i] mod 2, a convolution slice
    conv = np.convolve(diag, bits)
    return (conv[n - 1 : n - 1 + out_len] % 2).astype(np.uint8)
