import numpy as np
import pytest

from qdpverify import fixtures
from qdpverify.model import KrausChannel, Povm, QuantumAlgorithm, compose_channels


# outcome lines appended by the acceptance checks, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_unitary(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(n, n_kraus, rng):
    """Random CPTP map from a Haar-ish isometry split into ``n_kraus`` blocks."""
    d = 2**n
    z = rng.standard_normal((d * n_kraus, d)) + 1j * rng.standard_normal((d * n_kraus, d))
    v, _ = np.linalg.qr(z)
    return KrausChannel(v.reshape(n_kraus, d, d))


def random_povm(n, m, rng, rank=None):
    """Random ``m``-outcome POVM; ``rank`` caps the rank of each raw element."""
    d = 2**n
    # the elements must jointly span the space for the normalization to exist
    rank = d if rank is None else max(rank, -(-d // m))
    raw = []
    for _ in range(m):
        g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
        raw.append(g @ g.conj().T)
    total = sum(raw)
    w, v = np.linalg.eigh(total)
    inv_sqrt = v @ np.diag(w**-0.5) @ v.conj().T
    return Povm([inv_sqrt @ a @ inv_sqrt for a in raw])


def random_psd(d, rng, rank=None):
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    return g @ g.conj().T


def random_algorithm(rng, n=2, max_outcomes=4, max_kraus=4):
    m = int(rng.integers(2, max_outcomes + 1))
    k = int(rng.integers(1, max_kraus + 1))
    rank = int(rng.integers(1, 2**n + 1))
    return QuantumAlgorithm(random_channel(n, k, rng), random_povm(n, m, rng, rank=rank))


def flat_effects_algorithm():
    return QuantumAlgorithm(KrausChannel(fixtures.flat_effects_kraus()), Povm(fixtures.half_split_measurement()))


def flat_effects_relabelled_algorithm():
    channel = compose_channels(KrausChannel(fixtures.relabel_noise_kraus()), KrausChannel(fixtures.flat_effects_kraus()))
    return QuantumAlgorithm(channel, Povm(fixtures.half_split_measurement()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def flat_alg():
    return flat_effects_algorithm()


@pytest.fixture
def relabelled_alg():
    return flat_effects_relabelled_algorithm()
