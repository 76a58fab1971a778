"""Shared numerical tolerances and the run configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass

# Validation of Hermiticity, positivity and trace of states.
VALIDATION_TOL = 1e-9
# Eigenvalues closer than this are treated as one degenerate block.
DEGENERACY_GAP = 1e-8
# Eigenvalues at or below this are outside the support (matrix log, entropies).
LOG_CUTOFF = 1e-12
# Kraus-sum and Choi positivity tolerance for channel validation.
CHANNEL_TOL = 1e-9
# Monotonicity violations at or below this are eigensolver noise.
MONOTONE_NOISE = 1e-9


@dataclass(frozen=True)
class CheckConfig:
    """Knobs shared by the condition deciders and the monotone suites.

    ``samples`` counts states per sampled check, ``remixes`` counts random
    unitary re-mixings of Kraus arms tried by the selective search.
    """

    tol: float = 1e-8
    samples: int = 200
    remixes: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.samples < 1:
            raise ValueError(f"samples must be positive, got {self.samples}")
        if self.remixes < 0:
            raise ValueError(f"remixes must be nonnegative, got {self.remixes}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def as_dict(self) -> dict:
        return asdict(self)
