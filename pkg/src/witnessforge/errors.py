"""Exception types raised across witnessforge."""


class WitnessForgeError(Exception):
    pass


class DimensionMismatch(WitnessForgeError, ValueError):
    pass


class NonHermitianError(WitnessForgeError, ValueError):
    pass


class ConvergenceError(WitnessForgeError, RuntimeError):
    """Jacobi sweeps ran out before the off-diagonal mass fell below tolerance."""

    def __init__(self, message, residual, sweeps):
        super().__init__(f"{message} (residual={residual:.3e}, sweeps={sweeps})")
        self.residual = residual
        self.sweeps = sweeps


class NotCirculant(WitnessForgeError, ValueError):
    """Raised with the first nonzero entry that falls outside every Σ_α cell."""

    def __init__(self, row, col):
        super().__init__(f"entry at row {row}, col {col} lies outside the circulant cells")
        self.row = row
        self.col = col


class ConstructionError(WitnessForgeError, RuntimeError):
    """A constructor's own certificate failed; indicates a bug, not bad input."""
