"""Exception types for distinguishable numerical failure modes."""


class PuamoError(Exception):
    """Base class for model-specific failures."""


class SingularCoinError(PuamoError):
    """A coin is numerically off-diagonal where a diagonal entry is divided by."""

    def __init__(self, cell, detail=""):
        self.cell = cell
        msg = f"coin at cell {cell} is numerically off-diagonal"
        super().__init__(msg + (f": {detail}" if detail else ""))


class SingularBranchError(PuamoError):
    """A coin block has an eigenvalue on the negative real axis."""

    def __init__(self, cell):
        self.cell = cell
        super().__init__(
            f"coin block at cell {cell} has an eigenvalue on the negative real "
            "axis; the principal square root is undefined"
        )


class SpectrumCollisionError(PuamoError):
    """z is numerically indistinguishable from an eigenvalue."""


class ThetaResolutionError(PuamoError):
    """Phase increments stay too coarse after local refinement."""


class PairingStructureError(PuamoError):
    """Off-circle eigenvalues cannot be matched into pairs."""


class EigensolverError(PuamoError):
    """Dense eigensolver failed or lost accuracy; carries backend diagnostics."""
