"""Steklov-Robin eigensystems and boundary-nonlinear solves on P1 triangulations."""

from ._srlab import (
    Certificate,
    Error,
    EvalError,
    GramPair,
    HomotopyTrace,
    InvalidParameter,
    Mesh,
    NonDifferentiable,
    NumericalError,
    ParseError,
    ResonanceError,
    Spectrum,
    ValidationError,
    assemble,
    boundary_pencil,
    certify,
    disk_steklov_exact,
    eigs,
    energy_norm,
    homotopy_solve,
    picard_solve,
    pick_delta,
    run,
)

__all__ = [name for name in dir() if not name.startswith("_")]
