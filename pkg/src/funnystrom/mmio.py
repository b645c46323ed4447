"""Matrix Market I/O for the dense symmetric matrices this package consumes.

Both the array and the coordinate variants are accepted on read; writes
emit 17 significant digits so that a write-then-read round trip
reproduces float64 entries exactly.
"""

from __future__ import annotations

import numpy as np
import scipy.io
import scipy.sparse

from .errors import MatrixFileError
from .linalg import SpsdMatrix, dense_entries

# %.16e carries 17 significant digits, enough to round-trip float64
_WRITE_PRECISION = 16


def read_dense(path):
    """Read a Matrix Market file into a dense square ndarray."""
    try:
        m = scipy.io.mmread(str(path))
    except (OSError, ValueError) as exc:
        raise MatrixFileError(f"cannot read matrix from {path!r}: {exc}") from exc
    if scipy.sparse.issparse(m):
        m = m.toarray()
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixFileError(
            f"matrix in {path!r} has shape {arr.shape}, expected square"
        )
    return arr


def read_matrix(path, *, sym_tol=None, psd_tol=None):
    """Read and validate an SPSD matrix from a Matrix Market file.

    Symmetry and positive semidefiniteness violations surface as the
    usual domain errors, so callers can distinguish a malformed file
    (MatrixFileError) from a well-formed file with inadmissible content.
    """
    kwargs = {}
    if sym_tol is not None:
        kwargs["sym_tol"] = sym_tol
    if psd_tol is not None:
        kwargs["psd_tol"] = psd_tol
    return SpsdMatrix(read_dense(path), **kwargs)


def write_matrix(path, matrix, *, comment=""):
    """Write a matrix (SpsdMatrix or ndarray) in Matrix Market array format."""
    arr = dense_entries(matrix)
    scipy.io.mmwrite(str(path), arr, comment=comment, field="real",
                     precision=_WRITE_PRECISION)
