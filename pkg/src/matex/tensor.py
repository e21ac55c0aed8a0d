"""Dense d-dimensional 0-1 matrices.

All public coordinates are 1-based. Cells are stored in a read-only numpy
boolean array in C order, so the last axis varies fastest; ``packed()``
turns that order into bytes (8 cells per byte, most significant bit
first) for hashing and golden files.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Iterable, Sequence
from itertools import product
from typing import Any

import numpy as np

MAX_DIM = 6
MAX_CELLS = 1 << 24

Coord = tuple[int, ...]


class TensorError(ValueError):
    """Invalid shape, coordinate, or tensor operation."""


class TensorSizeError(TensorError):
    """Shape exceeds the desk-scale cap."""


def _check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(n) for n in dims)
    if not dims:
        raise TensorError("a tensor needs at least one axis")
    if len(dims) > MAX_DIM:
        raise TensorSizeError(f"dimension {len(dims)} exceeds cap {MAX_DIM}")
    if any(n < 1 for n in dims):
        raise TensorError(f"every extent must be >= 1, got {dims}")
    total = 1
    for n in dims:
        total *= n
    if total > MAX_CELLS:
        raise TensorSizeError(f"{total} cells exceeds cap {MAX_CELLS}")
    return dims


class Tensor01:
    """Immutable d-dimensional 0-1 matrix.

    Construct from anything numpy can turn into a boolean array, or use
    :meth:`zeros`, :meth:`full` and :meth:`from_ones`. ``set`` returns a
    new tensor; the instance itself never changes.
    """

    __slots__ = ("_cells", "_ones_count")

    def __init__(self, cells: Any) -> None:
        arr = np.array(cells, dtype=bool, copy=True)
        if arr.ndim == 0:
            raise TensorError("a tensor needs at least one axis")
        _check_dims(arr.shape)
        arr.setflags(write=False)
        self._cells = arr
        self._ones_count: int | None = None

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> Tensor01:
        return cls(np.zeros(_check_dims(dims), dtype=bool))

    @classmethod
    def full(cls, dims: Sequence[int]) -> Tensor01:
        return cls(np.ones(_check_dims(dims), dtype=bool))

    @classmethod
    def from_ones(cls, dims: Sequence[int], ones: Iterable[Sequence[int]]) -> Tensor01:
        dims = _check_dims(dims)
        arr = np.zeros(dims, dtype=bool)
        for c in ones:
            arr[_to_index(dims, c)] = True
        return cls(arr)

    @property
    def dims(self) -> tuple[int, ...]:
        return self._cells.shape

    @property
    def d(self) -> int:
        return self._cells.ndim

    @property
    def size(self) -> int:
        return self._cells.size

    @property
    def array(self) -> np.ndarray:
        """Read-only boolean view (0-based indexing)."""
        return self._cells

    def ones_count(self) -> int:
        if self._ones_count is None:
            self._ones_count = int(np.count_nonzero(self._cells))
        return self._ones_count

    def get(self, coord: Sequence[int]) -> int:
        return int(self._cells[_to_index(self.dims, coord)])

    def set(self, coord: Sequence[int], value: int | bool) -> Tensor01:
        arr = self._cells.copy()
        arr[_to_index(self.dims, coord)] = bool(value)
        return Tensor01(arr)

    def ones(self) -> list[Coord]:
        """1-entries as 1-based coordinates in lexicographic order."""
        return [tuple(int(i) + 1 for i in c) for c in np.argwhere(self._cells)]

    def packed(self) -> bytes:
        return np.packbits(self._cells.ravel()).tobytes()

    def to_dict(self) -> dict[str, Any]:
        return {"dims": list(self.dims), "ones": [list(c) for c in self.ones()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def canonical_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: Any) -> Tensor01:
        return tensor_from_dict(data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tensor01):
            return NotImplemented
        return self.dims == other.dims and bool(np.array_equal(self._cells, other._cells))

    def __hash__(self) -> int:
        return hash((self.dims, self.packed()))

    def __repr__(self) -> str:
        return f"Tensor01(dims={self.dims}, ones={self.ones_count()})"

    def __str__(self) -> str:
        if self.d == 2:
            return "\n".join("".join("1" if b else "." for b in row) for row in self._cells)
        return repr(self)


def _to_index(dims: tuple[int, ...], coord: Sequence[int]) -> tuple[int, ...]:
    if len(coord) != len(dims):
        raise TensorError(f"coordinate {tuple(coord)} has wrong length for dims {dims}")
    idx = []
    for c, n in zip(coord, dims):
        c = int(c)
        if not 1 <= c <= n:
            raise TensorError(f"coordinate {tuple(coord)} out of range for dims {dims}")
        idx.append(c - 1)
    return tuple(idx)


def _check_axis(T: Tensor01, axis: int) -> int:
    if not 1 <= axis <= T.d:
        raise TensorError(f"axis {axis} out of range 1..{T.d}")
    return axis - 1


def tensor_from_dict(data: Any) -> Tensor01:
    """Parse the JSON tensor format ``{"dims": [...], "ones": [[...], ...]}``.

    Duplicates and out-of-range coordinates are rejected; the error message
    names the offending field.
    """
    if not isinstance(data, dict):
        raise TensorError("tensor JSON must be an object with 'dims' and 'ones'")
    if "dims" not in data:
        raise TensorError("missing field 'dims'")
    if "ones" not in data:
        raise TensorError("missing field 'ones'")
    dims = data["dims"]
    if not isinstance(dims, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in dims):
        raise TensorError("field 'dims' must be a list of integers")
    dims = _check_dims(dims)
    ones = data["ones"]
    if not isinstance(ones, list):
        raise TensorError("field 'ones' must be a list of coordinates")
    arr = np.zeros(dims, dtype=bool)
    for pos, c in enumerate(ones):
        if not isinstance(c, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in c):
            raise TensorError(f"field 'ones[{pos}]' must be a list of integers")
        try:
            idx = _to_index(dims, c)
        except TensorError as exc:
            raise TensorError(f"field 'ones[{pos}]': {exc}") from None
        if arr[idx]:
            raise TensorError(f"field 'ones[{pos}]': duplicate coordinate {c}")
        arr[idx] = True
    return Tensor01(arr)


def loads(text: str) -> Tensor01:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorError(f"malformed JSON: {exc}") from None
    return tensor_from_dict(data)


def ones_count(T: Tensor01) -> int:
    return T.ones_count()


def cross_section(T: Tensor01, axis: int, index: int) -> Tensor01:
    """The ``axis``-cross section at ``index``, as a (d-1)-dimensional tensor."""
    a = _check_axis(T, axis)
    if T.d < 2:
        raise TensorError("cross sections of a 1-dimensional tensor are 0-dimensional")
    if not 1 <= index <= T.dims[a]:
        raise TensorError(f"index {index} out of range 1..{T.dims[a]} on axis {axis}")
    return Tensor01(np.take(T.array, index - 1, axis=a))


def line(T: Tensor01, axis: int, fixed: Sequence[int]) -> list[int]:
    """The ``axis``-row through the 1-based coordinates ``fixed`` (other axes, in order)."""
    a = _check_axis(T, axis)
    if len(fixed) != T.d - 1:
        raise TensorError(f"need {T.d - 1} fixed coordinates, got {len(fixed)}")
    other = [n for i, n in enumerate(T.dims) if i != a]
    idx: list[Any] = list(_to_index(tuple(other), fixed))
    idx.insert(a, slice(None))
    return [int(b) for b in T.array[tuple(idx)]]


def kronecker(M: Tensor01, N: Tensor01) -> Tensor01:
    """Replace every 1 of ``M`` by a copy of ``N`` and every 0 by a zero block."""
    if M.d != N.d:
        raise TensorError(f"dimension mismatch: {M.d} vs {N.d}")
    return Tensor01(np.kron(M.array.astype(np.uint8), N.array.astype(np.uint8)))


def _validate_groups(n: int, groups: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    runs = []
    expect = 1
    for g in groups:
        if len(g) != 2:
            raise TensorError(f"group {tuple(g)} must be a (start, end) pair")
        lo, hi = int(g[0]), int(g[1])
        if lo != expect or hi < lo:
            raise TensorError(f"groups {list(groups)} do not partition 1..{n} into consecutive runs")
        runs.append((lo, hi))
        expect = hi + 1
    if expect != n + 1:
        raise TensorError(f"groups {list(groups)} do not partition 1..{n} into consecutive runs")
    return runs


def contract_axis(T: Tensor01, axis: int, groups: Sequence[Sequence[int]]) -> Tensor01:
    """OR together each run of consecutive ``axis``-cross sections.

    ``groups`` lists inclusive 1-based ``(start, end)`` runs that must
    partition ``1..n_axis`` in order.
    """
    a = _check_axis(T, axis)
    runs = _validate_groups(T.dims[a], groups)
    starts = [lo - 1 for lo, _ in runs]
    return Tensor01(np.logical_or.reduceat(T.array, starts, axis=a))


def uniform_groups(n: int, t: int) -> list[tuple[int, int]]:
    if t < 1 or n % t:
        raise TensorError(f"extent {n} is not divisible by block edge {t}")
    return [(s, s + t - 1) for s in range(1, n + 1, t)]


def block_contraction(A: Tensor01, t: int) -> Tensor01:
    """Contraction matrix of ``A`` under the uniform t x ... x t block grid."""
    if t < 1 or any(n % t for n in A.dims):
        raise TensorError(f"dims {A.dims} not divisible by block edge {t}")
    shape = []
    for n in A.dims:
        shape += [n // t, t]
    blocks = A.array.reshape(shape)
    return Tensor01(blocks.any(axis=tuple(range(1, 2 * A.d, 2))))


def j_remainder(M: Tensor01, j: int) -> Tensor01:
    """Collapse axis ``j`` by OR, leaving a (d-1)-dimensional tensor."""
    if M.d < 2:
        raise TensorError("the remainder needs d >= 2")
    a = _check_axis(M, j)
    return Tensor01(M.array.any(axis=a))


def reverse_axis(T: Tensor01, axis: int) -> Tensor01:
    a = _check_axis(T, axis)
    return Tensor01(np.flip(T.array, axis=a))


def blocks(A: Tensor01, t: int) -> np.ndarray:
    """View of ``A`` as a grid of t x ... x t blocks.

    The result has shape ``(n1/t, ..., nd/t, t, ..., t)``: block coordinates
    first, offsets inside the block after.
    """
    if t < 1 or any(n % t for n in A.dims):
        raise TensorError(f"dims {A.dims} not divisible by block edge {t}")
    shape = []
    for n in A.dims:
        shape += [n // t, t]
    d = A.d
    order = list(range(0, 2 * d, 2)) + list(range(1, 2 * d, 2))
    return A.array.reshape(shape).transpose(order)


def all_coords(dims: Sequence[int]) -> Iterable[Coord]:
    """Every 1-based coordinate of ``dims`` in lexicographic order."""
    return product(*(range(1, n + 1) for n in dims))
