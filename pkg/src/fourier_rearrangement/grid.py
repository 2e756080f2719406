"""Uniform symmetric grids, the Fourier convention, quadrature and field I/O.

The continuous transform is

    f^(xi) = int exp(-2 pi i x.xi) f(x) dx,

discretized on a grid with an odd number of points per axis so that the
coordinate set is symmetric about the origin.  Physical nodes are
``k * h`` and frequency nodes ``k * dxi`` with ``k`` running over
``-(N-1)/2 .. (N-1)/2`` in storage order, ``h = 2 l / N`` and
``dxi = 1 / (2 l)``.  With these scalings the discrete transform pair is
exactly unitary up to the cell volumes (discrete Plancherel), and the
transform of a product is exactly the circular convolution of the
transforms.
"""

from __future__ import annotations

import enum
import functools
import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import ContractError, FieldFormatError

__all__ = [
    "Space",
    "GridSpec",
    "Field",
    "forward_transform",
    "inverse_transform",
    "lebesgue_quadrature",
    "inner_product",
    "l2_norm",
    "read_field",
    "write_field",
    "field_checksum",
]

MAGIC = b"FRF1"


class Space(enum.IntEnum):
    PHYSICAL = 0
    FREQUENCY = 1


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``[-l_1, l_1) x ... x [-l_d, l_d)``.

    Attributes:
        points: Number of nodes per axis; each odd and at least 3.
        half_width: Half-width ``l_a`` of the physical box per axis.
    """

    points: tuple[int, ...]
    half_width: tuple[float, ...]

    def __post_init__(self):
        points = tuple(int(n) for n in self.points)
        half_width = tuple(float(l) for l in self.half_width)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "half_width", half_width)
        if not 1 <= len(points) <= 3:
            raise ContractError(f"dimension must be 1, 2 or 3, got {len(points)}")
        if len(half_width) != len(points):
            raise ContractError("points and half_width must have the same length")
        for n in points:
            if n < 3 or n % 2 == 0:
                raise ContractError(f"point counts must be odd and >= 3, got {n}")
        for l in half_width:
            if not np.isfinite(l) or l <= 0:
                raise ContractError(f"half widths must be positive and finite, got {l}")
        if int(np.prod(points, dtype=object)) > np.iinfo(np.intp).max:
            raise ContractError("grid too large for this platform")

    @classmethod
    def uniform(cls, dim: int, n: int, half_width: float) -> "GridSpec":
        return cls((n,) * dim, (half_width,) * dim)

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(2.0 * l / n for l, n in zip(self.half_width, self.points))

    @property
    def freq_spacing(self) -> tuple[float, ...]:
        return tuple(1.0 / (2.0 * l) for l in self.half_width)

    def steps(self, space: Space) -> tuple[float, ...]:
        return self.spacing if space == Space.PHYSICAL else self.freq_spacing

    def cell_volume(self, space: Space) -> float:
        return float(np.prod(self.steps(space)))

    def indices(self, axis: int) -> NDArray[np.int64]:
        """Centered integer indices ``-(N-1)/2 .. (N-1)/2`` along ``axis``."""
        m = (self.points[axis] - 1) // 2
        return np.arange(-m, m + 1, dtype=np.int64)

    def axis_coordinates(self, axis: int, space: Space = Space.PHYSICAL) -> NDArray[np.float64]:
        return self.indices(axis) * self.steps(space)[axis]

    def mesh(self, space: Space = Space.PHYSICAL) -> tuple[NDArray[np.float64], ...]:
        axes = [self.axis_coordinates(a, space) for a in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def index_mesh(self) -> tuple[NDArray[np.int64], ...]:
        return tuple(np.meshgrid(*[self.indices(a) for a in range(self.dim)], indexing="ij"))

    def is_isotropic(self, space: Space) -> bool:
        steps = self.steps(space)
        return all(s == steps[0] for s in steps)

    def squared_radius(self, space: Space) -> NDArray[np.float64]:
        """``|x|^2`` (or ``|xi|^2``) at every node.

        On isotropic grids this is ``step^2 * sum(k_a^2)`` so that nodes on
        the same lattice shell get bitwise-identical radii.
        """
        return _squared_radius(self, space)

    def radius(self, space: Space) -> NDArray[np.float64]:
        return np.sqrt(self.squared_radius(space))

    def origin_index(self) -> tuple[int, ...]:
        return tuple((n - 1) // 2 for n in self.points)


@functools.lru_cache(maxsize=64)
def _squared_radius(spec: GridSpec, space: Space) -> NDArray[np.float64]:
    steps = spec.steps(space)
    ks = spec.index_mesh()
    if spec.is_isotropic(space):
        shell = sum(k * k for k in ks)
        out = shell.astype(np.float64) * steps[0] ** 2
    else:
        out = sum((k * s) ** 2 for k, s in zip(ks, steps))
    out.setflags(write=False)
    return out


class Field:
    """Complex samples on a grid, tagged physical or frequency space.

    ``values`` has shape ``spec.points`` in C order (axis 0 slowest) and is
    stored read-only.  Every entry must be finite.
    """

    __slots__ = ("spec", "space", "values")

    def __init__(self, spec: GridSpec, space: Space, values):
        arr = np.array(values, dtype=np.complex128, copy=True)
        if arr.size != spec.size:
            raise ContractError(f"expected {spec.size} values, got {arr.size}")
        arr = arr.reshape(spec.points)
        if not np.all(np.isfinite(arr)):
            raise ContractError("field values must be finite")
        arr.setflags(write=False)
        self.spec = spec
        self.space = Space(space)
        self.values = arr

    @classmethod
    def physical(cls, spec: GridSpec, values) -> "Field":
        return cls(spec, Space.PHYSICAL, values)

    @classmethod
    def frequency(cls, spec: GridSpec, values) -> "Field":
        return cls(spec, Space.FREQUENCY, values)

    @classmethod
    def zeros(cls, spec: GridSpec, space: Space = Space.PHYSICAL) -> "Field":
        return cls(spec, space, np.zeros(spec.points))

    @classmethod
    def sample(cls, spec: GridSpec, func: Callable[..., NDArray], space: Space = Space.PHYSICAL) -> "Field":
        """Evaluate ``func(x_1, ..., x_d)`` on the coordinate mesh."""
        return cls(spec, space, func(*spec.mesh(space)))

    def with_values(self, values) -> "Field":
        return Field(self.spec, self.space, values)

    def conj(self) -> "Field":
        return self.with_values(np.conj(self.values))

    def __add__(self, other: "Field") -> "Field":
        _check_compatible(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _check_compatible(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar) -> "Field":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Field(points={self.spec.points}, space={self.space.name})"


def _check_compatible(a: Field, b: Field):
    if a.spec != b.spec or a.space != b.space:
        raise ContractError("fields live on different grids or spaces")


def _require(f: Field, space: Space, what: str):
    if not isinstance(f, Field):
        raise ContractError(f"{what} expects a Field, got {type(f).__name__}")
    if f.space != space:
        raise ContractError(f"{what} expects a {space.name.lower()} field, got {f.space.name.lower()}")


def forward_transform(f: Field) -> Field:
    """Scaled DFT approximating ``int exp(-2 pi i x.xi) f(x) dx`` on the frequency grid."""
    _require(f, Space.PHYSICAL, "forward_transform")
    out = np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(f.values)))
    return Field(f.spec, Space.FREQUENCY, out * f.spec.cell_volume(Space.PHYSICAL))


def inverse_transform(F: Field) -> Field:
    """Inverse of :func:`forward_transform`."""
    _require(F, Space.FREQUENCY, "inverse_transform")
    spec = F.spec
    out = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(F.values)))
    return Field(spec, Space.PHYSICAL, out * (spec.size * spec.cell_volume(Space.FREQUENCY)))


def lebesgue_quadrature(f: Field, integrand: Callable[[NDArray], NDArray] | None = None):
    """Rectangle rule ``(prod h_a) * sum_j integrand(f_j)`` in the field's own space.

    Returns a real number when the summed values are real, complex otherwise.
    """
    vals = f.values if integrand is None else integrand(f.values)
    total = np.sum(vals) * f.spec.cell_volume(f.space)
    if np.iscomplexobj(total):
        return complex(total)
    return float(total)


def inner_product(f: Field, g: Field) -> complex:
    """``<f, g> = int conj(f) g``, antilinear in the first slot."""
    _check_compatible(f, g)
    return complex(np.vdot(f.values, g.values) * f.spec.cell_volume(f.space))


def l2_norm(f: Field) -> float:
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.spec.cell_volume(f.space)))


# --- FRF1 files -----------------------------------------------------------


def _encode(f: Field) -> bytes:
    spec = f.spec
    head = MAGIC + struct.pack("<BB", int(f.space), spec.dim)
    head += struct.pack(f"<{spec.dim}Q", *spec.points)
    head += struct.pack(f"<{spec.dim}d", *spec.half_width)
    payload = np.ascontiguousarray(f.values, dtype="<c16").tobytes()
    return head + payload


def write_field(f: Field, path) -> None:
    Path(path).write_bytes(_encode(f))


def field_checksum(f: Field) -> str:
    """SHA-256 of the FRF1 encoding."""
    return hashlib.sha256(_encode(f)).hexdigest()


def read_field(path) -> Field:
    data = Path(path).read_bytes()
    return decode_field(data)


def decode_field(data: bytes) -> Field:
    if len(data) < 6 or data[:4] != MAGIC:
        raise FieldFormatError("bad magic, expected FRF1")
    space_tag, dim = data[4], data[5]
    if space_tag not in (0, 1):
        raise FieldFormatError(f"unknown space tag {space_tag}")
    if not 1 <= dim <= 3:
        raise FieldFormatError(f"unsupported dimension {dim}")
    offset = 6
    need = offset + 16 * dim
    if len(data) < need:
        raise FieldFormatError("truncated header")
    points = struct.unpack_from(f"<{dim}Q", data, offset)
    offset += 8 * dim
    half_width = struct.unpack_from(f"<{dim}d", data, offset)
    offset += 8 * dim
    try:
        spec = GridSpec(points, half_width)
    except ContractError as exc:
        raise FieldFormatError(f"invalid grid: {exc}") from exc
    nbytes = 16 * spec.size
    if len(data) - offset != nbytes:
        raise FieldFormatError(f"payload has {len(data) - offset} bytes, expected {nbytes}")
    values = np.frombuffer(data, dtype="<c16", count=spec.size, offset=offset)
    try:
        return Field(spec, Space(space_tag), values.reshape(points))
    except ContractError as exc:
        raise FieldFormatError(str(exc)) from exc


def coordinates_of(spec: GridSpec, space: Space, flat_index: Sequence[int]) -> NDArray[np.float64]:
    """Coordinates of flat (C-order) node indices, shape ``(len, d)``."""
    idx = np.unravel_index(np.asarray(flat_index), spec.points)
    steps = spec.steps(space)
    return np.stack(
        [(i - (n - 1) // 2) * s for i, n, s in zip(idx, spec.points, steps)], axis=-1
    )
