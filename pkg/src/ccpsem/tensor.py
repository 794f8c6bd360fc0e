"""Vocabulary-indexed dense tensors and the vector combination toolkit.

Ranks 1..4 (vector, matrix, cube, hypercube) over float64, each axis
labeled by a Vocabulary.  Operations are pure; tensors are treated as
immutable values (arrays are never written after construction).

File format::

    tensor rank=<r> dims=<n1>[,<n2>...]
    <axis-1 words, space separated>
    ...one line per axis...
    <tab-separated values, one line per row of the last axis>
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class TensorError(Exception):
    pass


class ShapeMismatch(TensorError):
    pass


class ZeroVector(TensorError):
    pass


class DegenerateSpan(TensorError):
    pass


class UnknownWord(TensorError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    words: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.words)) != len(self.words):
            raise TensorError("vocabulary words must be unique")
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.words)})

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self._index

    def __iter__(self):
        return iter(self.words)

    def index(self, word: str) -> int:
        try:
            return self._index[word]
        except KeyError:
            raise UnknownWord(f"word {word!r} not in vocabulary") from None

    def extend(self, words) -> "Vocabulary":
        new = [w for w in words if w not in self._index]
        return Vocabulary(self.words + tuple(new)) if new else self


def vocabulary(words) -> Vocabulary:
    return words if isinstance(words, Vocabulary) else Vocabulary(tuple(words))


@dataclass(frozen=True)
class Tensor:
    dims: tuple[Vocabulary, ...]
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        expected = tuple(len(v) for v in self.dims)
        if arr.shape != expected:
            if arr.size == int(np.prod(expected)):
                arr = arr.reshape(expected)
            else:
                raise ShapeMismatch(
                    f"data shape {arr.shape} does not match axes {expected}"
                )
        if not (1 <= arr.ndim <= 4):
            raise ShapeMismatch(f"rank {arr.ndim} outside 1..4")
        object.__setattr__(self, "data", arr)

    @property
    def rank(self) -> int:
        return self.data.ndim

    @property
    def vocab(self) -> Vocabulary:
        return self.dims[0]

    def entry(self, *words: str) -> float:
        idx = tuple(v.index(w) for v, w in zip(self.dims, words))
        return float(self.data[idx])

    def row(self, word: str) -> np.ndarray:
        return self.data[self.dims[0].index(word)]

    def __eq__(self, other):
        return (
            isinstance(other, Tensor)
            and self.dims == other.dims
            and np.array_equal(self.data, other.data)
        )


def zeros(vocabs) -> Tensor:
    vocabs = tuple(vocabulary(v) for v in vocabs)
    return Tensor(vocabs, np.zeros(tuple(len(v) for v in vocabs)))


def _check_finite(arr: np.ndarray, op: str):
    if not np.all(np.isfinite(arr)):
        raise TensorError(f"{op} produced a non-finite entry")
    return arr


def _require(cond, msg):
    if not cond:
        raise ShapeMismatch(msg)


# ---------------------------------------------------------------------------
# Toolkit operations


def scalar_mul(r: float, v: Tensor) -> Tensor:
    return Tensor(v.dims, _check_finite(r * v.data, "scalar_mul"))


def pointwise_add(u: Tensor, v: Tensor) -> Tensor:
    _require(u.dims == v.dims, "pointwise_add needs identical axes")
    return Tensor(u.dims, _check_finite(u.data + v.data, "pointwise_add"))


def pointwise_mul(u: Tensor, v: Tensor) -> Tensor:
    _require(u.dims == v.dims, "pointwise_mul needs identical axes")
    return Tensor(u.dims, _check_finite(u.data * v.data, "pointwise_mul"))


def contract1(m: Tensor, v: Tensor) -> Tensor:
    """Matrix-vector contraction: (m x1 v)_i = sum_j m_ij v_j."""
    _require(m.rank == 2 and v.rank == 1, "contract1 needs (matrix, vector)")
    _require(m.dims[1] == v.dims[0], "contract1 column axis mismatch")
    return Tensor((m.dims[0],), _check_finite(m.data @ v.data, "contract1"))


def contract2(c: Tensor, v: Tensor) -> Tensor:
    """Cube-vector contraction: (c x2 v)_ij = sum_k c_ijk v_k."""
    _require(c.rank == 3 and v.rank == 1, "contract2 needs (cube, vector)")
    _require(c.dims[2] == v.dims[0], "contract2 last axis mismatch")
    return Tensor(c.dims[:2], _check_finite(c.data @ v.data, "contract2"))


def dot(u: Tensor, v: Tensor) -> float:
    _require(u.dims == v.dims and u.rank == 1, "dot needs same-axis vectors")
    return float(np.dot(u.data, v.data))


def norm(v: Tensor) -> float:
    return float(np.linalg.norm(v.data))


def cosine(u: Tensor, v: Tensor) -> float:
    nu, nv = norm(u), norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine undefined for zero vectors")
    return dot(u, v) / (nu * nv)


def rotate(u: Tensor, v: Tensor, sign: int = 1, mode: str = "span") -> Tensor:
    """Rotate the average of `u` and `v` by the angle between them.

    `mode="literal2d"` applies the 2x2 matrix
    ``[[cos, sign*sin], [-sign*sin, cos]]`` (cos taken from the unit-scaled
    inputs) and requires dimension 2.  `mode="span"` works in any dimension
    by rotating inside span{u, v}; collinear opposite or zero inputs leave
    no plane to rotate in and raise DegenerateSpan.
    """
    if sign not in (1, -1):
        raise TensorError("sign must be +1 or -1")
    _require(u.dims == v.dims and u.rank == 1, "rotate needs same-axis vectors")
    nu, nv = norm(u), norm(v)
    if nu == 0.0 or nv == 0.0:
        raise DegenerateSpan("rotate undefined for zero vectors")
    uh, vh = u.data / nu, v.data / nv
    cos_t = float(np.clip(np.dot(uh, vh), -1.0, 1.0))
    sin_t = math.sqrt(max(0.0, 1.0 - cos_t * cos_t))
    avg = (u.data + v.data) / 2.0

    if mode == "literal2d":
        _require(len(u.vocab) == 2, "literal2d mode needs dimension 2")
        rot = np.array([[cos_t, sign * sin_t], [-sign * sin_t, cos_t]])
        return Tensor(u.dims, _check_finite(rot @ avg, "rotate"))
    if mode != "span":
        raise TensorError(f"unknown rotation mode {mode!r}")

    if cos_t >= 1.0 - 1e-12:
        return Tensor(u.dims, avg)
    if cos_t <= -1.0 + 1e-12:
        raise DegenerateSpan("opposite vectors span no rotation plane")
    e1 = uh
    res = vh - np.dot(vh, e1) * e1
    e2 = res / np.linalg.norm(res)
    a, b = float(np.dot(avg, e1)), float(np.dot(avg, e2))
    outside = avg - a * e1 - b * e2
    c, s = cos_t, sign * sin_t
    a2, b2 = c * a + s * b, -s * a + c * b
    return Tensor(u.dims, _check_finite(outside + a2 * e1 + b2 * e2, "rotate"))


# ---------------------------------------------------------------------------
# File I/O


def save_tensor(t: Tensor, path):
    lines = [f"tensor rank={t.rank} dims=" + ",".join(str(len(v)) for v in t.dims)]
    lines += [" ".join(v.words) for v in t.dims]
    flat = t.data.reshape(-1, t.data.shape[-1]) if t.rank > 1 else t.data.reshape(1, -1)
    for row in flat:
        lines.append("\t".join(repr(float(x)) for x in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_tensor(path) -> Tensor:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    header = lines[0].split()
    if not header or header[0] != "tensor":
        raise TensorError(f"{path}: missing tensor header")
    fields = dict(part.split("=", 1) for part in header[1:])
    rank = int(fields["rank"])
    sizes = [int(n) for n in fields["dims"].split(",")]
    if len(sizes) != rank:
        raise TensorError(f"{path}: rank/dims disagree")
    vocabs = []
    for axis in range(rank):
        words = tuple(lines[1 + axis].split())
        if len(words) != sizes[axis]:
            raise TensorError(f"{path}: axis {axis} vocabulary length mismatch")
        vocabs.append(Vocabulary(words))
    values = []
    for line in lines[1 + rank:]:
        values.extend(float(x) for x in line.split("\t"))
    arr = np.array(values, dtype=np.float64)
    if arr.size != int(np.prod(sizes)):
        raise TensorError(f"{path}: expected {int(np.prod(sizes))} values, got {arr.size}")
    return Tensor(tuple(vocabs), arr.reshape(sizes))
