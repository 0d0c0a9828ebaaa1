"""Quartic problem data model, file I/O and beta normalization.

The objective handled throughout the package is

    Pi(x) = 1/2 sum_k beta_k (1/2 x^T B_k x - d_k)^2 + 1/2 x^T A x - x^T f

A problem file is a small YAML document::

    # comments start with '#'
    n: 2
    m: 1
    A: [[-0.2, 0], [0, -0.8]]     # row-major, nested rows
    B:
      - [[1, 0], [0, 1]]
    beta: [1]                      # optional, defaults to all ones
    d: [4]
    f: [0.9, 0.3]
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

import numpy as np
import yaml

from .errors import AsymmetricInput, DimensionError, DomainError, ParseError

SYMMETRY_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _symmetrize(M: np.ndarray, name: str) -> np.ndarray:
    asym = np.max(np.abs(M - M.T)) if M.size else 0.0
    if asym > SYMMETRY_TOL:
        raise AsymmetricInput(f"{name} is not symmetric (max |M - M^T| = {asym:.3g})")
    return 0.5 * (M + M.T)


@dataclass(frozen=True, eq=False)
class QuarticProblem:
    """Immutable problem instance. ``B`` has shape (m, n, n)."""

    A: np.ndarray
    B: np.ndarray
    d: np.ndarray
    f: np.ndarray
    beta: np.ndarray = None

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        f = np.atleast_1d(np.asarray(self.f, dtype=float))
        d = np.atleast_1d(np.asarray(self.d, dtype=float))
        if A.ndim == 0:
            A = A.reshape(1, 1)
        try:
            B = np.asarray(self.B, dtype=float)
        except ValueError as exc:  # ragged nested lists
            raise DimensionError(f"B matrices have inconsistent shapes: {exc}") from None
        if B.ndim == 1 and A.shape == (1, 1):
            B = B.reshape(-1, 1, 1)
        beta = np.ones(d.shape) if self.beta is None else np.atleast_1d(np.asarray(self.beta, dtype=float))

        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DimensionError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        if n < 1:
            raise DimensionError("n must be positive")
        if B.ndim != 3 or B.shape[1:] != (n, n):
            raise DimensionError(f"B must be a list of {n}x{n} matrices, got shape {B.shape}")
        m = B.shape[0]
        if m < 1:
            raise DimensionError("m must be positive")
        if f.shape != (n,):
            raise DimensionError(f"f must have length {n}, got {f.shape}")
        if d.shape != (m,) or beta.shape != (m,):
            raise DimensionError(f"d and beta must have length {m}, got {d.shape} and {beta.shape}")
        for arr, name in ((A, "A"), (B, "B"), (d, "d"), (f, "f"), (beta, "beta")):
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} contains non-finite entries")
        if np.any(beta <= 0):
            raise DomainError(f"beta must be strictly positive, got {beta.tolist()}")

        A = _symmetrize(A, "A")
        B = np.stack([_symmetrize(Bk, f"B[{k}]") for k, Bk in enumerate(B)])
        for name, value in (("A", A), ("B", B), ("d", d), ("f", f), ("beta", beta)):
            object.__setattr__(self, name, _frozen(value))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[0]

    @property
    def unit_beta(self) -> bool:
        return bool(np.all(self.beta == 1.0))

    def with_f(self, f) -> "QuarticProblem":
        return replace(self, f=np.asarray(f, dtype=float))

    def __eq__(self, other):
        if not isinstance(other, QuarticProblem):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k)) for k in ("A", "B", "d", "f", "beta")
        )

    def __hash__(self):
        return hash(problem_digest(self))


@dataclass(frozen=True)
class SolverConfig:
    multistart_count: int = 64
    newton_max_iter: int = 100
    newton_tol: float = 1e-10
    definiteness_tol: float = 1e-9
    dedup_tol: float = 1e-7
    sample_box_halfwidth: float = 10.0
    rng_seed: int = 42
    probe_radius: float = 1e-2
    probe_samples: int = 100

    def __post_init__(self):
        if int(self.multistart_count) < 1:
            raise DomainError("multistart_count must be >= 1")
        if int(self.newton_max_iter) < 1 or int(self.probe_samples) < 1:
            raise DomainError("newton_max_iter and probe_samples must be >= 1")
        for name in ("newton_tol", "definiteness_tol", "dedup_tol", "probe_radius"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")
        if self.sample_box_halfwidth < 0:
            raise DomainError("sample_box_halfwidth must be non-negative")
        if not 0 <= int(self.rng_seed) < 2**64:
            raise DomainError("rng_seed must be a 64-bit unsigned integer")

    @classmethod
    def for_problem(cls, p: QuarticProblem, **overrides) -> "SolverConfig":
        """Defaults scaled to the problem: 64*m starts, box 10*(1 + max|d|)."""
        base = dict(
            multistart_count=64 * p.m,
            sample_box_halfwidth=10.0 * (1.0 + float(np.max(np.abs(p.d)))),
        )
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def normalize_beta(p: QuarticProblem) -> QuarticProblem:
    """Fold the weights into the data so that every beta_k equals one.

    beta (1/2 x^T B x - d)^2 == (1/2 x^T (sqrt(beta) B) x - sqrt(beta) d)^2,
    so both B_k and d_k are multiplied by sqrt(beta_k).
    """
    if p.unit_beta:
        return p
    s = np.sqrt(p.beta)
    return QuarticProblem(A=p.A, B=p.B * s[:, None, None], d=p.d * s, f=p.f, beta=np.ones(p.m))


# ---------------------------------------------------------------------------
# text format


class _Dumper(yaml.SafeDumper):
    pass


def _represent_float(dumper, value):
    if np.isnan(value):
        text = ".nan"
    elif np.isinf(value):
        text = ".inf" if value > 0 else "-.inf"
    else:
        text = "%.17g" % value
        if "." not in text and "e" not in text and "n" not in text:
            text += ".0"
        elif "e" in text and "." not in text:
            mant, exp = text.split("e")
            text = f"{mant}.0e{exp}"
    return dumper.represent_scalar("tag:yaml.org,2002:float", text)


_Dumper.add_representer(float, _represent_float)
_Dumper.add_representer(np.float64, _represent_float)


def dump_yaml(data, header: str | None = None) -> str:
    body = yaml.dump(data, Dumper=_Dumper, sort_keys=False, default_flow_style=None, width=100)
    if header:
        lines = "".join(f"# {line}\n" for line in header.splitlines())
        return lines + body
    return body


def _to_list(a: np.ndarray):
    return np.asarray(a, dtype=float).tolist()


def problem_to_dict(p: QuarticProblem) -> dict:
    return {
        "n": p.n,
        "m": p.m,
        "A": _to_list(p.A),
        "B": _to_list(p.B),
        "beta": _to_list(p.beta),
        "d": _to_list(p.d),
        "f": _to_list(p.f),
    }


def serialize_problem(p: QuarticProblem, header: str | None = None) -> str:
    """Write a problem in the text format, floats with 17 significant digits."""
    return dump_yaml(problem_to_dict(p), header=header)


def problem_digest(p: QuarticProblem) -> str:
    return hashlib.sha256(serialize_problem(p).encode()).hexdigest()


def _matrix(value, name: str, n: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 1 and arr.size == n * n:
        arr = arr.reshape(n, n)
    if arr.ndim == 0 and n == 1:
        arr = arr.reshape(1, 1)
    if arr.shape != (n, n):
        raise DimensionError(f"{name} must be {n}x{n}, got shape {arr.shape}")
    return arr


def problem_from_dict(doc: dict) -> QuarticProblem:
    if not isinstance(doc, dict):
        raise ParseError("problem document must be a mapping")
    missing = [k for k in ("n", "m", "A", "B", "d", "f") if k not in doc]
    if missing:
        raise ParseError(f"missing fields: {', '.join(missing)}")
    unknown = set(doc) - {"n", "m", "A", "B", "beta", "d", "f"}
    if unknown:
        raise ParseError(f"unknown fields: {', '.join(sorted(unknown))}")
    try:
        n, m = int(doc["n"]), int(doc["m"])
    except (TypeError, ValueError):
        raise ParseError("n and m must be integers") from None
    if n < 1 or m < 1:
        raise DimensionError("n and m must be positive")
    try:
        A = _matrix(doc["A"], "A", n)
        raw_B = doc["B"]
        if not isinstance(raw_B, list) or len(raw_B) != m:
            raise DimensionError(f"B must be a list of {m} matrices")
        B = np.stack([_matrix(Bk, f"B[{k}]", n) for k, Bk in enumerate(raw_B)])
        beta = doc.get("beta")
        vectors = {}
        for name, length in (("d", m), ("f", n), ("beta", m)):
            if name == "beta" and beta is None:
                vectors[name] = np.ones(m)
                continue
            vec = np.atleast_1d(np.asarray(doc[name], dtype=float))
            if vec.shape != (length,):
                raise DimensionError(f"{name} must have length {length}, got {vec.shape}")
            vectors[name] = vec
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DimensionError):
            raise
        raise ParseError(f"non-numeric or ragged entry: {exc}") from None
    return QuarticProblem(A=A, B=B, d=vectors["d"], f=vectors["f"], beta=vectors["beta"])


def load_problem(text: str) -> QuarticProblem:
    """Parse and validate a problem document (see module docstring)."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed problem document: {exc}") from None
    return problem_from_dict(doc)


def read_problem(path) -> QuarticProblem:
    with open(path, encoding="utf-8") as fh:
        return load_problem(fh.read())
