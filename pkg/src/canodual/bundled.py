"""Bundled example problems and a random instance generator."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .problem import QuarticProblem, read_problem

EXAMPLES = ("example1", "example2", "example3", "example4")


def example_path(name: str) -> Path:
    name = name.removesuffix(".problem")
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    return Path(str(resources.files("canodual") / "problems" / f"{name}.problem"))


def load_example(name: str | int) -> QuarticProblem:
    if isinstance(name, int):
        name = f"example{name}"
    return read_problem(example_path(name))


def resolve_problem_path(arg: str) -> Path:
    """A filesystem path, or a bundled example name such as ``example1``."""
    path = Path(arg)
    if path.exists():
        return path
    stem = path.name.removesuffix(".problem")
    if stem in EXAMPLES:
        return example_path(stem)
    raise FileNotFoundError(f"no such problem file: {arg}")


def random_problem(rng: np.random.Generator, n: int, m: int, beta: bool = False,
                   definite_B: bool = True, shift: float = 0.0) -> QuarticProblem:
    """Random instance with PSD (optionally indefinite) B_k.

    PSD B_k guarantee that G(sigma) is negative definite for sigma far in the
    negative orthant, so S- critical points are common. ``shift`` subtracts a
    multiple of I from A, which deepens the wells and makes dual local minima
    in S- more frequent.
    """
    A = rng.normal(size=(n, n))
    A = 0.5 * (A + A.T) - shift * np.eye(n)
    B = []
    for _ in range(m):
        M = rng.normal(size=(n, n))
        Bk = M @ M.T / n + 0.1 * np.eye(n) if definite_B else 0.5 * (M + M.T)
        B.append(Bk)
    d = rng.uniform(0.5, 2.0, size=m)
    f = rng.normal(size=n)
    b = rng.uniform(0.5, 2.0, size=m) if beta else None
    return QuarticProblem(A=A, B=np.array(B), d=d, f=f, beta=b)
