"""Coding schemes for straggler-tolerant distributed A^T B.

Every scheme maps the block grids of A and B to one coded block pair per
worker; worker i multiplies its pair and returns the product, and the master
decodes the full product from any recovery_threshold() many results.

Schemes here: the exponent-parameterized polynomial code family, its
(1, p, pm) instantiation that hits threshold pmn + p - 1, uncoded
round-robin repetition, and random linear combinations.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .blocks import BlockGrid, MatrixF, assemble_product, interpolate_block_polynomial, partition
from .errors import (
    BlockShapeMismatch,
    DegreeCollision,
    DuplicateEvaluationPoint,
    FieldTooSmall,
    InsufficientResults,
    SingularDecodeSystem,
    TooFewWorkers,
)
from .field import PrimeField
from .linalg import solve_linear_system


def worker_multiply(coded_a: MatrixF, coded_b: MatrixF) -> MatrixF:
    """The per-worker computation: transpose product of the stored pair."""
    if coded_a.rows != coded_b.rows:
        raise BlockShapeMismatch(
            f"coded blocks disagree on inner dimension: {coded_a.shape} vs {coded_b.shape}"
        )
    return coded_a.transpose() @ coded_b


@dataclass(frozen=True)
class PolynomialCodeSpec:
    """Parameters of an (alpha, beta, theta)-polynomial code.

    Worker i stores the two linear combinations
        A~_i = sum_{j<p, k<m} A[j,k] * x_i^(j*alpha + k*beta)
        B~_i = sum_{j<p, k<n} B[j,k] * x_i^((p-1-j)*alpha + k*theta)
    over distinct evaluation points x_0..x_{N-1}.
    """

    p: int
    m: int
    n: int
    N: int
    alpha: int
    beta: int
    theta: int
    x_points: tuple[int, ...]
    field: PrimeField

    def __post_init__(self):
        if min(self.p, self.m, self.n, self.N) < 1:
            raise ValueError("p, m, n, N must all be >= 1")
        if min(self.alpha, self.beta, self.theta) < 0:
            raise ValueError("exponents must be non-negative")
        if len(self.x_points) != self.N:
            raise ValueError(f"need {self.N} evaluation points, got {len(self.x_points)}")
        q = self.field.modulus
        if len({x % q for x in self.x_points}) != self.N:
            raise DuplicateEvaluationPoint("evaluation points must be distinct mod q")

    def product_degree(self) -> int:
        """Highest exponent appearing in a worker's product polynomial."""
        return (
            (2 * self.p - 2) * self.alpha
            + (self.m - 1) * self.beta
            + (self.n - 1) * self.theta
        )

    def output_degree(self, k: int, kp: int) -> int:
        """Degree whose coefficient is the output block C[k, kp]."""
        return (self.p - 1) * self.alpha + k * self.beta + kp * self.theta

    def check_degree_separation(self):
        """Verify each needed degree is hit only by its aligned product terms.

        The product polynomial's x^e coefficient aggregates every pair
        (j, k) x (j', k') with e = (p-1+j-j')*alpha + k*beta + k'*theta; the
        code is decodable only if, at each output degree, all contributing
        pairs have j = j' and the output's own (k, k').
        """
        needed = {
            self.output_degree(k, kp): (k, kp)
            for k in range(self.m)
            for kp in range(self.n)
        }
        if len(needed) != self.m * self.n:
            raise DegreeCollision("two output blocks share one degree")
        for j in range(self.p):
            for jp in range(self.p):
                for k in range(self.m):
                    for kp in range(self.n):
                        e = (
                            (self.p - 1 + j - jp) * self.alpha
                            + k * self.beta
                            + kp * self.theta
                        )
                        tgt = needed.get(e)
                        if tgt is not None and (j != jp or (k, kp) != tgt):
                            raise DegreeCollision(
                                f"term (j={j},k={k},j'={jp},k'={kp}) lands on the "
                                f"degree of output block {tgt}"
                            )


def general_poly_encode(
    spec: PolynomialCodeSpec, a_grid: BlockGrid, b_grid: BlockGrid, i: int
) -> tuple[MatrixF, MatrixF]:
    """Coded pair for worker i under the given exponent choice."""
    if not 0 <= i < spec.N:
        raise ValueError(f"worker index {i} out of range for N={spec.N}")
    if (a_grid.row_parts, a_grid.col_parts) != (spec.p, spec.m):
        raise BlockShapeMismatch(
            f"A grid is {a_grid.row_parts}x{a_grid.col_parts}, spec wants {spec.p}x{spec.m}"
        )
    if (b_grid.row_parts, b_grid.col_parts) != (spec.p, spec.n):
        raise BlockShapeMismatch(
            f"B grid is {b_grid.row_parts}x{b_grid.col_parts}, spec wants {spec.p}x{spec.n}"
        )
    q = spec.field.modulus
    x = spec.x_points[i] % q
    dtype = spec.field.array_dtype

    coded_a = np.zeros(a_grid.block_shape, dtype=dtype)
    for j in range(spec.p):
        for k in range(spec.m):
            w = pow(x, j * spec.alpha + k * spec.beta, q)
            coded_a = coded_a + a_grid[j, k].data * w
    coded_b = np.zeros(b_grid.block_shape, dtype=dtype)
    for j in range(spec.p):
        for k in range(spec.n):
            w = pow(x, (spec.p - 1 - j) * spec.alpha + k * spec.theta, q)
            coded_b = coded_b + b_grid[j, k].data * w
    return MatrixF(spec.field, coded_a), MatrixF(spec.field, coded_b)


def entangled_spec(p: int, m: int, n: int, N: int, field: PrimeField) -> PolynomialCodeSpec:
    """The (1, p, pm) polynomial code over x_i = i, threshold pmn + p - 1.

    N below the threshold is rejected outright: the threshold-N regime is
    not constructed here.
    """
    threshold = p * m * n + p - 1
    if N < threshold:
        raise TooFewWorkers(f"N={N} < pmn+p-1={threshold}")
    if field.modulus <= N:
        raise FieldTooSmall(f"need q > N, got q={field.modulus}, N={N}")
    return PolynomialCodeSpec(
        p=p, m=m, n=n, N=N, alpha=1, beta=p, theta=p * m,
        x_points=tuple(range(N)), field=field,
    )


class CodingScheme(ABC):
    """Encode/decode bundle with the any-K-subset recovery contract."""

    p: int
    m: int
    n: int
    N: int
    field: PrimeField

    @abstractmethod
    def recovery_threshold(self) -> int:
        """Minimum number of worker results that always suffices to decode."""

    @abstractmethod
    def encode_a(self, a: MatrixF, i: int) -> MatrixF:
        ...

    @abstractmethod
    def encode_b(self, b: MatrixF, i: int) -> MatrixF:
        ...

    @abstractmethod
    def decode(
        self,
        results: Mapping[int, MatrixF],
        subset: Sequence[int],
        dims: tuple[int, int] | None = None,
    ) -> MatrixF:
        """Recover A^T B from the results of the workers in `subset`.

        dims, when given, is the true (rows, cols) of A^T B used to strip
        padding; otherwise the padded product is returned.
        """

    def encode_all(self, a: MatrixF, b: MatrixF) -> list[tuple[MatrixF, MatrixF]]:
        """Coded pairs for every worker (partitions the inputs only once)."""
        return [(self.encode_a(a, i), self.encode_b(b, i)) for i in range(self.N)]


class GeneralPolynomialCode(CodingScheme):
    """Polynomial code for an arbitrary valid exponent choice."""

    def __init__(self, spec: PolynomialCodeSpec):
        spec.check_degree_separation()
        if spec.N < spec.product_degree() + 1:
            raise TooFewWorkers(
                f"N={spec.N} < threshold {spec.product_degree() + 1} for these exponents"
            )
        self.spec = spec
        self.p, self.m, self.n, self.N = spec.p, spec.m, spec.n, spec.N
        self.field = spec.field

    def recovery_threshold(self) -> int:
        return self.spec.product_degree() + 1

    def encode_a(self, a: MatrixF, i: int) -> MatrixF:
        grid = partition(a, self.p, self.m)
        return general_poly_encode_a(self.spec, grid, i)

    def encode_b(self, b: MatrixF, i: int) -> MatrixF:
        grid = partition(b, self.p, self.n)
        return general_poly_encode_b(self.spec, grid, i)

    def encode_all(self, a: MatrixF, b: MatrixF) -> list[tuple[MatrixF, MatrixF]]:
        a_grid = partition(a, self.p, self.m)
        b_grid = partition(b, self.p, self.n)
        return [
            general_poly_encode(self.spec, a_grid, b_grid, i) for i in range(self.N)
        ]

    def decode(
        self,
        results: Mapping[int, MatrixF],
        subset: Sequence[int],
        dims: tuple[int, int] | None = None,
    ) -> MatrixF:
        k_need = self.recovery_threshold()
        if len(subset) < k_need:
            raise InsufficientResults(f"got {len(subset)} results, need {k_need}")
        use = list(subset)[:k_need]
        pts = [(self.spec.x_points[w], results[w]) for w in use]
        coeffs = interpolate_block_polynomial(pts)
        return self.assemble_from_coefficients(coeffs, dims)

    def assemble_from_coefficients(
        self, coeffs: Sequence[MatrixF], dims: tuple[int, int] | None
    ) -> MatrixF:
        """Pick each output block's degree out of the coefficient stack."""
        grid = [
            [coeffs[self.spec.output_degree(k, kp)] for kp in range(self.n)]
            for k in range(self.m)
        ]
        if dims is None:
            br, bc = coeffs[0].shape
            dims = (self.m * br, self.n * bc)
        return assemble_product(grid, dims)


def general_poly_encode_a(spec: PolynomialCodeSpec, a_grid: BlockGrid, i: int) -> MatrixF:
    q = spec.field.modulus
    x = spec.x_points[i] % q
    out = np.zeros(a_grid.block_shape, dtype=spec.field.array_dtype)
    for j in range(spec.p):
        for k in range(spec.m):
            out = out + a_grid[j, k].data * pow(x, j * spec.alpha + k * spec.beta, q)
    return MatrixF(spec.field, out)


def general_poly_encode_b(spec: PolynomialCodeSpec, b_grid: BlockGrid, i: int) -> MatrixF:
    q = spec.field.modulus
    x = spec.x_points[i] % q
    out = np.zeros(b_grid.block_shape, dtype=spec.field.array_dtype)
    for j in range(spec.p):
        for k in range(spec.n):
            out = out + b_grid[j, k].data * pow(
                x, (spec.p - 1 - j) * spec.alpha + k * spec.theta, q
            )
    return MatrixF(spec.field, out)


class EntangledCode(GeneralPolynomialCode):
    """The (1, p, pm) polynomial code; threshold pmn + p - 1."""

    def __init__(self, p: int, m: int, n: int, N: int, field: PrimeField):
        super().__init__(entangled_spec(p, m, n, N, field))


def entangled_decode(
    spec: PolynomialCodeSpec,
    results: Mapping[int, MatrixF],
    subset: Sequence[int],
    dims: tuple[int, int] | None = None,
) -> MatrixF:
    """Decode helper bound to a spec rather than a scheme object."""
    return GeneralPolynomialCode(spec).decode(results, subset, dims)


class UncodedRepetitionCode(CodingScheme):
    """Round-robin replication of the pmn sub-products.

    Worker w computes task w mod pmn, where task t = (j, k, k') contributes
    A[j,k]^T B[j,k'] to output block (k, k').  Any
    N - floor(N / pmn) + 1 results are guaranteed to cover every task.
    """

    def __init__(self, p: int, m: int, n: int, N: int, field: PrimeField):
        tasks = p * m * n
        if N < tasks:
            raise TooFewWorkers(f"N={N} < pmn={tasks}")
        self.p, self.m, self.n, self.N = p, m, n, N
        self.field = field
        self.num_tasks = tasks

    def recovery_threshold(self) -> int:
        return self.N - self.N // self.num_tasks + 1

    def _task(self, w: int) -> tuple[int, int, int]:
        t = w % self.num_tasks
        j = t % self.p
        k = (t // self.p) % self.m
        kp = t // (self.p * self.m)
        return j, k, kp

    def encode_a(self, a: MatrixF, i: int) -> MatrixF:
        j, k, _ = self._task(i)
        return partition(a, self.p, self.m)[j, k]

    def encode_b(self, b: MatrixF, i: int) -> MatrixF:
        j, _, kp = self._task(i)
        return partition(b, self.p, self.n)[j, kp]

    def encode_all(self, a: MatrixF, b: MatrixF) -> list[tuple[MatrixF, MatrixF]]:
        a_grid = partition(a, self.p, self.m)
        b_grid = partition(b, self.p, self.n)
        out = []
        for i in range(self.N):
            j, k, kp = self._task(i)
            out.append((a_grid[j, k], b_grid[j, kp]))
        return out

    def decode(
        self,
        results: Mapping[int, MatrixF],
        subset: Sequence[int],
        dims: tuple[int, int] | None = None,
    ) -> MatrixF:
        by_task: dict[int, MatrixF] = {}
        for w in subset:
            t = w % self.num_tasks
            if t not in by_task:
                by_task[t] = results[w]
        missing = self.num_tasks - len(by_task)
        if missing:
            raise InsufficientResults(f"{missing} of {self.num_tasks} sub-products missing")
        grid = []
        for k in range(self.m):
            row = []
            for kp in range(self.n):
                acc = by_task[k * self.p + kp * self.p * self.m]  # j = 0
                for j in range(1, self.p):
                    acc = acc + by_task[j + k * self.p + kp * self.p * self.m]
                row.append(acc)
            grid.append(row)
        if dims is None:
            br, bc = grid[0][0].shape
            dims = (self.m * br, self.n * bc)
        return assemble_product(grid, dims)


class RandomLinearCode(CodingScheme):
    """Uniformly random linear combinations on both sides.

    Each result is a random combination of all p^2·mn pairwise block
    products, so decoding solves a linear system; any p^2·mn results
    suffice with high probability, and a singular draw is reported rather
    than hidden (callers wait for one more worker and retry).
    """

    def __init__(self, p: int, m: int, n: int, N: int, field: PrimeField, seed: int = 0):
        unknowns = p * p * m * n
        if N < unknowns:
            raise TooFewWorkers(f"N={N} < p^2mn={unknowns}")
        self.p, self.m, self.n, self.N = p, m, n, N
        self.field = field
        self.seed = seed
        rng = np.random.default_rng(seed)
        q = field.modulus
        self.coeff_a = np.array(
            rng.integers(0, q, size=(N, p, m)), dtype=field.array_dtype
        )
        self.coeff_b = np.array(
            rng.integers(0, q, size=(N, p, n)), dtype=field.array_dtype
        )

    def recovery_threshold(self) -> int:
        return self.p * self.p * self.m * self.n

    def encode_a(self, a: MatrixF, i: int) -> MatrixF:
        grid = partition(a, self.p, self.m)
        return self._combine(grid, self.coeff_a[i])

    def encode_b(self, b: MatrixF, i: int) -> MatrixF:
        grid = partition(b, self.p, self.n)
        return self._combine(grid, self.coeff_b[i])

    def encode_all(self, a: MatrixF, b: MatrixF) -> list[tuple[MatrixF, MatrixF]]:
        a_grid = partition(a, self.p, self.m)
        b_grid = partition(b, self.p, self.n)
        return [
            (self._combine(a_grid, self.coeff_a[i]), self._combine(b_grid, self.coeff_b[i]))
            for i in range(self.N)
        ]

    def _combine(self, grid: BlockGrid, weights: np.ndarray) -> MatrixF:
        q = self.field.modulus
        out = np.zeros(grid.block_shape, dtype=self.field.array_dtype)
        for j in range(grid.row_parts):
            for k in range(grid.col_parts):
                out = out + grid[j, k].data * int(weights[j, k])
        return MatrixF(self.field, out)

    def decode(
        self,
        results: Mapping[int, MatrixF],
        subset: Sequence[int],
        dims: tuple[int, int] | None = None,
    ) -> MatrixF:
        unknowns = self.recovery_threshold()
        if len(subset) < unknowns:
            raise InsufficientResults(f"got {len(subset)} results, need {unknowns}")
        q = self.field.modulus
        use = list(subset)
        # row w: result_w = sum over pairs ((j,k),(j',k')) of
        #        coeff_a[w,j,k] * coeff_b[w,j',k'] * (A[j,k]^T B[j',k'])
        rows = np.stack(
            [
                (
                    self.coeff_a[w].reshape(-1, 1) * self.coeff_b[w].reshape(1, -1) % q
                ).reshape(-1)
                for w in use
            ]
        )
        rhs = np.stack([results[w].data for w in use])
        solved = solve_linear_system(self.field, rows, rhs, require_full_column_rank=True)
        if solved is None:
            raise SingularDecodeSystem(
                f"coefficient matrix is rank-deficient for this subset of {len(use)} workers"
            )
        products = solved.reshape(self.p * self.m, self.p * self.n, *rhs.shape[1:])
        grid = []
        for k in range(self.m):
            row = []
            for kp in range(self.n):
                acc = np.zeros(rhs.shape[1:], dtype=self.field.array_dtype)
                for j in range(self.p):
                    acc = acc + products[j * self.m + k, j * self.n + kp]
                row.append(MatrixF(self.field, acc))
            grid.append(row)
        if dims is None:
            br, bc = grid[0][0].shape
            dims = (self.m * br, self.n * bc)
        return assemble_product(grid, dims)
