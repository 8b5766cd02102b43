"""Constrained binary optimization problems and their qubit encodings.

A problem consists of a multilinear objective over Pauli-Z eigenvalues, a set
of nonnegative equality-constraint terms (diagonal projectors), and a set of
affine inequality constraints D(x) >= 0 handled downstream through slack
qudits.  Five encoders cover maximum independent set, directed minimum
dominating set, knapsack, combinatorial auction, and basket-fee minimization
for exchange-traded funds.  A brute-force oracle provides ground truth for
every instance small enough to enumerate.

Bitstrings are packed into integers with bit j equal to decision variable
x_j.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

TIE_TOL = 1e-9


class InstanceRejected(ValueError):
    """The instance cannot be benchmarked (infeasible, vacuous, or degenerate)."""


class ParseError(ValueError):
    """An instance file violates the expected schema."""


def bits_of(x: int, n: int) -> tuple[int, ...]:
    """Unpack a bitmask into (x_0, ..., x_{n-1})."""
    return tuple((x >> j) & 1 for j in range(n))


def pack_bits(bits: Sequence[int]) -> int:
    return sum(1 << j for j, b in enumerate(bits) if b)


# ---------------------------------------------------------------------------
# objective polynomials
# ---------------------------------------------------------------------------

@dataclass
class ZPolynomial:
    """Real multilinear function of Z eigenvalues, f(x) = (1/2) sum_S c_S prod_{j in S} z_j.

    Here z_j = 1 - 2 x_j is the Pauli-Z eigenvalue of qubit j, and the keys
    of ``coeffs`` are frozensets of qubit indices (the empty set holds the
    constant term).  Exact zeros are never stored.
    """

    coeffs: dict[frozenset, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for subset, c in self.coeffs.items():
            key = frozenset(int(j) for j in subset)
            c = float(c)
            if c != 0.0:
                clean[key] = clean.get(key, 0.0) + c
        self.coeffs = {k: v for k, v in clean.items() if v != 0.0}

    @classmethod
    def constant(cls, value: float) -> "ZPolynomial":
        return cls({frozenset(): 2.0 * value})

    @classmethod
    def from_x_linear(cls, constant: float, x_coeffs: Mapping[int, float]) -> "ZPolynomial":
        """Build from a0 + sum_j a_j x_j using x_j = (1 - z_j) / 2."""
        coeffs: dict[frozenset, float] = {}
        c0 = constant + 0.5 * sum(x_coeffs.values())
        coeffs[frozenset()] = 2.0 * c0
        for j, a in x_coeffs.items():
            coeffs[frozenset({j})] = -a
        return cls(coeffs)

    @property
    def constant_term(self) -> float:
        return 0.5 * self.coeffs.get(frozenset(), 0.0)

    def nonconstant(self) -> dict[frozenset, float]:
        return {s: c for s, c in self.coeffs.items() if s}

    def is_odd(self) -> bool:
        """True when every nonconstant term acts on an odd number of qubits."""
        return all(len(s) % 2 == 1 for s in self.nonconstant())

    def value(self, x: int) -> float:
        """Evaluate at the bitstring packed in ``x``."""
        total = 0.0
        for subset, c in self.coeffs.items():
            parity = sum((x >> j) & 1 for j in subset) & 1
            total += -c if parity else c
        return 0.5 * total

    def diagonal(self, n_qubits: int) -> np.ndarray:
        """Values over all 2^n bitstrings (vectorized)."""
        q = np.arange(1 << n_qubits)
        out = np.zeros(1 << n_qubits)
        for subset, c in self.coeffs.items():
            mask = 0
            for j in subset:
                mask |= 1 << j
            parity = np.bitwise_count(q & mask) & 1
            out += np.where(parity, -c, c)
        return 0.5 * out

    def scaled(self, factor: float) -> "ZPolynomial":
        return ZPolynomial({s: c * factor for s, c in self.coeffs.items()})

    def plus_constant(self, delta: float) -> "ZPolynomial":
        coeffs = dict(self.coeffs)
        coeffs[frozenset()] = coeffs.get(frozenset(), 0.0) + 2.0 * delta
        return ZPolynomial(coeffs)

    def __neg__(self) -> "ZPolynomial":
        return self.scaled(-1.0)

    def __add__(self, other: "ZPolynomial") -> "ZPolynomial":
        coeffs = dict(self.coeffs)
        for s, c in other.coeffs.items():
            coeffs[s] = coeffs.get(s, 0.0) + c
        return ZPolynomial(coeffs)

    def __mul__(self, other: "ZPolynomial") -> "ZPolynomial":
        # Z_S Z_T = Z_{S xor T}; the 1/2 prefactor folds one factor of 1/2
        # into each product coefficient.
        coeffs: dict[frozenset, float] = {}
        for s, cs in self.coeffs.items():
            for t, ct in other.coeffs.items():
                key = s ^ t
                coeffs[key] = coeffs.get(key, 0.0) + 0.5 * cs * ct
        return ZPolynomial(coeffs)

    def squared(self) -> "ZPolynomial":
        return self * self


# ---------------------------------------------------------------------------
# constraints
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PatternProjector:
    """Diagonal 0/1 indicator of one penalized assignment on a qubit subset."""

    qubits: tuple[int, ...]
    pattern: tuple[int, ...]

    def __post_init__(self):
        if len(self.qubits) != len(self.pattern):
            raise ValueError("qubits and pattern must have equal length")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("duplicate qubit in projector")
        if any(b not in (0, 1) for b in self.pattern):
            raise ValueError("pattern entries must be bits")

    def value(self, x: int) -> int:
        for j, b in zip(self.qubits, self.pattern):
            if (x >> j) & 1 != b:
                return 0
        return 1

    def indicator(self, n_qubits: int) -> np.ndarray:
        q = np.arange(1 << n_qubits)
        hit = np.ones(1 << n_qubits, dtype=bool)
        for j, b in zip(self.qubits, self.pattern):
            hit &= ((q >> j) & 1) == b
        return hit.astype(float)


@dataclass
class AffineForm:
    """Integer-valued affine function D(x) = constant + sum_j coeffs[j] * x_j."""

    constant: int
    coeffs: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        self.constant = int(self.constant)
        self.coeffs = {int(j): int(c) for j, c in self.coeffs.items() if int(c) != 0}

    def value(self, x: int) -> int:
        return self.constant + sum(c for j, c in self.coeffs.items() if (x >> j) & 1)

    def values(self, n_qubits: int) -> np.ndarray:
        q = np.arange(1 << n_qubits)
        out = np.full(1 << n_qubits, self.constant, dtype=np.int64)
        for j, c in self.coeffs.items():
            out += c * ((q >> j) & 1)
        return out

    def coefficient_gcd(self) -> int:
        """gcd of the nonzero variable coefficients (no constant)."""
        if not self.coeffs:
            raise InstanceRejected("inequality constraint has no variables")
        return math.gcd(*(abs(c) for c in self.coeffs.values()))

    def reduced(self) -> "AffineForm":
        """Divide every coefficient, constant included, by their common gcd.

        Zero entries contribute nothing to the gcd.
        """
        entries = [abs(c) for c in self.coeffs.values()]
        if self.constant != 0:
            entries.append(abs(self.constant))
        if not entries:
            raise InstanceRejected("inequality constraint is identically zero")
        g = math.gcd(*entries)
        return AffineForm(self.constant // g, {j: c // g for j, c in self.coeffs.items()})

    def upper_bound(self) -> int:
        """Sum of positive coefficients plus the constant: max of D over all x."""
        return self.constant + sum(c for c in self.coeffs.values() if c > 0)


def slack_value_set(form: AffineForm) -> list[int]:
    """Allowed slack values: the residue class of the constant modulo the
    coefficient gcd, intersected with [0, upper bound].

    The list defines the slack qudit attached to the constraint D(x) >= 0.
    Unreachable members of the residue class are deliberately kept.
    """
    g = form.coefficient_gcd()
    ub = form.upper_bound()
    values = list(range(form.constant % g, ub + 1, g))
    if not values:
        raise InstanceRejected(
            f"inequality constraint admits no slack value in [0, {ub}]"
        )
    return values


# ---------------------------------------------------------------------------
# problems and the oracle
# ---------------------------------------------------------------------------

@dataclass
class ConstrainedProblem:
    """Objective plus equality and inequality constraints over n binary variables."""

    n_vars: int
    objective: ZPolynomial
    equality_constraints: tuple = ()
    inequality_constraints: tuple[AffineForm, ...] = ()
    worst_feasible: int | None = None
    label: str = ""
    epsilon: float = 0.0
    source: dict | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.equality_constraints = tuple(self.equality_constraints)
        self.inequality_constraints = tuple(self.inequality_constraints)
        if self.worst_feasible is not None and self.n_vars <= 20:
            if not self.is_feasible(self.worst_feasible):
                raise ValueError("declared worst feasible bitstring violates a constraint")

    def equality_violation(self, x: int) -> float:
        total = 0.0
        for con in self.equality_constraints:
            total += con.value(x)
        return total

    def is_feasible(self, x: int) -> bool:
        if self.equality_violation(x) != 0:
            return False
        return all(form.value(x) >= 0 for form in self.inequality_constraints)

    def feasible_mask(self, assume_small: bool = False) -> np.ndarray:
        """Vectorized feasibility over all 2^n bitstrings."""
        if self.n_vars > 24 and not assume_small:
            raise ValueError("feasible_mask only supported up to 24 variables")
        dim = 1 << self.n_vars
        ok = np.ones(dim, dtype=bool)
        for con in self.equality_constraints:
            if isinstance(con, PatternProjector):
                ok &= con.indicator(self.n_vars) == 0.0
            else:
                ok &= con.diagonal(self.n_vars) == 0.0
        for form in self.inequality_constraints:
            ok &= form.values(self.n_vars) >= 0
        return ok


@dataclass
class OracleResult:
    """Feasible set, objective range, and extremal bitstrings from enumeration."""

    feasible: np.ndarray
    energies: np.ndarray
    e_best: float
    e_worst: float
    best: np.ndarray
    worst: np.ndarray


def brute_force_solve(problem: ConstrainedProblem,
                      reject_degenerate: bool = True) -> OracleResult:
    """Enumerate all bitstrings of an instance with at most 24 variables.

    Raises :class:`InstanceRejected` when no bitstring is feasible, and, by
    default, also when every bitstring is feasible or when the objective is
    constant on the feasible set (both make the approximation ratio
    meaningless).
    """
    n = problem.n_vars
    if n > 24:
        raise ValueError(f"brute force limited to 24 variables, got {n}")
    mask = problem.feasible_mask()
    feasible = np.flatnonzero(mask)
    if feasible.size == 0:
        raise InstanceRejected("no feasible bitstring")
    if reject_degenerate and feasible.size == (1 << n):
        raise InstanceRejected("every bitstring is feasible")
    energies = np.array([problem.objective.value(int(x)) for x in feasible])
    e_best = float(energies.min())
    e_worst = float(energies.max())
    scale = max(1.0, abs(e_best), abs(e_worst))
    if reject_degenerate and e_worst - e_best <= TIE_TOL * scale:
        raise InstanceRejected("objective is constant on the feasible set")
    if e_best == e_worst:
        return OracleResult(feasible, energies, e_best, e_worst, feasible, feasible)
    ratio = (energies - e_worst) / (e_best - e_worst)
    best = feasible[ratio >= 1.0 - TIE_TOL]
    worst = feasible[ratio <= TIE_TOL]
    return OracleResult(feasible, energies, e_best, e_worst, best, worst)


# ---------------------------------------------------------------------------
# encoders
# ---------------------------------------------------------------------------

def _check_simple_edges(n: int, edges: Iterable[Sequence[int]], directed: bool):
    seen = set()
    out = []
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u},{v}) out of range for {n} vertices")
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        out.append(key)
    return out


def encode_mis(n_vertices: int, edges: Iterable[Sequence[int]]) -> ConstrainedProblem:
    """Maximum independent set: maximize the selected-vertex count subject to
    no selected pair sharing an edge.

    Encoded as minimization of -sum_v x_v with one |11><11| projector per
    edge; the empty set is the worst feasible solution.
    """
    edges = _check_simple_edges(n_vertices, edges, directed=False)
    objective = ZPolynomial.from_x_linear(0.0, {v: -1.0 for v in range(n_vertices)})
    constraints = tuple(PatternProjector((u, v), (1, 1)) for u, v in edges)
    return ConstrainedProblem(
        n_vars=n_vertices,
        objective=objective,
        equality_constraints=constraints,
        worst_feasible=0,
        source={"kind": "mis", "n": n_vertices, "edges": [list(e) for e in edges]},
    )


def encode_dmds(n_vertices: int, edges: Iterable[Sequence[int]]) -> ConstrainedProblem:
    """Directed minimum dominating set: minimize the selected-vertex count,
    requiring every vertex to be selected or to have a selected in-neighbor.

    One all-zeros projector per vertex over {v} and its in-neighbors; the
    all-inclusive set is the worst feasible solution.
    """
    edges = _check_simple_edges(n_vertices, edges, directed=True)
    in_neighbors: dict[int, list[int]] = {v: [] for v in range(n_vertices)}
    for u, v in edges:
        in_neighbors[v].append(u)
    objective = ZPolynomial.from_x_linear(0.0, {v: 1.0 for v in range(n_vertices)})
    constraints = []
    for v in range(n_vertices):
        qubits = (v, *sorted(in_neighbors[v]))
        constraints.append(PatternProjector(qubits, (0,) * len(qubits)))
    return ConstrainedProblem(
        n_vars=n_vertices,
        objective=objective,
        equality_constraints=tuple(constraints),
        worst_feasible=(1 << n_vertices) - 1,
        source={"kind": "dmds", "n": n_vertices, "edges": [list(e) for e in edges]},
    )


def encode_knapsack(values: Sequence[int], weights: Sequence[int],
                    capacity: int) -> ConstrainedProblem:
    """Knapsack: maximize packed value subject to total weight <= capacity.

    Encoded as minimization of -sum_i v_i x_i with the single inequality
    capacity - sum_i w_i x_i >= 0; the empty knapsack is the worst feasible
    solution.  Items heavier than the capacity are rejected outright.
    """
    values = [int(v) for v in values]
    weights = [int(w) for w in weights]
    capacity = int(capacity)
    if len(values) != len(weights):
        raise ValueError("values and weights must have equal length")
    if not values:
        raise InstanceRejected("knapsack instance has no items")
    if any(v <= 0 for v in values) or any(w <= 0 for w in weights):
        raise ValueError("item values and weights must be positive integers")
    if any(w > capacity for w in weights):
        raise InstanceRejected("an item weighs more than the knapsack capacity")
    n = len(values)
    objective = ZPolynomial.from_x_linear(0.0, {i: -float(values[i]) for i in range(n)})
    form = AffineForm(capacity, {i: -weights[i] for i in range(n)})
    return ConstrainedProblem(
        n_vars=n,
        objective=objective,
        inequality_constraints=(form,),
        worst_feasible=0,
        source={"kind": "knapsack", "n": n, "values": values, "weights": weights,
                "capacity": capacity},
    )


def encode_auction(payments: Sequence[float], quantities: Sequence[Sequence[int]],
                   multiplicities: Sequence[int]) -> ConstrainedProblem:
    """Combinatorial auction: accept bids maximizing payments without
    overselling any item.

    Bid b requests quantities[b][i] units of item i, available with
    multiplicity m_i.  One inequality m_i - sum_b q_bi x_b >= 0 per item;
    the empty acceptance is the worst feasible solution.  Bids that alone
    exceed inventory are rejected: they could never be accepted.
    """
    payments = [float(p) for p in payments]
    multiplicities = [int(m) for m in multiplicities]
    quantities = [[int(q) for q in row] for row in quantities]
    if not payments:
        raise InstanceRejected("auction has no bids")
    if len(quantities) != len(payments):
        raise ValueError("one quantity row per bid required")
    n_items = len(multiplicities)
    if any(len(row) != n_items for row in quantities):
        raise ValueError("every quantity row must cover all items")
    if any(p <= 0 for p in payments):
        raise ValueError("payments must be positive")
    if any(m <= 0 for m in multiplicities):
        raise ValueError("multiplicities must be positive")
    if any(q < 0 for row in quantities for q in row):
        raise ValueError("quantities must be nonnegative")
    for b, row in enumerate(quantities):
        if any(q > m for q, m in zip(row, multiplicities)):
            raise InstanceRejected(f"bid {b} alone exceeds the inventory")
    n = len(payments)
    objective = ZPolynomial.from_x_linear(0.0, {b: -payments[b] for b in range(n)})
    forms = []
    for i in range(n_items):
        coeffs = {b: -quantities[b][i] for b in range(n) if quantities[b][i] > 0}
        if coeffs:
            forms.append(AffineForm(multiplicities[i], coeffs))
    return ConstrainedProblem(
        n_vars=n,
        objective=objective,
        inequality_constraints=tuple(forms),
        worst_feasible=0,
        source={"kind": "auction", "n": n, "payments": payments,
                "quantities": quantities, "multiplicities": multiplicities},
    )


def encode_etf(weights: Sequence[float], prices: Sequence[float],
               sectors: Sequence[int], shares: int, band: float,
               scale: int = 10, enforced_sector: int = 0) -> ConstrainedProblem:
    """Basket-fee minimization for an exchange-traded fund.

    The objective is the squared cash mismatch between the basket price and
    the net asset value of ``shares`` fund shares.  One sector-exposure upper
    bound is enforced: (1 + band) * (sector weight) * basket size must not be
    exceeded by the in-sector count, with coefficients scaled by ``scale``
    and rounded to integers.  The empty basket is the worst feasible
    solution.  Degenerate instances (all feasible, constant feasible
    objective, or an empty basket that is not actually worst) are rejected.
    """
    weights = [float(w) for w in weights]
    prices = [float(p) for p in prices]
    sectors = [int(s) for s in sectors]
    n = len(weights)
    if len(prices) != n or len(sectors) != n:
        raise ValueError("weights, prices, and sectors must have equal length")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("asset weights must sum to 1")
    if any(p <= 0 for p in prices):
        raise ValueError("asset prices must be positive")
    nav = sum(w * p for w, p in zip(weights, prices))
    mismatch = ZPolynomial.from_x_linear(shares * nav, {a: -prices[a] for a in range(n)})
    objective = mismatch.squared()

    sector_weight = sum(w for w, s in zip(weights, sectors) if s == enforced_sector)
    upper = (1.0 + band) * sector_weight
    coeffs = {}
    for a in range(n):
        c = round(scale * upper) - (scale if sectors[a] == enforced_sector else 0)
        if c != 0:
            coeffs[a] = c
    form = AffineForm(0, coeffs)

    problem = ConstrainedProblem(
        n_vars=n,
        objective=objective,
        inequality_constraints=(form,),
        worst_feasible=0,
        epsilon=0.01,
        source={"kind": "etf", "n": n, "weights": weights, "prices": prices,
                "sectors": sectors, "shares": int(shares), "band": float(band),
                "scale": int(scale), "enforced_sector": int(enforced_sector)},
    )
    if not form.coeffs:
        raise InstanceRejected("sector constraint is identically zero")
    if n <= 20:
        oracle = brute_force_solve(problem)  # raises on degenerate instances
        if abs(problem.objective.value(0) - oracle.e_worst) > TIE_TOL * max(1.0, abs(oracle.e_worst)):
            raise InstanceRejected("empty basket does not attain the worst feasible fee")
    return problem


# ---------------------------------------------------------------------------
# random instance generation (counter-based streams, one per attempt)
# ---------------------------------------------------------------------------

MAX_GENERATOR_ATTEMPTS = 1000


def _stream(seed: int, attempt: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, attempt])))


def gen_erdos_renyi(n: int, p: float, seed,
                    directed: bool = False) -> list[tuple[int, int]]:
    """Random graph: each vertex pair becomes an edge with probability p.

    Directed graphs orient each created edge uniformly at random.  The edge
    list is a deterministic function of the seed (an int, or an already
    seeded generator).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    rng = seed if isinstance(seed, np.random.Generator) else _stream(int(seed))
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                if directed and rng.random() < 0.5:
                    edges.append((j, i))
                else:
                    edges.append((i, j))
    return edges


def _generate(seed: int, label: str, make) -> ConstrainedProblem:
    for attempt in range(MAX_GENERATOR_ATTEMPTS):
        rng = _stream(seed, attempt)
        try:
            problem = make(rng)
            if problem.n_vars <= 20:
                brute_force_solve(problem)
        except InstanceRejected:
            continue
        problem.label = label
        problem.meta.update({"seed": int(seed), "attempts": attempt + 1})
        return problem
    raise RuntimeError(f"no acceptable instance after {MAX_GENERATOR_ATTEMPTS} attempts "
                       f"({label})")


def gen_mis_instance(n: int, seed: int, p: float = 0.3) -> ConstrainedProblem:
    def make(rng):
        return encode_mis(n, gen_erdos_renyi(n, p, rng))
    return _generate(seed, f"mis-n{n}-s{seed}", make)


def gen_dmds_instance(n: int, seed: int, p: float = 0.3) -> ConstrainedProblem:
    def make(rng):
        return encode_dmds(n, gen_erdos_renyi(n, p, rng, directed=True))
    return _generate(seed, f"dmds-n{n}-s{seed}", make)


def gen_knapsack_instance(n: int, seed: int) -> ConstrainedProblem:
    """Uniform random knapsack: values and weights in [1, 2n], capacity 2n.

    A plain sampler for benchmarks and tests; it is not a hard-instance
    family.
    """
    def make(rng):
        values = rng.integers(1, 2 * n + 1, size=n).tolist()
        weights = rng.integers(1, 2 * n + 1, size=n).tolist()
        return encode_knapsack(values, weights, 2 * n)
    return _generate(seed, f"knapsack-n{n}-s{seed}", make)


def gen_auction_instance(n_bids: int, seed: int, n_items: int = 3) -> ConstrainedProblem:
    """Random single-unit auction: unit multiplicities, 0/1 baskets, integer payments."""
    def make(rng):
        quantities = []
        for _ in range(n_bids):
            row = rng.integers(0, 2, size=n_items)
            while not row.any():
                row = rng.integers(0, 2, size=n_items)
            quantities.append(row.tolist())
        payments = rng.integers(1, 2 * n_bids + 1, size=n_bids).tolist()
        return encode_auction(payments, quantities, [1] * n_items)
    return _generate(seed, f"auction-n{n_bids}-s{seed}", make)


def gen_etf_instance(n: int, seed: int) -> ConstrainedProblem:
    """Random fund-basket instance: uniform weights (normalized), prices from
    N(1, 0.1), three sectors assigned uniformly, band 0.1, shares ceil(n/2 + 1).
    """
    if n < 2:
        raise ValueError("need at least two assets")
    shares = math.ceil(n / 2 + 1)

    def make(rng):
        weights = rng.random(n)
        while (weights == 0).any():
            weights = rng.random(n)
        weights = (weights / weights.sum()).tolist()
        prices = rng.normal(1.0, 0.1, size=n)
        if (prices <= 0).any():
            raise InstanceRejected("sampled a nonpositive price")
        sectors = rng.integers(0, 3, size=n).tolist()
        return encode_etf(weights, prices.tolist(), sectors, shares, band=0.1)
    return _generate(seed, f"etf-n{n}-s{seed}", make)


# ---------------------------------------------------------------------------
# instance files
# ---------------------------------------------------------------------------

_KINDS = ("mis", "dmds", "knapsack", "auction", "etf")


def _field(payload: dict, name: str, kind):
    if name not in payload:
        raise ParseError(f"missing field {name!r}")
    value = payload[name]
    if kind is int and isinstance(value, bool):
        raise ParseError(f"field {name!r} must be an integer")
    if kind in (int, float) and not isinstance(value, (int, float)):
        raise ParseError(f"field {name!r} must be a number")
    if kind is list and not isinstance(value, list):
        raise ParseError(f"field {name!r} must be a list")
    if kind is int and isinstance(value, float) and not value.is_integer():
        raise ParseError(f"field {name!r} must be an integer")
    return int(value) if kind is int else value


def save_instance(problem: ConstrainedProblem, path) -> None:
    """Write the raw instance payload as JSON (loaders re-encode it)."""
    if problem.source is None:
        raise ValueError("problem carries no raw instance payload to save")
    path = Path(path)
    path.write_text(json.dumps(problem.source, sort_keys=True, indent=1) + "\n",
                    encoding="utf-8")


def load_instance(path) -> ConstrainedProblem:
    """Read an instance file and encode it; save then load is the identity."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: top level must be an object")
    try:
        kind = payload.get("kind")
        if kind not in _KINDS:
            raise ParseError(f"unknown problem kind {kind!r}")
        n = _field(payload, "n", int)
        if kind in ("mis", "dmds"):
            edges = _field(payload, "edges", list)
            for e in edges:
                if not (isinstance(e, list) and len(e) == 2):
                    raise ParseError("field 'edges' must hold vertex pairs")
            problem = (encode_mis if kind == "mis" else encode_dmds)(n, edges)
        elif kind == "knapsack":
            problem = encode_knapsack(
                _field(payload, "values", list),
                _field(payload, "weights", list),
                _field(payload, "capacity", int),
            )
        elif kind == "auction":
            problem = encode_auction(
                _field(payload, "payments", list),
                _field(payload, "quantities", list),
                _field(payload, "multiplicities", list),
            )
        else:
            problem = encode_etf(
                _field(payload, "weights", list),
                _field(payload, "prices", list),
                _field(payload, "sectors", list),
                _field(payload, "shares", int),
                band=_field(payload, "band", float),
                scale=_field(payload, "scale", int) if "scale" in payload else 10,
                enforced_sector=_field(payload, "enforced_sector", int)
                if "enforced_sector" in payload else 0,
            )
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceRejected):
            raise
        raise ParseError(f"{path}: {exc}") from None
    if problem.n_vars != n:
        raise ParseError(f"{path}: field 'n' is {n} but payload encodes {problem.n_vars} variables")
    problem.label = path.stem
    return problem
