"""Linear weighted relations over the reals and the LP route to their optimum.

When every rho in an instance is linear, the assignment score is a
pointwise maximum of finitely many affine functions of the (real-valued)
assignment, so its minimisation is a linear program: minimise alpha
subject to one affine lower bound per scoped tuple.  The solver is an
exact two-phase simplex over Fractions with Bland's rule, and programs
serialise to a plain LP text format that round-trips losslessly.

Quasiconvexity of a black-box function can only be refuted here: the
falsifier searches a finite grid of endpoint pairs and mixing weights for
a point where the mixture scores strictly above both endpoints.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import quantale as qv
from .errors import FormatError, MismatchError


def _rational(x, what):
    try:
        return Fraction(x)
    except (TypeError, ValueError, OverflowError):
        raise ValueError(f"{what} {x!r} is not rational") from None


@dataclass(frozen=True)
class LinearRel:
    """A linear weighted relation d |-> sum of weights[j] * d[j]."""

    weights: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "weights", tuple(_rational(w, "weight") for w in self.weights)
        )

    @property
    def arity(self) -> int:
        return len(self.weights)

    def value(self, point: Sequence[Fraction]) -> Fraction:
        return sum(
            (w * Fraction(p) for w, p in zip(self.weights, point)), Fraction(0)
        )


@dataclass(frozen=True)
class LinearConstraint:
    arity: int
    sigma: tuple  # ((variable-name tuple, Fraction weight), ...)
    rel: LinearRel

    def __post_init__(self):
        cleaned = []
        for x, weight in self.sigma:
            x = tuple(x)
            if len(x) != self.arity:
                raise MismatchError(f"scope tuple {x!r} has the wrong arity")
            cleaned.append((x, _rational(weight, "scope weight")))
        object.__setattr__(self, "sigma", tuple(cleaned))
        if self.rel.arity != self.arity:
            raise MismatchError("relation arity differs from the constraint arity")


@dataclass(frozen=True)
class LinearInstance:
    """A tropical instance over the real line: all relations linear."""

    variables: tuple
    constraints: tuple

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        known = set(self.variables)
        for c in self.constraints:
            for x, _ in c.sigma:
                for v in x:
                    if v not in known:
                        raise FormatError(f"scope mentions unknown variable {v!r}")


@dataclass(frozen=True)
class LpRow:
    """The bound alpha >= sum(coeffs[v] * s(v)) + constant."""

    name: str
    coeffs: tuple  # ((variable-name, Fraction), ...) in variable order
    constant: Fraction

    def coeff_map(self):
        return dict(self.coeffs)


@dataclass(frozen=True)
class LinearProgram:
    variables: tuple
    rows: tuple


def build_lp(instance: LinearInstance) -> LinearProgram:
    """One row per (constraint, scoped tuple): alpha >= rel(s∘x) - sigma(x)."""
    rows = []
    for c in instance.constraints:
        for x, weight in c.sigma:
            acc = {v: Fraction(0) for v in instance.variables}
            for w, v in zip(c.rel.weights, x):
                acc[v] += w
            coeffs = tuple(
                (v, acc[v]) for v in instance.variables if acc[v] != 0
            )
            rows.append(LpRow(f"r{len(rows)}", coeffs, -weight))
    return LinearProgram(instance.variables, tuple(rows))


def eval_linear_instance(instance: LinearInstance, point: dict) -> qv.QuantaleValue:
    """The assignment score at a real point: max over rows, -inf when empty."""
    best = None
    for c in instance.constraints:
        for x, weight in c.sigma:
            term = c.rel.value([point[v] for v in x]) - weight
            if best is None or term > best:
                best = term
    return qv.RBAR.neg_inf if best is None else qv.RBAR.of(best)


# ---------------------------------------------------------------------------
# exact two-phase simplex


@dataclass(frozen=True)
class LpOptimal:
    value: Fraction
    point: dict
    pivots: int


@dataclass(frozen=True)
class LpUnbounded:
    pivots: int


@dataclass(frozen=True)
class LpInfeasible:
    pivots: int


class _Tableau:
    """Equality-form tableau m x (n+1) with an explicit basis, exact pivots."""

    def __init__(self, matrix, rhs, basis):
        self.matrix = matrix  # list of rows of Fractions
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    def reduced_costs(self, cost):
        m = len(self.matrix)
        ncols = len(cost)
        cb = [cost[self.basis[i]] for i in range(m)]
        out = list(cost)
        for i in range(m):
            ci = cb[i]
            if ci == 0:
                continue
            row = self.matrix[i]
            for j in range(ncols):
                if row[j]:
                    out[j] -= ci * row[j]
        return out

    def objective(self, cost):
        return sum(
            (cost[self.basis[i]] * self.rhs[i] for i in range(len(self.matrix))),
            Fraction(0),
        )

    def pivot(self, row, col):
        self.pivots += 1
        piv = self.matrix[row][col]
        inv = Fraction(1) / piv
        self.matrix[row] = [a * inv for a in self.matrix[row]]
        self.rhs[row] *= inv
        prow = self.matrix[row]
        prhs = self.rhs[row]
        for i in range(len(self.matrix)):
            if i == row:
                continue
            factor = self.matrix[i][col]
            if factor:
                self.matrix[i] = [
                    a - factor * p for a, p in zip(self.matrix[i], prow)
                ]
                self.rhs[i] -= factor * prhs
        self.basis[row] = col

    def run(self, cost, allowed_cols, max_pivots):
        """Minimise cost with Bland's rule; True when optimal, False when unbounded."""
        while True:
            if self.pivots > max_pivots:
                raise RuntimeError("pivot budget exhausted (cycling?)")
            reduced = self.reduced_costs(cost)
            entering = None
            for j in allowed_cols:
                if reduced[j] < 0:
                    entering = j
                    break
            if entering is None:
                return True
            best_ratio = None
            leaving = None
            for i in range(len(self.matrix)):
                a = self.matrix[i][entering]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and self.basis[i] < self.basis[leaving])
                    ):
                        best_ratio = ratio
                        leaving = i
            if leaving is None:
                return False
            self.pivot(leaving, entering)


def _simplex_min(cost, A, b, max_pivots):
    """Minimise cost.x over Ax >= b with x free; exact rational arithmetic.

    Free variables are split into differences of nonnegatives and surplus
    variables close the inequalities; phase 1 minimises artificials.
    """
    m = len(A)
    n = len(cost)
    ncols = 2 * n + m
    matrix = []
    rhs = []
    for i in range(m):
        row = [Fraction(0)] * (ncols + m)
        for j in range(n):
            row[j] = A[i][j]
            row[n + j] = -A[i][j]
        row[2 * n + i] = Fraction(-1)
        bi = b[i]
        if bi < 0:
            row = [-a for a in row]
            bi = -bi
        row[ncols + i] = Fraction(1)  # artificial
        matrix.append(row)
        rhs.append(bi)
    basis = [ncols + i for i in range(m)]
    tab = _Tableau(matrix, rhs, basis)

    if m:
        phase1 = [Fraction(0)] * ncols + [Fraction(1)] * m
        tab.run(phase1, range(ncols + m), max_pivots)
        if tab.objective(phase1) != 0:
            return LpInfeasible(tab.pivots)
        # drive leftover artificials out of the basis or drop their rows
        drop = []
        for i in range(m):
            if tab.basis[i] >= ncols:
                pivot_col = next(
                    (j for j in range(ncols) if tab.matrix[i][j] != 0), None
                )
                if pivot_col is None:
                    drop.append(i)
                else:
                    tab.pivot(i, pivot_col)
        for i in sorted(drop, reverse=True):
            del tab.matrix[i]
            del tab.rhs[i]
            del tab.basis[i]
        tab.matrix = [row[:ncols] for row in tab.matrix]

    phase2 = [Fraction(0)] * ncols
    for j in range(n):
        phase2[j] = cost[j]
        phase2[n + j] = -cost[j]
    if not tab.run(phase2, range(ncols), max_pivots):
        return LpUnbounded(tab.pivots)
    values = [Fraction(0)] * ncols
    for i, col in enumerate(tab.basis):
        values[col] = tab.rhs[i]
    x = [values[j] - values[n + j] for j in range(n)]
    value = sum((c * v for c, v in zip(cost, x)), Fraction(0))
    return LpOptimal(value, x, tab.pivots)


def solve_lp(lp: LinearProgram, max_pivots: int = 100_000):
    """Exact optimum of `minimise alpha subject to the rows`.

    Never infeasible for programs built from instances (alpha can always
    be pushed up); unboundedness encodes an optimum of -inf.
    """
    names = list(lp.variables)
    index = {v: j for j, v in enumerate(names)}
    n = len(names) + 1  # trailing slot is alpha
    cost = [Fraction(0)] * n
    cost[-1] = Fraction(1)
    A = []
    b = []
    for row in lp.rows:
        arow = [Fraction(0)] * n
        for v, c in row.coeffs:
            arow[index[v]] -= c
        arow[-1] = Fraction(1)
        A.append(arow)
        b.append(row.constant)
    result = _simplex_min(cost, A, b, max_pivots)
    if isinstance(result, LpOptimal):
        point = {v: result.point[j] for j, v in enumerate(names)}
        point["alpha"] = result.point[-1]
        return LpOptimal(result.value, point, result.pivots)
    return result


# ---------------------------------------------------------------------------
# LP text format


def _decimal_or_none(q: Fraction) -> Optional[str]:
    """Exact decimal rendering, or None when the denominator is not 2^a 5^b."""
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    shift = max(twos, fives)
    scaled = q.numerator * 10**shift // q.denominator
    if shift == 0:
        return str(scaled)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(shift + 1, "0")
    return f"{sign}{digits[:-shift]}.{digits[-shift:]}"


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _render_terms(alpha_coeff: Fraction, terms, render) -> str:
    parts = [f"{render(alpha_coeff)} a" if alpha_coeff != 1 else "a"]
    for name, coeff in terms:
        if coeff == 0:
            continue
        sign = "+" if coeff > 0 else "-"
        mag = abs(coeff)
        mag_s = "" if mag == 1 else f"{render(mag)} "
        parts.append(f"{sign} {mag_s}s_{name}")
    return " ".join(parts)


def emit_lp_file(lp: LinearProgram) -> str:
    """Serialise to LP text: minimise a, one >= row per bound, all free.

    Rows whose numbers have no exact decimal form are cleared of
    denominators by a positive scale (sound for >= rows); the scale is
    recorded in a comment so parsing recovers the original coefficients.
    """
    lines = ["Minimize", " obj: a", "Subject To"]
    for row in lp.rows:
        # LHS of `a - sum(c_v s_v) >= constant`
        lhs_terms = [(v, -c) for v, c in row.coeffs]
        numbers = [c for _, c in lhs_terms] + [row.constant]
        if all(_decimal_or_none(q) is not None for q in numbers):
            body = _render_terms(Fraction(1), lhs_terms, _decimal_or_none)
            lines.append(f" {row.name}: {body} >= {_decimal_or_none(row.constant)}")
        else:
            scale = 1
            for q in numbers:
                scale = _lcm(scale, q.denominator)
            lines.append(f"\\ {row.name} scaled by {scale}")
            scaled = [(v, c * scale) for v, c in lhs_terms]
            body = _render_terms(Fraction(scale), scaled, lambda q: str(q.numerator))
            lines.append(
                f" {row.name}: {body} >= {(row.constant * scale).numerator}"
            )
    lines.append("Bounds")
    lines.append(" a free")
    for v in lp.variables:
        lines.append(f" s_{v} free")
    lines.append("End")
    return "\n".join(lines) + "\n"


_TERM_RE = re.compile(r"([+-]?)\s*(\d+(?:\.\d+)?)?\s*(a\b|s_\S+)")


def parse_lp_file(text: str) -> LinearProgram:
    """Parse the emitted LP format back into a LinearProgram."""
    section = None
    variables = []
    rows = []
    pending_scale = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            m = re.match(r"\\\s*(\S+) scaled by (\d+)$", line)
            if m:
                pending_scale[m.group(1)] = int(m.group(2))
            continue
        lowered = line.lower()
        if lowered == "minimize":
            section = "objective"
            continue
        if lowered == "subject to":
            section = "rows"
            continue
        if lowered == "bounds":
            section = "bounds"
            continue
        if lowered == "end":
            break
        if section == "objective":
            if line.replace(" ", "") != "obj:a":
                raise FormatError("objective must be `obj: a`", line=lineno)
        elif section == "rows":
            if ":" not in line or ">=" not in line:
                raise FormatError("malformed constraint row", line=lineno)
            name, rest = line.split(":", 1)
            name = name.strip()
            lhs, rhs = rest.split(">=")
            constant = Fraction(rhs.strip())
            alpha_coeff = Fraction(0)
            coeffs = {}
            for sign, mag, var in _TERM_RE.findall(lhs):
                value = Fraction(mag) if mag else Fraction(1)
                if sign == "-":
                    value = -value
                if var == "a":
                    alpha_coeff += value
                else:
                    coeffs[var[2:]] = coeffs.get(var[2:], Fraction(0)) - value
            scale = Fraction(pending_scale.pop(name, 1))
            if alpha_coeff != scale:
                raise FormatError(
                    f"row {name}: alpha coefficient {alpha_coeff} != scale {scale}",
                    line=lineno,
                )
            rows.append(
                LpRow(
                    name,
                    tuple((v, c / scale) for v, c in coeffs.items()),
                    constant / scale,
                )
            )
        elif section == "bounds":
            parts = line.split()
            if len(parts) != 2 or parts[1].lower() != "free":
                raise FormatError("only free bounds are supported", line=lineno)
            if parts[0] != "a":
                if not parts[0].startswith("s_"):
                    raise FormatError(f"unknown variable {parts[0]!r}", line=lineno)
                variables.append(parts[0][2:])
        elif section is None:
            raise FormatError("content before Minimize section", line=lineno)
    order = {v: i for i, v in enumerate(variables)}
    rows = [
        LpRow(
            r.name,
            tuple(sorted(r.coeffs, key=lambda vc: order.get(vc[0], 0))),
            r.constant,
        )
        for r in rows
    ]
    return LinearProgram(tuple(variables), tuple(rows))


# ---------------------------------------------------------------------------
# quasiconvexity falsification


DEFAULT_SAMPLES = tuple(
    (Fraction(i),) for i in range(-2, 3)
)
DEFAULT_LAMBDAS = (
    Fraction(0),
    Fraction(1, 4),
    Fraction(1, 2),
    Fraction(3, 4),
    Fraction(1),
)


def _score(value):
    if isinstance(value, qv.QuantaleValue):
        if value.quantale is not qv.RBAR:
            raise ValueError("evaluator must produce extended reals")
        return value.payload
    if isinstance(value, float):
        if value in (math.inf, -math.inf):
            return value
        raise ValueError("non-infinite float from evaluator; return Fraction")
    return Fraction(value)


def quasiconvexity_falsify(
    fn: Callable, samples=DEFAULT_SAMPLES, lambdas=DEFAULT_LAMBDAS
) -> Optional[tuple]:
    """First grid witness that a mixture scores above both endpoints.

    Returns (x, y, lam) with max(fn(x), fn(y)) < fn(lam*x + (1-lam)*y), or
    None when the grid exhibits no violation (which proves nothing).
    """
    samples = [tuple(Fraction(c) for c in (p if isinstance(p, (tuple, list)) else (p,))) for p in samples]
    lambdas = [Fraction(l) for l in lambdas]
    cache = {p: _score(fn(p)) for p in samples}
    for x in samples:
        for y in samples:
            vx, vy = cache[x], cache[y]
            bound = vx if vx >= vy else vy
            for lam in lambdas:
                mid = tuple(lam * a + (1 - lam) * b for a, b in zip(x, y))
                if bound < _score(fn(mid)):
                    return (x, y, lam)
    return None
