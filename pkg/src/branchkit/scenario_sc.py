"""Set-up tables, reduced-state separability checks, and exact credence solving.

A set-up table lists the decohered branches of one possible universe as
columns over a fixed list of displays. Credences are derived by combining
three kinds of constraints: reduced-state equality between set-ups on the
subsystem containing the agent and one display (checked numerically, never
assumed), same-branch identities within a set-up (two symbols occurring in
exactly the same columns name the same branch), and normalization. The
constraint system is solved exactly over rationals.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .errors import (
    CapacityError,
    ConstructionError,
    ContradictionError,
    DegenerateTableError,
    InsufficientSetupsError,
    LayoutError,
    ParameterError,
    UnsupportedWeightsError,
)
from .branching import MacrostatePartition
from .hilbert import DensityMatrix, SubsystemLayout, partial_trace

__all__ = [
    "SetupTable",
    "SetupColumn",
    "SymbolClass",
    "DerivationStep",
    "CredenceSolution",
    "as_fraction",
    "build_setup",
    "reduced_display_state",
    "esp_equal",
    "same_branch_classes",
    "solve_credences",
    "general_strategy_tables",
]

AGENT_LABEL = "A"
ENV_LABEL = "E"


def as_fraction(value) -> Fraction:
    """Parse an exact rational from a Fraction, int, or 'k/N' string.

    Floats are rejected: credence bookkeeping is exact by design.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise UnsupportedWeightsError(f"unreadable rational {value!r}") from exc
    raise UnsupportedWeightsError(f"weights must be exact rationals, got {type(value).__name__}")


@dataclass(frozen=True)
class SetupColumn:
    """One branch: a symbol for every display, plus an exact weight."""

    symbols: tuple[tuple[str, str], ...]
    weight: Fraction

    def symbol(self, display: str) -> str:
        for d, s in self.symbols:
            if d == display:
                return s
        raise LayoutError(f"column has no display {display!r}")


@dataclass(frozen=True, eq=False)
class SetupTable:
    """A labeled grid of display symbols: one column per decohered branch.

    ``outcome_display`` names the display carrying the measurement outcomes
    (defaults to the first display). ``env_tags`` optionally names the
    per-column environment records; when omitted each column gets its own
    orthonormal tag, which is what makes identical display columns distinct
    branches.
    """

    setup_label: str
    displays: tuple[str, ...]
    columns: tuple[SetupColumn, ...]
    outcome_display: str
    env_tags: tuple[str, ...] | None

    def __init__(self, setup_label: str, displays: Sequence[str],
                 columns: Sequence[Mapping[str, str] | SetupColumn],
                 weights: Sequence[object] | None = None,
                 outcome_display: str | None = None,
                 env_tags: Sequence[str] | None = None):
        displays = tuple(str(d) for d in displays)
        if not displays:
            raise ParameterError("a set-up needs at least one display")
        if len(set(displays)) != len(displays):
            raise ParameterError(f"duplicate display labels in {displays}")
        for reserved in (AGENT_LABEL, ENV_LABEL):
            if reserved in displays:
                raise ParameterError(f"display label {reserved!r} is reserved")
        if not columns:
            raise ParameterError("a set-up needs at least one column")

        built: list[SetupColumn] = []
        for i, col in enumerate(columns):
            if isinstance(col, SetupColumn):
                built.append(col)
                continue
            if weights is None:
                raise ParameterError("weights are required when columns are plain mappings")
            missing = [d for d in displays if d not in col]
            if missing:
                raise ParameterError(f"column {i} is missing displays {missing}")
            extra = [d for d in col if d not in displays]
            if extra:
                raise ParameterError(f"column {i} names unknown displays {extra}")
            built.append(SetupColumn(tuple((d, str(col[d])) for d in displays),
                                     as_fraction(weights[i])))
        for i, col in enumerate(built):
            if col.weight <= 0:
                raise UnsupportedWeightsError(f"column {i} weight {col.weight} is not positive")
        total = sum(col.weight for col in built)
        if total != 1:
            raise UnsupportedWeightsError(f"column weights sum to {total}, not 1")

        outcome = str(outcome_display) if outcome_display is not None else displays[0]
        if outcome not in displays:
            raise ParameterError(f"outcome display {outcome!r} is not among {displays}")

        tags = None
        if env_tags is not None:
            tags = tuple(str(t) for t in env_tags)
            if len(tags) != len(built):
                raise ParameterError(f"{len(tags)} environment tags for {len(built)} columns")

        object.__setattr__(self, "setup_label", str(setup_label))
        object.__setattr__(self, "displays", displays)
        object.__setattr__(self, "columns", tuple(built))
        object.__setattr__(self, "outcome_display", outcome)
        object.__setattr__(self, "env_tags", tags)

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    def display_symbols(self, display: str) -> tuple[str, ...]:
        """Distinct symbols shown by a display, sorted (this fixes the basis order)."""
        return tuple(sorted({col.symbol(display) for col in self.columns}))

    def columns_showing(self, display: str, symbol: str) -> frozenset[int]:
        return frozenset(i for i, col in enumerate(self.columns) if col.symbol(display) == symbol)


@dataclass(frozen=True)
class SymbolClass:
    """Symbols that occur in exactly the same set of columns of one set-up."""

    atoms: tuple[tuple[str, str], ...]  # (display, symbol) pairs
    columns: frozenset[int]


def same_branch_classes(table: SetupTable) -> tuple[SymbolClass, ...]:
    """Group (display, symbol) atoms by their column sets.

    Two symbols in one class pick out the same branches, so any rational
    credence assignment must treat them alike.
    """
    by_columns: dict[frozenset[int], list[tuple[str, str]]] = {}
    for d in table.displays:
        for s in table.display_symbols(d):
            by_columns.setdefault(table.columns_showing(d, s), []).append((d, s))
    ordered = sorted(by_columns.items(), key=lambda kv: (min(kv[0]), sorted(kv[0]), kv[1]))
    return tuple(SymbolClass(tuple(atoms), cols) for cols, atoms in ordered)


def _setup_layout(table: SetupTable) -> SubsystemLayout:
    factors = [(d, len(table.display_symbols(d))) for d in table.displays]
    factors.append((AGENT_LABEL, 2))
    factors.append((ENV_LABEL, table.n_columns))
    return SubsystemLayout(factors)


def build_setup(table: SetupTable, tols: Tolerances = DEFAULT_TOLS,
                ) -> tuple[DensityMatrix, SubsystemLayout, MacrostatePartition]:
    """Materialize a set-up table as a decohered universal state.

    Each display becomes a tensor factor (one orthonormal basis state per
    symbol, in sorted order), the agent factor stays in its ready state in
    every branch, and each column receives its own environment record. The
    result is the weighted mixture of the column product states, so the
    macrostate partition (one projector per column, cut along the
    environment records) decomposes it exactly with the column weights.
    """
    env_index = {i: i for i in range(table.n_columns)}
    if table.env_tags is not None:
        distinct = sorted(set(table.env_tags))
        env_index = {i: distinct.index(tag) for i, tag in enumerate(table.env_tags)}
        seen: dict[tuple[int, tuple[tuple[str, str], ...]], int] = {}
        for i, col in enumerate(table.columns):
            key = (env_index[i], col.symbols)
            if key in seen:
                raise DegenerateTableError(
                    f"columns {seen[key]} and {i} of set-up {table.setup_label!r} agree on every "
                    "display and share one environment tag; they do not name distinct branches")
            seen[key] = i

    layout = _setup_layout(table)
    dim = layout.dim
    if dim > tols.max_dim:
        raise CapacityError(f"set-up dimension {dim} exceeds cap {tols.max_dim}")

    index_maps = {d: {s: i for i, s in enumerate(table.display_symbols(d))} for d in table.displays}
    state = np.zeros((dim, dim), dtype=np.complex128)
    for ci, col in enumerate(table.columns):
        flat = 0
        for label, fdim in layout.factors:
            if label == AGENT_LABEL:
                idx = 0
            elif label == ENV_LABEL:
                idx = env_index[ci]
            else:
                idx = index_maps[label][col.symbol(label)]
            flat = flat * fdim + idx
        state[flat, flat] += float(col.weight)
    rho = DensityMatrix(state, tols=tols)

    # one projector per branch, cut along the environment records; unused
    # record states are appended so the partition stays complete
    groups: dict[str, list[int]] = {}
    for ci in range(table.n_columns):
        owner = min(j for j in range(table.n_columns) if env_index[j] == env_index[ci])
        groups.setdefault(f"col{owner}", []).append(env_index[ci])
    groups = {k: sorted(set(v)) for k, v in groups.items()}
    covered = {i for v in groups.values() for i in v}
    rest = [i for i in range(table.n_columns) if i not in covered]
    if rest:
        groups["unused-records"] = rest
    partition = MacrostatePartition.from_factor_basis(layout, ENV_LABEL, groups, tols=tols)
    return rho, layout, partition


def reduced_display_state(table: SetupTable, display: str,
                          tols: Tolerances = DEFAULT_TOLS) -> DensityMatrix:
    """Exact reduced state on (agent, display).

    Because every column carries its own orthonormal environment record, the
    partial trace of the built set-up state onto the agent and one display is
    the weighted sum of basis projectors computed here; this closed form is
    what lets large generated set-ups be checked without materializing a
    tensor space beyond the dimension cap.
    """
    symbols = table.display_symbols(display)
    index = {s: i for i, s in enumerate(symbols)}
    block = np.zeros((len(symbols), len(symbols)), dtype=np.complex128)
    for col in table.columns:
        i = index[col.symbol(display)]
        block[i, i] += float(col.weight)
    agent = np.zeros((2, 2), dtype=np.complex128)
    agent[0, 0] = 1.0
    return DensityMatrix(np.kron(agent, block), tols=tols)


def esp_equal(rho1: DensityMatrix, rho2: DensityMatrix, layout: SubsystemLayout,
              keep: Iterable[str], tol: float = DEFAULT_TOLS.tol_esp,
              tols: Tolerances = DEFAULT_TOLS) -> bool:
    """Whether two states have element-wise equal reduced states on ``keep``."""
    if rho1.dim != rho2.dim:
        raise LayoutError(f"state dims differ: {rho1.dim} vs {rho2.dim}")
    r1 = partial_trace(rho1, layout, keep, tols=tols)
    r2 = partial_trace(rho2, layout, keep, tols=tols)
    return bool(np.max(np.abs(r1.entries - r2.entries)) <= tol)


@dataclass(frozen=True)
class DerivationStep:
    kind: str            # "esp" | "same-branch" | "normalization"
    statement: str
    justification: str

    def render(self, number: int) -> str:
        return f"{number}. {self.statement}  [{self.justification}]"


@dataclass(frozen=True, eq=False)
class CredenceSolution:
    """Exact branch and symbol credences plus the chain that produced them."""

    branch_credences: dict[str, tuple[Fraction, ...]]
    symbol_credences: dict[tuple[str, str, str], Fraction]
    derivation: tuple[DerivationStep, ...]
    status: str

    def __init__(self, branch_credences: Mapping[str, Sequence[Fraction]],
                 symbol_credences: Mapping[tuple[str, str, str], Fraction],
                 derivation: Sequence[DerivationStep], status: str = "derived"):
        branch_credences = {k: tuple(v) for k, v in branch_credences.items()}
        if status == "derived":
            for setup, creds in branch_credences.items():
                if sum(creds, Fraction(0)) != 1:
                    raise ParameterError(
                        f"branch credences for {setup!r} sum to {sum(creds, Fraction(0))}, not 1")
                if any(c < 0 or c > 1 for c in creds):
                    raise ParameterError(f"branch credences for {setup!r} leave [0, 1]")
        for key, c in symbol_credences.items():
            if c < 0 or c > 1:
                raise ParameterError(f"credence for {key} leaves [0, 1]")
        object.__setattr__(self, "branch_credences", branch_credences)
        object.__setattr__(self, "symbol_credences", dict(symbol_credences))
        object.__setattr__(self, "derivation", tuple(derivation))
        object.__setattr__(self, "status", status)

    @property
    def equality_steps(self) -> tuple[DerivationStep, ...]:
        return tuple(s for s in self.derivation if s.kind in ("esp", "same-branch"))

    def credence(self, setup: str, display: str, symbol: str) -> Fraction:
        return self.symbol_credences[(setup, display, symbol)]

    def rendered_chain(self) -> str:
        return "\n".join(step.render(i + 1) for i, step in enumerate(self.derivation))


# --- exact sparse elimination ----------------------------------------------------

_Var = tuple  # ("x", setup_index, column_index), ordered lexicographically


def _solve_exact(equations: list[tuple[dict[_Var, Fraction], Fraction, str]],
                 ):
    """Gaussian elimination over rationals on sparse rows.

    Returns (solution, undetermined, evaluate): the determined variable
    values, the undetermined variables, and a function evaluating a linear
    expression when the constraints pin its value (None otherwise; a sum can
    be determined even when its terms are not). Raises ContradictionError
    when a row reduces to 0 = c != 0, carrying the provenance of every
    constraint folded into that row.
    """
    pivots: dict[_Var, tuple[dict[_Var, Fraction], Fraction, frozenset[str]]] = {}
    all_vars: set[_Var] = set()

    for row, rhs, provenance in equations:
        row = {v: c for v, c in row.items() if c != 0}
        all_vars.update(row)
        prov = frozenset({provenance})
        while True:
            hits = sorted(v for v in row if v in pivots)
            if not hits:
                break
            v = hits[0]
            prow, prhs, pprov = pivots[v]
            factor = row.pop(v)
            for w, cw in prow.items():
                nc = row.get(w, Fraction(0)) - factor * cw
                if nc == 0:
                    row.pop(w, None)
                else:
                    row[w] = nc
            rhs = rhs - factor * prhs
            prov = prov | pprov
        if not row:
            if rhs != 0:
                raise ContradictionError(
                    f"constraints are inconsistent (they reduce to 0 = {rhs})",
                    chains=tuple(sorted(prov)))
            continue
        pivot = min(row)
        coeff = row.pop(pivot)
        pivots[pivot] = ({v: c / coeff for v, c in row.items()}, rhs / coeff, prov)

    # back-substitution in descending pivot order: every non-pivot entry of a
    # stored row is strictly larger than its pivot, so larger pivots are
    # already clean when smaller ones are processed
    for pivot in sorted(pivots, reverse=True):
        row, rhs, prov = pivots[pivot]
        acc: dict[_Var, Fraction] = {}

        def add(w: _Var, c: Fraction) -> None:
            nc = acc.get(w, Fraction(0)) + c
            if nc == 0:
                acc.pop(w, None)
            else:
                acc[w] = nc

        for v, c in row.items():
            if v in pivots:
                # substitute v = srhs - sum(srow): subtract c * (that equation)
                srow, srhs, sprov = pivots[v]
                rhs = rhs - c * srhs
                prov = prov | sprov
                for w, cw in srow.items():
                    add(w, -c * cw)
            else:
                add(v, c)
        pivots[pivot] = (acc, rhs, prov)

    solution: dict[_Var, Fraction] = {}
    undetermined = [v for v in all_vars if v not in pivots]
    for pivot, (row, rhs, _) in pivots.items():
        if row:
            undetermined.append(pivot)
        else:
            solution[pivot] = rhs

    def evaluate(expression: Mapping[_Var, Fraction]) -> Fraction | None:
        residual = {v: c for v, c in expression.items() if c != 0}
        value = Fraction(0)
        for v in list(residual):
            if v in pivots:
                c = residual.pop(v)
                srow, srhs, _ = pivots[v]
                value += c * srhs
                for w, cw in srow.items():
                    nc = residual.get(w, Fraction(0)) - c * cw
                    if nc == 0:
                        residual.pop(w, None)
                    else:
                        residual[w] = nc
        return None if residual else value

    return solution, sorted(undetermined), evaluate


# --- the solver -------------------------------------------------------------------

def _verified_esp_displays(setups: Sequence[SetupTable], tol: float,
                           tols: Tolerances) -> list[str]:
    """Displays whose (agent, display) reduced states agree across all set-ups.

    A display participates only when every set-up shows it with the same
    symbol set (otherwise the reduced matrices are not comparable).
    """
    common = [d for d in setups[0].displays if all(d in t.displays for t in setups)]
    verified = []
    for d in common:
        symbol_sets = {t.display_symbols(d) for t in setups}
        if len(symbol_sets) != 1:
            continue
        reduced = [reduced_display_state(t, d, tols=tols) for t in setups]
        if all(np.max(np.abs(r.entries - reduced[0].entries)) <= tol for r in reduced[1:]):
            verified.append(d)
    return verified


def _equality_path(setups: Sequence[SetupTable], esp_displays: Sequence[str],
                   start: tuple[int, str, str], goal: tuple[int, str, str],
                   ) -> list[DerivationStep] | None:
    """Shortest chain of ESP / same-branch equalities linking two atoms.

    Nodes are (setup_index, display, symbol); ESP edges connect the same
    display symbol across set-ups, same-branch edges connect symbols with
    identical column sets within one set-up.
    """
    class_of: dict[tuple[int, str, str], frozenset[int]] = {}
    classmates: dict[int, dict[frozenset[int], list[tuple[str, str]]]] = {}
    for si, t in enumerate(setups):
        classmates[si] = {}
        for cls in same_branch_classes(t):
            classmates[si][cls.columns] = list(cls.atoms)
            for d, s in cls.atoms:
                class_of[(si, d, s)] = cls.columns

    def neighbors(node):
        si, d, s = node
        out = []
        if d in esp_displays:
            for sj in range(len(setups)):
                if sj != si and s in setups[sj].display_symbols(d):
                    out.append(((sj, d, s), "esp", f"ESP on (A, {d})"))
        for d2, s2 in classmates[si][class_of[node]]:
            if (d2, s2) != (d, s):
                out.append(((si, d2, s2), "same-branch",
                            f"same-branch in {setups[si].setup_label}"))
        return out

    queue = deque([start])
    seen: dict[tuple[int, str, str], tuple | None] = {start: None}
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for nxt, kind, just in neighbors(node):
            if nxt not in seen:
                seen[nxt] = (node, kind, just)
                queue.append(nxt)
    if goal not in seen:
        return None
    steps: list[DerivationStep] = []
    node = goal
    while seen[node] is not None:
        prev, kind, just = seen[node]
        psi = prev[0]
        nsi = node[0]
        steps.append(DerivationStep(
            kind=kind,
            statement=f"P({prev[2]}|{setups[psi].setup_label}) = P({node[2]}|{setups[nsi].setup_label})",
            justification=just))
        node = prev
    steps.reverse()
    return steps


def _pinning_atom(table: SetupTable, si: int, column: int) -> tuple[int, str, str] | None:
    """An atom occurring in exactly this column, preferring the outcome display."""
    ordered = [table.outcome_display] + [d for d in table.displays if d != table.outcome_display]
    for d in ordered:
        for s in table.display_symbols(d):
            if table.columns_showing(d, s) == frozenset({column}):
                return (si, d, s)
    return None


def solve_credences(setups: Sequence[SetupTable],
                    tols: Tolerances = DEFAULT_TOLS) -> CredenceSolution:
    """Derive exact branch credences from a family of set-ups.

    Constraints: (i) for every display whose (agent, display) reduced states
    agree numerically across set-ups, symbol probabilities are equated across
    those set-ups; (ii) symbols occurring in the same columns of one set-up
    have equal probabilities (encoded by summing column credences, so the tie
    is structural); (iii) a symbol's probability is the sum of its columns'
    branch probabilities; (iv) branch probabilities of each set-up sum to 1.
    Fails loudly when the system is underdetermined (naming the unconstrained
    branches) or inconsistent (reporting the conflicting constraint chains).
    """
    if not setups:
        raise ParameterError("solve_credences needs at least one set-up")
    labels = [t.setup_label for t in setups]
    if len(set(labels)) != len(labels):
        raise ParameterError(f"duplicate set-up labels in {labels}")

    outcome_displays = {t.outcome_display for t in setups}
    if len(outcome_displays) != 1:
        raise ParameterError(f"set-ups do not share one outcome display: {sorted(outcome_displays)}")
    outcome = setups[0].outcome_display

    esp_displays = _verified_esp_displays(setups, tols.tol_esp, tols)
    if len(setups) > 1 and outcome not in esp_displays:
        raise ParameterError(
            f"the (A, {outcome}) reduced states differ across set-ups; "
            "these set-ups do not describe one measurement")

    equations: list[tuple[dict[_Var, Fraction], Fraction, str]] = []
    for si, t in enumerate(setups):
        row = {("x", si, ci): Fraction(1) for ci in range(t.n_columns)}
        equations.append((row, Fraction(1), f"normalization of {t.setup_label}"))

    for d in esp_displays:
        for s in setups[0].display_symbols(d):
            base_cols = setups[0].columns_showing(d, s)
            for sj in range(1, len(setups)):
                row: dict[_Var, Fraction] = {}
                for ci in base_cols:
                    row[("x", 0, ci)] = row.get(("x", 0, ci), Fraction(0)) + 1
                for ci in setups[sj].columns_showing(d, s):
                    row[("x", sj, ci)] = row.get(("x", sj, ci), Fraction(0)) - 1
                equations.append((row, Fraction(0),
                                  f"ESP on (A, {d}): P({s}|{setups[0].setup_label}) = "
                                  f"P({s}|{setups[sj].setup_label})"))

    solution, _, evaluate = _solve_exact(equations)

    # the first set-up is the actual one; auxiliaries are counterfactual and
    # may keep internal splits among indistinguishable columns undetermined
    primary_missing = [ci for ci in range(setups[0].n_columns)
                       if ("x", 0, ci) not in solution]
    if primary_missing:
        names = []
        for ci in primary_missing:
            atom = _pinning_atom(setups[0], 0, ci)
            tag = f"{setups[0].setup_label}[col{ci}]"
            if atom is not None:
                tag += f" ({atom[1]}={atom[2]})"
            names.append(tag)
        raise InsufficientSetupsError(
            "insufficient set-ups: the credences of "
            + ", ".join(names) + " are not determined by ESP and same-branch constraints",
            unconstrained=tuple(names))

    branch_credences: dict[str, tuple[Fraction, ...]] = {}
    for si, t in enumerate(setups):
        if all(("x", si, ci) in solution for ci in range(t.n_columns)):
            creds = tuple(solution[("x", si, ci)] for ci in range(t.n_columns))
            if any(c < 0 for c in creds):
                raise ContradictionError(
                    f"solved credences for {t.setup_label!r} are negative: {creds}")
            branch_credences[t.setup_label] = creds

    symbol_credences: dict[tuple[str, str, str], Fraction] = {}
    for si, t in enumerate(setups):
        for d in t.displays:
            for s in t.display_symbols(d):
                expr = {("x", si, ci): Fraction(1) for ci in t.columns_showing(d, s)}
                value = evaluate(expr)
                if value is not None:
                    symbol_credences[(t.setup_label, d, s)] = value

    derivation = _build_chain(setups, esp_displays, branch_credences, outcome)
    return CredenceSolution(branch_credences, symbol_credences, derivation)


def _build_chain(setups: Sequence[SetupTable], esp_displays: Sequence[str],
                 branch_credences: Mapping[str, tuple[Fraction, ...]],
                 outcome: str) -> tuple[DerivationStep, ...]:
    """Reconstruct a readable derivation for the primary set-up.

    Consecutive branches of the first set-up are linked by the shortest
    ESP / same-branch equality path between their pinning symbols, followed
    by a normalization step and sum rules for multi-column outcome symbols.
    """
    primary = setups[0]
    steps: list[DerivationStep] = []
    pins = [_pinning_atom(primary, 0, ci) for ci in range(primary.n_columns)]
    if all(p is not None for p in pins) and len(setups) > 1:
        seen_statements: set[frozenset[str]] = set()
        for a, b in zip(pins, pins[1:]):
            path = _equality_path(setups, esp_displays, a, b)
            if path is None:
                continue
            for step in path:
                lhs, _, rhs = step.statement.partition(" = ")
                key = frozenset({lhs, rhs})
                if key not in seen_statements:
                    seen_statements.add(key)
                    steps.append(step)
    creds = branch_credences[primary.setup_label]
    terms = " + ".join(f"P(col{ci}|{primary.setup_label})" for ci in range(primary.n_columns))
    values = ", ".join(str(c) for c in creds)
    steps.append(DerivationStep(
        kind="normalization",
        statement=f"{terms} = 1, giving ({values})",
        justification="branches are exclusive and exhaustive"))
    for s in primary.display_symbols(outcome):
        cols = sorted(primary.columns_showing(outcome, s))
        if len(cols) > 1:
            total = sum((creds[ci] for ci in cols), Fraction(0))
            parts = " + ".join(f"P(col{ci}|{primary.setup_label})" for ci in cols)
            steps.append(DerivationStep(
                kind="normalization",
                statement=f"P({s}|{primary.setup_label}) = {parts} = {total}",
                justification=f"the {s} branches are exclusive and exhaust {s}"))
    return tuple(steps)


def general_strategy_tables(outcome_weights: Sequence[object],
                            tols: Tolerances = DEFAULT_TOLS,
                            ) -> tuple[SetupTable, SetupTable]:
    """Generate the diagonal / same-branch set-up pair for rational weights.

    The weights k_i/N (common denominator N) become N equal-amplitude
    columns; the outcome display shows outcome i on k_i columns; each of N
    auxiliary two-symbol displays marks exactly one column in the first
    set-up (one mark per column, the diagonal pattern) and column 0 in the
    second (all marks on one branch). Feeding both tables to solve_credences
    pins every column credence to 1/N.
    """
    weights = [as_fraction(w) for w in outcome_weights]
    if not weights or any(w <= 0 for w in weights):
        raise UnsupportedWeightsError(f"outcome weights must be positive rationals, got {weights}")
    if sum(weights, Fraction(0)) != 1:
        raise UnsupportedWeightsError(f"outcome weights sum to {sum(weights, Fraction(0))}, not 1")
    n = math.lcm(*(w.denominator for w in weights))
    if n > tols.max_denominator:
        raise CapacityError(
            f"common denominator {n} exceeds the configured bound {tols.max_denominator}")
    counts = [int(w * n) for w in weights]

    displays = ["D0"] + [f"D{j}" for j in range(1, n + 1)]
    outcome_row: list[str] = []
    for i, k in enumerate(counts):
        outcome_row.extend([f"O{i + 1}"] * k)

    def column(ci: int, mark_col: Mapping[int, int]) -> dict[str, str]:
        col = {"D0": outcome_row[ci]}
        for j in range(1, n + 1):
            col[f"D{j}"] = f"mark{j}" if mark_col[j] == ci else f"plain{j}"
        return col

    diag_cols = [column(ci, {j: j - 1 for j in range(1, n + 1)}) for ci in range(n)]
    same_cols = [column(ci, {j: 0 for j in range(1, n + 1)}) for ci in range(n)]
    w = [Fraction(1, n)] * n
    alpha = SetupTable("diagonal", displays, diag_cols, weights=w, outcome_display="D0")
    beta = SetupTable("same-branch", displays, same_cols, weights=w, outcome_display="D0")

    for j in range(1, n + 1):
        if alpha.columns_showing(f"D{j}", f"mark{j}") != frozenset({j - 1}):
            raise ConstructionError(f"diagonal set-up fails to pin column {j - 1}")
        if beta.columns_showing(f"D{j}", f"mark{j}") != frozenset({0}):
            raise ConstructionError(f"same-branch set-up fails to gather mark{j} in column 0")
    return alpha, beta
