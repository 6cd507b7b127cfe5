"""Exact feasibility of homogeneous systems with equalities, weak and strict
inequalities, decided by a phase-1 simplex over Fraction.

The systems here are always cones: every constraint is of the form row.x = 0,
row.x >= 0, or row.x > 0. Scaling invariance lets row.x > 0 be replaced by
row.x >= 1, so strict feasibility reduces to ordinary LP feasibility with no
epsilon anywhere. Bland's rule guarantees termination.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .linalg import RationalMatrix, rat_vector

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _phase1(D: list[list[Fraction]], b: list[Fraction]) -> Optional[list[Fraction]]:
    """Find y >= 0 with Dy = b (b >= 0 required), or None.

    Classic phase-1: one artificial per row, minimize their sum with Bland's
    smallest-index rule for both the entering and the tie-broken leaving
    variable.
    """
    m = len(D)
    if m == 0:
        return []
    n = len(D[0])
    total = n + m
    T = [list(D[i]) + [(_ONE if j == i else _ZERO) for j in range(m)] + [b[i]] for i in range(m)]
    basis = list(range(n, total))
    # reduced costs r_j = c_j - sum_i T[i][j]  (cost 1 on artificials, 0 elsewhere)
    reduced = []
    for j in range(total + 1):
        column_sum = _ZERO
        for i in range(m):
            column_sum += T[i][j]
        cost = _ONE if n <= j < total else _ZERO
        reduced.append(cost - column_sum)
    while True:
        enter = next((j for j in range(total) if reduced[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            coeff = T[i][enter]
            if coeff > 0:
                ratio = T[i][total] / coeff
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave is None:
            raise ArithmeticError("phase-1 objective unbounded; malformed tableau")
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        lead = T[leave]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [a - f * c for a, c in zip(T[i], lead)]
        if reduced[enter] != 0:
            f = reduced[enter]
            reduced = [a - f * c for a, c in zip(reduced, lead)]
        basis[leave] = enter
    if -reduced[total] != 0:  # optimal artificial sum
        return None
    y = [_ZERO] * n
    for i, bv in enumerate(basis):
        if bv < n:
            y[bv] = T[i][total]
    return y


def feasible_cone(
    n: int,
    eq: Sequence[Sequence] = (),
    nonneg: Sequence[Sequence] = (),
    strict: Sequence[Sequence] = (),
) -> Optional[tuple[Fraction, ...]]:
    """A point x in Q^n with e.x = 0, g.x >= 0, h.x > 0 for the given rows, or None.

    The constraint set is a cone, so strict rows are normalized to h.x >= 1;
    feasibility is unchanged and the returned witness satisfies every strict
    row with slack at least 1.
    """
    eq_rows = [rat_vector(r) for r in eq]
    nonneg_rows = [rat_vector(r) for r in nonneg]
    strict_rows = [rat_vector(r) for r in strict]
    for rows in (eq_rows, nonneg_rows, strict_rows):
        for r in rows:
            if len(r) != n:
                raise ValueError(f"constraint row length {len(r)} != {n}")
    if not strict_rows and not eq_rows and not nonneg_rows:
        return tuple([_ZERO] * n)
    if not strict_rows:
        return tuple([_ZERO] * n)  # x = 0 satisfies all weak rows

    ns, nt = len(nonneg_rows), len(strict_rows)
    width = 2 * n + ns + nt  # u, v (x = u - v), surplus for weak, surplus for strict
    D: list[list[Fraction]] = []
    b: list[Fraction] = []

    def build(row, surplus_index):
        out = list(row) + [-v for v in row] + [_ZERO] * (ns + nt)
        if surplus_index is not None:
            out[2 * n + surplus_index] = Fraction(-1)
        return out

    for r in eq_rows:
        D.append(build(r, None))
        b.append(_ZERO)
    for k, r in enumerate(nonneg_rows):
        D.append(build(r, k))
        b.append(_ZERO)
    for k, r in enumerate(strict_rows):
        D.append(build(r, ns + k))
        b.append(_ONE)

    y = _phase1(D, b)
    if y is None:
        return None
    return tuple(y[i] - y[n + i] for i in range(n))


def strict_sign_feasible(
    E: Optional[RationalMatrix],
    tau,
    extra: Sequence[tuple[RationalMatrix, object]] = (),
) -> Optional[tuple[Fraction, ...]]:
    """Exact witness x with Ex = 0, sigma(x) = tau, and sigma(Cx) = rho for each
    (C, rho) in extra; None when no such x exists.

    tau and each rho may be SignVector objects or plain sign sequences. Zero
    signs become equalities, nonzero signs strict inequalities of the matching
    direction.
    """
    from .signs import SignVector

    tau_entries = tau.entries if isinstance(tau, SignVector) else tuple(int(s) for s in tau)
    n = len(tau_entries)
    eq: list[Sequence] = []
    strict: list[Sequence] = []
    if E is not None:
        if E.cols != n:
            raise ValueError(f"E has {E.cols} columns, tau has length {n}")
        eq.extend(E.data)

    def add_sign_rows(row, s):
        if s == 0:
            eq.append(row)
        elif s > 0:
            strict.append(row)
        else:
            strict.append([-v for v in row])

    for i, s in enumerate(tau_entries):
        unit = [_ZERO] * n
        unit[i] = _ONE
        add_sign_rows(unit, s)
    for C, rho in extra:
        rho_entries = rho.entries if isinstance(rho, SignVector) else tuple(int(s) for s in rho)
        if C.cols != n:
            raise ValueError(f"extra matrix has {C.cols} columns, expected {n}")
        if C.rows != len(rho_entries):
            raise ValueError("extra sign vector length mismatch")
        for i, s in enumerate(rho_entries):
            add_sign_rows(list(C.data[i]), s)
    return feasible_cone(n, eq=eq, strict=strict)
