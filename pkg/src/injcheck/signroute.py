"""Sign-vector route: decide injectivity through sign arithmetic and exact
feasibility, and construct singular members when the answer is negative.

The driving fact: for z in a subspace S and positive scalings lambda, the
vectors lambda * z sweep the whole open sign orthant of sigma(z). Injectivity
questions about a class acting on S therefore reduce to a finite sweep over
tau in sigma(S \\ {0}) (and, with a left factor A, over rho in {0} union
sigma(ker A \\ {0})) with one exact feasibility question per pair.

Every search is lexicographic (-1 < 0 < +1) and the first feasible pair is the
one a witness is built from, so runs are reproducible bit for bit.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .classes import (
    Interval,
    IntervalBox,
    IntervalEntry,
    MatrixClass,
    Member,
    Product,
    Scaled,
    SignPattern,
    SignSetMatrix,
    SignSets,
)
from .feasibility import feasible_cone, strict_sign_feasible
from .limits import CapExceeded, Caps, DEFAULT_CAPS
from .linalg import RationalMatrix, Subspace
from .signs import (
    SignVector,
    sigma,
    sign_of,
    sign_orthogonal,
    signset_row_orthogonal,
    signset_row_orthogonal_witness,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# sign vectors of a subspace


def subspace_sign_vectors(S: Subspace, caps: Optional[Caps] = None) -> tuple[SignVector, ...]:
    """sigma(S \\ {0}) as a lexicographically sorted tuple (cached on S).

    Exactness: a candidate tau is in the set iff the strict feasibility system
    Zz = 0, sigma(z) = tau has a solution. Sampling the image basis first and
    exploiting sigma(-z) = -sigma(z) only short-circuits known members; every
    remaining candidate is decided by the exact solver.
    """
    if caps is None:
        caps = DEFAULT_CAPS
    cache_key = "sign_vectors"
    cached = S._sign_vectors_cache.get(cache_key)
    if cached is not None:
        return cached
    n = S.n
    if S.dim == 0:
        S._sign_vectors_cache[cache_key] = ()
        return ()
    if n > caps.sign_enum_dim:
        raise CapExceeded("sign_enum_dim", n, caps.sign_enum_dim)
    Z = S.kernel_rep()
    if Z.rows == 0:
        out = tuple(SignVector(c) for c in itertools.product((-1, 0, 1), repeat=n)
                    if any(c))
        S._sign_vectors_cache[cache_key] = out
        return out

    found: set[tuple[int, ...]] = set()
    V = S.image_basis()
    s = V.cols
    if s <= 3:
        coeff_sets = itertools.product(range(-2, 3), repeat=s)
    else:
        rng = random.Random(2718281828)
        coeff_sets = [tuple(rng.randint(-5, 5) for _ in range(s)) for _ in range(256)]
    for coeffs in coeff_sets:
        z = tuple(
            sum((V.at(i, k) * coeffs[k] for k in range(s)), _ZERO) for i in range(n)
        )
        sv = sigma(z)
        if not sv.is_zero():
            found.add(sv.entries)
            found.add((-sv).entries)

    z_row_signs = [sigma(row) for row in Z.data]
    members: list[tuple[int, ...]] = []
    for cand in itertools.product((-1, 0, 1), repeat=n):
        if not any(cand):
            continue
        first_nonzero = next(s for s in cand if s != 0)
        if first_nonzero < 0:
            continue  # decided via the mirror image
        cv = SignVector(cand)
        if cand in found:
            ok = True
        elif any(not sign_orthogonal(cv, zr) for zr in z_row_signs):
            ok = False
        else:
            ok = strict_sign_feasible(Z, cv) is not None
        if ok:
            members.append(cand)
            members.append(tuple(-s for s in cand))
    out = tuple(SignVector(c) for c in sorted(members))
    S._sign_vectors_cache[cache_key] = out
    return out


def realize_sign_in_subspace(S: Subspace, tau: SignVector) -> Optional[tuple[Fraction, ...]]:
    """Exact z in S with sigma(z) = tau."""
    return strict_sign_feasible(S.kernel_rep(), tau)


def kernel_sign_vectors(A: RationalMatrix, caps: Optional[Caps] = None) -> tuple[SignVector, ...]:
    """sigma(ker A \\ {0}), lexicographically sorted."""
    return subspace_sign_vectors(Subspace.from_kernel_rep(A), caps)


# ---------------------------------------------------------------------------
# pairs and concordance


def pair_sign_feasible(B: RationalMatrix, tau, rho) -> Optional[tuple[Fraction, ...]]:
    """Exact v with sigma(v) = tau and sigma(Bv) = rho, or None."""
    return strict_sign_feasible(None, tau, extra=[(B, rho)])


def concordant_pair(rho, tau, W: SignSetMatrix) -> bool:
    """Is there a member of the sign-set class mapping some x with sigma(x) =
    tau to some y with sigma(y) = rho?

    Row i needs: a coordinate j and sign s in w_ij with s * tau_j = rho_i when
    rho_i is nonzero (the row can then be made to dominate); and a sign row
    orthogonal to tau inside the row's sign sets when rho_i = 0.
    """
    rho_e = rho.entries if isinstance(rho, SignVector) else tuple(int(s) for s in rho)
    tau_e = tau.entries if isinstance(tau, SignVector) else tuple(int(s) for s in tau)
    if len(rho_e) != W.rows or len(tau_e) != W.cols:
        raise ValueError("dimension mismatch")
    for i in range(W.rows):
        row = W.row(i)
        if rho_e[i] == 0:
            if not signset_row_orthogonal(row, tau_e):
                return False
        else:
            if not any(
                s * tau_e[j] == rho_e[i] for j in range(W.cols) for s in row[j]
            ):
                return False
    return True


def signset_member_rows(W: SignSetMatrix, x: Sequence[Fraction],
                        targets: Sequence[Fraction]) -> RationalMatrix:
    """A matrix with entry signs in W and Bx = targets exactly.

    Preconditions (checked): sigma(targets_i) is concordant with sigma(x) row
    by row, i.e. concordant_pair(sigma(targets), sigma(x), W) holds.

    Zero-target rows come from the exact feasibility solver on the orthogonal
    sign choice; nonzero-target rows place a dominant entry and shrink the
    other magnitudes by exact halving until the sign is right, then rescale.
    """
    n = len(x)
    tau = sigma(x)
    rows: list[list[Fraction]] = []
    for i in range(W.rows):
        row_sets = W.row(i)
        target = targets[i]
        if target == 0:
            tau_prime = signset_row_orthogonal_witness(row_sets, tau)
            if tau_prime is None:
                raise ArithmeticError(f"row {i} cannot be made orthogonal to {tau}")
            if tau_prime.is_zero():
                rows.append([_ZERO] * n)
                continue
            xmat = RationalMatrix(1, n, [list(x)])
            b = strict_sign_feasible(xmat, tau_prime)
            if b is None:
                raise ArithmeticError(f"orthogonal row {i} infeasible for {tau_prime}")
            rows.append(list(b))
            continue
        want = sign_of(target)
        dominant = None
        for j in range(n):
            for s in sorted(row_sets[j]):
                if s * tau[j] == want:
                    dominant = (j, s)
                    break
            if dominant:
                break
        if dominant is None:
            raise ArithmeticError(f"row {i}: no entry can produce sign {want} against {tau}")
        j0, s0 = dominant
        fill = []
        for j in range(n):
            if j == j0:
                fill.append(None)
            elif 0 in row_sets[j]:
                fill.append(0)
            else:
                fill.append(sorted(row_sets[j])[0])
        eps = _ONE
        while True:
            b = [
                (Fraction(s0) if j == j0 else Fraction(fill[j]) * eps)
                for j in range(n)
            ]
            dot = sum((bi * xi for bi, xi in zip(b, x)), _ZERO)
            if dot != 0 and sign_of(dot) == want:
                break
            eps = eps / 2
        scale = target / dot  # positive: same sign
        rows.append([bi * scale for bi in b])
    M = RationalMatrix(W.rows, n, rows)
    if not W.contains(M):
        raise ArithmeticError("constructed rows left the sign-set class")
    if M.apply(x) != tuple(targets):
        raise ArithmeticError("constructed rows miss the targets")
    return M


# ---------------------------------------------------------------------------
# interval feasibility route


def _product_range(e: IntervalEntry, zsign: int) -> tuple[Optional[Fraction], Optional[Fraction],
                                                          bool, bool]:
    """Range of b * z over b in e for a z of known sign, as a multiple of |z|:
    returns (lo, hi, lo_open, hi_open) of {b * s : b in e}, s = zsign."""
    if zsign > 0:
        return e.lower, e.upper, e.lower_open, e.upper_open
    lo = None if e.upper is None else -e.upper
    hi = None if e.lower is None else -e.lower
    return lo, hi, e.upper_open, e.lower_open


@dataclass
class _RowPlan:
    eq: list[list[Fraction]] = field(default_factory=list)
    nonneg: list[list[Fraction]] = field(default_factory=list)
    strict: list[list[Fraction]] = field(default_factory=list)
    branch_rows: list[list[Fraction]] = field(default_factory=list)  # each: row != 0


def _interval_row_constraints(D: IntervalBox, i: int, tau: SignVector,
                              width: int, u_index: Optional[int]) -> _RowPlan:
    """Linear constraints tying u_i to the achievable values of row i applied
    to a z with sigma(z) = tau. Variables are (z, u); width is their total
    count; u_index is the column of u_i or None when u is identically zero."""
    n = len(tau)
    plan = _RowPlan()
    base = [_ZERO] * width
    if u_index is not None:
        base[u_index] = _ONE

    points = [_ZERO] * width  # sum of point entries c_ij z_j
    active: list[tuple[int, IntervalEntry]] = []
    for j in range(n):
        if tau[j] == 0:
            continue
        e = D.at(i, j)
        if e.is_point:
            points[j] = e.lower
        else:
            active.append((j, e))

    # u_i - sum(point terms) is what the free entries must produce
    residual = [b - p for b, p in zip(base, points)]

    if not active:
        plan.eq.append(residual)
        return plan

    punctured_alone = len(active) == 1 and active[0][1].punctured
    # lower bound: residual >= sum of per-entry range minima (when finite)
    lo_coeffs = [_ZERO] * width
    lo_open = False
    lo_finite = True
    hi_coeffs = [_ZERO] * width
    hi_open = False
    hi_finite = True
    for j, e in active:
        lo, hi, lo_o, hi_o = _product_range(e, tau[j])
        if lo is None:
            lo_finite = False
        else:
            lo_coeffs[j] = lo if tau[j] > 0 else -lo
            lo_open = lo_open or lo_o
        if hi is None:
            hi_finite = False
        else:
            hi_coeffs[j] = hi if tau[j] > 0 else -hi
            hi_open = hi_open or hi_o
    # The range of b_ij z_j is (lo * |z_j|, hi * |z_j|); |z_j| = tau_j z_j,
    # so the bound rows are linear in z with the sign folded into the
    # coefficient above.
    if lo_finite:
        row = list(residual)
        for j, _ in active:
            row[j] -= lo_coeffs[j]
        (plan.strict if lo_open else plan.nonneg).append(row)
    if hi_finite:
        row = [-r for r in residual]
        for j, _ in active:
            row[j] += hi_coeffs[j]
        (plan.strict if hi_open else plan.nonneg).append(row)
    if punctured_alone:
        plan.branch_rows.append(list(residual))
    return plan


def interval_kernel_feasible(
    D: IntervalBox,
    S: Subspace,
    tau: SignVector,
    A: Optional[RationalMatrix] = None,
    caps: Optional[Caps] = None,
) -> Optional[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]:
    """Exact (z, u) with z in S, sigma(z) = tau, u = Mz achievable for some
    member M of the interval class, and Au = 0 (u = 0 when A is None)."""
    if caps is None:
        caps = DEFAULT_CAPS
    n = S.n
    r = D.rows
    has_u = A is not None
    width = n + (r if has_u else 0)

    eq: list[list[Fraction]] = []
    nonneg: list[list[Fraction]] = []
    strict: list[list[Fraction]] = []
    branch_rows: list[list[Fraction]] = []

    def pad(row, offset):
        out = [_ZERO] * width
        for k, v in enumerate(row):
            out[offset + k] = v
        return out

    for zr in S.kernel_rep().data:
        eq.append(pad(zr, 0))
    if has_u:
        for ar in A.data:
            eq.append(pad(ar, n))
    for j, s in enumerate(tau):
        unit = [_ZERO] * width
        unit[j] = _ONE
        if s == 0:
            eq.append(unit)
        elif s > 0:
            strict.append(unit)
        else:
            strict.append([-v for v in unit])

    for i in range(r):
        plan = _interval_row_constraints(D, i, tau, width, n + i if has_u else None)
        eq.extend(plan.eq)
        nonneg.extend(plan.nonneg)
        strict.extend(plan.strict)
        branch_rows.extend(plan.branch_rows)

    if len(branch_rows) > 0 and 2 ** len(branch_rows) > caps.branches:
        raise CapExceeded("branches", 2 ** len(branch_rows), caps.branches)

    branch_space = itertools.product((1, -1), repeat=len(branch_rows))
    for orientation in branch_space:
        extra = [
            [v * o for v in row] for row, o in zip(branch_rows, orientation)
        ]
        sol = feasible_cone(width, eq=eq, nonneg=nonneg, strict=strict + extra)
        if sol is not None:
            z = sol[:n]
            u = sol[n:] if has_u else tuple([_ZERO] * r)
            return tuple(z), tuple(u)
    return None


def interval_member_through(D: IntervalBox, z: Sequence[Fraction],
                            targets: Sequence[Fraction]) -> RationalMatrix:
    """A member M of the interval box with Mz = targets exactly.

    Each row is one small exact feasibility problem in the products
    v_j = b_ij z_j: they must sum to the row target, stay in the per-entry
    product ranges (openness as strictness), and avoid zero for punctured
    entries (a two-way branch per such entry). Homogenized with one extra
    positive scale variable so the cone solver applies.
    """
    n = len(z)
    tau = sigma(z)
    rows_out: list[list[Fraction]] = []
    for i in range(D.rows):
        active: list[tuple[int, IntervalEntry]] = []
        fixed = _ZERO
        for j in range(n):
            e = D.at(i, j)
            if tau[j] == 0:
                continue
            if e.is_point:
                fixed += e.lower * z[j]
            else:
                active.append((j, e))
        T = targets[i] - fixed  # what the active entries must sum to
        if not active:
            if T != 0:
                raise ArithmeticError(f"row {i}: target unreachable, no active entries")
            values: dict[int, Fraction] = {}
        else:
            values = _solve_row_products(active, tau, z, T)

        row = []
        for j in range(n):
            e = D.at(i, j)
            if tau[j] == 0:
                row.append(e.pick_point())
            elif e.is_point:
                row.append(e.lower)
            else:
                row.append(values[j] / z[j])
        rows_out.append(row)
    M = RationalMatrix(D.rows, n, rows_out)
    if not D.contains(M):
        raise ArithmeticError("constructed member left the box")
    if M.apply(z) != tuple(targets):
        raise ArithmeticError("constructed member misses the targets")
    return M


def _solve_row_products(active: list[tuple[int, IntervalEntry]], tau, z,
                        T: Fraction) -> dict[int, Fraction]:
    """Exact products v_j = b_ij z_j for one row: sum T, each within its range,
    nonzero where punctured. Variables (v_1..v_m, t), t > 0 a homogenizing
    scale; the returned values are v/t."""
    m = len(active)
    width = m + 1
    eq: list[list[Fraction]] = []
    nonneg: list[list[Fraction]] = []
    strict: list[list[Fraction]] = []
    total = [_ONE] * m + [-T]
    eq.append(total)
    t_row = [_ZERO] * m + [_ONE]
    strict.append(t_row)
    punctured_idx: list[int] = []
    for k, (j, e) in enumerate(active):
        lo, hi, lo_o, hi_o = _product_range(e, tau[j])
        azj = z[j] if z[j] > 0 else -z[j]
        if lo is not None:
            row = [_ZERO] * width
            row[k] = _ONE
            row[m] = -lo * azj
            (strict if lo_o else nonneg).append(row)
        if hi is not None:
            row = [_ZERO] * width
            row[k] = -_ONE
            row[m] = hi * azj
            (strict if hi_o else nonneg).append(row)
        if e.punctured:
            punctured_idx.append(k)
    for orientation in itertools.product((1, -1), repeat=len(punctured_idx)):
        extra = []
        for k, o in zip(punctured_idx, orientation):
            row = [_ZERO] * width
            row[k] = Fraction(o)
            extra.append(row)
        sol = feasible_cone(width, eq=eq, nonneg=nonneg, strict=strict + extra)
        if sol is not None:
            t = sol[m]
            return {active[k][0]: sol[k] / t for k in range(m)}
    raise ArithmeticError("row products infeasible; targets were not achievable")


# ---------------------------------------------------------------------------
# route driver


@dataclass
class SignRouteHit:
    member: Member
    z: tuple[Fraction, ...]
    tau: SignVector
    rho: Optional[SignVector]
    lift_data: Optional[tuple] = None  # (B, v, w) exact data for a monomial lift
    note: str = ""


@dataclass
class SignRouteResult:
    supported: bool
    injective: Optional[bool] = None
    hit: Optional[SignRouteHit] = None
    reason: str = ""
    diagnostics: dict = field(default_factory=dict)


def _achievable_row_signs(brow: Sequence[Fraction], tau: SignVector) -> frozenset:
    contribs = {sign_of(b) * t for b, t in zip(brow, tau)} - {0}
    if not contribs:
        return frozenset({0})
    if contribs == {1}:
        return frozenset({1})
    if contribs == {-1}:
        return frozenset({-1})
    return frozenset({-1, 0, 1})


def _rho_candidates(A: Optional[RationalMatrix], rows: int,
                    caps: Caps) -> list[SignVector]:
    zero = SignVector.zero(rows)
    if A is None:
        return [zero]
    kernel = kernel_sign_vectors(A, caps)
    combined = sorted({zero.entries} | {k.entries for k in kernel})
    return [SignVector(c) for c in combined]


def _scaled_witness(B: RationalMatrix, S: Subspace, A: Optional[RationalMatrix],
                    tau: SignVector, rho: SignVector,
                    v: tuple[Fraction, ...]) -> SignRouteHit:
    z = realize_sign_in_subspace(S, tau)
    if z is None:
        raise ArithmeticError(f"{tau} not realizable in S")
    lam = tuple(v[j] / z[j] if z[j] != 0 else _ONE for j in range(len(z)))
    if any(l <= 0 for l in lam):
        raise ArithmeticError("scaling went nonpositive; sign bookkeeping broken")
    w = B.apply(v)
    if rho.is_zero():
        kappa = tuple([_ONE] * B.rows)
        if any(x != 0 for x in w):
            raise ArithmeticError("kernel pair produced a nonzero image")
    else:
        y = strict_sign_feasible(A, rho)
        if y is None:
            raise ArithmeticError(f"{rho} not realizable in ker of the left matrix")
        kappa = tuple(y[i] / w[i] if w[i] != 0 else _ONE for i in range(B.rows))
        if any(k <= 0 for k in kappa):
            raise ArithmeticError("row scaling went nonpositive")
    matrix = RationalMatrix(
        B.rows, B.cols,
        [[kappa[i] * B.at(i, j) * lam[j] for j in range(B.cols)] for i in range(B.rows)],
    )
    member = Member(matrix, "scaled", kappa=kappa, lam=lam)
    v_lift = tuple(lam[j] * z[j] for j in range(len(z)))
    return SignRouteHit(member, tuple(z), tau, rho, lift_data=(B, v_lift, tuple(z)))


def sign_route(cls: MatrixClass, S: Subspace, A: Optional[RationalMatrix],
               caps: Optional[Caps] = None) -> SignRouteResult:
    """Decide injectivity by the sign sweep for the supported class shapes.

    Supported: Scaled, SignPattern, SignSets, Interval (each optionally with a
    left matrix A), and the left-free class products SignSets x Scaled,
    SignPattern x Scaled, SignSets x SignSets and mixtures of those two kinds.
    """
    if caps is None:
        caps = DEFAULT_CAPS
    taus = subspace_sign_vectors(S, caps)
    diag = {"taus": len(taus), "pairs_checked": 0}

    if isinstance(cls, Scaled):
        B = cls.B
        rhos = _rho_candidates(A, B.rows, caps)
        diag["rhos"] = len(rhos)
        for tau in taus:
            row_options = [_achievable_row_signs(B.row(i), tau) for i in range(B.rows)]
            for rho in rhos:
                if any(rho[i] not in row_options[i] for i in range(B.rows)):
                    continue
                diag["pairs_checked"] += 1
                v = pair_sign_feasible(B, tau, rho)
                if v is not None:
                    hit = _scaled_witness(B, S, A, tau, rho, v)
                    return SignRouteResult(True, injective=False, hit=hit,
                                           diagnostics=diag)
        return SignRouteResult(True, injective=True, diagnostics=diag)

    if isinstance(cls, (SignPattern, SignSets)):
        W = cls.to_signsets() if isinstance(cls, SignPattern) else cls.W
        rhos = _rho_candidates(A, W.rows, caps)
        diag["rhos"] = len(rhos)
        for tau in taus:
            for rho in rhos:
                diag["pairs_checked"] += 1
                if not concordant_pair(rho, tau, W):
                    continue
                z = realize_sign_in_subspace(S, tau)
                if z is None:
                    raise ArithmeticError(f"{tau} not realizable in S")
                if rho.is_zero():
                    y = tuple([_ZERO] * W.rows)
                else:
                    y = strict_sign_feasible(A, rho)
                    if y is None:
                        raise ArithmeticError(f"{rho} not realizable in the left kernel")
                M = signset_member_rows(W, z, y)
                kind = "pattern" if isinstance(cls, SignPattern) else "signsets"
                member = Member(M, kind)
                return SignRouteResult(True, injective=False,
                                       hit=SignRouteHit(member, tuple(z), tau, rho),
                                       diagnostics=diag)
        return SignRouteResult(True, injective=True, diagnostics=diag)

    if isinstance(cls, Interval):
        for tau in taus:
            diag["pairs_checked"] += 1
            got = interval_kernel_feasible(cls.D, S, tau, A, caps)
            if got is not None:
                z, u = got
                M = interval_member_through(cls.D, z, u)
                member = Member(M, "interval")
                return SignRouteResult(True, injective=False,
                                       hit=SignRouteHit(member, z, tau, None),
                                       diagnostics=diag)
        return SignRouteResult(True, injective=True, diagnostics=diag)

    if isinstance(cls, Product) and not isinstance(cls.left, RationalMatrix):
        if A is not None:
            return SignRouteResult(False, reason="left matrix over a class product")
        outer, inner = cls.left, cls.right
        if isinstance(outer, (SignPattern, SignSets)):
            W_out = outer.to_signsets() if isinstance(outer, SignPattern) else outer.W
            mid = inner.rows
            if mid > caps.sign_enum_dim:
                raise CapExceeded("sign_enum_dim", mid, caps.sign_enum_dim)
            if isinstance(inner, Scaled):
                return _route_signsets_scaled(W_out, inner.B, S, taus, diag, caps)
            if isinstance(inner, (SignPattern, SignSets)):
                W_in = inner.to_signsets() if isinstance(inner, SignPattern) else inner.W
                return _route_signsets_signsets(W_out, W_in, S, taus, diag)
        return SignRouteResult(False,
                               reason=f"no sign route for {cls.describe()}")

    return SignRouteResult(False, reason=f"no sign route for {cls.describe()}")


def _route_signsets_scaled(W_out: SignSetMatrix, B: RationalMatrix, S: Subspace,
                           taus, diag, caps: Caps) -> SignRouteResult:
    mid = B.rows
    for tau in taus:
        row_options = [_achievable_row_signs(B.row(i), tau) for i in range(mid)]
        for mid_signs in itertools.product((-1, 0, 1), repeat=mid):
            rho_mid = SignVector(mid_signs)
            if any(mid_signs[i] not in row_options[i] for i in range(mid)):
                continue
            if not all(
                signset_row_orthogonal(W_out.row(i), rho_mid) for i in range(W_out.rows)
            ):
                continue
            diag["pairs_checked"] += 1
            v = pair_sign_feasible(B, tau, rho_mid)
            if v is None:
                continue
            z = realize_sign_in_subspace(S, tau)
            if z is None:
                raise ArithmeticError(f"{tau} not realizable in S")
            lam = tuple(v[j] / z[j] if z[j] != 0 else _ONE for j in range(len(z)))
            Bhat = RationalMatrix(
                B.rows, B.cols,
                [[B.at(i, j) * lam[j] for j in range(B.cols)] for i in range(B.rows)],
            )
            w_mid = B.apply(v)
            H = signset_member_rows(W_out, w_mid, [_ZERO] * W_out.rows)
            inner_member = Member(Bhat, "scaled",
                                  kappa=tuple([_ONE] * B.rows), lam=lam)
            outer_member = Member(H, "signsets")
            member = Member(H.matmul(Bhat), "product",
                            factors=(outer_member, inner_member))
            hit = SignRouteHit(member, tuple(z), tau, rho_mid,
                               note="middle sign vector is the image sign")
            return SignRouteResult(True, injective=False, hit=hit, diagnostics=diag)
    return SignRouteResult(True, injective=True, diagnostics=diag)


def _route_signsets_signsets(W_out: SignSetMatrix, W_in: SignSetMatrix, S: Subspace,
                             taus, diag) -> SignRouteResult:
    mid = W_in.rows
    for tau in taus:
        for mid_signs in itertools.product((-1, 0, 1), repeat=mid):
            rho_mid = SignVector(mid_signs)
            if not concordant_pair(rho_mid, tau, W_in):
                continue
            if not all(
                signset_row_orthogonal(W_out.row(i), rho_mid) for i in range(W_out.rows)
            ):
                continue
            diag["pairs_checked"] += 1
            z = realize_sign_in_subspace(S, tau)
            if z is None:
                raise ArithmeticError(f"{tau} not realizable in S")
            w_mid = tuple(Fraction(s) for s in mid_signs)
            M_in = signset_member_rows(W_in, z, w_mid)
            H = signset_member_rows(W_out, w_mid, [_ZERO] * W_out.rows)
            member = Member(H.matmul(M_in), "product",
                            factors=(Member(H, "signsets"), Member(M_in, "signsets")))
            hit = SignRouteHit(member, tuple(z), tau, rho_mid)
            return SignRouteResult(True, injective=False, hit=hit, diagnostics=diag)
    return SignRouteResult(True, injective=True, diagnostics=diag)
