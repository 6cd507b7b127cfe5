"""Independent checkers used by the test suite.

These deliberately avoid the library's own combinatorial shortcuts: sign-set
concordance is re-decided with one exact feasibility problem per row, and
subspace sign vectors are re-enumerated by solving one feasibility problem
per candidate.  Slow, but a second opinion.
"""

import itertools
from fractions import Fraction

from injcheck.classes import SignSetMatrix
from injcheck.feasibility import strict_sign_feasible
from injcheck.linalg import RationalMatrix, Subspace
from injcheck.signs import all_sign_vectors


def lp_concordant(rho, tau, W: SignSetMatrix) -> bool:
    """Row-by-row constructive check: is there a member matrix of the sign-set
    class and a vector x with sigma(x) = tau whose image has signs rho?

    Fixes x = tau (any realization works, by positive rescaling) and asks the
    exact solver, for every admissible sign row, whether some row vector with
    those signs hits the required image sign.
    """
    tau_e = tuple(int(t) for t in tau)
    rho_e = tuple(int(r) for r in rho)
    n = W.cols
    xmat = RationalMatrix(1, n, [[Fraction(t) for t in tau_e]])
    for i in range(W.rows):
        row_sets = W.row(i)
        ok = False
        for choice in itertools.product(*[tuple(sorted(s)) for s in row_sets]):
            if strict_sign_feasible(None, choice, extra=[(xmat, (rho_e[i],))]) is not None:
                ok = True
                break
        if not ok:
            return False
    return True


def enumerate_subspace_signs(S: Subspace):
    """sigma(S minus the origin) by brute candidate enumeration."""
    Z = S.kernel_rep()
    out = []
    for cand in all_sign_vectors(S.n):
        if strict_sign_feasible(Z, cand.entries) is not None:
            out.append(cand)
    return tuple(sorted(out, key=lambda v: v.entries))
