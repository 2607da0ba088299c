"""Regenerate the maximal-order catalog shipped in src/capform/catalog.

Developer tool, not part of the installed package. Starting from Z<1,i,j,k>
it repeatedly adjoins integral elements x/p (x in the current order) and
closes under multiplication until det(Gram) = N^2. Every order written is
re-verified by capform.orders when loaded.

    python tools/build_catalog.py
"""

import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from capform.exactcore import det, fmt_rat, lcm  # noqa: E402
from capform.quatalg import QuatAlg  # noqa: E402

ALGEBRAS = {
    2: (-1, -1),
    3: (-1, -3),
    5: (-2, -5),
    7: (-1, -7),
    11: (-1, -11),
    13: (-2, -13),
    30: (-3, -10),
}

# The N=3 basis is fixed by hand so that its Gram matrix is the documented one.
FIXED = {
    2: [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], ["1/2", "1/2", "1/2", "1/2"]],
    3: [[1, 0, 0, 0], [0, 1, 0, 0], [0, "1/2", "1/2", 0], ["1/2", 0, 0, "1/2"]],
}


def span_basis(alg, elts):
    """Z-basis (as quaternions) of the lattice spanned by elts."""
    den = lcm(*(c.denominator for q in elts for c in q.coords))
    M = Matrix([[int(c * den) for c in q.coords] for q in elts]).T  # columns
    H = hermite_normal_form(M)
    cols = [H[:, j] for j in range(H.shape[1]) if any(H[:, j])]
    return [alg.elt(*(Fraction(int(x), den) for x in col)) for col in cols]


def gram(basis):
    return [[(x * y.conjugate()).trace() for y in basis] for x in basis]


def is_order(alg, basis):
    if len(basis) != 4:
        return False
    for x in basis:
        if x.trace().denominator != 1 or x.nrd().denominator != 1:
            return False
    closed = span_basis(alg, basis + [x * y for x in basis for y in basis] + [alg.one()])
    return len(closed) == 4 and det(gram(closed)) == det(gram(basis))


def close(alg, basis):
    for _ in range(10):
        new = span_basis(alg, basis + [x * y for x in basis for y in basis] + [alg.one()])
        if det(gram(new)) == det(gram(basis)):
            return new
        basis = new
        for x in basis:
            if x.trace().denominator != 1 or x.nrd().denominator != 1:
                return None
    return None


def maximalise(alg):
    basis = list(alg.basis())
    N = alg.disc
    while det(gram(basis)) != N * N:
        d = det(gram(basis))
        improved = False
        for p in sorted({q for q in range(2, 200) if d.numerator % (q * q) == 0 and all(q % r for r in range(2, q))}):
            for v in itertools.product(range(p), repeat=4):
                if not any(v):
                    continue
                x = sum((b.scale(Fraction(c, p)) for b, c in zip(basis, v)), alg.elt())
                if x.trace().denominator != 1 or x.nrd().denominator != 1:
                    continue
                cand = close(alg, basis + [x])
                if cand and len(cand) == 4 and det(gram(cand)) < d:
                    basis = cand
                    improved = True
                    break
            if improved:
                break
        if not improved:
            raise RuntimeError(f"stuck at det {d} for N={N}")
    return basis


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for N, (a, b) in ALGEBRAS.items():
        alg = QuatAlg(a, b)
        assert alg.disc == N, (N, alg.disc)
        if N in FIXED:
            basis = [alg.elt(*(Fraction(str(c)) for c in row)) for row in FIXED[N]]
        else:
            basis = maximalise(alg)
            # put 1 first when it is a basis vector of the HNF
        assert is_order(alg, basis), N
        assert det(gram(basis)) == N * N
        doc = {
            "N": N,
            "algebra": alg.to_json(),
            "basis": [[fmt_rat(c) for c in q.coords] for q in basis],
        }
        (outdir / f"order_{N}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(N, doc["basis"], [[int(x) for x in r] for r in gram(basis)])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "src/capform/catalog")
