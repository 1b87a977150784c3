"""Regenerate the bundled order fixtures.

Each candidate basis is pushed through the full validator (closure,
discriminant, ramification) and a splitting is computed and re-checked before
the JSON is written.  Run from the repository root:

    python3 tools/make_fixtures.py
"""

import json
import sys
from fractions import Fraction as Q
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from btquot.quatalg import (  # noqa: E402
    FIXTURE_DIR,
    QuatAlgebra,
    default_splitting_precision,
    make_order,
    order_to_dict,
)

H = Q(1, 2)

# (name, p, N-, N+, a, b, basis rows in the 1, i, j, k coordinates)
CANDIDATES = [
    # Hurwitz order in (-1, -1); discriminant 2
    ("p53_N2_1", 53, 2, 1, -1, -1, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [H, H, H, H]]),
    ("p11_N2_1", 11, 2, 1, -1, -1, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [H, H, H, H]]),
    # maximal order in (-2, -13); discriminant 13
    ("p2_N13_1", 2, 13, 1, -2, -13, [[H, 0, H, H], [0, Q(1, 4), H, Q(1, 4)], [0, 0, 1, 0], [0, 0, 0, 1]]),
]


def main():
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    for name, p, nm, np_, a, b, rows in CANDIDATES:
        alg = QuatAlgebra(a, b)
        basis = [alg.element(*r) for r in rows]
        ctx = make_order(alg, basis, p, nm, np_, splitting_prec=default_splitting_precision(p))
        out = FIXTURE_DIR / f"{name}.json"
        out.write_text(json.dumps(order_to_dict(ctx), indent=1) + "\n")
        print(f"{name}: ramified {alg.ramified_primes()}, splitting to {ctx.prec} digits -> {out}")


if __name__ == "__main__":
    main()
