"""Build the surface polynomials, check their structure, and look at the ell = 2 branch points."""

from heunlab import spectral as sp

for ell in (1, 2, 3):
    for sign in ("plus", "minus"):
        P = sp.build_P(ell, sign)
        print(f"ell={ell} {sign:5s} terms={len(P.terms):3d} degree={P.degree()}")

print("\nell=1, plus:", sp.build_P(1, "plus"))

for ell in range(1, 5):
    print(f"\nell={ell}:")
    for rep in sp.identity_suite(ell):
        print("  ", rep.line())

for sign in ("plus", "minus"):
    rep = sp.verify_l2_discriminant(sign, s_value=1)
    print(f"\nell=2 {sign}: discriminant = {rep.factor} * factored form")
    print("  odd-multiplicity roots at s=1:", rep.extra["branch_points"])

print("\ngenus by ell:", {ell: sp.genus(ell) for ell in range(1, 9)})
