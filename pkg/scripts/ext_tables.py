"""Print the Ext^1 and Ext^2 dimension tables for generic lambda with their exceptional conditions."""

from fractions import Fraction

from supercontact.cohomology import ext1_classify, ext2_dimension


def main() -> None:
    for twice in range(0, 14):
        p = Fraction(twice, 2)
        e1, e2 = ext1_classify(None, p), ext2_dimension(None, p)
        d2 = e2.dimension if e2.covered else "?"
        closed = e1.conditions.get("cocycle", "")
        exact = e1.conditions.get("coboundary", "")
        print(f"p = {str(p):5s} ext1 {e1.dimension}  ext2 {d2}  closed: {closed}  exact: {exact}")


if __name__ == "__main__":
    main()
