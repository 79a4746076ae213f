"""Facets of small projected simplices and how the symmetries generate them."""

from probbounds import SymmetricSpec, enumerate_facets, synthesize
from probbounds.inequalities import generate_family, negate_variables, parity_check


def main():
    for line in enumerate_facets(3, 2).lines():
        print(line)

    print()
    spec = SymmetricSpec(2, (1, 2))
    print("parity of S_2(1,2):", parity_check(spec).status)
    base = synthesize(spec)
    for negated in [(), ("A",), ("B",), ("A", "B")]:
        print(f"  negate {','.join(negated) or '-'}: {negate_variables(base, negated).text()}")

    print()
    family = generate_family(3, 2, 16)
    facets = set(enumerate_facets(3, 2).facets)
    print(f"first 16 generated inequalities cover the facets: {set(family) == facets}")


if __name__ == "__main__":
    main()
