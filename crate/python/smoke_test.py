"""Smoke test for the quotopo extension module.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import quotopo
from quotopo import FiniteSpace


def main():
    t = FiniteSpace(4, [[1], [2], [1, 2], [1, 2, 3]])
    assert t.n == 4
    assert t.opens()[0] == [] and t.opens()[-1] == [1, 2, 3, 4]
    assert t.cover(3) == [1, 2, 3]
    assert t.is_open([1, 2]) and not t.is_open([3])

    family = quotopo.quotient_family(t)
    assert len(family) == 3
    assert family[0] == quotopo.identify(t, 1)
    assert all(q.n == 3 for q in family)

    found = quotopo.reconstruct(family)
    assert any(quotopo.is_homeomorphic(s, t) for s in found)
    assert all(quotopo.verify(s, family) for s in found)
    ours = sorted(quotopo.canonical_form(s) for s in found)
    theirs = sorted(quotopo.canonical_form(s) for s in quotopo.oracle(family))
    assert ours == theirs, (ours, theirs)

    a = FiniteSpace.generated_by(3, [[1], [2], [2, 3]])
    b = FiniteSpace.generated_by(3, [[2], [3], [1, 3]])
    assert quotopo.canonical_form(a) == quotopo.canonical_form(b)
    assert quotopo.is_homeomorphic(a, b)

    parsed = FiniteSpace.parse(t.to_text())
    assert parsed == [t]

    roots = {tuple(root): kind for root, _, kind in quotopo.clans(t)}
    assert (1,) in roots

    try:
        FiniteSpace(3, [[1], [2]])
    except ValueError:
        pass
    else:
        raise AssertionError("non-topology accepted")

    try:
        quotopo.reconstruct([FiniteSpace.indiscrete(5)] * 5, max_branches=1)
    except TimeoutError:
        pass
    else:
        raise AssertionError("limit not reported")

    print(f"ok: {len(found)} solutions, certificate {ours[0]}")


if __name__ == "__main__":
    main()
