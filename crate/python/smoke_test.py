"""Smoke test for the relupoly Python extension.

Build and install it first:

    pip install -e crates/relupoly-py --no-build-isolation
"""

import json
from fractions import Fraction

import relupoly


def main():
    net, trail = relupoly.construct_identifiable([2, 2, 2, 1], seed=1)
    assert json.loads(trail)["stages"], "trail has no stages"

    verdicts = json.loads(relupoly.check(net))
    failing = [v["property"] for v in verdicts if v["status"] != "pass"]
    assert not failing, f"failing verdicts: {failing}"

    rank, expected = relupoly.functional_dimension(net, samples=100)
    assert rank == expected == 11, (rank, expected)

    [y] = relupoly.evaluate(net, [["0", "1/2"]])
    Fraction(y[0])

    report = json.loads(relupoly.analyze(net))
    assert report["depth_certificate"]["result"] == "accept"

    assert relupoly.render_svg(net).startswith("<svg")

    try:
        relupoly.construct_identifiable([2, 1, 2, 1])
    except ValueError:
        pass
    else:
        raise AssertionError("width-1 hidden layer accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
