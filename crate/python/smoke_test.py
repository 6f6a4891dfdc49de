"""Smoke test for the pymhdec extension module."""

import json

import pymhdec


def main():
    assert pymhdec.weights("x^4+6*x^2*y+6*y^2") == (4, 1, 2)
    assert pymhdec.weights("x^2+x*y+y^3") is None
    assert pymhdec.hessian("x^4+6*x^2*y+6*y^2") == "144*y"

    text = pymhdec.partition("x^4+6*x^2*y+6*y^2", 2.0**-8)
    doc = json.loads(text)
    assert doc["format"] == "mhdec-partition"
    assert doc["stats"]["per_case"]["A2"] > 0

    passed, covered, mult, worst = pymhdec.verify(text, samples=50_000)
    assert passed and covered == 1.0 and worst <= 64.0, (passed, covered, worst)

    d4, d2, pieces = pymhdec.estimate("x^2+y^2", 2.0**-4, trials=2, grid=32, box_t=4.0)
    assert pieces > 0 and d4 > 0 and d2 > 0

    try:
        pymhdec.partition("x^2+y^2", 1.5)
    except RuntimeError:
        pass
    else:
        raise AssertionError("delta out of range accepted")

    print(f"pymhdec {pymhdec.__version__}: ok ({len(doc['pieces'])} pieces, multiplicity {mult}, worst {worst:.2f})")


if __name__ == "__main__":
    main()
