"""Smoke test for the lis_py extension module.

Build and run from the repository root:

    cargo build --release -p lis-py --features extension-module
    cp target/release/liblis_py.so python/lis_py.so
    python3 python/smoke_test.py
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import lis_py  # noqa: E402


def main():
    names = lis_py.System.bundled_names()
    assert "exponential-symmetric" in names, names

    sys_ = lis_py.System.bundled("exponential-symmetric")
    assert sys_.model == "cat"
    x = [0.2, 0.3, 0.4]

    e, f = sys_.alpha_coeffs(0.5, x)
    assert math.isfinite(e) and math.isfinite(f)
    assert sys_.liouville_density(0.5, x) > 0.0

    report = sys_.validate(grid=8, random=50, seed=1)
    assert report["liouville_ok"] and report["contact_ok"], report

    closed = sys_.liouville_field(0.3, x, method="closed_form")
    solved = sys_.liouville_field(0.3, x, method="solve")
    assert abs(closed["f"] - solved["f"]) < 1e-9
    assert abs(closed["g"] - solved["g"]) < 1e-9

    s_star = sys_.skeleton(x)
    assert abs(s_star) < 1e-10, s_star
    assert sys_.normal_expansion(x) > 0.0

    points, exited = sys_.integrate(0.1, x, 1.0, 1e-2)
    assert not exited and len(points) == 101
    assert points[-1][1] > 0.1

    desc = {
        "model": "cat",
        "h_u": {"type": "const", "params": {"value": 1.0}},
        "h_s": {"type": "const", "params": {"value": 1.0}},
        "profile": {"kind": "exponential"},
    }
    from_json = lis_py.System.from_json(json.dumps(desc))
    assert abs(from_json.liouville_density(0.5, x) - sys_.liouville_density(0.5, x)) < 1e-12

    try:
        lis_py.System.from_json("{not json")
    except lis_py.LisError:
        pass
    else:
        raise AssertionError("malformed descriptor accepted")

    da = lis_py.da_check(grid=21)
    assert isinstance(da, dict)

    h = lis_py.holder_exponent([math.sin(0.01 * i) for i in range(4096)], 10)
    assert 0.0 < h["exponent"] <= 1.0

    print("smoke test OK:", len(names), "bundled systems")


if __name__ == "__main__":
    main()
