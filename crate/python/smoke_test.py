"""Build the extension with cargo, import it and exercise a few calls.

    python3 python/smoke_test.py
"""

import cmath
import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "richardson-py"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release"
    if sys.platform == "darwin":
        built = lib / "librichardson.dylib"
    elif sys.platform == "win32":
        built = lib / "richardson.dll"
    else:
        built = lib / "librichardson.so"
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    dest = Path(tempfile.mkdtemp()) / ("richardson" + suffix)
    shutil.copy(built, dest)
    sys.path.insert(0, str(dest.parent))


def close(a, b, tol=1e-6):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    build()
    import richardson as r

    # Free well: E_n(0) = n²π²/4.
    for n in range(1, 4):
        assert close(r.eigenvalue(0.0, n), n * n * r.UNIT), n
    pairs = r.eigenpairs_at(3.0, 3)
    assert [p.sheet for p in pairs] == [1, 2, 3]
    assert [p.osc for p in pairs] == [0, 1, 2]
    assert abs(r.char_d(3.0, pairs[0].e)) < 1e-9

    # Lowest branch point, on the imaginary axis.
    bps = r.branch_catalog(2, 20.0)
    first = min(bps, key=lambda b: abs(b.lambda_))
    assert first.sheets == (1, 2)
    assert close(abs(first.lambda_.imag), 4.475308602, 1e-6)
    assert close(first.e.real, 6.401903, 1e-6)
    assert first.swaps_sheets()
    assert first.defect().passed

    maxima = [c for c in r.critical_catalog(3) if c.kind == "max"]
    assert all(c.defect().passed for c in maxima)

    # Richardson side: at E = 5 the ground couplings are a purely
    # imaginary pair.
    cs = {c.label: c for c in r.eigencouplings(5.0)}
    assert cs["1+"].kind == "iR" and cs["1-"].kind == "iR"
    assert close(abs(cs["1+"].lambda_), 4.166656, 1e-5)
    assert r.zettl_bound(5.0) >= sum(c.kind != "R" for c in cs.values())

    segs = r.classify_segments("1+", 0.0, 25.0)
    assert [s.kind for s in segs] == ["R", "iR", "R", "C", "R"]
    assert r.oscillation_census(5.0, 2) == [0, 2, 2]

    # Lattice of maxima: smallest energy with multiplicity 4 is 65·π²/4.
    assert r.smallest_with_multiplicity(4) == 65
    assert r.defective_multiplicity(65) == 4
    assert [s.e_red for s in r.sheet_maxima(2)] == [5, 5]

    lam = 2.0 + 0.5j
    e = r.eigenpairs_at(2.0, 1)[0].e
    e = complex(e)
    # Newton on E along the complex λ to get a complex eigenpair.
    for _ in range(50):
        h = 1e-7 * max(1.0, abs(e))
        d = r.char_d(lam, e)
        e -= d * h / (r.char_d(lam, e + h) - d)
    agreement, reciprocity = r.derivative_check(lam, e)
    assert agreement.passed and reciprocity.passed, (agreement, reciprocity)
    assert r.im_identity(lam, e).passed

    kind, points = r.trace_locus(2, 9.8696)
    assert kind in ("A", "B", "C") and len(points) > 10
    assert all(math.isfinite(p[1]) and cmath.isfinite(p[0]) for p in points)

    try:
        r.coupling_at("0+", 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("bad label accepted")

    (res,) = r.run_verification([2])
    assert res.passed, res
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
