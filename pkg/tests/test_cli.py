import io
import json
import subprocess
import sys

import pytest

from qnrlab.cli import EXIT_DOMAIN, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, main, replay_manifest


def run(*argv):
    buf = io.BytesIO()
    code = main(list(argv), stdout=buf)
    return code, buf.getvalue().decode()


def rows(text):
    import csv
    return list(csv.DictReader(io.StringIO(text)))


def test_constants_xi():
    code, out = run("constants", "--xi")
    (r,) = rows(out)
    assert code == EXIT_OK and abs(float(r["xi"]) + 0.656999) < 1e-5


def test_exppairs_depth1():
    code, out = run("exppairs", "--depth", "1")
    (r,) = rows(out)
    assert code == EXIT_OK and r["best_c"] == "8/7"


def test_beatty_prime7():
    code, out = run("beatty", "--alpha", "sqrt2", "--beta", "0", "--prime", "7")
    (r,) = rows(out)
    assert code == EXIT_OK and r["N"] == "4"


def test_json_output():
    code, out = run("beatty", "--prime", "7", "--prime", "11", "--json")
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == EXIT_OK and [r["params"]["p"] for r in recs] == [7, 11]
    assert all("runtime_ms" not in r for r in recs)


@pytest.mark.parametrize("argv,code", [
    (["nonsense"], EXIT_USAGE),
    (["beatty", "--bogus"], EXIT_USAGE),
    ([], EXIT_USAGE),
    (["scan-density"], EXIT_USAGE),
    (["discrepancy", "--terms", "10"], EXIT_USAGE),
    (["beatty", "--prime", "8"], EXIT_DOMAIN),
    (["scan-density", "--prime", "101", "--epsilon", "0.7"], EXIT_DOMAIN),
    (["ps", "--prime", "101", "--c", "2"], EXIT_DOMAIN),
    (["beatty", "--alpha", "sqrt2", "--prime", "7", "--precision-bits", "8"], EXIT_DOMAIN),
    (["pairs", "--prime", "7", "--N", "100000", "--M", "100000"], EXIT_RESOURCE),
])
def test_exit_codes(argv, code):
    assert run(*argv)[0] == code


def test_jobs_determinism():
    a = run("scan-density", "--prime-range", "3:3000", "--jobs", "1")
    b = run("scan-density", "--prime-range", "3:3000", "--jobs", "4")
    assert a[0] == b[0] == EXIT_OK and a[1] == b[1]


def test_discrepancy_seeded_reproducible():
    a = run("discrepancy", "--seed", "5", "--terms", "200")
    b = run("discrepancy", "--seed", "5", "--terms", "200")
    assert a == b and all(r["dominates"] == "True" for r in rows(a[1]))


def test_manifest_roundtrip(tmp_path):
    out = tmp_path / "r.csv"
    code, _ = run("ps", "--prime", "1009", "--prime", "2027", "--out", str(out))
    man = tmp_path / "r.csv.manifest.json"
    assert code == EXIT_OK and man.exists()
    assert json.loads(man.read_text())["argv"][0] == "ps"
    assert replay_manifest(man)
    out.write_bytes(b"tampered")
    m = json.loads(man.read_text())
    m["output_sha256"] = "0" * 64
    man.write_text(json.dumps(m))
    assert not replay_manifest(man)


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "qnrlab", "exppairs", "--depth", "0"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and "best_c" in p.stdout
