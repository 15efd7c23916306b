"""Categories travel as JSON files; the CLI validates, inspects and certifies them.

Run with:  python3 demos/category_files.py
"""

import io
import json
import tempfile
from pathlib import Path

from tubecone.categories import builtin, dump_category
from tubecone.cli import main

work = Path(tempfile.mkdtemp())
path = work / "ising.json"
dump_category(builtin("ising"), path)
print(f"wrote {path} ({len(json.loads(path.read_text())['fsymbols'])} F-symbol rows)")


def cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    print(f"$ tubecone {' '.join(argv)}    [exit {code}]")
    print("  " + out.getvalue().strip().replace("\n", "\n  "))


cli("validate", "--file", str(path), "--trials", "25")
cli("oracle-gap", "--file", str(path), "--S", "sigma")
cli("certify", "--file", str(path), "--S", "sigma", "--eps", "1/100", "--out", str(work / "cert.json"))
cli("verify", str(work / "cert.json"))

# break one F-symbol: validation names the failing identity
obj = json.loads(path.read_text())
for row in obj["fsymbols"]:
    if row[:5] == ["sigma"] * 4 + ["eps"] and row[7] == "eps":
        row[10], row[11] = "0", "1"
bad = work / "broken.json"
bad.write_text(json.dumps(obj))
cli("validate", "--file", str(bad))
