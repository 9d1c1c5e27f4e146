import os
import shutil
import sys
import tempfile
from pathlib import Path

# The ctest harness exports the built extension dir and the package source
# dir; assemble an importable package view in a scratch directory so the
# tests run without installing the wheel.
core_dir = os.environ.get("BEACONOPT_CORE_DIR")
pkg_dir = os.environ.get("BEACONOPT_PKG_DIR")
if core_dir and pkg_dir:
    scratch = Path(tempfile.mkdtemp(prefix="beaconopt_pkg_"))
    pkg = scratch / "beaconopt"
    pkg.mkdir()
    shutil.copy(Path(pkg_dir) / "beaconopt" / "__init__.py", pkg / "__init__.py")
    for so in Path(core_dir).glob("_core*.so"):
        shutil.copy(so, pkg / so.name)
    sys.path.insert(0, str(scratch))
