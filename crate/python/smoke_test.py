#!/usr/bin/env python3
"""Smoke test for the bevpsm_py extension module.

Build the module first, then run this script from the repository root:

    cargo build --release -p bevpsm-py
    python3 python/smoke_test.py
"""

import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def import_module():
    """Copy the built cdylib next to a temp dir under an importable name."""
    for profile in ("release", "debug"):
        for stem in ("libbevpsm_py.so", "bevpsm_py.dll", "libbevpsm_py.dylib"):
            built = ROOT / "target" / profile / stem
            if built.exists():
                tmp = Path(tempfile.mkdtemp(prefix="bevpsm_py_"))
                shutil.copy2(built, tmp / "bevpsm_py.so")
                sys.path.insert(0, str(tmp))
                import bevpsm_py

                return bevpsm_py
    sys.exit("bevpsm_py cdylib not found; run `cargo build --release -p bevpsm-py` first")


def main():
    m = import_module()

    pool = m.Pool.generate(n_profiles=8, seed=1, days=2)
    assert len(pool) == 8
    assert pool.mean_battery_capacity() > 0.0

    samples = m.draw_samples(pool, n_profiles=4, n_samples=3, fleet_size=1e6, seed=7)
    assert len(samples) == 3
    assert samples[0].scale == 1e6 / 4
    assert len(set(samples[0].profile_ids)) == 4

    kept = m.trim_samples(samples, pool, threshold=float("inf"))
    assert len(kept) == 3

    stats = m.spike_statistics(samples[0], pool)
    assert stats["peak_gw"] >= stats["mean_gw"] >= 0.0

    system = m.System.load(str(ROOT / "configs" / "stylized.toml"))
    assert system.name == "stylized"

    ref = m.run(system)
    assert ref["status"] == "optimal"

    smart = m.run(system, strategy="smart", sample=samples[0], pool=pool)
    assert smart["status"] == "optimal"
    # extra load can only make the system more expensive
    assert smart["objective_eur"] >= ref["objective_eur"]
    assert smart["bev_charge_total_mwh"] > 0.0

    bidi = m.run(system, strategy="bidirectional", sample=samples[0], pool=pool)
    assert bidi["status"] == "optimal"
    assert bidi["objective_eur"] <= smart["objective_eur"] + 1e-6 * smart["objective_eur"]

    print("smoke test passed:")
    print(f"  reference objective     {ref['objective_eur']:.2f} EUR")
    print(f"  smart objective         {smart['objective_eur']:.2f} EUR")
    print(f"  bidirectional objective {bidi['objective_eur']:.2f} EUR")


if __name__ == "__main__":
    main()
