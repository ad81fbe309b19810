#!/usr/bin/env python3
"""Smoke test for the mcloop_py extension module.

Build the extension first:

    cargo build --release -p mcloop-py

then run this script with the same interpreter the module was built against:

    python3 python/smoke_test.py
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load_extension():
    root = pathlib.Path(__file__).resolve().parents[1]
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libmcloop_py.so", "mcloop_py.so", "libmcloop_py.dylib")
    ]
    for path in candidates:
        if path.exists():
            loader = importlib.machinery.ExtensionFileLoader("mcloop_py", str(path))
            spec = importlib.util.spec_from_file_location("mcloop_py", str(path), loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            print(f"loaded {path}")
            return module
    sys.exit("mcloop_py extension not found; run `cargo build --release -p mcloop-py` first")


def approx(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    mc = load_extension()

    mu, distance, k = 83.0, 100.0, 200.0

    # channel: unity steady crossing gain, normalized cut-off constant
    channel = mc.Channel(mu, distance, "dn")
    assert abs(channel.crossing_gain_db(1e-12)) < 1e-6
    cut = channel.cutoff("absolute")
    assert approx(cut["omega_hat"], 4.14, 0.01), cut
    assert approx(cut["omega_c_rad_s"], 4.14 * mu / distance**2, 0.01)

    dd = mc.Channel(mu, distance, "dd")
    cut_dd = dd.cutoff("from-steady")
    assert approx(cut_dd["omega_hat"], 15.0, 0.01), cut_dd
    assert approx(cut_dd["reference_db"], 20 * math.log10(1 / distance), 0.01)

    # boundary systems and the assembled link
    h0 = mc.BoundarySystem.transmembrane(k, mu)
    hl = mc.BoundarySystem.ligand_receptor(0.1, 100.0, 1.0, 1000.0, mu)
    h = h0.transfer(math.sqrt(3) * k)
    assert approx(abs(h[0][1]), 0.5, 1e-9), "membrane path is half gain at sqrt(3) k"

    link = mc.Link(channel, h0, hl)
    band = [10 ** (-6 + 4 * i / 99) for i in range(100)]
    gains = link.sweep_gamma_db(band)
    assert min(gains) > -6.0, "redesigned membrane keeps the band above -6 dB"
    assert abs(link.s0(1e-2)) >= 0.5

    # a slow membrane loses the band to self-interference
    slow = mc.Link(channel, mc.BoundarySystem.transmembrane(5e-2, mu), hl)
    slow_gains = slow.sweep_gamma_db(band)
    assert min(slow_gains) < -6.0

    # separated receiver approximation
    m_exact = link.m0l_exact(1e-3)
    m_approx = link.m0l_approx(1e-3)
    assert abs(m_exact - m_approx) / abs(m_exact) < 1e-2

    # design rules
    report = mc.design_check(
        band_hi=1e-2, l_min=10.0, l_max=100.0,
        mu=mu, k=k, k_on=0.1, k_off=100.0, k_re=1.0, receptors=1000.0,
    )
    assert report["all_pass"], report
    assert approx(report["conditions"]["channel-bandwidth"]["threshold"], 24.2, 0.005)
    bad = mc.design_check(
        band_hi=1e-2, l_min=10.0, l_max=100.0,
        mu=mu, k=5e-2, k_on=0.1, k_off=100.0, k_re=1.0, receptors=1000.0,
    )
    assert not bad["all_pass"]

    # gain approximations
    corner = mu / distance**2
    assert approx(mc.tanh_gain_approx(corner, distance, mu), 1.0, 1e-12)
    assert approx(mc.alpha_max_gain(k, mu, distance), math.sqrt(mu / k), 1e-12)

    # time-domain cross-check (a fast in-band run)
    omega = 1e-1
    fdm_db = mc.empirical_gain_db(
        mu=mu, distance=50.0, k=k, k_on=0.1, k_off=100.0, k_re=1.0,
        receptors=1000.0, omega=omega,
    )
    analytic_db = 20 * math.log10(abs(mc.Link(mc.Channel(mu, 50.0, "dn"), h0, hl).gamma_0l(omega)))
    assert abs(fdm_db - analytic_db) < 0.5, (fdm_db, analytic_db)

    print("smoke test passed")


if __name__ == "__main__":
    main()
