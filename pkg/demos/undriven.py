"""Undriven sensing with a pi-pulse train resonant with the nuclear precession.

Compares the operating points that maximise the signal and the entanglement
penalty as the NV gets deeper, and shows the filter function picking one
harmonic out of a Lorentzian spectrum.
"""

import math
import warnings

from nanonmr.dipolar import MAGIC_ANGLE, SampleGeometry
from nanonmr.errors import ExpansionInvalid, StrategyInfeasible
from nanonmr.undriven import PulseTrain, filter_overlap_s2, lorentzian_spectrum, undriven_operating_point

warnings.simplefilter("ignore", ExpansionInvalid)
pulse = PulseTrain(1.0)

print(f"{'depth':>6} {'strategy':>18} {'tau us':>9} {'cos2':>7} {'closed form':>12} {'exact':>12}")
for d in (10.0, 20.0, 30.0, 50.0):
    g = SampleGeometry(d, MAGIC_ANGLE)
    for strat in ("peak-signal", "peak-entanglement"):
        op = undriven_operating_point(g, pulse, 1000.0, strat)
        print(f"{d:>6.0f} {strat:>18} {op.tau:>9.2f} {op.cos2:>7.4f} "
              f"{op.qfi_closed_form:>12.4g} {op.qfi_exact.total:>12.4g}")

try:
    undriven_operating_point(SampleGeometry(30.0, 0.0), pulse, 1000.0, "peak-entanglement")
except StrategyInfeasible as exc:
    print(f"\nuntilted NV: {exc}")

spec = lorentzian_spectrum(1.0, 0.02)
print("\nFilter overlap with a Lorentzian line (width 0.02 rad/us) as the window grows:")
for tau in (50.0, 100.0, 200.0, 400.0):
    s2 = filter_overlap_s2(PulseTrain(1.0, 0.01), spec, tau)
    print(f"  tau={tau:>5.0f}  s2={s2:9.4f}  narrow-filter limit={tau / (2 * math.pi) * spec(0.01):9.4f}")
