"""M sensors sharing one nuclear bath.

The collective state lives in the (M + 1)-dimensional symmetric subspace. This
prints its QFI and the Fisher information of a plain Y-basis readout as the
precession angle varies.
"""

import math

import numpy as np

from nanonmr.multi_sensor import MultiSensorParams, fi_y, qfi_multi

for n, gt, label in ((500, 0.01, "weak"), (5000, 0.1, "strong")):
    print(f"\nN = {n}, g tau = {gt} ({label} back-action)")
    grid = np.linspace(0.01, math.pi / 2, 157)
    print(f"{'M':>4} {'theta*(QFI)':>12} {'max QFI':>10} {'theta*(Y)':>10} {'max FI_Y':>10} {'ratio':>7}")
    for m in (1, 10, 50):
        q = [qfi_multi(MultiSensorParams(m, n, gt, x)) for x in grid]
        f = [fi_y(MultiSensorParams(m, n, gt, x)) for x in grid]
        iq, jf = int(np.argmax(q)), int(np.argmax(f))
        print(f"{m:>4} {grid[iq]:>12.3f} {q[iq]:>10.4g} {grid[jf]:>10.3f} {f[jf]:>10.4g} {f[jf] / q[iq]:>7.3f}")
