"""
Closing the evolution loop with a field pulse
=============================================

A second field pulse of length ``T = n pi - t`` undoes the distortion up to
a phase on ``|11>``. The residual phase comes from approximating ``j`` by
``s / 2n``.
"""

import numpy as np

from bellrecon.dynamics import (
    ControlParams,
    HamiltonianParams,
    fidelity_do_nothing,
    fidelity_do_nothing_states,
    reconstruction_pulse,
)

p = HamiltonianParams.from_dimensionless(j=0.2613, b_plus=0.4)
t = 0.8

for n in (1, 2, 4, 19):
    c = ControlParams.for_params(p, n, t)
    u = reconstruction_pulse(p, c).m
    u = u / u[0, 0]
    print(f"n={n:3d} s={c.s:3d} m={c.m:3d}  delta={c.delta(p):+.5f}"
          f"  last phase={np.angle(u[3, 3]):+.4f}  4 n pi delta={4 * n * np.pi * c.delta(p):+.4f}")

# do-nothing fidelity: closed form and overlap average
c = ControlParams.for_params(p, 2, t)
for theta in (0.0, np.pi / 4, np.pi / 2):
    print(f"theta={theta:.3f}  closed form={fidelity_do_nothing(theta, c.n, c.delta(p)):.6f}"
          f"  overlaps={fidelity_do_nothing_states(p, c, theta):.6f}")
