"""
Telling the reconstructed states apart
======================================

Four projective measurement sets and the unambiguous POVM are compared on
the reconstructed pair. Pre-rotating a set by a member of its commutant
changes nothing.
"""

import numpy as np

from bellrecon.dynamics import reconstructed_pair
from bellrecon.measurement import (
    average_fidelity,
    builtin_set,
    commutant_partition,
    helstrom,
    optimal_povm,
    random_commutant_member,
)
from bellrecon.qstate import BELL

theta, n, delta = 0.3, 2, 0.05
b1, b2 = reconstructed_pair(theta, n, delta)

for label in ("M_C", "M_B", "M_B'", "M_R"):
    ms = builtin_set(label, theta)
    r = helstrom(ms, b1.to(ms.basis), b2.to(ms.basis))
    print(f"{label:5s} P1={r.p_h1:.4f} P2={r.p_h2:.4f}  F={average_fidelity(label, theta, n, delta):.4f}")

# near theta = 0 with a sizeable defect the computational readout wins
print("F_C  at theta=0:", average_fidelity("M_C", 0.0, n, 0.1))
print("F_B' at theta=0:", average_fidelity("M_B'", 0.0, n, 0.1))

# unambiguous discrimination of a non-orthogonal pair
rng = np.random.default_rng(3)
a = b1
b = b1.normalized(b1.amps + 0.6 * b2.amps, BELL)
povm = optimal_povm(a, b)
r = helstrom(povm, a, b)
print(f"POVM: P1={r.p_h1:.4f} P2={r.p_h2:.4f} inconclusive={r.p_inconclusive:.4f}")

# invariance under the commutant
ms = commutant_partition(BELL)
u = random_commutant_member(rng, BELL)
before, after = helstrom(ms, b1, b2), helstrom(ms.pre_rotated(u), b1, b2)
print("change under commutant rotation:", abs(before.p_h2 - after.p_h2))
