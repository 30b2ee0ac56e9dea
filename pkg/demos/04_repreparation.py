"""
Repreparing the identified state from pulses
============================================

After the Bell-frame readout the qubits sit in a computational state. A
short gate word built from field pulses returns the source state.
"""

import numpy as np

from bellrecon.qstate import fidelity_pure, make_initial
from bellrecon.repreparation import DECISION, TEXTBOOK, realize_gate, reprepare

# pulse-realized gates agree with the usual ones up to a phase
for label in ("X", "Y", "Z", "S", "H"):
    g = realize_gate(label)
    k = np.argmax(np.abs(TEXTBOOK[label]))
    phase = g.flat[k] / TEXTBOOK[label].flat[k]
    print(f"{label}: phase {np.angle(phase) / np.pi:+.3f} pi, residual {np.max(np.abs(g - phase * TEXTBOOK[label])):.1e}")

theta = np.pi / 3
for outcome, k in DECISION.items():
    word, state = reprepare(outcome, theta)
    print(f"|{outcome}> -> {word}   F = {fidelity_pure(state, make_initial(k, theta)):.12f}")
