#!/usr/bin/env python3
"""The two protocol primitives, with and without operation errors.

Purification consumes one pair to raise the fidelity of another,
conditioned on matching measurement parities; swapping fuses two
adjacent pairs into one longer, slightly worse pair.  Everything here is
computed twice: through the fast Bell-weight recurrences and through the
exact 16x16 density-matrix oracle.
"""

import numpy as np

from qrepeater import (
    BellDiagonalState,
    NoiseParams,
    connect_chain,
    fidelity,
    from_fidelity,
    purify,
    swap,
)
from qrepeater.exact import purify_oracle, swap_oracle

ideal = NoiseParams(p=1.0, eta=1.0)
noisy = NoiseParams(p=0.995, eta=0.995)

print("purification gain (two identical phase-error pairs):")
print("F_in    F_out(ideal)  accept   F_out(p=eta=0.995)  accept")
for f in (0.7, 0.8, 0.9, 0.95, 0.99):
    s = from_fidelity(f, 0.0)
    a = purify(s, s, ideal)
    b = purify(s, s, noisy)
    print(
        f"{f:<7} {fidelity(a.state):<13.6f} {a.success_prob:<8.4f} "
        f"{fidelity(b.state):<19.6f} {b.success_prob:.4f}"
    )

print("\nswap losses (two identical pairs fused into one):")
print("F_in    F_out(ideal)  F_out(p=eta=0.995)")
for f in (0.9, 0.95, 0.99, 1.0):
    s = from_fidelity(f, 0.0)
    print(
        f"{f:<7} {fidelity(swap(s, s, ideal)):<13.6f} "
        f"{fidelity(swap(s, s, noisy)):.6f}"
    )

print("\nchains of n swapped pairs decay exponentially without purification:")
s = from_fidelity(0.98, 0.0)
for n in (1, 2, 4, 8, 16, 32):
    chained = connect_chain([s] * n, ideal)
    closed = (1 + (2 * 0.98 - 1) ** n) / 2
    print(f"  n={n:<3} fidelity {fidelity(chained):.6f}   closed form {closed:.6f}")

print("\nfast path vs exact density-matrix oracle on random mixed pairs:")
rng = np.random.default_rng(5)
worst = 0.0
for _ in range(50):
    a = BellDiagonalState.from_weights(rng.random(4))
    b = BellDiagonalState.from_weights(rng.random(4))
    fast = purify(a, b, noisy)
    oracle = purify_oracle(a, b, noisy)
    worst = max(worst, float(np.max(np.abs(fast.state.weights - oracle.state.weights))))
    worst = max(
        worst,
        float(np.max(np.abs(swap(a, b, noisy).weights - swap_oracle(a, b, noisy).weights))),
    )
print(f"  worst deviation over 50 pairs: {worst:.3e}")
