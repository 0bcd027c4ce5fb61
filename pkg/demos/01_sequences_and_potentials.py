#!/usr/bin/env python3
"""Sequence-space basics: parity, weighted norms, convolution, potentials.

Potentials live on the even lattice {2k}, semi-periodic vectors on the odd
lattice {2k-1}; every sequence carries its parity explicitly.
"""

import math

from hillgap import (
    FourierSequence,
    PotentialFamily,
    PotentialSpec,
    SobolevParams,
    convolve,
    is_real_valued,
    make_potential,
    normalize_zero_mode,
    weighted_norm,
)

# =============================================================================
# A finitely supported sequence is a parity tag plus a coefficient map.
# Indices outside the window are implicitly zero.

v = FourierSequence.make("even", {2: 1.0, -2: 1.0})
print("v(2)  =", v(2))
print("v(40) =", v(40), "(implicit zero)")

# The weighted norm uses <k> = 1 + |k|; s = 0 is the plain l2 norm.

print("||v||_{h^0}  =", weighted_norm(v, 0.0))
print("||v||_{h^1}  =", weighted_norm(v, 1.0), "= 3 sqrt(2) =", 3 * math.sqrt(2))

# =============================================================================
# Convolution follows the lattice sum: even*even and odd*odd produce even
# support, mixed parities produce odd support.

u = FourierSequence.make("odd", {1: 1.0, -1: 1.0})
w = convolve(v, u)
print("parity of (even * odd):", w.parity.value)
print("support:", w.support())

# Hermitian-symmetric coefficients mean a real-valued potential, and
# real-valuedness survives convolution squares:

assert is_real_valued(v)
assert is_real_valued(convolve(v, v))

# =============================================================================
# A constant in the potential only shifts the spectrum; downstream code works
# on the zero-mode-normalized sequence and re-adds the constant at the end.

raw = FourierSequence.make("even", {0: 5.0, 2: 1.0, -2: 1.0})
v0, c = normalize_zero_mode(raw)
print("removed constant:", c, "| v0(0) =", v0(0))

# =============================================================================
# Potential families.  Random families rescale to the requested norm bound
# exactly and are reproducible bit for bit from the seed.

spec = PotentialSpec(
    family=PotentialFamily.RANDOM_ROUGH,
    params={"window": 64},
    radius=1.0,
    seed=42,
)
params = SobolevParams(m=1, alpha=0.5)
rough = make_potential(spec, params)
print("rough ||v||_{h^{-1/2}} =", weighted_norm(rough, -0.5))
assert dict(rough.coeffs) == dict(make_potential(spec, params).coeffs)
