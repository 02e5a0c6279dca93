#!/usr/bin/env python3
"""Ping-pong freeness certificates with an independent exact crosscheck.

The fixture is a rational pair: a strong diagonal and its conjugate by the
3-4-5 rotation. The certificate verifies per-generator contraction, pairwise
separation of attracting-from-repelling data, and separation of the attracting
centers; the crosscheck multiplies out every word at bounded length in exact
rational arithmetic and counts collisions.
"""

import numpy as np

from slnlab import GroupElement, exact_freeness_crosscheck, pingpong_certificate, shadow_inclusion_check

d = GroupElement.from_exact([["148", "0"], ["0", "1/148"]])
s = GroupElement.from_exact([["4/5", "-3/5"], ["3/5", "4/5"]])
pair = [d, s.matmul(d).matmul(s.inverse())]

cert = pingpong_certificate(pair, 0.1)
print("verdict:", cert.verdict)
print("pairwise separation:\n", np.round(cert.pairwise_separation, 4))
print("center separation:\n", np.round(cert.shadow_disjointness, 4))

xc = exact_freeness_crosscheck(pair, 8)
print(f"\nexact crosscheck: {xc.words_checked} words up to length {xc.max_len}, "
      f"{xc.collisions} collisions")

print("\nshadow nesting along one-letter extensions:")
for w_label, gamma in (("d", pair[0]), ("ds", pair[0].matmul(pair[1]))):
    for z_label, z in (("d", pair[0]), ("s d s^-1", pair[1])):
        ok = shadow_inclusion_check(gamma, gamma.matmul(z), z, 0.1, budget=600)
        print(f"  shadow({w_label}*{z_label}) inside shadow({w_label}): {ok}")

print("\nfailure modes:")
g2 = pair[0].matmul(pair[0])
cert_sq = pingpong_certificate([pair[0], g2], 0.1)
print("  {g, g^2}:", cert_sq.verdict, "-", cert_sq.failures[0] if cert_sq.failures else "")

r90 = GroupElement.from_exact([["0", "-1"], ["1", "0"]])
inverse_pair = [pair[0], r90.matmul(pair[0]).matmul(r90.inverse())]
cert_inv = pingpong_certificate(inverse_pair, 0.1)
print("  {g, g^-1}: ", cert_inv.verdict, "-", cert_inv.failures[0] if cert_inv.failures else "")
xc_inv = exact_freeness_crosscheck(inverse_pair, 4)
print(f"  {{g, g^-1}} exact collisions at length <= 4: {xc_inv.collisions} "
      f"(first witness: {xc_inv.witnesses[0] if xc_inv.witnesses else None})")
