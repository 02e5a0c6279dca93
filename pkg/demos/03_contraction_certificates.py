#!/usr/bin/env python3
"""Contraction certificates: strong elements pass, weak elements fail.

The certificate checks three things at a tolerance epsilon: separation of the
fixed data, containment of the image in a small ball around the attracting flag,
and a small sampled Lipschitz ratio on the admissible region.
"""

import math

import numpy as np

from slnlab import GroupElement, check_contracting, contraction_criterion, standard_flag, standard_opposite


def show(cert, label):
    print(f"{label}: verdict={cert.verdict}")
    print(f"  separation margin  {cert.margin_a:+.4f}")
    print(f"  image radius       {cert.image_radius:.6f}  (<= {cert.epsilon})")
    print(f"  lipschitz bound    {cert.lipschitz_bound:.6f}  (<= {cert.epsilon})")
    print(f"  samples            {cert.samples}")


strong = GroupElement.from_matrix(np.diag([math.e**10, math.e**-10]))
weak = GroupElement.from_matrix(np.diag([math.e**0.1, math.e**-0.1]))

show(check_contracting(strong, 0.1), "diag(e^10, e^-10) at eps=0.1")
print()
show(check_contracting(weak, 0.1), "diag(e^0.1, e^-0.1) at eps=0.1")

print("\nsufficient criterion with prescribed targets:")
ok, payload = contraction_criterion(strong, standard_flag(2), standard_opposite(2), 0.05)
print("targets = the element's own axes ->", "accepted" if ok else payload)

print("\nintermediate strengths at eps=0.1:")
for a in (1.0, 2.0, 3.0, 4.0, 6.0):
    g = GroupElement.from_matrix(np.diag([math.e**a, math.e**-a]))
    cert = check_contracting(g, 0.1)
    print(f"  strength e^{a:<4} -> verdict {cert.verdict:<5} "
          f"(lip {cert.lipschitz_bound:.4f}, image {cert.image_radius:.4f})")
