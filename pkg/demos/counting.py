"""
Counting configurations exactly
===============================

Paths start at (a_i, 0) and end at (0, i).  The product formula and a
direct enumeration give the same numbers.
"""

from tangent_arctic import DefectSequence, brute_force_count, gt_count, h_flat

# two paths, starting at x = 1 and x = 3
seq = DefectSequence((1, 3))
print("a =", seq.a, " Z =", gt_count(seq), " enumerated:", brute_force_count(seq))

# tightly packed starting points leave no freedom at all
print("a = (1, 2, 3)  Z =", gt_count(DefectSequence((1, 2, 3))))

# counts grow fast; the formula handles large cases with exact integers
big = DefectSequence(tuple(range(2, 81, 2)))
print("40 paths, every second site: Z has", len(str(gt_count(big))), "digits")

# moving the start of path q+1 into the gap changes Z by a rational factor
seq = DefectSequence((1, 4))
for ell in (1, 2, 3):
    print(f"entry at a_1 + {ell}: H = {h_flat(seq, 1, ell).fraction}")
