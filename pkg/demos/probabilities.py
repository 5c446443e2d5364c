# coding: utf-8

# # How likely is a node to stay intact?
#
# Pick a distribution over the set of ill-behaved nodes, then compute the
# probability that a given node is intact. Four organizations of three
# nodes each, arranged two ways: a hierarchy (3 of 4 organizations, 2 of 3
# inside each) and a flat symmetric FBAS where every node needs 8 of 12.

# In[1]:

import numpy as np

from fbas.catalog import four_org_hierarchy_fbas, four_org_partition, four_org_symmetric_fbas
from fbas.generators import generate_symmetric
from fbas.probability import (AtMostOne, GroupedByzantine, Independent, closed_form_hierarchy_4org,
                              closed_form_symmetric_12_8, intact_probability_exact, intact_probability_grouped,
                              intact_probability_incl_excl, intact_probability_mc)

hier = four_org_hierarchy_fbas()
sym = four_org_symmetric_fbas()
orgs = tuple(m for _, m in four_org_partition())
print(hier.names)


# At most one node fails. In a 3-of-4 symmetric FBAS that never hurts anyone else.

# In[2]:

small = generate_symmetric(4, 3, names="abcd")
for r in intact_probability_exact(small, None, AtMostOne(0.6, (0.2, 0.1, 0.1, 0.0))):
    print(small.names[r.node], round(r.p_intact, 6), round(r.p_intact_given_well_behaved, 6))


# Independent failures. The conditional column divides out the node's own failure.

# In[3]:

for r in intact_probability_exact(small, None, Independent((0.2, 0.1, 0.1, 0.0))):
    print(small.names[r.node], round(r.p_intact, 6), round(r.p_intact_given_well_behaved, 6))

print(intact_probability_incl_excl(small, 0, Independent((0.2, 0.1, 0.1, 0.0))).p_intact)


# Each node fails on its own with probability q, and each organization turns
# Byzantine as a whole with probability r. The flat layout does better for a1.

# In[4]:

dist = GroupedByzantine(orgs, (0.1,) * 4, (0.01,) * 4)
a = intact_probability_grouped(hier, 0, dist)
b = intact_probability_grouped(sym, 0, dist)
print(round(a.p_intact, 6), round(closed_form_hierarchy_4org(0.1, 0.01), 6))
print(round(b.p_intact, 6), round(closed_form_symmetric_12_8(0.1, 0.01), 6))


# Sweep q for a fixed r:

# In[5]:

qs = np.linspace(0.0, 0.5, 11)
table = np.array([[closed_form_hierarchy_4org(q, 0.05), closed_form_symmetric_12_8(q, 0.05)] for q in qs])
for q, (h, s) in zip(qs, table):
    print(f"{q:.2f}  {h:.4f}  {s:.4f}")
print(bool(np.all(table[:, 1] >= table[:, 0] - 1e-12)))


# Monte Carlo agrees, and the estimate depends on the seed only.

# In[6]:

mc = intact_probability_mc(hier, 0, dist, samples=20000, seed=2024)
print(round(mc.p_intact, 4), round(mc.std_error, 4), abs(mc.p_intact - a.p_intact) < 3 * mc.std_error)
print(intact_probability_mc(hier, 0, dist, samples=20000, seed=2024, lanes=4).p_intact == mc.p_intact)
