# coding: utf-8

# # Quorums and quorum intersection
#
# Node sets are plain Python ints used as bitmasks. `f.mask("123")` turns
# node names into a mask and `f.names_of(mask)` goes the other way.

# In[1]:

from fbas.catalog import seven_node_fbas
from fbas.generators import generate_symmetric, stellar_fbas
from fbas.quorums import (enumerate_min_quorums, enumerate_quorums, greatest_quorum, is_quorum,
                          min_intersection_size, quorum_intersection)
from fbas.trust import build_trust_graph, scc_partition, strongly_connected_components

f = seven_node_fbas()
print(f.names)


# Every quorum, in the order the enumeration produces them:

# In[2]:

for q in enumerate_quorums(f):
    print(f.names_of(q))


# The greatest quorum inside a set is the fixpoint of dropping nodes that have no slice in it.

# In[3]:

print(f.names_of(greatest_quorum(f, f.mask("12347"))))
print(f.names_of(greatest_quorum(f, f.mask("12345"))))
print(is_quorum(f, f.mask("1237")), is_quorum(f, f.mask("123")))


# Minimal quorums and the smallest pairwise overlap:

# In[4]:

print([f.names_of(q) for q in enumerate_min_quorums(f, size_bound=None)])
print(min_intersection_size(f))


# A symmetric FBAS where every node needs 2 of 4 has disjoint quorums.
# The result carries a witness pair.

# In[5]:

g = generate_symmetric(4, 2, names="abcd")
res = quorum_intersection(g)
print(res.intersects, [g.names_of(q) for q in res.witness])


# Trust graph and its strongly connected components:

# In[6]:

tg = build_trust_graph(f)
print([f.names_of(c) for c in strongly_connected_components(tg)])
part = scc_partition(tg)
print([f.names_of(part.components[i]) for i in part.maximal])


# The Stellar-style network with seven organizations of three has a lot of quorums,
# but checking intersection does not need all of them.

# In[7]:

s = stellar_fbas()
print(sum(1 for _ in enumerate_quorums(s)))
print(quorum_intersection(s).intersects)
