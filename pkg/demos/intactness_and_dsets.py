# coding: utf-8

# # Intact nodes and DSets
#
# When a set B of nodes misbehaves, the intact nodes are the ones that still
# enjoy safety and liveness no matter what B does. Their complement is the
# smallest DSet containing B.

# In[1]:

from fbas.catalog import befouled_quorum_fbas, seven_node_fbas
from fbas.generators import generate_symmetric
from fbas.intactness import (b_quorums, delete_nodes, has_subslice_property, intact_nodes, is_b_intact_set,
                             is_dset, symmetric_dsets)
from fbas.nodeset import subsets

f = seven_node_fbas()


# All DSets of the seven-node FBAS:

# In[2]:

print([f.names_of(d) for d in subsets(f.all) if is_dset(f, d)])


# Node 4 goes bad. Its group falls with it, the rest stays intact.

# In[3]:

rep = intact_nodes(f, f.mask("4"))
print(f.names_of(rep.intact), f.names_of(rep.smallest_dset))


# Deleting nodes gives a smaller explicit FBAS:

# In[4]:

g = delete_nodes(f, f.mask("456"))
print(g.names, [[g.names_of(s) for s in ss] for ss in g.slices])


# In a symmetric FBAS the DSets depend only on their size.

# In[5]:

for n, k in [(4, 3), (7, 5), (12, 8)]:
    pred = symmetric_dsets(n, k)
    print(n, k, sorted({d.bit_count() for d in subsets((1 << n) - 1) if pred(d)}))

h = generate_symmetric(7, 5)
print(all(is_dset(h, d) == symmetric_dsets(7, 5)(d) for d in subsets(h.all)))


# A case where a B-intact set exists but no node is intact. Here B = {a}.

# In[6]:

e = befouled_quorum_fbas()
a = e.mask("a")
print([e.names_of(q) for q in b_quorums(e, a)])
print(is_b_intact_set(e, a, e.mask("cd")), e.names_of(intact_nodes(e, a).intact))
print(has_subslice_property(e, a))
