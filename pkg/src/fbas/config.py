"""Resource guards shared across the package. Plain module globals so tests
and the CLI can adjust them."""

# explicit slices produced by slice generation or simple-FBAS expansion
EXPANSION_CAP = 10**6

# universes up to this size get a precomputed slice-containment table per node
TABLE_LIMIT = 20

# stored minimal quorums for min_intersection_size
QUORUM_CAP = 10**6

# 2^|V| summation in exact intactness probabilities
EXACT_PROBABILITY_LIMIT = 16

# B-intact set decision (enumerates B-quorums)
B_INTACT_LIMIT = 20

# brute-force oracles
BRUTE_QUORUM_LIMIT = 16
BRUTE_DSET_LIMIT = 12

# inclusion-exclusion over maximal DSets
MAX_DSETS_INCL_EXCL = 20
