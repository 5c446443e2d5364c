"""Quorum, intersection and intactness analysis for federated Byzantine agreement systems.

Node sets are ``int`` bitmasks over node indices ``0..n-1``.
"""
from .errors import (DuplicateSlice, EmptySet, EmptySliceSet, ExpansionTooLarge, FbasError, InstanceTooLarge,
                     InvalidDistribution, KTooLarge, MalformedFormula, MembershipViolation, NoQuorumIntersection,
                     NotATrustCluster, ParseError, PartitionInvalid, PreconditionViolation, ResourceLimitExceeded,
                     ThresholdOutOfRange, TooManyMaximalDsets, TooManyQuorums, UnknownNode, ValidationError)
from .definitions import QuorumSliceDefinition, generate_slices, personalize
from .model import (Fbas, GeneralFbas, SimpleFbas, expand_simple, fbas_size, general_from_masks, make_general,
                    make_simple, simple_from_masks)
from .generators import (generate_hierarchy_fbas, generate_org_fbas, generate_symmetric, org_partition,
                         stellar_fbas)
from .trust import build_trust_graph, is_trust_cluster, restrict, scc_partition, strongly_connected_components
from .quorums import (QuorumIntersectionResult, contains_slice, enumerate_min_quorums, enumerate_quorums,
                      greatest_quorum, is_quorum, min_intersection_size, quorum_intersection,
                      quorum_intersection_with_scc_preprocessing, traverse_quorums)
from .intactness import (IntactnessReport, b_quorums, delete_nodes, has_subslice_property, intact_in_cluster,
                         intact_nodes, is_b_intact_set, is_b_quorum, is_dset, symmetric_dsets)
from .probability import (AtMostOne, Explicit, Grouped, GroupedByzantine, Independent, IntactProbability,
                          closed_form_hierarchy_4org, closed_form_symmetric_12_8, intact_probability_exact,
                          intact_probability_grouped, intact_probability_incl_excl, intact_probability_mc)
from .io import FbasDocument, emit_fbas, parse_dimacs, parse_fbas, read_fbas
from .oracles import CnfFormula, reduce_3sat

__version__ = "0.1.0"
