"""Flip graphs of ideal triangulations: arcs, simultaneous flips, combing, connectivity."""
from .arcs import Arc, Multiarc, intersection_of_arcs, make_multiarc, reduce_arc, track_many
from .combing import CombingResult, check_lipschitz, comb_along
from .connectivity import (ArcAdjacencyGraph, ColorDecomposition, ComponentDecision, UnboundedWitness,
                           arc_adjacency_graph, color_decomposition, construct_path,
                           decide_same_component, flip_distance_bounds, mutual_intersection_bound)
from .errors import FlipGraphError
from .flips import (PathCertificate, bfs_ball, bfs_distance, neighbors, relative_arcs,
                    verify_certificate)
from .infinite import (Affine, ClosedCurve, Constant, EventuallyPeriodic, Explicit,
                       PeriodicTriangulation, TwistProfile, build_flute, decide_component_profiles,
                       dehn_twist_arcs, farey_window, twisted_family)
from .quads import FlipMove, apply_simultaneous_flip
from .triangulation import (Triangulation, build_from_gluing, canonical_form, generator_polygon,
                            punctured_torus)

__version__ = "0.1.0"
