"""lbx: covers, views and the unfold-and-mix adversary for maximal fractional matchings."""

from .errors import LbxError
from .graph_core import ColoredMultigraph, Edge, build_graph, decode_graph, encode_graph, make_graph
from .fracmatch import FractionalMatching, check_maximal_fm, node_weight
from .locality import LocalAlgorithm, LocalOutput, assemble_fm, canonical_code, evaluate, neighborhood
from .covers import factor_graph, loopiness, random_simple_lift, universal_cover_ball, unfold_loop, verify_covering
from .algo_zoo import greedy_by_color, resolve, truncate, uniform_regular
from .adversary import run_adversary, verify_pair

__version__ = "0.1.0"
