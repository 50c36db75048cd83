"""Game generative networks for relationship inference in signed social graphs."""
from .games import NormalFormGame, find_pure_nash, prisoners_dilemma
from .ggn import (DeviationModel, GgnEdge, GgnGraph, build_dynamic_ggn, build_general_ggn,
                  build_team_ggn, filter_edges)
from .graph import (SignedGraph, karate_graph, karate_with_planted_signs, load_edge_list,
                    make_undirected, sample_subgraph, stats, to_skeleton)
from .inference import PredictionSet, ScoreMatrix, exponential_kernel, predict_signs
from .team_game import TeamGameConfig, TeamPartition, potential, simulate

__version__ = "0.1.0"
