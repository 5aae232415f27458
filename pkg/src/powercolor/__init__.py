"""Simulator for coloring and MIS algorithms on power graphs in the CONGEST model."""

from .engine import Bandwidth, Message, Network, RoundTrace, bandwidth_mode
from .graph import Graph, gen_graph, load_graph, save_graph

__all__ = [
    "Bandwidth",
    "Graph",
    "Message",
    "Network",
    "RoundTrace",
    "bandwidth_mode",
    "gen_graph",
    "load_graph",
    "save_graph",
]
__version__ = "0.1.0"
