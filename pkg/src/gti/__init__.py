"""Graph topology interpolation.

Decomposes an undirected graph into hierarchical layers (Louvain), learns
each layer's block topology with a small adversarial network, fuses the
layer reconstructions into a weighted adjacency matrix, and thresholds the
weights into nested edge stages that trace a reconstruction order.
"""

__version__ = "0.1.0"

from gti.graph import Graph

__all__ = ["Graph", "__version__"]
