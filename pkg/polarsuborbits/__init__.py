"""
polarsuborbits: suborbits of the last subconstituent of orthogonal dual polar graphs

Provides:
- Finite-field matrix arithmetic over F_q (q odd)
- The graph Lambda and its stabilizer groups G01 and G0
- Classification of vertices into G01-suborbits with witness elements
- Quasi-strongly-regular parameters and the nu = 2 association scheme
- Brute-force orbit oracles and a command-line verifier
"""

__version__ = "1.0.0"
__author__ = "polarsuborbits contributors"
__license__ = "MIT"

from .gf import field_new
from .geometry import space_new
from .lambda_graph import Vertex, VertexTable
from .suborbits import SuborbitLabel, all_labels, classify, representative, suborbit_size

__all__ = [
    'field_new',
    'space_new',
    'Vertex',
    'VertexTable',
    'SuborbitLabel',
    'all_labels',
    'classify',
    'representative',
    'suborbit_size',
]
