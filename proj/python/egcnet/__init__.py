"""Time-varying opinion-network analysis.

Chain rank, smallest steering coalitions, interaction-graph bounds,
polytope geometry and jet decompositions over piecewise-constant chains.
Agent indices in inputs and outputs are 1-based, matching the file
formats of the command-line tool.
"""

from ._egcnet import *  # noqa: F401,F403
from ._egcnet import __version__  # noqa: F401
