"""Cell attachments to simply connected spaces: loop-space homology and semi-inertness
from a presented Lie model."""

__version__ = "0.1.0"
