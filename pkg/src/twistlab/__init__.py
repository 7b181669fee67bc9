"""Exact experiments on Dehn twist cosets: topology probes, homology of
Heegaard splittings, and the Farey graph model of the torus curve graph."""

__version__ = "0.1.0"
