"""Simulation of a CSFQ-transmon two-qubit device under cross-resonance driving.

From device parameters alone the package reproduces qubit spectra versus
flux, static and dynamic ZZ interactions, echoed-CR rates, two-qubit gate
error including decoherence and classical crosstalk, and randomized
benchmarking, with a CLI that emits CSV tables and matplotlib figures.
"""

__version__ = "0.1.0"
