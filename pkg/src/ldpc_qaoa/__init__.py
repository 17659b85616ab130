"""Belief-propagation and QAOA decoders for short LDPC codes."""
from .bp import BpConfig, BpResult, bp_decode
from .channel import ChannelParams, awgn_transmit, bpsk_modulate, llr_from_received
from .energy import DecodingHamiltonian, build_energy_table, brute_force_min, ml_codeword, total_energy
from .gf2 import LinearCode, ParityCheckMatrix, build_tanner_graph, builtin_code, syndrome
from .qaoa import QaoaConfig, QaoaParams, optimize, qaoa_decode

__version__ = "0.1.0"
