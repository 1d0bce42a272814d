"""Phase-modulated frequency-permutation waveforms for joint radar and communications."""

__version__ = "0.1.0"
