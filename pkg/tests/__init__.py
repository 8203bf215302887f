"""
Test suite for reflectsim.

Unit tests cover the wire codec, node state machine and transport;
integration tests run whole scenarios and the command-line runner.
"""
