"""Test suite for the twistkit library and command line."""
