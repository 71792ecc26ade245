"""Desk-scale VQE workbench: exact statevector kernels, adaptive-ansatz
drivers, excited-state solvers, an FCI oracle, and a benchmark harness."""

__version__ = "0.1.0"
