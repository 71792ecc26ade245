"""FCIDUMP fixture generation for the VQE workbench benchmark set."""
