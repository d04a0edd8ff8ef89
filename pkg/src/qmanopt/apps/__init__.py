"""Applications: two-qubit gate decomposition and channel tomography."""
