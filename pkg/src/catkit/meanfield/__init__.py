"""Mean-field free energies: models, critical points, Taylor jets and phase diagrams."""
