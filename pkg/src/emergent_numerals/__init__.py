"""Emergent numeral systems from reinforcement-learning signaling games."""
