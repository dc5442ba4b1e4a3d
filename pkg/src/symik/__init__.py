"""Closed-form inverse kinematics from DH tables."""
