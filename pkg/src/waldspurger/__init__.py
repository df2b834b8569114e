"""Quaternionic modular forms, theta lifts and central L-values."""
