"""Domain objects, constraints, configuration and support code."""
