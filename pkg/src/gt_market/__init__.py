"""Pathwise equity-premium and CAPM analysis on positive price paths."""
