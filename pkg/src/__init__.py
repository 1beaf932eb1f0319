# Interface estimation for a two-material insulated bar
__version__ = "1.0.0"
__description__ = "Estimate the interface position in a two-material bar from one noisy heat-flux measurement"
