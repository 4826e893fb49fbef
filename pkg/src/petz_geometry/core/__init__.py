"""Core numerical modules: spectra, states, monotone functions, metrics, channels, actions."""
