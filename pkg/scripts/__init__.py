"""netlearn commands (optimize, simulate, fit, gen-instance, compare)."""
