"""Safe gain-scheduling control of polytopic LPV systems from data."""
