"""Reference values that the `--paper-check` flags compare against."""

# required shots, relative error mode, keyed by (eps, delta); n = 1..5
BUDGET_TABLES = {
    (0.1, 0.5): (278, 1988, 10664, 52408, 246799),
    (0.1, 0.1): (600, 3276, 15814, 73009, 329202),
    (0.01, 0.5): (27726, 198793, 1066306, 5240762, 24679842),
}

# outliers among 200 experiments at eps=0.1, delta=0.5, F=100, n = 1..5
OUTLIER_COUNTS = (25, 4, 0, 0, 0)

# smallest N with at most F outliers, eps=0.1, delta=0.5, F=100
EMPIRICAL_MIN_SHOTS = {
    1: 41, 2: 462, 3: 1961, 4: 5907, 5: 16001, 6: 41401,
    7: 99802, 8: 225206, 9: 511371, 10: 1187631, 11: 2604712, 12: 5669580,
}
MIN_SHOTS_BAND = 0.25

FITS = {"n_log_n": (166.452, 0.5), "linear": (1345.964, 5.0)}

# preparation runtime at n = 10 in seconds, with absolute tolerance; the
# second value is only quoted to about 0.1 us
RUNTIME_N10 = {
    (50e-9, 200e-9): (507.05e-6, 1e-15),
    (56.889e-9, 533.333e-9): (1196.3e-6, 0.2e-6),
}

X2_TABLE = ("000", "000", "001", "011", "101", "111", "111", "111")
X2_OPT_ANCILLAS = 2

BV_EXAMPLES = {("101000", 4, "periodic"): "100010", ("101000", 4, "outlet"): "000010"}

WITNESS_RANK = 7
WITNESS_COORDS = (0, 1, 0, 0, -1, 1, 0, 0)
WITNESS_IMAGE = (0, 0, 1, 0, 0, 1, -1, 0)
