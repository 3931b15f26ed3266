# -------------------------------
# Constructors producing StochasticKernel values, one module per family:
# - erm.py          (empirical risk minimization, configurable ties)
# - gibbs.py        (exponential weighting of a prior by empirical risk)
# - noisy_erm.py    (argmin of exponentially perturbed empirical risks)
# - two_stage.py    (empirical cover on S_1, ERM on S_2; VC statistics)
# - composition.py  (pre/post-processing chains, adaptive composition)
# -------------------------------
