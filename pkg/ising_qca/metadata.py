# -*- coding: utf-8 -*-

"""Default parameters, named parameter sets and exit codes."""

# The bimodal regime of the QCA: Omega = 3 kappa, V = 15 kappa, kappa dt = 0.1.
bimodal_model = {
    "omega": 3.0,
    "v": 15.0,
    "kappa": 1.0,
    "dt": 0.1,
    "n": 10,
    "depth": 10,
}
# J = sigma^-, which generates the training targets.
reference_jump = (0.5, -0.5)
# The starting point of the training runs.
untrained_jump = (-0.15, -1.0)

# Built-in defaults of every configuration section. Keys use dashes as in the
# configuration files.
defaults = {
    "model": dict(bimodal_model),
    "jump": {"a": reference_jump[0], "b": reference_jump[1]},
    "numerics": {
        "chi-mps": 48,
        "chi-mpo": 16,
        "seed": 12345,
        "samples": 2000,
        # 0 takes ISING_QCA_WORKERS or the number of CPUs.
        "workers": 0,
        "discarded-weight-warning": 1.0e-3,
        "engine": "mps",
    },
    "training": {
        "a": untrained_jump[0],
        "b": untrained_jump[1],
        "epsilon": 80.0,
        "repetitions": 100,
        "h": 1.0e-3,
        "reference-a": reference_jump[0],
        "reference-b": reference_jump[1],
        "patience": 5,
        "ensemble-samples": 0,
        "landscape-a-min": -1.0,
        "landscape-a-max": 1.0,
        "landscape-b-min": -1.5,
        "landscape-b-max": 0.5,
        "landscape-points": 41,
    },
    "histogram": {"layer": 8, "bin-width": 0.005, "coarsen": 10},
    "phase-diagram": {
        "closure": "mf",
        "omega-min": 0.0,
        "omega-max": 4.0,
        "v-min": 0.0,
        "v-max": 10.0,
        "points": 100,
        "q": 2,
        "dt-ode": 1.0e-3,
        "t-max": 200.0,
    },
}

engines = ("mps", "dense")
closures = ("mf", "nn")

exit_codes = {
    "success": 0,
    "error": 1,
    "configuration": 2,
    "numerical": 3,
    "validation": 4,
    "gate": 5,
    "channel": 6,
    "symmetry": 7,
    "lindblad": 8,
    "equivalence": 9,
}
