from predsearch.harness.bks import compute_bks, regap, update_bks
from predsearch.harness.evaluate import aggregate, curves, evaluate, run_method
from predsearch.harness.metrics import gain, gaps
from predsearch.harness.perturb import perturb_experiment
from predsearch.harness.reliability import label_distance_experiment
