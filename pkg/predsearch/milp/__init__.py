from predsearch.milp.dense import DenseForm, dense_form, objective_value
from predsearch.milp.feasibility import check_feasible, make_solution
from predsearch.milp.mps import parse_mps, read_mps_file, write_mps, write_mps_file
