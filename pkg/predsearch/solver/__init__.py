from predsearch.solver.branch_bound import BranchAndBound, solve_milp
from predsearch.solver.brute_force import MAX_BINARIES, brute_force, enumerate_feasible
from predsearch.solver.pool import PoolCollector
from predsearch.solver.simplex import LpResult, LpStatus, solve_lp
