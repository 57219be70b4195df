from .admm import dual_update, individual_injections, run_admm
from .centralized import centralized_oracle, cost_deviation, schedule_count
