from .config import canonical_text, load_config, load_scenario
from .generator import generate_network, read_communities, write_communities
from .metrics import (
    aggregate_bands,
    band_voltages,
    distribution_summary,
    per_unit,
    sample_adopters,
)
from .report import write_report
from .runner import run_comparison, run_sweep
from .store import ResultStore
from .study import run_deviation_study
