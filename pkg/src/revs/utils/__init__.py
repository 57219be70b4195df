from .run_ids import RunIds
