import numpy as np
import pydantic


class _RevsModelConfig:

    # Disallow adding fields. Files and configs with unknown keys are errors,
    # not silently ignored.
    extra = pydantic.Extra.forbid

    # Value types are shared between threads during ADMM iterations.
    allow_mutation = False

    # Solver results carry numpy arrays.
    arbitrary_types_allowed = True

    json_encoders = {
        np.ndarray: lambda array: array.tolist(),
    }


class RevsModel(pydantic.BaseModel):

    """Common state for all value types of the package."""

    Config = _RevsModelConfig

    # Overrides:
    #
    # - 'dict' and 'json' default to excluding null values.

    def dict(self, *, exclude_none = True, **opts):
        return super().dict(exclude_none = exclude_none, **opts)


    def json(self, *, exclude_none = True, **opts):
        return super().json(exclude_none = exclude_none, **opts)
