from typing import Annotated

import inflect
import numpy as np
import numpy.typing as npt
from pydantic import Field, FiniteFloat

Pluralizer = inflect.engine

Array = npt.NDArray[np.float64]

Vector3 = Annotated[list[FiniteFloat], Field(min_length=3, max_length=3)]
Vector6 = Annotated[list[FiniteFloat], Field(min_length=6, max_length=6)]
