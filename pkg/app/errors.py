"""Exception hierarchy for histkit"""


class HistkitError(ValueError):
    """Base class for every error raised by the library"""


class LabelError(HistkitError):
    """Qubit label sets do not fit the requested operation"""


class ShapeError(HistkitError):
    """Array shape does not match the qubit labels"""


class NotHermitianError(HistkitError):
    """Matrix expected to be Hermitian is not"""


class NotPSDError(HistkitError):
    """Matrix expected to be positive semidefinite is not"""


class NotDensityError(HistkitError):
    """Operator is not a valid (normalized) density matrix"""


class NotNormalizedError(HistkitError):
    """State vector expected to have unit norm does not"""


class NotUnitaryError(HistkitError):
    """Operator expected to be unitary is not"""


class ParameterError(HistkitError):
    """Physical parameter outside its domain"""


class DegeneratePostselectionError(HistkitError):
    """Every readout sector has vanishing weight"""

    def __init__(self, total_weight: float):
        super().__init__(f"postselection probability vanishes (total weight {total_weight:.3e})")
        self.total_weight = total_weight
