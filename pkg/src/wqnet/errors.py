"""Exception types raised across the wqnet pipeline.

Every error carries enough structure (row, column, node id, ...) for a
caller to report the offending location without string parsing.
"""


class WqnetError(Exception):
    """Base class for all wqnet errors."""


# --- data ingestion ---------------------------------------------------------

class MissingColumn(WqnetError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"required column {column!r} is missing from the header")


class NonNumericCell(WqnetError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"cell at data row {row}, column {column!r} is not a finite number: {value!r}")


class EmptyFile(WqnetError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"file {path} has no data rows")


class NonFiniteInput(WqnetError):
    pass


# --- scaling and splitting --------------------------------------------------

class ZeroVariance(WqnetError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column!r} has zero variance; cannot standardize")


class TooFewRows(WqnetError):
    pass


class DimensionMismatch(WqnetError):
    pass


class ClassTooSmall(WqnetError):
    def __init__(self, code: int, count: int, needed: int):
        self.code = code
        self.count = count
        super().__init__(f"class {code} has {count} samples, needs at least {needed}")


class NotClassification(WqnetError):
    pass


# --- network graph ----------------------------------------------------------

class InvalidGraph(WqnetError):
    pass


class ShapeMismatch(WqnetError):
    def __init__(self, node_id: str, detail: str):
        self.node_id = node_id
        super().__init__(f"shape mismatch at node {node_id!r}: {detail}")


class StaleCache(WqnetError):
    pass


# --- losses and metrics -----------------------------------------------------

class LengthMismatch(WqnetError):
    pass


class Empty(WqnetError):
    pass


class EmptyDataset(WqnetError):
    pass


class BadProbabilityRow(WqnetError):
    def __init__(self, row: int, detail: str):
        self.row = row
        super().__init__(f"row {row} is not a probability vector: {detail}")


class CodeOutOfRange(WqnetError):
    pass


class EmptyMatrix(WqnetError):
    pass


class ConstantObserved(WqnetError):
    pass


class ClassSmallerThanK(WqnetError):
    def __init__(self, code: int, count: int, k: int):
        self.code = code
        super().__init__(f"class {code} has {count} samples, fewer than k={k} folds")


# --- model building and artifacts -------------------------------------------

class BadArity(WqnetError):
    pass


class InputTooShort(WqnetError):
    pass


class WrongTask(WqnetError):
    def __init__(self, expected: str, actual: str):
        self.expected = expected
        self.actual = actual
        super().__init__(f"WrongTask: artifact task is {actual!r}, operation needs {expected!r}")


class CorruptBlob(WqnetError):
    pass


class UnknownVersion(WqnetError):
    pass


class ManifestGraphMismatch(WqnetError):
    pass
