"""Exception types raised across the pipeline."""


class SteatoError(Exception):
    """Base class for all pipeline errors."""


class DecodeError(SteatoError, ValueError):
    pass


class InvalidPolygon(SteatoError, ValueError):
    pass


class InvalidDimensions(SteatoError, ValueError):
    pass


class ManifestParseError(SteatoError, ValueError):
    def __init__(self, row, message):
        self.row = row
        super().__init__(f"manifest row {row}: {message}")


class DuplicatePatientId(SteatoError, ValueError):
    def __init__(self, patient_id, row):
        self.patient_id = patient_id
        self.row = row
        super().__init__(f"duplicate patient_id {patient_id!r} at row {row}")


class DimensionMismatch(SteatoError, ValueError):
    pass


class EmptyVeinMask(SteatoError, ValueError):
    pass


class InvalidBinCount(SteatoError, ValueError):
    pass


class InvalidConfig(SteatoError, ValueError):
    pass


class NoPatches(SteatoError, ValueError):
    pass


class EmptyDataset(SteatoError, ValueError):
    pass


class TooFewSamples(SteatoError, ValueError):
    pass


class EmptyCluster(SteatoError, ValueError):
    pass


class SingleClassTraining(SteatoError, ValueError):
    pass


class NonConvergenceWarning(UserWarning):
    """SMO hit its iteration cap with KKT violations left; the best iterate is kept."""


class LengthMismatch(SteatoError, ValueError):
    pass


class EmptyConfusion(SteatoError, ValueError):
    pass


class TooFewPerClass(SteatoError, ValueError):
    pass


class MissingMask(SteatoError, KeyError):
    def __init__(self, patient_id, source):
        self.patient_id = patient_id
        self.source = source
        super().__init__(f"patient {patient_id!r} has no masks in source {source!r}")

    def __str__(self):
        return self.args[0]


class DegenerateData(SteatoError, ValueError):
    pass


class InvalidSpec(SteatoError, ValueError):
    pass


class PipelineError(SteatoError):
    """Wraps a module error with the patient and stage it occurred in."""

    def __init__(self, stage, message, patient_id=None, path=None):
        self.stage = stage
        self.patient_id = patient_id
        self.path = path
        self.message = message
        super().__init__(message)

    def to_dict(self):
        return {
            "error": self.message,
            "stage": self.stage,
            "patient_id": self.patient_id,
            "path": self.path,
        }
