"""Exception hierarchy.

Everything a user can trigger with bad input derives from :class:`DataError`;
the CLI maps those to exit code 2.
"""


class DataError(Exception):
    pass


# lexicon parsing
class MalformedSynset(DataError):
    def __init__(self, message, offset, file_name=None):
        self.offset = offset
        self.file_name = file_name
        where = f"{file_name}: " if file_name else ""
        super().__init__(f"{where}{message} (byte offset {offset})")


class EmptyFile(DataError):
    pass


class DuplicateFileName(DataError):
    pass


# attribute index
class CycleDetected(DataError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("hypernym cycle: " + " -> ".join(self.cycle))


# dedup
class OverlappingClassLabels(DataError):
    pass


class DuplicateClassLabel(DataError):
    pass


# parallel runtime
class WaveTimeout(RuntimeError):
    pass


class BarrierError(RuntimeError):
    pass


class DedupWorkerFailure(RuntimeError):
    def __init__(self, round_no, phase, wave, item, detail):
        self.round_no = round_no
        self.phase = phase
        self.wave = wave
        self.item = item
        self.detail = detail
        super().__init__(
            f"worker failed in round {round_no} {phase} wave {wave} item {item}: {detail}"
        )


# classifiers
class EmptyDataset(DataError):
    pass


class EmptyClass(DataError):
    pass


class LengthMismatch(DataError):
    pass


class UnknownLabel(DataError):
    pass


# io
class MissingDirectory(DataError):
    pass


class NoCorpusFiles(DataError):
    pass


class EmptyLabelUniverse(DataError):
    pass


class IoFailure(DataError):
    pass


class ConfigError(DataError):
    pass


class PipelineError(Exception):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the error."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")
