"""Exception hierarchy shared by all modules."""


class SpecMergeError(Exception):
    """Base class; the CLI maps any subclass to exit status 1."""


class CorpusError(SpecMergeError):
    pass


class ZeroNormVector(SpecMergeError):
    pass


class EigensolverFailure(SpecMergeError):
    pass


class DegenerateSpectrum(SpecMergeError):
    pass


class DomainError(SpecMergeError):
    pass


class MethodMismatch(SpecMergeError):
    pass


class TooFewDocuments(SpecMergeError):
    pass


class DegenerateCluster(SpecMergeError):
    pass


class EmptyClass(SpecMergeError):
    pass
