"""Exception types shared across the package."""


class SignedDynError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(SignedDynError):
    """Invalid experiment configuration, flag combination, or input file."""


# -- graph construction ------------------------------------------------------

class SelfLoop(SignedDynError):
    """An edge connects a vertex to itself."""


class DuplicateEdge(SignedDynError):
    """The same undirected edge was supplied more than once."""


class ZeroWeight(SignedDynError):
    """An edge was supplied with weight zero."""


class DisconnectedGraph(SignedDynError):
    """The graph of nonzero weights is not connected."""


class BadSignatureLength(SignedDynError):
    """A switching signature has the wrong length or non-±1 entries."""


class CannotConnect(SignedDynError):
    """Random generation failed to produce a connected graph within the retry budget."""


class NoConvergence(SignedDynError):
    """An iterative procedure exhausted its iteration budget."""


# -- spectra -----------------------------------------------------------------

class NotSymmetric(SignedDynError):
    """A matrix expected to be symmetric is not, beyond tolerance."""


class StepTooLarge(SignedDynError):
    """Discrete step size violates eps * max(degree) < 2."""


class BracketFailure(SignedDynError):
    """Root bracketing for the discrete threshold could not be established."""


# -- frustration -------------------------------------------------------------

class TooLargeForExact(SignedDynError):
    """Vertex count exceeds the exhaustive enumeration cap."""


class FormulaMismatch(SignedDynError):
    """Two mathematically equivalent formulas disagreed beyond tolerance."""


class DegenerateBound(SignedDynError):
    """The effort bound n/(n - 2*eps) is undefined because n - 2*eps <= 0."""


# -- nonlinearity ------------------------------------------------------------

class UnknownKind(SignedDynError):
    """Requested nonlinearity family is not implemented."""


# -- dynamics ----------------------------------------------------------------

class NonFiniteState(SignedDynError):
    """A trajectory produced NaN or infinity (step size too large or blow-up)."""


class MissingPi1d(SignedDynError):
    """Discrete-time threshold was not computed (no step size supplied)."""


# -- sweep -------------------------------------------------------------------

class NoTransition(SignedDynError):
    """The sweep contains no transition of the requested kind."""
