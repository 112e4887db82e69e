"""Exception taxonomy shared across the library."""


class QuadlabError(Exception):
    """Base class for all library errors."""


class NearMultiplePole(QuadlabError):
    """Pole clustering below the separation tolerance defeats deflation."""


class PoleOnCircle(QuadlabError):
    """A pole sits within tolerance of the unit circle."""


class BranchAmbiguity(QuadlabError):
    """A fractional power cannot be continued unambiguously."""


class OutsideDomain(QuadlabError):
    """Evaluation point lies outside the map's domain of definition."""


class NoPreimage(QuadlabError):
    """phi(z) = w has no solution in the map domain."""


class AmbiguousPreimage(QuadlabError):
    """phi(z) = w has several solutions in the map domain."""


class NewtonDivergence(QuadlabError):
    """Damped Newton iteration failed to converge."""


class PoleMisplaced(QuadlabError):
    """Faber-transform argument has a pole on the wrong side of the circle."""


class DerivativeOrderOverflow(QuadlabError):
    """Residue formulas support pole orders up to 8 only."""


class InteriorContextUnsupported(QuadlabError):
    """Faber polynomials of positive degree need an exterior context."""


class NotRational(QuadlabError):
    """Operation requires a rational map."""


class NoConvergence(QuadlabError):
    """Inverse-problem solver did not reach its residual target."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonUnivalentSolution(QuadlabError):
    """Solver output fails the univalence check (result still attached)."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NoRoot(QuadlabError):
    """Parameter lies beyond the critical value; no admissible root."""


class BranchViolation(QuadlabError):
    """Candidate roots exist but all violate the branch condition."""


class InconsistentT(QuadlabError):
    """Pole-cancellation and quadrature values of the weighted area disagree."""


class NotApplicable(QuadlabError):
    """Requested family construction is not defined for these parameters."""


class NotSymmetric(QuadlabError):
    """Input lacks the rotational symmetry required by the reduction."""


class BoundaryThroughOrigin(QuadlabError):
    """Boundary approaches the origin closer than the safety margin."""


class MissingSolution(QuadlabError):
    """A member of the requested family sweep could not be solved."""


class TestClassViolation(QuadlabError):
    """Test function is not in the admissible class for this domain."""


class NonFinite(QuadlabError):
    """Integrand evaluated to a non-finite value."""


class ImaginaryLeak(QuadlabError):
    """A quantity that must be real came back with an imaginary part."""


class ProbeOnBoundary(QuadlabError):
    """Cauchy-transform probe sits on the boundary curve."""


class SampleAliasing(QuadlabError):
    """Boundary sampling too coarse to resolve self-intersections."""


class BranchCut(QuadlabError):
    """Argument lies on the Lambert-W branch cut."""


class LambertBranchCut(BranchCut):
    """Schwarz reflection hit the Lambert-W branch cut."""


class InputError(QuadlabError):
    """Malformed user input (CLI / JSON)."""
