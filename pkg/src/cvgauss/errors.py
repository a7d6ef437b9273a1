"""Exception types separating structural, physical, and feasibility failures."""


class PhysicalityError(ValueError):
    """A state, channel, or map violates a physical constraint.

    Raised when an object is structurally well-formed (correct shapes,
    symmetric where required) but fails a physical matrix inequality such as
    the uncertainty relation or the complete-positivity condition.
    """


class InfeasibleError(ValueError):
    """A request is well-formed but cannot be carried out.

    Examples: pure-state analysis of a mixed state, or a Fock cutoff too
    small to hold the requested state within the admissible tail mass.
    """
