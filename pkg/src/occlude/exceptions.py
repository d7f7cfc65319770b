"""Exception types raised across the package."""


class OccludeError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(OccludeError, ValueError):
    pass


class RangeError(OccludeError, ValueError):
    """A scalar argument lies outside its admissible interval."""


class CycleError(OccludeError, ValueError):
    def __init__(self, members):
        self.members = list(members)
        super().__init__(f"occlusion graph contains a cycle through {self.members}")


class DegenerateBoxError(OccludeError, ValueError):
    """A bounding box covers no cell center at the requested resolution."""


class EmptyPromptError(OccludeError, ValueError):
    pass


class ConfigError(OccludeError, ValueError):
    pass


class SceneParseError(OccludeError, ValueError):
    """The scene file is not well-formed JSON of the expected shape."""


class SceneValidationError(OccludeError, ValueError):
    """The scene file parsed but violates one or more semantic constraints.

    ``issues`` holds ``(path, message)`` pairs, one per violation.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        lines = "; ".join(f"{path}: {msg}" for path, msg in self.issues)
        super().__init__(f"{len(self.issues)} scene violation(s): {lines}")
