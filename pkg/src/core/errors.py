"""exception hierarchy for geometry, maps, transforms and the harness."""


class SpherexError(Exception):
    """base class for all library errors."""


# geometry_core
class GeometryError(SpherexError):
    pass


class NorthPoleSingular(GeometryError):
    pass


class NotOnSphere(GeometryError):
    pass


class PassesThroughNorthPole(GeometryError):
    pass


class DegenerateSphere(GeometryError):
    pass


class OutsideUnitBall(GeometryError):
    pass


class InvalidSubsphere(GeometryError):
    pass


# surfaces
class SurfaceError(SpherexError):
    pass


class DegenerateTangent(SurfaceError):
    pass


class NoAxisCrossing(SurfaceError):
    pass


class EmptyBoundary(SurfaceError):
    pass


class NotContained(SurfaceError):
    pass


# surface_maps
class MapError(SpherexError):
    pass


class OnSigma0(MapError):
    """tangent plane passes through the origin or the north pole."""


class OnS0(MapError):
    """point lies on the sphere S0 = S(e_{n+1}/2, 1/2)."""


class OriginUndefined(MapError):
    """the origin does not determine a hyperplane."""


class OnSingularSet(MapError):
    pass


class DenominatorVanishes(MapError):
    pass


class NotRegular(MapError):
    pass


# transforms
class TransformError(SpherexError):
    pass


class DomainClip(TransformError):
    pass


# harness
class HarnessError(SpherexError):
    pass


class ConfigInvalid(HarnessError):
    def __init__(self, message: str, diagnostics: list[str] | None = None):
        self.diagnostics = diagnostics or []
        detail = "; ".join(self.diagnostics)
        super().__init__(f"{message}: {detail}" if detail else message)


class PreconditionUnmet(HarnessError):
    pass
