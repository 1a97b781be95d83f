"""tolerance constants shared by the geometry, transforms and tests."""

# distances, residuals of geometric identities
GEOM_TOL = 1e-10

# relative agreement of two quadratures of the same integral
QUAD_RELTOL = 1e-6

# unit-norm checks and singular denominators
UNIT_TOL = 1e-12
