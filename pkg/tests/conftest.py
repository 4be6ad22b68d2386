import math

import pytest

from symkernel import (
    assemble,
    flat_riemann,
    hyperbolic_riemann,
    product_riemann,
    sphere_riemann,
)


@pytest.fixture(scope="session")
def s2():
    return assemble(sphere_riemann(2, 1.0))


@pytest.fixture(scope="session")
def h2():
    return assemble(hyperbolic_riemann(2, 1.0))


@pytest.fixture(scope="session")
def s3():
    return assemble(sphere_riemann(3, 1.0))


@pytest.fixture(scope="session")
def s4():
    return assemble(sphere_riemann(4, 1.0))


@pytest.fixture(scope="session")
def h3():
    return assemble(hyperbolic_riemann(3, 1.0))


@pytest.fixture(scope="session")
def s2xh2():
    return assemble(
        product_riemann([sphere_riemann(2, 1.0), hyperbolic_riemann(2, 1.0)])
    )


@pytest.fixture(scope="session")
def s2xline():
    return assemble(product_riemann([sphere_riemann(2, 1.0), flat_riemann(1)]))


@pytest.fixture(scope="session")
def catalog(s2, h2, s3, s4, h3, s2xh2, s2xline):
    return {
        "S2": s2,
        "H2": h2,
        "S3": s3,
        "S4": s4,
        "H3": h3,
        "S2xH2": s2xh2,
        "S2xR": s2xline,
    }


@pytest.fixture(scope="session")
def sphere_area():
    return 4.0 * math.pi
