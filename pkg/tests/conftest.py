import pytest
from hypothesis import HealthCheck, settings

from systolizer.tools.coxeter import CoxeterSystem, build_coxeter_ball
from systolizer.tools.systolize import systolize_rank3, systolize_rank4

PROPERTY_SETTINGS = settings(
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)

# Case I: ab=2, ac=m>=6, ad=k>=3, bc=k'>=3, bd=m'>=6
CASE_ONE = (2, 6, 3, 3, 6, 3)
# Case II: ab=2, ac>=6, ad>=3, bc>=6, bd>=3
CASE_TWO = (2, 6, 3, 6, 3, 3)
# Case I with ad=4, so c-vertices around an ad edge can be acquaintances
CASE_ONE_WIDE = (2, 6, 4, 3, 6, 3)


@pytest.fixture(scope="session")
def system_236():
    return CoxeterSystem.triangle(2, 3, 6)


@pytest.fixture(scope="session")
def ball_236(system_236):
    return build_coxeter_ball(system_236, 9)


@pytest.fixture(scope="session")
def systolized_236(ball_236):
    return systolize_rank3(ball_236)


@pytest.fixture(scope="session")
def case_one_system():
    return CoxeterSystem.from_exponents(CASE_ONE)


@pytest.fixture(scope="session")
def case_one_ball(case_one_system):
    return build_coxeter_ball(case_one_system, 8)


@pytest.fixture(scope="session")
def case_one_systolized(case_one_ball):
    return systolize_rank4(case_one_ball)


@pytest.fixture(scope="session")
def case_two_ball():
    return build_coxeter_ball(CoxeterSystem.from_exponents(CASE_TWO), 8)


@pytest.fixture(scope="session")
def wide_ball():
    return build_coxeter_ball(CoxeterSystem.from_exponents(CASE_ONE_WIDE), 5)
