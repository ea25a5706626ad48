import pytest

from zenopol.backends import default_backend_name
from zenopol.precision import PrecisionContext

try:
    import gmpy2  # noqa: F401

    BACKENDS = ["gmpy2", "mpmath"]
except ImportError:
    BACKENDS = ["mpmath"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def ctx(backend):
    return PrecisionContext(40, backend=backend)


@pytest.fixture
def default_ctx():
    return PrecisionContext(40, backend=default_backend_name())
