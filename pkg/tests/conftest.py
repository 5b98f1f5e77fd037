import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "dagsattack",
    deadline=None,  # numba JIT warm-up skews the first example
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("dagsattack")

# keep desk-scale solves inside the sandbox memory budget
os.environ.setdefault("DYADIC_MEM_CAP_MB", "3500")
