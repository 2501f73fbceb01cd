import warnings

from hypothesis import settings

warnings.filterwarnings("ignore", message=".*threading layer")

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")
