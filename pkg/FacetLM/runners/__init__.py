from .baseline import LanguageModelRunner
from .selection import BasisSelectRunner, SetSelectRunner, BagSelectRunner
from .aspect import UniformAspectRunner, AspectRunner
from .interpolation import InterpolationRunner
