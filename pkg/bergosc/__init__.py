from .config import SCHEMA, Thresholds, __version__
from .errors import BergoscError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig
from .symbols import MatrixSymbol, Symbol, example45, parse_symbol
