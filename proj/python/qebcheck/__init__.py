"""Quantization error bound verification for ReLU networks.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from qebcheck._core import (  # noqa: F401
    Network,
    QuantConfig,
    QuantizedNetwork,
    QuantScheme,
    dnn_forward,
    enumerate_errors,
    export_milp,
    format_network,
    format_scheme,
    load_network,
    load_scheme,
    naive_diff,
    parse_network,
    parse_scheme,
    propagate_interval,
    propagate_symbolic,
    qnn_forward,
    quantization_error,
    quantize_network,
    quantize_value,
    round_nearest,
    verify,
    weights_only_forward,
)

__version__ = "0.1.0"
