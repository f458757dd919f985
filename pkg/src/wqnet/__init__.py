"""wqnet: water quality classification and WQI regression pipeline.

From-scratch MLP classifier and Conv1D+LSTM hybrid regressor with exact
analytic gradients, SMOTE rebalancing, cross-validation machinery, a JSON
prediction service, and a CLI driving the whole lifecycle.
"""
from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
