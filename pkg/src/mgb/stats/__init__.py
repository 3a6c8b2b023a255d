from .info import (auc_f1_curve, binary_entropy, entropy, equal_frequency_bins,
                   mi_binned, quantile)
from .oracles import (JointTable, label_dependent_table, mcar_table,
                      monotone_mar_table, random_mar_table, random_xy,
                      verify_theorem1, verify_theorem2)

__all__ = [
    "auc_f1_curve", "binary_entropy", "entropy", "equal_frequency_bins",
    "mi_binned", "quantile", "JointTable", "label_dependent_table",
    "mcar_table", "monotone_mar_table", "random_mar_table", "random_xy",
    "verify_theorem1", "verify_theorem2",
]
