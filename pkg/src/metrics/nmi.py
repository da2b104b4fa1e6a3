"""
Normalized mutual information between two partitions.

NMI = 2 I(X, Y) / (H(X) + H(Y)) with natural logarithms and p(x) = |x| / n,
which is scikit-learn's arithmetic normalisation. Two single-community
partitions score 1.
"""
from sklearn.metrics import normalized_mutual_info_score

from src.core.errors import PartitionMismatchError
from src.core.graph import Partition


def nmi(x: Partition, y: Partition) -> float:
    if x.node_count != y.node_count:
        raise PartitionMismatchError(
            f"partitions cover different node sets ({x.node_count} vs {y.node_count} nodes)")
    return labels_nmi(x.labels, y.labels)


def labels_nmi(x, y) -> float:
    if x is y:
        return 1.0
    score = normalized_mutual_info_score(x, y, average_method="arithmetic")
    return float(min(max(score, 0.0), 1.0))
