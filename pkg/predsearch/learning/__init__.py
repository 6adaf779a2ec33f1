from predsearch.learning.features import featurize
from predsearch.learning.gnn import GnnModel, backward, entropy_bound, forward, logit_loss, loss
from predsearch.learning.labels import (
    collect_sample,
    exact_marginals,
    make_labeled_sample,
    marginals,
    solution_weights,
)
from predsearch.learning.optim import Adam
from predsearch.learning.train import dataset_loss, train
