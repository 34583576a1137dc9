#pragma once

// Umbrella header.

#include "wpgd/version.hpp"
#include "wpgd/error.hpp"
#include "wpgd/random.hpp"
#include "wpgd/parallel.hpp"

#include "wpgd/nn/tensor.hpp"
#include "wpgd/nn/mlp.hpp"
#include "wpgd/nn/loss.hpp"
#include "wpgd/nn/example.hpp"
#include "wpgd/nn/checkpoint.hpp"

#include "wpgd/ot/cost_matrix.hpp"
#include "wpgd/ot/cost_matrix_io.hpp"
#include "wpgd/ot/distribution.hpp"
#include "wpgd/ot/transport_plan.hpp"
#include "wpgd/ot/exact.hpp"
#include "wpgd/ot/sinkhorn.hpp"
#include "wpgd/ot/wasserstein_loss.hpp"

#include "wpgd/attacks/config.hpp"
#include "wpgd/attacks/projection.hpp"
#include "wpgd/attacks/pgd.hpp"

#include "wpgd/data/dataset.hpp"
#include "wpgd/data/synthetic.hpp"
#include "wpgd/data/mnist.hpp"

#include "wpgd/train/config.hpp"
#include "wpgd/train/optimizer.hpp"
#include "wpgd/train/trainer.hpp"
#include "wpgd/train/unbalance.hpp"

#include "wpgd/metrics/confusion.hpp"
#include "wpgd/metrics/gap.hpp"
#include "wpgd/metrics/score.hpp"
#include "wpgd/metrics/entropy_stats.hpp"
#include "wpgd/metrics/boundary.hpp"
