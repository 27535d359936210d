#pragma once

#include "aps/comparison.hpp"
#include "aps/dataset_stats.hpp"
#include "aps/difficulty.hpp"
#include "aps/distance.hpp"
#include "aps/error.hpp"
#include "aps/pca.hpp"
#include "aps/query.hpp"
#include "aps/results.hpp"
#include "aps/store.hpp"
#include "aps/types.hpp"
#include "aps/workspace.hpp"
