#pragma once

#include "housedict/baselines.hpp"
#include "housedict/csv.hpp"
#include "housedict/errors.hpp"
#include "housedict/estimators.hpp"
#include "housedict/experiment.hpp"
#include "housedict/householder.hpp"
#include "housedict/instance_io.hpp"
#include "housedict/metrics.hpp"
#include "housedict/plot.hpp"
#include "housedict/random.hpp"
#include "housedict/synthesis.hpp"
