// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include "hiercpt/bayes_net.hpp"
#include "hiercpt/common.hpp"
#include "hiercpt/count_table.hpp"
#include "hiercpt/csv.hpp"
#include "hiercpt/dataset.hpp"
#include "hiercpt/estimators.hpp"
#include "hiercpt/experiments.hpp"
#include "hiercpt/hier_posterior.hpp"
#include "hiercpt/mse_lab.hpp"
#include "hiercpt/oracle_suite.hpp"
#include "hiercpt/parallel.hpp"
#include "hiercpt/quadrature.hpp"
#include "hiercpt/report.hpp"
#include "hiercpt/rng.hpp"
#include "hiercpt/tan.hpp"
