#pragma once

#include "qsig/asymptotics.hpp"
#include "qsig/bandwidth.hpp"
#include "qsig/bootstrap.hpp"
#include "qsig/cdf_estimator.hpp"
#include "qsig/csv.hpp"
#include "qsig/dataset.hpp"
#include "qsig/errors.hpp"
#include "qsig/kernels.hpp"
#include "qsig/math.hpp"
#include "qsig/rearrangement.hpp"
#include "qsig/rng.hpp"
#include "qsig/simulation.hpp"
#include "qsig/test_process.hpp"
