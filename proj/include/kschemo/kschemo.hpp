#pragma once

#include "kschemo/config.hpp"
#include "kschemo/diagnostics.hpp"
#include "kschemo/grid.hpp"
#include "kschemo/io.hpp"
#include "kschemo/kernel_checks.hpp"
#include "kschemo/kernels.hpp"
#include "kschemo/linsolve.hpp"
#include "kschemo/model.hpp"
#include "kschemo/run.hpp"
#include "kschemo/solver.hpp"
#include "kschemo/sweep.hpp"
