#pragma once

#include "subemb/complexity.hpp"
#include "subemb/ensembles.hpp"
#include "subemb/error.hpp"
#include "subemb/experiments.hpp"
#include "subemb/isometry.hpp"
#include "subemb/matrix_io.hpp"
#include "subemb/oracles.hpp"
#include "subemb/parallel.hpp"
#include "subemb/random.hpp"
#include "subemb/stats.hpp"
#include "subemb/testsets.hpp"
#include "subemb/version.hpp"
