#pragma once

#include "evolsym/classifier.hpp"
#include "evolsym/errors.hpp"
#include "evolsym/gallery.hpp"
#include "evolsym/matrix_analysis.hpp"
#include "evolsym/operator.hpp"
#include "evolsym/polynomial.hpp"
#include "evolsym/rational.hpp"
#include "evolsym/sampling.hpp"
#include "evolsym/spectral_solver.hpp"
