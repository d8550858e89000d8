#pragma once

#include "polygauss/scalar.hpp"
#include "polygauss/numerics.hpp"
#include "polygauss/high_precision.hpp"
#include "polygauss/poly.hpp"
#include "polygauss/gaussian.hpp"
#include "polygauss/kernel.hpp"
#include "polygauss/wick.hpp"
#include "polygauss/spectral.hpp"
#include "polygauss/nystrom.hpp"
#include "polygauss/entangle.hpp"
#include "polygauss/fixtures.hpp"
