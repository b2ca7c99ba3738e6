#pragma once

#include "curvematch/curve.hpp"
#include "curvematch/elastic.hpp"
#include "curvematch/errors.hpp"
#include "curvematch/generate.hpp"
#include "curvematch/geodesic.hpp"
#include "curvematch/io.hpp"
#include "curvematch/manifold.hpp"
#include "curvematch/matching.hpp"
#include "curvematch/svg.hpp"
