#pragma once

#include <ripgf/analytics.hpp>
#include <ripgf/model.hpp>
#include <ripgf/numeric.hpp>
#include <ripgf/pgf.hpp>
