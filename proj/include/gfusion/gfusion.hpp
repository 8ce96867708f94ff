#pragma once

#include "gfusion/core.hpp"
#include "gfusion/errors.hpp"
#include "gfusion/family.hpp"
#include "gfusion/frame.hpp"
#include "gfusion/pair.hpp"
#include "gfusion/perturbation.hpp"
#include "gfusion/resolution.hpp"
#include "gfusion/sampling.hpp"
#include "gfusion/tolerances.hpp"
