#pragma once

#include "diffeo/dynamics.hpp"
#include "diffeo/error.hpp"
#include "diffeo/expression.hpp"
#include "diffeo/exterior.hpp"
#include "diffeo/jet.hpp"
#include "diffeo/lie_group.hpp"
#include "diffeo/linalg.hpp"
#include "diffeo/plaque.hpp"
#include "diffeo/smooth_map.hpp"
#include "diffeo/space.hpp"
#include "diffeo/tangent.hpp"
